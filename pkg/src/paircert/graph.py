"""Finite graphs stored dense, and their Laplacians.

A graph is a vertex count together with a symmetric 0/1 adjacency matrix
(zero diagonal) and the integer degree sequence. The Laplacian A - D_G is
assembled in integer arithmetic and cast to float once, so its row sums
are exactly zero. Everything here is sized for dense factorization
downstream; sparse storage is deliberately out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EdgeListError(ValueError):
    """Raised when an edge-list document cannot be parsed."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices 0..n-1.

    Instances are immutable (the arrays are marked read-only) and safe to
    share across threads.
    """

    n: int
    adjacency: np.ndarray  # (n, n) int64, symmetric, 0/1, zero diagonal
    degrees: np.ndarray  # (n,) int64, row sums of adjacency

    def __post_init__(self):
        a = self.adjacency
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        if a.shape != (self.n, self.n):
            raise ValueError(f"adjacency shape {a.shape} does not match n={self.n}")
        if not np.issubdtype(a.dtype, np.integer):
            raise ValueError("adjacency must be an integer array")
        if np.any((a != 0) & (a != 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(np.diagonal(a) != 0):
            raise ValueError("adjacency must have zero diagonal")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if not np.array_equal(self.degrees, a.sum(axis=1)):
            raise ValueError("degrees must equal adjacency row sums")
        a.setflags(write=False)
        self.degrees.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.n, self.adjacency.tobytes()))

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2


def _graph_from_adjacency(adjacency: np.ndarray) -> Graph:
    adjacency = np.ascontiguousarray(adjacency, dtype=np.int64)
    degrees = adjacency.sum(axis=1)
    return Graph(n=adjacency.shape[0], adjacency=adjacency, degrees=degrees)


def build_torus_cayley(m: int) -> Graph:
    """4-regular discrete torus on m*m vertices.

    Vertex (a, b) gets index a*m + b and is adjacent to (a±1 mod m, b) and
    (a, b±1 mod m). Requires m >= 3: below that the four generators collide
    and would produce parallel edges or loops.
    """
    if m < 3:
        raise ValueError(f"torus size must be >= 3, got {m}")
    n = m * m
    adjacency = np.zeros((n, n), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            i = a * m + b
            for da, db in ((1, 0), (m - 1, 0), (0, 1), (0, m - 1)):
                j = ((a + da) % m) * m + (b + db) % m
                adjacency[i, j] = 1
    return _graph_from_adjacency(adjacency)


def from_edge_list(text: str) -> Graph:
    """Parse an edge-list document into a Graph.

    Format: first line is the vertex count n; every following line is an
    edge "u v" with 0 <= u, v < n and u != v. Whitespace-separated ASCII
    decimal; LF or CRLF both fine; blank lines are skipped; duplicate
    edges are ignored. Errors name the offending 1-based line number.
    """
    lines = text.splitlines()
    header_line = None
    n = None
    for lineno, raw in enumerate(lines, start=1):
        if raw.strip() == "":
            continue
        header_line = lineno
        tokens = raw.split()
        if len(tokens) != 1:
            raise EdgeListError(f"line {lineno}: expected a single vertex count, got {raw!r}")
        try:
            n = int(tokens[0])
        except ValueError:
            raise EdgeListError(f"line {lineno}: vertex count {tokens[0]!r} is not an integer") from None
        if n < 1:
            raise EdgeListError(f"line {lineno}: vertex count must be positive, got {n}")
        break
    if n is None:
        raise EdgeListError("empty document: missing vertex count line")

    adjacency = np.zeros((n, n), dtype=np.int64)
    for lineno, raw in enumerate(lines, start=1):
        if lineno <= header_line or raw.strip() == "":
            continue
        tokens = raw.split()
        if len(tokens) != 2:
            raise EdgeListError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListError(f"line {lineno}: vertices must be integers, got {raw!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListError(f"line {lineno}: vertex out of range 0..{n - 1} in {raw!r}")
        if u == v:
            raise EdgeListError(f"line {lineno}: loop edge {u}-{v} not allowed")
        adjacency[u, v] = 1
        adjacency[v, u] = 1
    return _graph_from_adjacency(adjacency)


def laplacian(graph: Graph) -> np.ndarray:
    """Dense Laplacian A - D_G as float64.

    The subtraction happens on the integer arrays, so every row sums to
    exactly zero after the cast.
    """
    lap_int = graph.adjacency - np.diag(graph.degrees)
    return lap_int.astype(np.float64)
