from __future__ import annotations

import numpy as np
import pytest

from paircert.functions import BernoulliFunction, ResolventParams, ResolventTraceFunction
from paircert.graph import Graph, build_torus_cayley, laplacian


class LambdaFunction(BernoulliFunction):
    """Adapter turning a plain callable into a BernoulliFunction."""

    def __init__(self, n, func):
        super().__init__(n)
        self._func = func

    def evaluate(self, eps):
        return self._func(np.asarray(eps))


class ConstantFunction(BernoulliFunction):
    def __init__(self, n, value):
        super().__init__(n)
        self.value = value

    def evaluate(self, eps):
        return self.value


def random_connected_graph(rng: np.random.Generator, n: int, extra_edge_prob: float = 0.3) -> Graph:
    """Uniform random attachment tree plus independent extra edges."""
    adjacency = np.zeros((n, n), dtype=np.int64)
    for v in range(1, n):
        u = int(rng.integers(0, v))
        adjacency[u, v] = adjacency[v, u] = 1
    extras = rng.random((n, n)) < extra_edge_prob
    for u in range(n):
        for v in range(u + 1, n):
            if extras[u, v] and adjacency[u, v] == 0:
                adjacency[u, v] = adjacency[v, u] = 1
    return Graph(n=n, adjacency=adjacency, degrees=adjacency.sum(axis=1))


def random_signs(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=n)


def single_vertex_graph() -> Graph:
    return Graph(n=1, adjacency=np.zeros((1, 1), dtype=np.int64), degrees=np.zeros(1, dtype=np.int64))


def single_vertex_resolvent(lam: float = 1.0, gamma: float = 1.0) -> ResolventTraceFunction:
    return ResolventTraceFunction(ResolventParams(lam, gamma, laplacian(single_vertex_graph())))


@pytest.fixture(scope="session")
def torus3() -> Graph:
    return build_torus_cayley(3)


@pytest.fixture(scope="session")
def torus3_params(torus3) -> ResolventParams:
    return ResolventParams(1.0, 1.0, laplacian(torus3))


@pytest.fixture(scope="session")
def torus3_exact(torus3_params) -> float:
    from paircert.oracle import exact_expectation

    return exact_expectation(ResolventTraceFunction(torus3_params))
