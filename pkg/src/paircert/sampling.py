"""Deterministic generation of ±1 samples and their pairwise products.

The generator is SplitMix64 with top-bit sign extraction, fixed so that
any implementation on any platform reproduces the same sample arrays
bit for bit from (seed, p, n):

    state += 0x9E3779B97F4A7C15          (per output, mod 2^64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    output = z ^ (z >> 31)
    sign = +1 if the top bit of output is 0, else -1

Entries signs[i][k] consume the stream row-major: i (sample index) outer,
k (coordinate) inner. Signs are stored as int8 and all products are
computed in integer arithmetic, never floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# Dense int8 sample arrays; p*n beyond this is rejected up front.
MAX_SIGNS = 2**31


@dataclass(frozen=True, eq=False)
class SampleSet:
    """p rows of n signs plus the seed that regenerates them."""

    p: int
    n: int
    signs: np.ndarray  # (p, n) int8 over {-1, +1}
    seed: int

    def __post_init__(self):
        if self.signs.shape != (self.p, self.n):
            raise ValueError(f"signs shape {self.signs.shape} does not match (p={self.p}, n={self.n})")
        if self.signs.dtype != np.int8:
            raise ValueError("signs must be int8")
        self.signs.setflags(write=False)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First `count` raw SplitMix64 outputs for the given seed, as uint64."""
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    # Output k depends only on seed + (k+1)*gamma, so the stream vectorizes.
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed) + idx * _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def sample(p: int, n: int, seed: int) -> SampleSet:
    """Generate the p x n sign array for (seed, p, n).

    Deterministic and platform independent; calling twice with the same
    arguments yields bit-identical arrays.
    """
    if p < 1 or n < 1:
        raise ValueError(f"p and n must be positive, got p={p}, n={n}")
    if p * n > MAX_SIGNS:
        raise ValueError(f"sample set of p*n = {p * n} signs exceeds the {MAX_SIGNS} size budget")
    raw = splitmix64(seed, p * n)
    top = (raw >> np.uint64(63)).astype(np.int8)
    signs = (1 - 2 * top).reshape(p, n)
    return SampleSet(p=p, n=n, signs=signs, seed=seed)


def pair_product(s: SampleSet, i: int, j: int) -> np.ndarray:
    """Componentwise product of rows i and j (int8; exact)."""
    if not (0 <= i < s.p and 0 <= j < s.p):
        raise IndexError(f"row indices ({i}, {j}) out of range for p={s.p}")
    return s.signs[i] * s.signs[j]


def flip(v: np.ndarray, r: int) -> np.ndarray:
    """Copy of the sign vector with coordinate r negated."""
    if not 0 <= r < v.shape[0]:
        raise IndexError(f"coordinate {r} out of range for n={v.shape[0]}")
    out = v.copy()
    out[r] = -out[r]
    return out


def all_ones(n: int) -> np.ndarray:
    """The all-ones sign vector (the pair product of any row with itself)."""
    return np.ones(n, dtype=np.int8)
