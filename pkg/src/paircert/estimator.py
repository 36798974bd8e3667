"""Pair-product averages and deterministic enclosure certificates.

For p sample vectors X^(1)..X^(p) the pair-product average of f is

    F = (1/p^2) * sum_{i,j} f(X^(i) o X^(j))      (o = entrywise product)

with the diagonal contributing p copies of f(1,...,1). When every Walsh
coefficient of f is nonnegative, F overestimates E[f] and the same
average G of the flip half-sum g bounds the excess:

    0 <= F - E[f] <= G        (holds for every realization, not just on average)

so [F - G, F] encloses E[f] deterministically. E[G] = g(1,...,1)/p, which
prices the expected interval width before sampling, and Markov gives
width <= 10*g(1,...,1)/p with probability >= 0.9.

When f itself may have signed or complex coefficients but a second
function g2 with nonnegative coefficients dominates it coefficientwise,
|F_1 - E[f_1]| <= G_2 realizationwise: a disk certificate.

All pair sums are reduced with math.fsum, which returns the exactly
rounded sum. The result is therefore identical for any evaluation order,
thread count, or chunking, which is what makes certificates byte-stable.

A small additive slack (NUMERICAL_SLACK) widens every reported interval
to absorb floating-point error in the evaluations themselves; the
algebraic inequalities above are exact only in real arithmetic.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .functions import BernoulliFunction
from .sampling import SampleSet, all_ones, pair_product, sample

SCHEMA_VERSION = 1
NUMERICAL_SLACK = 1e-8

# choose_p warns once the implied pair-evaluation count crosses this.
PAIR_BUDGET_WARN = 10**6


@dataclass(frozen=True)
class EvalCounters:
    """Cost accounting: combined (f, g) evaluations, O(n^3) factorizations
    spent on them, and measured wall time in milliseconds.

    wall_ms is serialized as null so that certificate JSON is byte-stable
    across machines and thread counts; the measured value stays on the
    object for reporting.
    """

    evaluations: int
    factorizations: int
    wall_ms: float | None

    def to_json_dict(self) -> dict:
        return {"evaluations": self.evaluations, "factorizations": self.factorizations, "wall_ms": None}


@dataclass(frozen=True)
class Certificate:
    """Two-sided enclosure E[f] in [lower, upper] for a coefficientwise
    nonnegative f, with the width diagnostics that priced the run."""

    f_bar: float
    g_bar: float
    lower: float
    upper: float
    p: int
    seed: int
    g_at_ones: float
    expected_width: float
    markov_90_width: float
    realized_within_markov: bool
    c_bound: float | None
    c_markov_width: float | None
    counters: EvalCounters

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"empty interval: lower={self.lower} > upper={self.upper}")
        if self.p < 1:
            raise ValueError(f"p must be positive, got {self.p}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "f_bar": self.f_bar,
            "g_bar": self.g_bar,
            "lower": self.lower,
            "upper": self.upper,
            "p": self.p,
            "seed": self.seed,
            "g_at_ones": self.g_at_ones,
            "expected_width": self.expected_width,
            "markov_90_width": self.markov_90_width,
            "realized_within_markov": self.realized_within_markov,
            "c_bound": self.c_bound,
            "c_markov_width": self.c_markov_width,
            "counters": self.counters.to_json_dict(),
        }


@dataclass(frozen=True)
class DominatedCertificate:
    """Disk enclosure |E[f1] - center| <= radius for a dominated f1."""

    center: complex
    radius: float
    p: int
    seed: int
    counters: EvalCounters

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"radius must be nonnegative, got {self.radius}")
        if self.p < 1:
            raise ValueError(f"p must be positive, got {self.p}")

    def to_json_dict(self) -> dict:
        center = complex(self.center)
        return {
            "schema_version": SCHEMA_VERSION,
            "center_re": center.real,
            "center_im": center.imag,
            "radius": self.radius,
            "p": self.p,
            "seed": self.seed,
            "counters": self.counters.to_json_dict(),
        }


def _exact_sum(values):
    """Order-independent reduction: exactly rounded, complex-aware."""
    if any(isinstance(v, complex) for v in values):
        return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))
    return math.fsum(values)


def _map_pairs(task, pairs, threads: int):
    """Evaluate task(i, j) over all pairs, preserving slot order."""
    results = [None] * len(pairs)
    if threads <= 1 or len(pairs) <= 1:
        for slot, (i, j) in enumerate(pairs):
            results[slot] = task(i, j)
        return results
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(task, i, j) for i, j in pairs]
        for slot, future in enumerate(futures):
            results[slot] = future.result()
    return results


def _pair_averages(fn: BernoulliFunction, samples: SampleSet, threads: int):
    """(F, G, f(ones), g(ones)) from p(p-1)/2 + 1 combined evaluations."""
    if fn.n != samples.n:
        raise ValueError(f"sample dimension {samples.n} does not match function dimension {fn.n}")
    p = samples.p
    f_one, g_one = fn.evaluate_with_g(all_ones(samples.n))
    pairs = [(i, j) for i in range(p) for j in range(i + 1, p)]

    def task(i: int, j: int):
        return fn.evaluate_with_g(pair_product(samples, i, j))

    values = _map_pairs(task, pairs, threads)
    square = float(p) * float(p)
    f_bar = (p * f_one + 2.0 * _exact_sum([v[0] for v in values])) / square
    g_bar = (p * g_one + 2.0 * _exact_sum([v[1] for v in values])) / square
    return f_bar, g_bar, f_one, g_one


def _pair_average_value(fn: BernoulliFunction, samples: SampleSet, threads: int):
    """Pair-product average of f alone (no flip half-sum)."""
    if fn.n != samples.n:
        raise ValueError(f"sample dimension {samples.n} does not match function dimension {fn.n}")
    p = samples.p
    f_one = fn.evaluate(all_ones(samples.n))
    pairs = [(i, j) for i in range(p) for j in range(i + 1, p)]

    def task(i: int, j: int):
        return fn.evaluate(pair_product(samples, i, j))

    values = _map_pairs(task, pairs, threads)
    return (p * f_one + 2.0 * _exact_sum(values)) / (float(p) * float(p))


def pair_estimate(fn: BernoulliFunction, samples: SampleSet, threads: int = 1) -> tuple[float, float]:
    """(F, G) pair-product averages over an existing sample set."""
    f_bar, g_bar, _, _ = _pair_averages(fn, samples, threads)
    return f_bar, g_bar


def markov_apriori(c: float, p: int) -> float:
    """Width bound 10c/(2p) that holds with probability >= 0.9 before sampling."""
    if c < 0:
        raise ValueError(f"bounded-difference constant must be nonnegative, got {c}")
    if p < 1:
        raise ValueError(f"p must be positive, got {p}")
    return (10.0 * c) / (2.0 * p)


def choose_p(lam: float, gamma: float, delta: float, n: int | None = None) -> int:
    """Smallest p with expected interval width below delta for the
    resolvent trace: the least integer strictly greater than
    10*lam/(gamma^2*delta).

    Warns when the implied p^2 pair evaluations cross PAIR_BUDGET_WARN,
    quoting the naive-equivalent count (n+1)*p^2 when n is given.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    p = math.floor(10.0 * lam / (gamma * gamma * delta)) + 1
    if p * p > PAIR_BUDGET_WARN:
        message = f"target width {delta} needs p={p}, i.e. {p * p} pair evaluations"
        if n is not None:
            message += f" (naive-equivalent {(n + 1) * p * p} function evaluations)"
        warnings.warn(message, RuntimeWarning, stacklevel=2)
    return p


def certify(fn: BernoulliFunction, p: int, seed: int, threads: int = 1) -> Certificate:
    """Sample p sign vectors from seed and certify E[fn] in [lower, upper].

    Requires every Walsh coefficient of fn to be nonnegative; this is not
    checked here (it is a structural property of the function; see the
    oracle module for small-n verification).
    """
    start = time.perf_counter()
    factorizations_before = fn.factorization_count
    samples = sample(p, fn.n, seed)
    f_bar, g_bar, _, g_one = _pair_averages(fn, samples, threads)
    wall_ms = (time.perf_counter() - start) * 1e3

    # expected_width is derived from markov_90_width by division so the
    # 10x relation holds exactly in floating point, not only symbolically.
    markov_width = 10.0 * (g_one / p)
    expected_width = markov_width / 10.0
    c = fn.bounded_difference_constant
    counters = EvalCounters(
        evaluations=p * (p - 1) // 2 + 1,
        factorizations=fn.factorization_count - factorizations_before,
        wall_ms=wall_ms,
    )
    return Certificate(
        f_bar=f_bar,
        g_bar=g_bar,
        lower=f_bar - g_bar - NUMERICAL_SLACK,
        upper=f_bar + NUMERICAL_SLACK,
        p=p,
        seed=seed,
        g_at_ones=g_one,
        expected_width=expected_width,
        markov_90_width=markov_width,
        realized_within_markov=bool(g_bar <= markov_width),
        c_bound=c,
        c_markov_width=None if c is None else markov_apriori(c, p),
        counters=counters,
    )


def certify_dominated(f1: BernoulliFunction, g2: BernoulliFunction, p: int, seed: int, threads: int = 1) -> DominatedCertificate:
    """Disk certificate for E[f1] using a coefficientwise dominating g2.

    g2 must be the flip half-sum of a nonnegative-coefficient function
    whose Walsh coefficients dominate |a_S(f1)| entrywise; both averages
    use the same sample set, so one seed fixes the whole certificate.
    """
    start = time.perf_counter()
    factorizations_before = f1.factorization_count + g2.factorization_count
    samples = sample(p, f1.n, seed)
    center = _pair_average_value(f1, samples, threads)
    radius = float(_pair_average_value(g2, samples, threads))
    wall_ms = (time.perf_counter() - start) * 1e3
    counters = EvalCounters(
        evaluations=p * (p - 1) // 2 + 1,
        factorizations=f1.factorization_count + g2.factorization_count - factorizations_before,
        wall_ms=wall_ms,
    )
    return DominatedCertificate(center=center, radius=radius + NUMERICAL_SLACK, p=p, seed=seed, counters=counters)
