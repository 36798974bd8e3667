"""Concrete functions of sign vectors and their flip half-sums.

The workhorse is the normalized resolvent trace on a graph,

    f(eps) = (1/n) * Tr[ ((lam+gamma)I - lam*D_eps - Lap)^-1 ],

where D_eps is the diagonal of the sign vector. The matrix is positive
definite with smallest eigenvalue >= gamma for every eps, so a Cholesky
factorization must succeed; a failure signals corrupted input, not an
edge case, and is raised as FactorizationError.

The flip half-sum

    g(eps) = 1/2 * sum_r [ f(eps) - f(eps with coordinate r negated) ]

is computed from a single explicit inverse: negating coordinate r adds
2*lam*eps_r to entry (r, r), so by the rank-one inverse-update identity
the flipped trace is

    Tr(M^-1) - 2*lam*eps_r * (M^-2)_rr / (1 + 2*lam*eps_r * (M^-1)_rr),

and (M^-2)_rr is the squared norm of column r of M^-1 by symmetry. One
O(n^3) inverse then covers all n flips in O(n^2) total, instead of n+1
separate factorizations. `naive_g` keeps the n+1-evaluation definition
as the reference implementation for any function.
"""

from __future__ import annotations

import abc
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import lapack

from .sampling import flip

# Quadrature refinement stops once doubling the nodes moves the value by
# less than this relative amount.
QUADRATURE_RTOL = 1e-10
QUADRATURE_NODE_CAP = 1 << 20


class FactorizationError(RuntimeError):
    """SPD factorization failed or an internal identity broke."""


class QuadratureError(RuntimeError):
    """Contour quadrature did not stabilize under node doubling."""


class AttestationError(ValueError):
    """Analytic function used without an analyticity attestation."""


@dataclass(frozen=True)
class ResolventParams:
    """Disorder strength lam, spectral gap gamma, and the graph Laplacian."""

    lam: float
    gamma: float
    laplacian: np.ndarray

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        lap = self.laplacian
        if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
            raise ValueError(f"laplacian must be square, got shape {lap.shape}")
        lap.setflags(write=False)

    @property
    def n(self) -> int:
        return self.laplacian.shape[0]


class _Counter:
    """Thread-safe event counter (evaluations may run in parallel)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = 0

    def add(self, k: int = 1):
        with self._lock:
            self._value += k

    @property
    def value(self) -> int:
        with self._lock:
            return self._value


class BernoulliFunction(abc.ABC):
    """Deterministic real- or complex-valued function on {-1,+1}^n.

    Subclasses implement `evaluate`; `evaluate_with_g` defaults to the
    naive n+1-evaluation flip half-sum and should be overridden when a
    cheaper combined path exists. Evaluations are pure and may run
    concurrently.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"dimension must be positive, got {n}")
        self.n = n
        self._factorizations = _Counter()

    @abc.abstractmethod
    def evaluate(self, eps: np.ndarray):
        """Value at one sign vector."""

    def evaluate_with_g(self, eps: np.ndarray):
        """(f(eps), g(eps)) pair; default recomputes f at every flip."""
        return self.evaluate(eps), naive_g(self, eps)

    @property
    def bounded_difference_constant(self) -> float | None:
        """c with |f(eps) - f(flip(eps, r))| <= c/n, when known a priori."""
        return None

    @property
    def factorization_count(self) -> int:
        """O(n^3) factorizations performed so far (cost-model counter)."""
        return self._factorizations.value

    def _require_dimension(self, eps: np.ndarray):
        if eps.shape[0] != self.n:
            raise ValueError(f"sign vector has length {eps.shape[0]}, function dimension is {self.n}")


def naive_g(fn: BernoulliFunction, eps: np.ndarray):
    """Reference flip half-sum: evaluates fn exactly n+1 times."""
    eps = np.asarray(eps)
    base = fn.evaluate(eps)
    acc = 0.0
    for r in range(fn.n):
        acc += base - fn.evaluate(flip(eps, r))
    return 0.5 * acc


def _spd_inverse(matrix: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky.

    No pivoted fallback: a dpotrf failure means the positivity guarantee
    was violated upstream.
    """
    factor, info = lapack.dpotrf(matrix, lower=1)
    if info != 0:
        raise FactorizationError(f"Cholesky factorization failed (dpotrf info={info}); matrix is not positive definite")
    inv, info = lapack.dpotri(factor, lower=1)
    if info != 0:
        raise FactorizationError(f"inverse from Cholesky factor failed (dpotri info={info})")
    lower = np.tril(inv)
    return lower + np.tril(inv, -1).T


class ResolventTraceFunction(BernoulliFunction):
    """Normalized resolvent trace of the sign-diagonal operator on a graph."""

    def __init__(self, params: ResolventParams):
        super().__init__(params.n)
        self.params = params
        self._base = (params.lam + params.gamma) * np.eye(self.n) - params.laplacian
        self._diag = np.diag_indices(self.n)

    def _inverse(self, eps: np.ndarray) -> np.ndarray:
        m = self._base.copy()
        m[self._diag] -= self.params.lam * eps
        inv = _spd_inverse(m)
        self._factorizations.add(1)
        return inv

    def evaluate(self, eps: np.ndarray) -> float:
        eps = np.asarray(eps)
        self._require_dimension(eps)
        return float(np.trace(self._inverse(eps))) / self.n

    def evaluate_with_g(self, eps: np.ndarray) -> tuple[float, float]:
        eps = np.asarray(eps)
        self._require_dimension(eps)
        lam, n = self.params.lam, self.n
        inv = self._inverse(eps)
        trace = float(np.trace(inv))
        diag = np.diagonal(inv)
        col_sq = (inv * inv).sum(axis=0)  # (M^-2)_rr, columns of a symmetric inverse
        denom = 1.0 + 2.0 * lam * eps * diag
        if np.any(denom <= 0.0):
            # impossible for a valid SPD pair; flags a corrupted inverse
            raise FactorizationError("rank-one update denominator is not positive")
        g = (lam / n) * float(np.sum(eps * col_sq / denom))
        return trace / n, g

    @property
    def bounded_difference_constant(self) -> float:
        # one flip moves f by at most 2*lam/(n*gamma^2)
        return 2.0 * self.params.lam / self.params.gamma**2


def resolvent_trace(params: ResolventParams, eps: np.ndarray) -> float:
    """One-shot normalized resolvent trace at eps; value in (0, 1/gamma]."""
    return ResolventTraceFunction(params).evaluate(eps)


def resolvent_trace_with_g(params: ResolventParams, eps: np.ndarray) -> tuple[float, float]:
    """One-shot (f, g) via the single-inverse flip sweep."""
    return ResolventTraceFunction(params).evaluate_with_g(eps)


@dataclass(frozen=True)
class AnalyticFunction:
    """Complex function with an analyticity attestation.

    `attested` records that the function is analytic on a neighborhood of
    the closed disk |z - d| <= d + lam + gamma needed by the spectral
    trace and the contour constant; the built-in constructors produce
    entire functions and always set it. Evaluators must accept numpy
    arrays.
    """

    name: str
    evaluator: Callable
    attested: bool

    def __call__(self, z):
        return self.evaluator(z)

    @staticmethod
    def polynomial(coefficients) -> "AnalyticFunction":
        """h(z) = sum_k c_k z^k, coefficients low-to-high."""
        coeffs = [complex(c) if isinstance(c, complex) else float(c) for c in coefficients]
        if not coeffs:
            raise ValueError("polynomial needs at least one coefficient")
        name = "poly:" + ",".join(format(c, "g") for c in coeffs)
        return AnalyticFunction(name=name, evaluator=lambda z: np.polynomial.polynomial.polyval(z, coeffs), attested=True)

    @staticmethod
    def exp_scaled(s: float) -> "AnalyticFunction":
        """h(z) = exp(s*z)."""
        s = float(s)
        return AnalyticFunction(name=f"exp:{s:g}", evaluator=lambda z: np.exp(s * z), attested=True)

    @staticmethod
    def from_spec(text: str) -> "AnalyticFunction":
        """Parse 'poly:c0,c1,...,ck' or 'exp:s'."""
        kind, _, rest = text.partition(":")
        if kind == "poly" and rest:
            try:
                return AnalyticFunction.polynomial([float(tok) for tok in rest.split(",")])
            except ValueError:
                raise ValueError(f"bad polynomial coefficients in {text!r}") from None
        if kind == "exp" and rest:
            try:
                return AnalyticFunction.exp_scaled(float(rest))
            except ValueError:
                raise ValueError(f"bad exponential scale in {text!r}") from None
        raise ValueError(f"unknown analytic function spec {text!r}; expected poly:c0,c1,... or exp:s")


class SpectralTraceFunction(BernoulliFunction):
    """Normalized trace of h(-lam*D_eps - Lap) via eigendecomposition."""

    def __init__(self, h: AnalyticFunction, params: ResolventParams):
        if not h.attested:
            raise AttestationError(f"{h.name}: analyticity on the contour disk is not attested")
        super().__init__(params.n)
        self.h = h
        self.params = params
        self._neg_lap = -params.laplacian
        self._diag = np.diag_indices(self.n)

    def evaluate(self, eps: np.ndarray):
        eps = np.asarray(eps)
        self._require_dimension(eps)
        op = self._neg_lap.copy()
        op[self._diag] -= self.params.lam * eps
        eigenvalues = np.linalg.eigvalsh(op)
        self._factorizations.add(1)
        return np.mean(self.h(eigenvalues)).item()


def spectral_functional_trace(h: AnalyticFunction, params: ResolventParams, eps: np.ndarray):
    """One-shot normalized trace of h applied to the sign-diagonal operator."""
    return SpectralTraceFunction(h, params).evaluate(eps)


def contour_norm_integral(h: AnalyticFunction, d: int, lam: float, gamma: float, nodes: int = 64) -> float:
    """Scaling constant kappa = (r/2pi) * integral of |h| over |z - d| = r.

    Here r = d + lam + gamma and d is the maximum degree. Trapezoidal
    quadrature on the periodic contour, which converges spectrally for
    analytic integrands; the node count doubles until two consecutive
    levels agree to QUADRATURE_RTOL relative, else QuadratureError.
    """
    if not h.attested:
        raise AttestationError(f"{h.name}: analyticity on the contour disk is not attested")
    if nodes < 8:
        raise ValueError(f"nodes must be at least 8, got {nodes}")
    if nodes % 2 != 0:
        raise ValueError(f"nodes must be even, got {nodes}")
    radius = d + lam + gamma

    def level(count: int) -> float:
        t = np.arange(count) * (2.0 * np.pi / count)
        with np.errstate(over="ignore", invalid="ignore"):
            values = np.abs(h(d + radius * np.exp(1j * t)))
        if not np.all(np.isfinite(values)):
            raise QuadratureError(f"{h.name}: |h| is not finite on the contour; check the analyticity attestation")
        return radius * (float(np.sum(values)) / count)

    count = nodes
    previous = level(count)
    while count < QUADRATURE_NODE_CAP:
        count *= 2
        current = level(count)
        if abs(current - previous) <= QUADRATURE_RTOL * abs(current):
            return current
        previous = current
    raise QuadratureError(f"{h.name}: contour quadrature did not stabilize within {QUADRATURE_NODE_CAP} nodes")


class ScaledFunction(BernoulliFunction):
    """factor * fn; the combined (f, g) path scales both components."""

    def __init__(self, fn: BernoulliFunction, factor: float):
        super().__init__(fn.n)
        self.fn = fn
        self.factor = factor

    def evaluate(self, eps: np.ndarray):
        return self.factor * self.fn.evaluate(eps)

    def evaluate_with_g(self, eps: np.ndarray):
        f, g = self.fn.evaluate_with_g(eps)
        return self.factor * f, self.factor * g

    @property
    def bounded_difference_constant(self) -> float | None:
        inner = self.fn.bounded_difference_constant
        return None if inner is None else abs(self.factor) * inner

    @property
    def factorization_count(self) -> int:
        return self.fn.factorization_count


class GFunction(BernoulliFunction):
    """eps -> g(eps) of a wrapped function.

    Uses the wrapped function's combined path by default; set fast=False
    to force the naive n+1-evaluation reference.
    """

    def __init__(self, fn: BernoulliFunction, fast: bool = True):
        super().__init__(fn.n)
        self.fn = fn
        self.fast = fast

    def evaluate(self, eps: np.ndarray):
        if self.fast:
            return self.fn.evaluate_with_g(eps)[1]
        return naive_g(self.fn, np.asarray(eps))

    @property
    def factorization_count(self) -> int:
        return self.fn.factorization_count


def dominating_resolvent_scale(h: AnalyticFunction, params: ResolventParams, graph, nodes: int = 64):
    """Spectral trace of h plus the contour-scaled resolvent that dominates it.

    Returns (f1, f2): f1 is the spectral trace of h and f2 = kappa times
    the resolvent trace, kappa from `contour_norm_integral` at the graph's
    maximum degree. Every Walsh coefficient of f1 is bounded in modulus by
    the corresponding (nonnegative) coefficient of f2, which is what the
    dominated certificate requires.
    """
    if params.n != graph.n:
        raise ValueError(f"laplacian dimension {params.n} does not match graph vertex count {graph.n}")
    kappa = contour_norm_integral(h, graph.max_degree, params.lam, params.gamma, nodes=nodes)
    f1 = SpectralTraceFunction(h, params)
    f2 = ScaledFunction(ResolventTraceFunction(params), kappa)
    return f1, f2
