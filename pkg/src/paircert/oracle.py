"""Exhaustive ground truth for small dimension: exact expectations and
Walsh spectra by full enumeration over {-1,+1}^n.

Conventions, fixed so every transform is reproducible:
  * subset <-> bitmask: bit k of mask S set  <=>  coordinate k+1 in S;
  * enumeration order: sign vector number `mask` has eps_{k+1} = -1
    exactly when bit k of `mask` is set (so vector 0 is all ones).

With values listed in that order, one unnormalized Walsh-Hadamard
transform maps coefficients to values, and the same transform divided
by 2^n maps values to coefficients.

This module exists for testing, not production, hence the hard budget
caps with explicit error messages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functions import BernoulliFunction
from .sampling import all_ones

ENUMERATION_LIMIT = 24
SPECTRUM_LIMIT = 16

# enumeration walks sign vectors in blocks this large to bound memory
_BLOCK = 1 << 14


class BudgetError(ValueError):
    """Requested exhaustive computation exceeds the hard budget cap."""


@dataclass(frozen=True)
class CheckResult:
    """Verdict plus the worst offender of a coefficient check."""

    ok: bool
    mask: int
    value: float

    def subset(self) -> tuple[int, ...]:
        """Worst-offender mask decoded as 1-based coordinates."""
        return tuple(k + 1 for k in range(self.mask.bit_length()) if (self.mask >> k) & 1)


@dataclass(frozen=True)
class WalshSpectrum:
    """All 2^n Walsh coefficients of a function; index = subset bitmask.

    Coefficients are real for real-valued functions and complex
    otherwise. coefficients[0] is the expectation.
    """

    n: int
    coefficients: np.ndarray

    def __post_init__(self):
        if self.coefficients.shape != (1 << self.n,):
            raise ValueError(f"need {1 << self.n} coefficients for n={self.n}, got shape {self.coefficients.shape}")
        self.coefficients.setflags(write=False)

    def reconstruct_values(self) -> np.ndarray:
        """Function values in enumeration order (inverse transform)."""
        return _fwht(self.coefficients)

    def csv_document(self) -> str:
        """CSV rows of (mask, coefficient); complex spectra get re/im columns."""
        coeffs = self.coefficients
        if np.iscomplexobj(coeffs):
            lines = ["mask,coefficient_re,coefficient_im"]
            lines += [f"{mask},{float(c.real)!r},{float(c.imag)!r}" for mask, c in enumerate(coeffs)]
        else:
            lines = ["mask,coefficient"]
            lines += [f"{mask},{float(c)!r}" for mask, c in enumerate(coeffs)]
        return "\n".join(lines) + "\n"


def sign_table(masks: np.ndarray, n: int) -> np.ndarray:
    """Sign vectors for the given mask numbers, one per row, int8."""
    bits = (masks[:, None] >> np.arange(n, dtype=masks.dtype)) & 1
    return (1 - 2 * bits).astype(np.int8)


def _fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform (involution up to 2^n)."""
    out = np.array(values)
    size = out.shape[0]
    if size & (size - 1) or size == 0:
        raise ValueError(f"transform length must be a power of two, got {size}")
    half = 1
    while half < size:
        out = out.reshape(-1, 2 * half)
        low = out[:, :half].copy()
        high = out[:, half:]
        out[:, :half] = low + high
        out[:, half:] = low - high
        out = out.reshape(-1)
        half *= 2
    return out


def _enumerate_values(fn: BernoulliFunction) -> np.ndarray:
    """fn at every sign vector, in enumeration order."""
    n = fn.n
    total = 1 << n
    first = fn.evaluate(all_ones(n))
    values = np.empty(total, dtype=complex if isinstance(first, complex) else float)
    values[0] = first
    for start in range(0, total, _BLOCK):
        masks = np.arange(start, min(start + _BLOCK, total), dtype=np.uint32)
        table = sign_table(masks, n)
        for row, mask in enumerate(masks):
            if mask == 0:
                continue
            values[mask] = fn.evaluate(table[row])
    return values


def _exact_mean(values: np.ndarray) -> float | complex:
    scale = 1.0 / values.shape[0]
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real) * scale, math.fsum(values.imag) * scale)
    return math.fsum(values) * scale


def exact_expectation(fn: BernoulliFunction) -> float | complex:
    """E[fn] as the exactly enumerated 2^-n-weighted sum."""
    if fn.n > ENUMERATION_LIMIT:
        raise BudgetError(
            f"exact expectation at n={fn.n} needs 2^{fn.n} = {1 << fn.n} evaluations; the budget stops at n={ENUMERATION_LIMIT}"
        )
    return _exact_mean(_enumerate_values(fn))


def walsh_spectrum(fn: BernoulliFunction) -> WalshSpectrum:
    """All Walsh coefficients of fn; coefficient 0 equals E[fn]."""
    if fn.n > SPECTRUM_LIMIT:
        raise BudgetError(
            f"spectrum at n={fn.n} needs 2^{fn.n} = {1 << fn.n} evaluations; the budget stops at n={SPECTRUM_LIMIT}"
        )
    values = _enumerate_values(fn)
    coefficients = _fwht(values) / float(values.shape[0])
    return WalshSpectrum(n=fn.n, coefficients=coefficients)


def check_nonnegative(spectrum: WalshSpectrum, tol: float) -> CheckResult:
    """True iff every coefficient is >= -tol; reports the most negative one."""
    coeffs = spectrum.coefficients
    if np.iscomplexobj(coeffs):
        raise ValueError("nonnegativity applies to real spectra only")
    worst = int(np.argmin(coeffs))
    value = float(coeffs[worst])
    return CheckResult(ok=bool(value >= -tol), mask=worst, value=value)


def check_domination(a: WalshSpectrum, b: WalshSpectrum, tol: float) -> CheckResult:
    """True iff |a_S| <= b_S + tol for every S; reports the worst excess
    |a_S| - b_S and its mask."""
    if a.n != b.n:
        raise ValueError(f"spectra have different dimensions: {a.n} vs {b.n}")
    if np.iscomplexobj(b.coefficients):
        raise ValueError("the dominating spectrum must be real")
    excess = np.abs(a.coefficients) - b.coefficients
    worst = int(np.argmax(excess))
    value = float(excess[worst])
    return CheckResult(ok=bool(value <= tol), mask=worst, value=value)
