"""Quadrature, differencing, compensated sums and empirical-CDF helpers.

The integrators are globally adaptive and vectorized: every refinement step
evaluates the integrand once on the nodes of all intervals being split, so
integrands should accept and return numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_err_estimate: float
    evaluations: int


def _fejer2(n):
    """Nodes and weights of Fejer's second rule with ``n - 1`` interior points."""
    theta = np.arange(1, n) * np.pi / n
    j = np.arange(1, n // 2 + 1)
    series = (np.sin(np.outer(theta, 2 * j - 1)) / (2 * j - 1)).sum(axis=1)
    return np.cos(theta), 4.0 * np.sin(theta) / n * series


# Nested pair: the 15 coarse nodes are every other fine node.
_NODES, _W_FINE = _fejer2(32)
_, _W_COARSE_SUB = _fejer2(16)
_W_COARSE = np.zeros_like(_W_FINE)
_W_COARSE[1::2] = _W_COARSE_SUB


def _rule(g, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise ConvergenceError("integrand returned a non-finite value")
    fine = half * (fx @ _W_FINE)
    coarse = half * (fx @ _W_COARSE)
    return fine, np.abs(fine - coarse), x.size


def _adaptive(g, a, b, tol, n_init=16, max_iter=600, max_leaves=50_000):
    edges = np.linspace(a, b, n_init + 1)
    lo, hi = edges[:-1], edges[1:]
    val, err, evals = _rule(g, lo, hi)
    for _ in range(max_iter):
        total = math.fsum(val)
        err_sum = float(err.sum())
        if err_sum <= max(tol, tol * abs(total)):
            return QuadratureResult(total, err_sum, evals)
        split = err > err_sum / (2.0 * err.size)
        width = hi[split] - lo[split]
        if lo.size + split.sum() > max_leaves or np.any(width <= 4 * np.spacing(hi[split])):
            break
        mid = lo[split] + 0.5 * width
        new_lo = np.concatenate((lo[split], mid))
        new_hi = np.concatenate((mid, hi[split]))
        v_new, e_new, n = _rule(g, new_lo, new_hi)
        evals += n
        keep = ~split
        lo = np.concatenate((lo[keep], new_lo))
        hi = np.concatenate((hi[keep], new_hi))
        val = np.concatenate((val[keep], v_new))
        err = np.concatenate((err[keep], e_new))
    total = math.fsum(val)
    raise ConvergenceError(
        "adaptive quadrature did not reach its tolerance",
        partial_value=total,
        abs_err_estimate=float(err.sum()),
    )


def integrate_interval(
    f: Callable, a: float, b: float, tol: float = DEFAULT_TOL, endpoint_power: float | None = None
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]``.

    If ``f`` behaves like ``(x - a)**endpoint_power`` near ``a`` (with
    ``endpoint_power > -1``), the substitution ``x = a + (b - a) u**(1/(p+1))``
    removes the singularity before the adaptive rule sees it.  Without the
    hint, integrable endpoint singularities are still handled by repeated
    bisection, only more slowly.
    """
    if not b > a:
        raise DomainError(f"integrate_interval needs b > a, got [{a}, {b}]")
    if endpoint_power is None or endpoint_power == 0.0:
        return _adaptive(f, a, b, tol)
    p1 = endpoint_power + 1.0
    if p1 <= 0:
        raise DomainError("endpoint singularity is not integrable")
    span = b - a
    inv = 1.0 / p1

    def mapped(u):
        return f(a + span * u ** inv) * (span * inv) * u ** (inv - 1.0)

    return _adaptive(mapped, 0.0, 1.0, tol)


def integrate_semi_infinite(
    f: Callable, tol: float = DEFAULT_TOL, scale: float = 1.0, start: float = 0.0
) -> QuadratureResult:
    """Integrate ``f`` over ``(start, inf)`` through ``x = start + scale * t/(1-t)``.

    ``scale`` should be the characteristic width of the integrand (the mean
    SNR for density-weighted integrands) so the mass does not hide next to
    ``t = 1``.
    """
    if scale <= 0:
        raise DomainError("scale must be positive")

    def mapped(t):
        one_minus = 1.0 - t
        return f(start + scale * t / one_minus) * scale / (one_minus * one_minus)

    return _adaptive(mapped, 0.0, 1.0, tol)


def central_difference(f: Callable[[float], float], x: float, h: float) -> float:
    if h <= 0:
        raise DomainError("step h must be positive")
    return (f(x + h) - f(x - h)) / (2.0 * h)


def compensated_sum(terms: Sequence[float]) -> float:
    """Kahan-Neumaier compensated summation."""
    total = 0.0
    comp = 0.0
    for t in terms:
        t = float(t)
        s = total + t
        if abs(total) >= abs(t):
            comp += (total - s) + t
        else:
            comp += (t - s) + total
        total = s
    return total + comp


@dataclass(frozen=True)
class Ecdf:
    sorted_samples: np.ndarray
    n: int

    @classmethod
    def from_samples(cls, samples) -> "Ecdf":
        arr = np.sort(np.asarray(samples, dtype=float).ravel())
        if arr.size == 0:
            raise DomainError("an empirical CDF needs at least one sample")
        return cls(arr, int(arr.size))

    def __call__(self, x):
        return np.searchsorted(self.sorted_samples, x, side="right") / self.n


def ks_statistic(ecdf: Ecdf, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance ``sup |F_n - F|`` over the sample points."""
    x = ecdf.sorted_samples
    fx = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, ecdf.n + 1)
    upper = np.max(i / ecdf.n - fx)
    lower = np.max(fx - (i - 1) / ecdf.n)
    return float(max(upper, lower))


def ks_two_sample(a, b) -> float:
    """Two-sample KS distance between raw sample arrays."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate((a, b))
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def dkw_threshold(n: int, factor: float = 1.95) -> float:
    """Acceptance threshold ``factor / sqrt(n)`` used for one-sample KS checks."""
    return factor / math.sqrt(n)
