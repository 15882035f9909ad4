"""Outage probability, diversity order and ergodic capacity.

All SNR arguments are linear; the CLI does the dB conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from . import core, numerics
from .errors import DomainError
from .specfun import hyp3f2

LOG2E = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class OutageQuery:
    params: core.AkmsParams
    threshold_snr: float

    def __post_init__(self):
        t = float(self.threshold_snr)
        if not math.isfinite(t) or t <= 0:
            raise DomainError(f"threshold_snr must be finite and > 0, got {t}")
        object.__setattr__(self, "threshold_snr", t)


@dataclass(frozen=True)
class CapacityResult:
    bits_per_hz: float
    abs_err_estimate: float


def outage_probability(q: OutageQuery) -> float:
    return float(core.cdf(q.params, q.threshold_snr))


def ln_asymptotic_outage(q: OutageQuery) -> float:
    p = q.params
    ln_c = core.ln_normalization_c(p)
    ln_ratio = -p.m * math.log1p(p.mu * p.kappa / p.m)
    return (
        ln_ratio - math.log(p.mu) - p.mu * ln_c - sc.gammaln(p.mu)
        + p.diversity * math.log(q.threshold_snr / p.mean_snr)
    )


def asymptotic_outage(q: OutageQuery) -> float:
    """Leading high-SNR term of the outage probability, a pure power law in ``threshold/mean``."""
    return math.exp(ln_asymptotic_outage(q))


def diversity_order(p: core.AkmsParams) -> float:
    return p.diversity


def ergodic_capacity(p: core.AkmsParams, tol: float = numerics.DEFAULT_TOL) -> CapacityResult:
    """``E[log2(1 + snr)]`` by quadrature against the density."""
    res = core.integrate_against_pdf(p, lambda x: np.log1p(x) * LOG2E, tol=tol, g_power=1.0)
    return CapacityResult(res.value, res.abs_err_estimate)


def awgn_capacity(mean_snr: float) -> float:
    return math.log1p(mean_snr) * LOG2E


def mean_log_snr_ratio(p: core.AkmsParams) -> float:
    """``E[ln(snr / mean_snr)]`` in closed form (the derivative of the moment function at 0)."""
    ln_c = core.ln_normalization_c(p)
    mk = p.mu * p.kappa
    total = mk + p.m
    bracket = sc.psi(p.mu) + ln_c - math.log(p.m / total)
    if p.mu != p.m and p.kappa > 0:
        f = hyp3f2(p.mu - p.m + 1.0, 1.0, 1.0, p.mu + 1.0, 2.0, mk / total).value
        bracket -= p.kappa * (p.mu - p.m) / total * f
    return 2.0 / p.alpha * bracket


def asymptotic_capacity(p: core.AkmsParams) -> float:
    """High-SNR capacity ``log2(mean_snr) + log2(e) * E[ln(snr/mean_snr)]``."""
    return math.log2(p.mean_snr) + LOG2E * mean_log_snr_ratio(p)


def moment_derivative_fd(p: core.AkmsParams, h: float = 1e-5) -> float:
    """Central-difference derivative at ``n = 0`` of ``E[(snr/mean_snr)**n]``."""
    unit = p.with_mean(1.0)
    return numerics.central_difference(lambda n: core._moment_any(unit, n).value, 0.0, h)
