"""The alpha-kappa-mu shadowed (alpha-KMS) SNR distribution.

All prefactors are assembled in log space; ``m**m / (mu*kappa + m)**m`` is
computed as ``exp(-m * log1p(mu*kappa/m))`` so the large-``m`` limits used
by :mod:`akms.zoo` stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sc

from . import numerics
from .errors import ConsistencyError, ConvergenceError, DomainError
from .specfun import EvalResult, Tolerance, _hyp1f1_peak, _log_hyp1f1_pos, _log_hyp2f1, _log_phi2

CDF_SLACK = 1e-9
# CDF values from the Phi2 series with a larger error estimate are recomputed by quadrature
PHI2_FALLBACK_ERR = 1e-9
# points whose log-density estimate falls below this are returned as exact zeros
_LOG_UNDERFLOW = -800.0
HEAD_FRACTION = 1e-6
SURVIVAL_MAX_TERMS = 1 << 20
_EPS_REL = float(np.finfo(float).eps)


def _check_real(name, value, allow_zero=False):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"{name} must be {bound}, got {value}")
    return value


@dataclass(frozen=True)
class AkmsParams:
    """Shape parameters ``alpha, kappa, mu, m`` and the mean SNR (linear)."""

    alpha: float
    kappa: float
    mu: float
    m: float
    mean_snr: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_real("alpha", self.alpha))
        object.__setattr__(self, "kappa", _check_real("kappa", self.kappa, allow_zero=True))
        object.__setattr__(self, "mu", _check_real("mu", self.mu))
        object.__setattr__(self, "m", _check_real("m", self.m))
        object.__setattr__(self, "mean_snr", _check_real("mean_snr", self.mean_snr))

    def with_mean(self, mean_snr: float) -> "AkmsParams":
        return AkmsParams(self.alpha, self.kappa, self.mu, self.m, mean_snr)

    @property
    def diversity(self) -> float:
        return self.alpha * self.mu / 2.0


@dataclass(frozen=True)
class EnvelopeParams:
    akms: AkmsParams
    omega: float

    def __post_init__(self):
        object.__setattr__(self, "omega", _check_real("omega", self.omega))


@dataclass(frozen=True)
class _Shape:
    ln_c: float
    ln_c_err: float
    # ln(m^m / (mu*kappa + m)^m)
    ln_ratio: float
    # mu*kappa / (mu*kappa + m), the 2F1 argument
    x: float


@lru_cache(maxsize=4096)
def _shape(alpha, kappa, mu, m):
    mk = mu * kappa
    x = mk / (mk + m)
    ln_ratio = -m * math.log1p(mk / m)
    # c feeds every other quantity, so its series runs to full precision
    log_f, sign, rel = _log_hyp2f1(m, mu + 2.0 / alpha, mu, x, Tolerance(rel=_EPS_REL))
    if sign <= 0:
        raise ConsistencyError("2F1 in the normalization constant must be positive")
    ln_c = 0.5 * alpha * (-ln_ratio + sc.gammaln(mu) - sc.gammaln(mu + 2.0 / alpha) - log_f)
    return _Shape(float(ln_c), 0.5 * alpha * rel, float(ln_ratio), x)


def _shape_of(p):
    return _shape(p.alpha, p.kappa, p.mu, p.m)


def ln_normalization_c(p: AkmsParams) -> float:
    return _shape_of(p).ln_c


def normalization_c(p: AkmsParams) -> float:
    """The scale constant ``c`` that pins ``E[gamma]`` to the mean SNR."""
    return math.exp(_shape_of(p).ln_c)


def _log_pdf(p, snr):
    """Log density and relative error estimate for an array of SNR values ``> 0``."""
    sh = _shape_of(p)
    c = math.exp(sh.ln_c)
    u = snr / p.mean_snr
    y0 = u ** (0.5 * p.alpha)
    log_k = (
        sh.ln_ratio + math.log(0.5 * p.alpha) - p.mu * sh.ln_c
        - sc.gammaln(p.mu) - math.log(p.mean_snr)
    )
    base = log_k + (p.diversity - 1.0) * np.log(u) - y0 / c
    z = (sh.x / c) * y0
    out = np.full(snr.shape, -np.inf)
    rel = np.zeros(snr.shape)
    # cheap upper estimate of ln 1F1 from its largest term, used to skip underflowing points
    peak = np.floor(_hyp1f1_peak(p.m, p.mu, z))
    with np.errstate(divide="ignore"):
        est = np.where(
            z > 0,
            sc.gammaln(p.m + peak) - sc.gammaln(p.m) - sc.gammaln(p.mu + peak) + sc.gammaln(p.mu)
            + peak * np.log(np.where(z > 0, z, 1.0)) - sc.gammaln(peak + 1.0)
            + 0.5 * np.log(2 * np.pi * (peak + 1.0)) + 1.0,
            0.0,
        )
    live = base + est > _LOG_UNDERFLOW
    if np.any(live):
        log_h, rel_h = _log_hyp1f1_pos(p.m, p.mu, z[live])
        out[live] = base[live] + log_h
        rel[live] = rel_h + sh.ln_c_err * (p.mu + y0[live] / c) + 1e-15 * np.abs(out[live])
    return out, rel


def _as_snr_array(snr, name="snr"):
    arr = np.asarray(snr, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < 0):
        raise DomainError(f"{name} must be non-negative")
    return arr


def _pdf_at_zero(p):
    d = p.diversity
    if d > 1.0:
        return 0.0
    if d == 1.0:
        sh = _shape_of(p)
        return math.exp(
            sh.ln_ratio + math.log(0.5 * p.alpha) - p.mu * sh.ln_c
            - sc.gammaln(p.mu) - math.log(p.mean_snr)
        )
    raise DomainError(
        f"the density diverges at snr = 0 when alpha*mu < 2 (alpha*mu = {2 * d:g})"
    )


def pdf_with_error(p: AkmsParams, snr) -> EvalResult:
    arr = _as_snr_array(snr)
    flat = np.atleast_1d(arr).ravel()
    val = np.empty(flat.shape)
    err = np.zeros(flat.shape)
    pos = flat > 0
    if np.any(~pos):
        val[~pos] = _pdf_at_zero(p)
    if np.any(pos):
        log_f, rel = _log_pdf(p, flat[pos])
        v = np.exp(log_f)
        val[pos] = v
        err[pos] = v * rel
    if arr.ndim == 0:
        return EvalResult(float(val[0]), float(err[0]))
    return EvalResult(val.reshape(arr.shape), err.reshape(arr.shape))


def pdf(p: AkmsParams, snr):
    """Density of the instantaneous SNR; accepts scalars or arrays."""
    return pdf_with_error(p, snr).value


def integrate_against_pdf(
    p: AkmsParams, g=None, tol: float = numerics.DEFAULT_TOL, g_power: float = 0.0,
    upper: float | None = None,
) -> numerics.QuadratureResult:
    """``int g(snr) pdf(snr) dsnr`` over ``(0, upper)`` (default: to infinity).

    The head ``[0, mean_snr * 1e-6]`` is integrated with a power-law aware rule
    using the density exponent ``alpha*mu/2 - 1`` plus ``g_power``, the
    small-argument exponent of ``g``.
    """
    if g is None:
        def integrand(x):
            return pdf(p, x)
    else:
        def integrand(x):
            return g(x) * pdf(p, x)

    head_end = p.mean_snr * HEAD_FRACTION
    if upper is not None and upper <= head_end:
        head_end = upper
    power = p.diversity - 1.0 + g_power
    head = numerics.integrate_interval(integrand, 0.0, head_end, 0.1 * tol, endpoint_power=power)
    if upper is not None and upper <= head_end:
        return head
    if upper is None:
        body = numerics.integrate_semi_infinite(integrand, tol, scale=p.mean_snr, start=head_end)
    else:
        body = numerics.integrate_interval(integrand, head_end, upper, tol)
    return numerics.QuadratureResult(
        head.value + body.value,
        head.abs_err_estimate + body.abs_err_estimate,
        head.evaluations + body.evaluations,
    )


def _clamp_cdf(value):
    if 0.0 <= value <= 1.0:
        return value
    if -CDF_SLACK <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + CDF_SLACK:
        return 1.0
    raise ConsistencyError(f"CDF value {value!r} lies outside [0, 1]")


@lru_cache(maxsize=256)
def _nb_log_weights(m, x, count):
    """Log masses of the negative binomial ``NB(m, x)`` at ``k = 0 .. count-1``."""
    k = np.arange(count, dtype=float)
    if x == 0.0:
        return np.where(k == 0, 0.0, -np.inf)
    return sc.gammaln(m + k) - sc.gammaln(m) - sc.gammaln(k + 1.0) + m * math.log1p(-x) + k * math.log(x)


def _survival_series(p, big):
    """``P(gamma > snr)`` as a negative-binomial mixture of upper incomplete gamma ratios.

    ``big = (snr/mean_snr)**(alpha/2) / c``.  Every term is positive and the
    weights do not depend on ``snr``, so this form keeps full relative
    accuracy in the upper tail, where ``1 - Phi2 form`` loses digits.
    Returns ``(value, abs_err)`` or ``None`` when the series is too long.
    """
    x = _shape_of(p).x
    count = 64
    while count <= SURVIVAL_MAX_TERMS:
        logw = _nb_log_weights(p.m, x, count)
        k = np.arange(count, dtype=float)
        total = math.fsum(np.exp(logw) * sc.gammaincc(p.mu + k, big))
        # mass of NB beyond the window bounds the neglected terms (Q <= 1)
        tail = float(sc.betainc(count, p.m, x)) if x > 0 else 0.0
        if tail <= 1e-15 * total:
            spread = float(np.max(np.abs(logw[np.isfinite(logw)])))
            return total, tail + total * _EPS_REL * (64.0 + spread)
        count *= 2
    return None


def _big_argument(p, snr):
    return (snr / p.mean_snr) ** (0.5 * p.alpha) / normalization_c(p)


def phi2_cdf(p: AkmsParams, snr: float) -> EvalResult | None:
    """CDF from the Phi2 closed form alone; ``None`` if the series cannot certify 1e-9."""
    snr = float(snr)
    if snr == 0.0:
        return EvalResult(0.0, 0.0)
    sh = _shape_of(p)
    big = _big_argument(p, snr)
    try:
        log_phi, sign, rel = _log_phi2(
            p.mu - p.m, p.m, p.mu + 1.0, -big, -big * p.m / (p.mu * p.kappa + p.m)
        )
    except ConvergenceError:
        return None
    log_val = (
        sh.ln_ratio - math.log(p.mu) - p.mu * sh.ln_c - sc.gammaln(p.mu)
        + p.diversity * math.log(snr / p.mean_snr) + log_phi
    )
    value = sign * math.exp(log_val) if log_val < 700 else math.inf
    err = abs(value) * (rel + sh.ln_c_err * p.mu + 1e-15 * abs(log_val))
    if not err <= PHI2_FALLBACK_ERR:
        return None
    return EvalResult(_clamp_cdf(value), err)


def _cdf_point(p, snr):
    if snr == 0.0:
        return EvalResult(0.0, 0.0)
    # error in ln c shifts the argument of the closed forms: dF = snr f(snr) (2/alpha) d ln c
    c_err = snr * float(pdf(p, snr)) * 2.0 / p.alpha * _shape_of(p).ln_c_err
    upper = _survival_series(p, _big_argument(p, snr))
    if upper is not None and upper[0] <= 0.5:
        return EvalResult(_clamp_cdf(1.0 - upper[0]), upper[1] + c_err + _EPS_REL)
    res = phi2_cdf(p, snr)
    if res is not None:
        return EvalResult(res.value, res.abs_err_estimate + c_err)
    quad = integrate_against_pdf(p, upper=snr, tol=1e-12)
    return EvalResult(_clamp_cdf(quad.value), quad.abs_err_estimate)


def cdf_with_error(p: AkmsParams, snr) -> EvalResult:
    arr = _as_snr_array(snr)
    if arr.ndim == 0:
        return _cdf_point(p, float(arr))
    res = [_cdf_point(p, float(s)) for s in arr.ravel()]
    return EvalResult(
        np.array([r.value for r in res]).reshape(arr.shape),
        np.array([r.abs_err_estimate for r in res]).reshape(arr.shape),
    )


def cdf(p: AkmsParams, snr):
    """``P(gamma <= snr)``.

    The lower half of the distribution comes from the Phi2 closed form (with
    a quadrature fallback), the upper half from the complementary
    negative-binomial series, which avoids the cancellation in ``1 - small``.
    """
    return cdf_with_error(p, snr).value


def moment_with_error(p: AkmsParams, n: float) -> EvalResult:
    n = float(n)
    if not math.isfinite(n) or n < 0:
        raise DomainError(f"moment order must be a finite real >= 0, got {n}")
    return _moment_any(p, n)


def _moment_any(p, n):
    # the closed form holds for every order n > -alpha*mu/2
    if not n > -p.diversity:
        raise DomainError(f"moments of order <= {-p.diversity} diverge")
    sh = _shape_of(p)
    shift = 2.0 * n / p.alpha
    log_f, sign, rel = _log_hyp2f1(p.m, p.mu + shift, p.mu, sh.x, Tolerance(rel=_EPS_REL))
    log_val = (
        n * math.log(p.mean_snr) + sh.ln_ratio + sc.gammaln(p.mu + shift) - sc.gammaln(p.mu)
        + shift * sh.ln_c + log_f
    )
    value = sign * math.exp(log_val)
    return EvalResult(value, abs(value) * (rel + shift * sh.ln_c_err + 1e-15 * abs(log_val)))


def moment(p: AkmsParams, n: float) -> float:
    """``E[gamma**n]`` for real ``n >= 0``."""
    return moment_with_error(p, n).value


def envelope_pdf(e: EnvelopeParams, r):
    """Density of the envelope ``R`` with ``E[R^2] = omega``."""
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r < 0):
        raise DomainError("envelope r must be finite and non-negative")
    p = e.akms
    sh = _shape_of(p)
    c = math.exp(sh.ln_c)
    flat = np.atleast_1d(r).ravel()
    out = np.zeros(flat.shape)
    pos = flat > 0
    rr = flat[pos]
    scaled = rr ** p.alpha / (e.omega ** (0.5 * p.alpha) * c)
    log_h, _ = _log_hyp1f1_pos(p.m, p.mu, sh.x * scaled)
    out[pos] = np.exp(
        sh.ln_ratio + math.log(p.alpha) + (p.alpha * p.mu - 1.0) * np.log(rr)
        - 0.5 * p.alpha * p.mu * math.log(e.omega) - p.mu * sh.ln_c - sc.gammaln(p.mu)
        - scaled + log_h
    )
    if np.any(~pos):
        if p.alpha * p.mu > 1.0:
            out[~pos] = 0.0
        else:
            raise DomainError("the envelope density is not finite at r = 0 for alpha*mu <= 1")
    return float(out[0]) if r.ndim == 0 else out.reshape(r.shape)
