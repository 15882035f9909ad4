"""Integer-(mu, m) form of the alpha-KMS law as a signed mixture of alpha-mu laws."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special as sc

from . import core
from .errors import DomainError
from .numerics import compensated_sum

WEIGHT_SUM_TOL = 1e-9
# below this kappa the mu > m weights blow up like kappa**-(m + i - 1)
ILL_CONDITIONED_KAPPA = 1e-3


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class AlphaMuParams:
    alpha: float
    mu: float
    mean_snr: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "mu", "mean_snr"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0:
                raise DomainError(f"{name} must be finite and > 0, got {v}")

    @property
    def D(self) -> float:
        return math.exp(
            sc.gammaln(self.mu + 2.0 / self.alpha) - sc.gammaln(self.mu)
        ) / self.mean_snr


def alpha_mu_pdf(p: AlphaMuParams, snr):
    """alpha-mu SNR density with mean ``p.mean_snr``.

    The exponent is ``(snr * D) ** (alpha/2)``, the form that integrates to one
    and has mean ``mean_snr``.
    """
    x = np.asarray(snr, dtype=float)
    if np.any(x < 0):
        raise DomainError("snr must be non-negative")
    half = 0.5 * p.alpha
    ln_d = math.log(p.D)
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = np.log(x)
        log_f = (
            math.log(half) - sc.gammaln(p.mu) + p.mu * half * ln_d
            + (p.mu * half - 1.0) * lx - np.exp(half * (lx + ln_d))
        )
    out = np.exp(log_f)
    if np.any(x == 0):
        d = p.mu * half
        zero = 0.0 if d > 1 else (math.exp(math.log(half) - sc.gammaln(p.mu) + p.mu * half * ln_d) if d == 1 else math.inf)
        out = np.where(x == 0, zero, out)
    return float(out) if x.ndim == 0 else out


@dataclass(frozen=True)
class MixtureComponent:
    weight: float
    order: int
    scale: float


@dataclass(frozen=True)
class MixtureSpec:
    components: tuple[MixtureComponent, ...]

    @property
    def M(self) -> int:
        return len(self.components) - 1

    @property
    def weights(self) -> list[float]:
        return [c.weight for c in self.components]

    def weight_sum(self) -> float:
        return compensated_sum(self.weights)


def _binom(n, k):
    return math.comb(n, k) if 0 <= k <= n else 0


def _signed_power(base, expo):
    """``base ** expo`` with the 0**0 == 1 convention."""
    if expo == 0:
        return 1.0
    if base == 0.0:
        if expo < 0:
            raise DomainError("zero base with negative exponent")
        return 0.0
    return math.exp(expo * math.log(base))


def build_mixture(kappa: float, mu: int, m: int) -> MixtureSpec:
    """Weights ``C_i``, orders ``m_i`` and scales ``B_i`` for integer ``mu`` and ``m``."""
    if int(mu) != mu or int(m) != m or mu < 1 or m < 1:
        raise DomainError("the mixture form needs positive integer mu and m")
    mu, m = int(mu), int(m)
    kappa = float(kappa)
    if kappa < 0 or not math.isfinite(kappa):
        raise DomainError("kappa must be finite and >= 0")
    mk = mu * kappa
    los = m / (mk + m)       # m / (mu kappa + m)
    dom = mk / (mk + m)      # mu kappa / (mu kappa + m)
    wide = (mk + m) / m
    comps = []
    if mu > m:
        if kappa == 0:
            raise DomainError("kappa = 0 with mu > m has no mixture form; use the alpha-mu law")
        comps.append(MixtureComponent(0.0, mu - m + 1, 1.0))
        for i in range(1, mu + 1):
            if i <= mu - m:
                sign = -1.0 if m % 2 else 1.0
                w = sign * _binom(m + i - 2, i - 1) * _signed_power(los, m) * _signed_power(dom, -m - i + 1)
                comps.append(MixtureComponent(w, mu - m - i + 1, 1.0))
            else:
                e = i - mu + m - 1
                sign = -1.0 if e % 2 else 1.0
                w = sign * _binom(i - 2, e) * _signed_power(los, e) * _signed_power(dom, -i + 1)
                comps.append(MixtureComponent(w, mu - i + 1, wide))
    else:
        for i in range(m - mu + 1):
            w = _binom(m - mu, i) * _signed_power(los, i) * _signed_power(dom, m - mu - i)
            comps.append(MixtureComponent(w, m - i, wide))
    return MixtureSpec(tuple(comps))


@dataclass(frozen=True)
class MixtureDist:
    base: core.AkmsParams
    spec: MixtureSpec
    c: float

    @classmethod
    def from_params(cls, p: core.AkmsParams) -> "MixtureDist":
        return cls(p, build_mixture(p.kappa, p.mu, p.m), core.normalization_c(p))

    @property
    def ill_conditioned(self) -> bool:
        return self.base.mu > self.base.m and self.base.kappa < ILL_CONDITIONED_KAPPA


def component_means(d: MixtureDist) -> list[float]:
    a = d.base.alpha
    return [
        d.base.mean_snr * (d.c * comp.scale) ** (2.0 / a)
        * math.exp(sc.gammaln(comp.order + 2.0 / a) - sc.gammaln(comp.order))
        for comp in d.spec.components
    ]


def _component_terms(d, x, survival):
    a = d.base.alpha
    half = 0.5 * a
    rows = []
    with np.errstate(divide="ignore"):
        lx = np.log(x)
    for comp in d.spec.components:
        if comp.weight == 0.0:
            continue
        ln_scale = half * math.log(d.base.mean_snr) + math.log(d.c * comp.scale)
        z = np.exp(half * lx - ln_scale)
        if survival:
            j = np.arange(comp.order, dtype=float)[:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                log_t = j * np.log(z)[None, :] - z[None, :] - sc.gammaln(j + 1.0)
            log_t[0] = -z
            rows.append(comp.weight * np.exp(log_t).sum(axis=0))
        else:
            log_f = (
                math.log(half) - comp.order * ln_scale + (half * comp.order - 1.0) * lx
                - sc.gammaln(comp.order) - z
            )
            rows.append(comp.weight * np.exp(log_f))
    return np.array(rows)


def _signed_sum(rows):
    # column-wise Neumaier sum over components
    total = np.zeros(rows.shape[1:])
    comp = np.zeros(rows.shape[1:])
    for r in rows:
        s = total + r
        big = np.abs(total) >= np.abs(r)
        comp += np.where(big, (total - s) + r, (r - s) + total)
        total = s
    return total + comp


def _warn_conditioning(d):
    warnings.warn(
        f"kappa={d.base.kappa:g} with mu > m makes the mixture weights ill-conditioned; "
        "evaluating the general form instead",
        ConditioningWarning,
        stacklevel=3,
    )


def mixture_pdf(d: MixtureDist, snr):
    x = np.asarray(snr, dtype=float)
    if np.any(x < 0):
        raise DomainError("snr must be non-negative")
    if d.ill_conditioned:
        _warn_conditioning(d)
        return core.pdf(d.base, x)
    flat = np.atleast_1d(x).ravel()
    val = _signed_sum(_component_terms(d, flat, survival=False))
    return float(val[0]) if x.ndim == 0 else val.reshape(x.shape)


def mixture_cdf(d: MixtureDist, snr):
    x = np.asarray(snr, dtype=float)
    if np.any(x < 0):
        raise DomainError("snr must be non-negative")
    if d.ill_conditioned:
        _warn_conditioning(d)
        return core.cdf(d.base, x)
    flat = np.atleast_1d(x).ravel()
    val = 1.0 - _signed_sum(_component_terms(d, flat, survival=True))
    return float(val[0]) if x.ndim == 0 else val.reshape(x.shape)


def mixture_as_alpha_mu(d: MixtureDist) -> Sequence[tuple[float, AlphaMuParams]]:
    """The ``(C_i, alpha-mu law)`` pairs whose weighted sum is the density."""
    means = component_means(d)
    return [
        (comp.weight, AlphaMuParams(d.base.alpha, comp.order, w))
        for comp, w in zip(d.spec.components, means)
    ]
