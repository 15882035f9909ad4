"""Monte Carlo generation of alpha-KMS SNR realizations.

Two routes are provided:

* ``sample_physical`` builds the envelope from its cluster description
  (Gaussian in-phase/quadrature parts plus a gamma-shadowed dominant
  component) and therefore needs an integer number of clusters;
* ``sample_conditional`` draws the equivalent Poisson-gamma mixture and
  works for any real ``mu``.

Both return ``snr = mean_snr * R**2 / E[R**2]`` with ``E[R**2]`` computed in
closed form.  Randomness comes from numpy's PCG64 bit generator.  The draws
are split into fixed-size chunks and chunk ``i`` uses the independent stream
``SeedSequence(seed, spawn_key=(i,))``, so a batch depends only on
``(seed, method, params, n)`` and not on how many worker threads ran it.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import core
from .errors import DomainError

CHUNK_SIZE = 1 << 16
KAPPA_REL_TOL = 1e-12


class Method(enum.Enum):
    PHYSICAL = "physical"
    CONDITIONAL = "conditional"


@dataclass(frozen=True)
class PhysicalModelConfig:
    """Cluster-level description: ``mu`` clusters with dominant parts ``p, q``."""

    mu: int
    sigma2: float
    p: tuple[float, ...]
    q: tuple[float, ...]
    m: float

    def __post_init__(self):
        if int(self.mu) != self.mu or self.mu < 1:
            raise DomainError(f"the physical model needs a positive integer mu, got {self.mu}")
        object.__setattr__(self, "mu", int(self.mu))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        if len(self.p) != self.mu or len(self.q) != self.mu:
            raise DomainError("p and q need one entry per cluster")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise DomainError("sigma2 must be finite and > 0")
        if not (math.isfinite(self.m) and self.m > 0):
            raise DomainError("m must be finite and > 0")
        if not all(math.isfinite(v) for v in self.p + self.q):
            raise DomainError("dominant components must be finite")

    @property
    def dominant_power(self) -> float:
        return math.fsum(v * v for v in self.p + self.q)

    @property
    def kappa(self) -> float:
        return self.dominant_power / (2.0 * self.sigma2 * self.mu)

    @classmethod
    def default_for(cls, p: core.AkmsParams, sigma2: float = 0.5) -> "PhysicalModelConfig":
        """Equal split of the dominant power over the in-phase parts, ``q = 0``."""
        if int(p.mu) != p.mu:
            raise DomainError(f"the physical model needs an integer mu, got {p.mu}")
        mu = int(p.mu)
        amp = math.sqrt(2.0 * sigma2 * p.kappa)
        return cls(mu, sigma2, (amp,) * mu, (0.0,) * mu, p.m)

    def check_against(self, p: core.AkmsParams) -> None:
        if self.mu != p.mu:
            raise DomainError(f"config has mu={self.mu} but parameters have mu={p.mu}")
        if self.m != p.m:
            raise DomainError(f"config has m={self.m} but parameters have m={p.m}")
        target = 2.0 * self.sigma2 * self.mu * p.kappa
        power = self.dominant_power
        if abs(power - target) > KAPPA_REL_TOL * max(abs(target), 1e-300) and not (target == power == 0.0):
            raise DomainError(
                f"sum(p^2 + q^2) = {power:.17g} does not match 2 sigma2 mu kappa = {target:.17g}"
            )


@dataclass(frozen=True)
class SampleBatch:
    samples: np.ndarray
    seed: int
    method: Method
    normalization: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.samples)) or np.any(self.samples <= 0):
            raise DomainError("samples must be finite and positive")


def expected_r2(p: core.AkmsParams, sigma2: float = 0.5) -> float:
    """``E[R**2]`` of the cluster model with per-component variance ``sigma2``.

    ``R**alpha`` is a kappa-mu shadowed power with mean
    ``2 sigma2 mu (1 + kappa)``, so ``E[R**2]`` is its moment of order
    ``2/alpha``.
    """
    omega = 2.0 * sigma2 * p.mu * (1.0 + p.kappa)
    unit = core.AkmsParams(2.0, p.kappa, p.mu, p.m, 1.0)
    return omega ** (2.0 / p.alpha) * core.moment(unit, 2.0 / p.alpha)


def _unit_power_moment(p):
    return core.moment(core.AkmsParams(2.0, p.kappa, p.mu, p.m, 1.0), 2.0 / p.alpha)


def _chunks(n):
    starts = range(0, n, CHUNK_SIZE)
    return [(i, min(CHUNK_SIZE, n - s)) for i, s in enumerate(starts)]


def _rng(seed, chunk):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _run(draw, n, seed, workers):
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    if int(seed) != seed or seed < 0 or seed >= 2**64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    jobs = _chunks(int(n))
    task = lambda job: draw(_rng(int(seed), job[0]), job[1])  # noqa: E731
    if workers and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(task, jobs))
    else:
        parts = [task(j) for j in jobs]
    return np.concatenate(parts)


def _to_snr(power, p):
    # power is R**alpha divided by its mean 2 sigma2 mu (1 + kappa)
    return p.mean_snr * power ** (2.0 / p.alpha) / _unit_power_moment(p)


def sample_physical(
    cfg: PhysicalModelConfig | None, p: core.AkmsParams, n: int, seed: int = 0, workers: int | None = None
) -> SampleBatch:
    """Draw ``n`` SNR values from the cluster model."""
    if int(p.mu) != p.mu:
        raise DomainError(f"the physical route needs an integer mu, got {p.mu}")
    cfg = PhysicalModelConfig.default_for(p) if cfg is None else cfg
    cfg.check_against(p)
    pa = np.asarray(cfg.p)
    qa = np.asarray(cfg.q)
    sd = math.sqrt(cfg.sigma2)
    omega = 2.0 * cfg.sigma2 * cfg.mu * (1.0 + p.kappa)

    def draw(rng, size):
        xi = np.sqrt(rng.gamma(cfg.m, 1.0 / cfg.m, size))[:, None]
        x = rng.normal(0.0, sd, (size, cfg.mu)) + xi * pa
        y = rng.normal(0.0, sd, (size, cfg.mu)) + xi * qa
        return (np.sum(x * x, axis=1) + np.sum(y * y, axis=1)) / omega

    power = _run(draw, n, seed, workers)
    norm = expected_r2(p, cfg.sigma2)
    return SampleBatch(_to_snr(power, p), int(seed), Method.PHYSICAL, norm)


def sample_conditional(p: core.AkmsParams, n: int, seed: int = 0, workers: int | None = None) -> SampleBatch:
    """Draw ``n`` SNR values through the Poisson-gamma representation (any real ``mu``)."""
    scale = p.mu * (1.0 + p.kappa)

    def draw(rng, size):
        t = rng.gamma(p.m, 1.0 / p.m, size)
        k = rng.poisson(p.mu * p.kappa * t)
        return rng.standard_gamma(p.mu + k) / scale

    power = _run(draw, n, seed, workers)
    return SampleBatch(_to_snr(power, p), int(seed), Method.CONDITIONAL, expected_r2(p))


def sample(p: core.AkmsParams, n: int, seed: int = 0, method: Method | str = Method.CONDITIONAL,
           workers: int | None = None) -> SampleBatch:
    method = Method(method) if not isinstance(method, Method) else method
    if method is Method.PHYSICAL:
        return sample_physical(None, p, n, seed, workers)
    return sample_conditional(p, n, seed, workers)


def split_allocation(p: core.AkmsParams, weights: Sequence[float], sigma2: float = 0.5) -> PhysicalModelConfig:
    """Config whose dominant power is spread over the ``2 mu`` slots in proportion to ``weights``.

    The first ``mu`` weights go to ``p_i`` and the rest to ``q_i``.
    """
    mu = int(p.mu)
    w = np.asarray(weights, dtype=float)
    if w.shape != (2 * mu,) or np.any(w < 0) or w.sum() <= 0:
        raise DomainError("weights need 2*mu non-negative entries with a positive sum")
    amps = np.sqrt(2.0 * sigma2 * mu * p.kappa * w / w.sum())
    return PhysicalModelConfig(mu, sigma2, tuple(amps[:mu]), tuple(amps[mu:]), p.m)
