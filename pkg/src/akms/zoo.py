"""Classical fading models expressed as alpha-KMS parameter sets.

Models whose alpha-KMS image needs ``m -> inf`` (Rice, kappa-mu,
alpha-kappa-mu) are realized with a large finite ``m``; :func:`limit_gap`
measures how far that surrogate is from converged.  Models valid for any
``m`` (the ``kappa = 0`` rows) use ``m = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import core
from .errors import DomainError

M_LIMIT = 1e5
CANONICAL_M = 1.0


class ModelName(enum.Enum):
    ONE_SIDED_GAUSSIAN = "one-sided-gaussian"
    RAYLEIGH = "rayleigh"
    NAKAGAMI_M = "nakagami-m"
    HOYT = "hoyt"
    ETA_MU = "eta-mu"
    RICE = "rice"
    KAPPA_MU = "kappa-mu"
    RICIAN_SHADOWED = "rician-shadowed"
    KAPPA_MU_SHADOWED = "kappa-mu-shadowed"
    WEIBULL = "weibull"
    ALPHA_MU = "alpha-mu"
    ALPHA_KAPPA_MU = "alpha-kappa-mu"
    ALPHA_ETA_MU = "alpha-eta-mu"


# native parameter names and the example values used for listings
NATIVE_PARAMS: dict[ModelName, dict[str, float]] = {
    ModelName.ONE_SIDED_GAUSSIAN: {},
    ModelName.RAYLEIGH: {},
    ModelName.NAKAGAMI_M: {"m": 2.0},
    ModelName.HOYT: {"q": 0.5},
    ModelName.ETA_MU: {"eta": 0.5, "mu": 1.0},
    ModelName.RICE: {"K": 5.0},
    ModelName.KAPPA_MU: {"kappa": 5.0, "mu": 3.0},
    ModelName.RICIAN_SHADOWED: {"K": 5.0, "m": 2.0},
    ModelName.KAPPA_MU_SHADOWED: {"kappa": 3.0, "mu": 2.0, "m": 1.5},
    ModelName.WEIBULL: {"alpha": 2.5},
    ModelName.ALPHA_MU: {"alpha": 2.5, "mu": 1.5},
    ModelName.ALPHA_KAPPA_MU: {"alpha": 2.5, "kappa": 3.0, "mu": 2.0},
    ModelName.ALPHA_ETA_MU: {"alpha": 2.5, "eta": 0.5, "mu": 1.0},
}

LIMIT_MODELS = frozenset({ModelName.RICE, ModelName.KAPPA_MU, ModelName.ALPHA_KAPPA_MU})


@dataclass(frozen=True)
class NamedModel:
    name: ModelName
    native_params: dict = field(default_factory=dict)

    def __post_init__(self):
        name = self.name if isinstance(self.name, ModelName) else parse_model_name(self.name)
        object.__setattr__(self, "name", name)
        expected = set(NATIVE_PARAMS[name])
        given = set(self.native_params)
        if given != expected:
            missing = expected - given
            extra = given - expected
            detail = []
            if missing:
                detail.append(f"missing {sorted(missing)}")
            if extra:
                detail.append(f"unexpected {sorted(extra)}")
            raise DomainError(f"{name.value}: " + ", ".join(detail))
        clean = {k: float(v) for k, v in self.native_params.items()}
        for k, v in clean.items():
            if not math.isfinite(v):
                raise DomainError(f"{name.value}: {k} must be finite")
        _check_native(name, clean)
        object.__setattr__(self, "native_params", clean)

    @classmethod
    def with_defaults(cls, name, **overrides) -> "NamedModel":
        name = name if isinstance(name, ModelName) else parse_model_name(name)
        params = dict(NATIVE_PARAMS[name])
        params.update(overrides)
        return cls(name, params)

    @property
    def is_limit(self) -> bool:
        return self.name in LIMIT_MODELS


def parse_model_name(text: str) -> ModelName:
    try:
        return ModelName(text.strip().lower())
    except ValueError:
        known = ", ".join(n.value for n in ModelName)
        raise DomainError(f"unknown model {text!r}; known models: {known}") from None


def _positive(name, model, value):
    if value <= 0:
        raise DomainError(f"{model.value}: {name} must be > 0, got {value}")


def _check_native(name, p):
    if name in (ModelName.HOYT,):
        if not 0 < p["q"] <= 1:
            raise DomainError(f"hoyt: q must lie in (0, 1], got {p['q']}")
    if "eta" in p and not 0 < p["eta"] <= 1:
        raise DomainError(f"{name.value}: eta must lie in (0, 1], got {p['eta']}")
    for key in ("m", "mu", "alpha"):
        if key in p:
            _positive(key, name, p[key])
    for key in ("K", "kappa"):
        if key in p and p[key] < 0:
            raise DomainError(f"{name.value}: {key} must be >= 0, got {p[key]}")


@dataclass(frozen=True)
class ModelImage:
    params: core.AkmsParams
    limit_approximation: bool


def _shape(model: NamedModel, m_limit: float):
    p = model.native_params
    n = model.name
    if n is ModelName.ONE_SIDED_GAUSSIAN:
        return 2.0, 0.0, 0.5, CANONICAL_M
    if n is ModelName.RAYLEIGH:
        return 2.0, 0.0, 1.0, CANONICAL_M
    if n is ModelName.NAKAGAMI_M:
        return 2.0, 0.0, p["m"], CANONICAL_M
    if n is ModelName.HOYT:
        q2 = p["q"] ** 2
        return 2.0, (1.0 - q2) / (2.0 * q2), 1.0, 0.5
    if n is ModelName.ETA_MU:
        return 2.0, (1.0 - p["eta"]) / (2.0 * p["eta"]), 2.0 * p["mu"], p["mu"]
    if n is ModelName.RICE:
        return 2.0, p["K"], 1.0, m_limit
    if n is ModelName.KAPPA_MU:
        return 2.0, p["kappa"], p["mu"], m_limit
    if n is ModelName.RICIAN_SHADOWED:
        return 2.0, p["K"], 1.0, p["m"]
    if n is ModelName.KAPPA_MU_SHADOWED:
        return 2.0, p["kappa"], p["mu"], p["m"]
    if n is ModelName.WEIBULL:
        return p["alpha"], 0.0, 1.0, CANONICAL_M
    if n is ModelName.ALPHA_MU:
        return p["alpha"], 0.0, p["mu"], CANONICAL_M
    if n is ModelName.ALPHA_KAPPA_MU:
        return p["alpha"], p["kappa"], p["mu"], m_limit
    if n is ModelName.ALPHA_ETA_MU:
        return p["alpha"], (1.0 - p["eta"]) / (2.0 * p["eta"]), 2.0 * p["mu"], p["mu"]
    raise DomainError(f"unhandled model {n}")  # pragma: no cover


def to_akms(model: NamedModel, mean_snr: float = 1.0, m_limit: float = M_LIMIT) -> ModelImage:
    """Map a classical model onto its alpha-KMS parameters."""
    alpha, kappa, mu, m = _shape(model, m_limit)
    return ModelImage(core.AkmsParams(alpha, kappa, mu, m, mean_snr), model.is_limit)


def limit_gap(model: NamedModel, mean_snr: float, snr_grid, m_limit: float = M_LIMIT) -> float:
    """Max relative density change between ``m = m_limit`` and ``m = 10 * m_limit``."""
    if not model.is_limit:
        raise DomainError(f"{model.name.value} is not an m -> inf model")
    grid = np.asarray(snr_grid, dtype=float)
    near = core.pdf(to_akms(model, mean_snr, m_limit).params, grid)
    far = core.pdf(to_akms(model, mean_snr, 10.0 * m_limit).params, grid)
    return float(np.max(np.abs(near / far - 1.0)))


def table_rows(models=None):
    """``(model, image)`` pairs for every model, using the listing defaults."""
    if models is None:
        models = [NamedModel.with_defaults(n) for n in ModelName]
    return [(mdl, to_akms(mdl)) for mdl in models]
