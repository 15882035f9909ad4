import math

import numpy as np
import pytest
from scipy import special as sc

from akms import core
from akms.errors import DomainError
from akms.zoo import (
    LIMIT_MODELS,
    M_LIMIT,
    ModelName,
    NamedModel,
    limit_gap,
    parse_model_name,
    table_rows,
    to_akms,
)

G = np.geomspace(0.02, 6.0, 40)


def shape(model):
    p = to_akms(model).params
    return p.alpha, p.kappa, p.mu, p.m


def test_table_rows():
    rows = table_rows()
    assert len(rows) == 13
    assert {mdl.name for mdl, _ in rows} == set(ModelName)
    assert shape(NamedModel.with_defaults("hoyt", q=0.5)) == (2.0, 1.5, 1.0, 0.5)
    a, k, mu, m = shape(NamedModel.with_defaults("alpha-eta-mu", alpha=2.5, eta=0.25, mu=1.2))
    assert (a, mu, m) == (2.5, 2.4, 1.2)
    assert k == pytest.approx(1.5)
    assert shape(NamedModel.with_defaults("weibull", alpha=3.0))[:3] == (3.0, 0.0, 1.0)
    img = to_akms(NamedModel.with_defaults("rice", K=2.0))
    assert img.limit_approximation and img.params.m == M_LIMIT
    assert not to_akms(NamedModel.with_defaults("rayleigh")).limit_approximation


def test_parse_and_domain_errors():
    assert parse_model_name(" Kappa-Mu ") is ModelName.KAPPA_MU
    with pytest.raises(DomainError, match="known models"):
        parse_model_name("lognormal")
    with pytest.raises(DomainError, match="missing"):
        NamedModel(ModelName.HOYT, {})
    with pytest.raises(DomainError, match="unexpected"):
        NamedModel(ModelName.RAYLEIGH, {"q": 1.0})
    for bad in (0.0, 1.5):
        with pytest.raises(DomainError):
            NamedModel.with_defaults("hoyt", q=bad)
    with pytest.raises(DomainError):
        NamedModel.with_defaults("nakagami-m", m=-1.0)
    with pytest.raises(DomainError):
        NamedModel.with_defaults("rice", K=math.nan)


def hoyt(g, q, gb):
    a = (1 + q * q) ** 2 / (4 * q * q * gb)
    b = (1 - q**4) / (4 * q * q * gb)
    # i0e keeps exp(-a g) I0(b g) finite for large arguments
    return (1 + q * q) / (2 * q * gb) * np.exp(-(a - b) * g) * sc.i0e(b * g)


def nakagami(g, m, gb):
    return np.exp(m * np.log(m / gb) + (m - 1) * np.log(g) - m * g / gb - sc.gammaln(m))


def weibull(g, a, gb):
    d = math.gamma(1 + 2 / a) / gb
    return a / 2 * d ** (a / 2) * g ** (a / 2 - 1) * np.exp(-((d * g) ** (a / 2)))


def kms(g, k, mu, m, gb):
    u = g / gb
    lead = mu**mu * m**m * (1 + k) ** mu / (math.gamma(mu) * gb * (mu * k + m) ** m)
    return lead * u ** (mu - 1) * np.exp(-mu * (1 + k) * u) * sc.hyp1f1(m, mu, mu * mu * k * (1 + k) / (mu * k + m) * u)


@pytest.mark.parametrize(
    "model,ref",
    [
        (NamedModel.with_defaults("rayleigh"), lambda g: np.exp(-g / 2) / 2),
        (NamedModel.with_defaults("one-sided-gaussian"), lambda g: np.exp(-g / 4) / np.sqrt(4 * np.pi * g)),
        (NamedModel.with_defaults("nakagami-m", m=3.5), lambda g: nakagami(g, 3.5, 2.0)),
        (NamedModel.with_defaults("hoyt", q=0.3), lambda g: hoyt(g, 0.3, 2.0)),
        (NamedModel.with_defaults("weibull", alpha=1.7), lambda g: weibull(g, 1.7, 2.0)),
        (NamedModel.with_defaults("rician-shadowed", K=4.0, m=2.5), lambda g: kms(g, 4.0, 1.0, 2.5, 2.0)),
        (NamedModel.with_defaults("kappa-mu-shadowed", kappa=2.0, mu=1.5, m=0.8), lambda g: kms(g, 2.0, 1.5, 0.8, 2.0)),
    ],
    ids=lambda v: v.name.value if isinstance(v, NamedModel) else "",
)
def test_closed_forms(model, ref):
    p = to_akms(model, mean_snr=2.0).params
    np.testing.assert_allclose(core.pdf(p, 2.0 * G), ref(2.0 * G), rtol=1e-10)


def test_hoyt_is_eta_mu_format_one():
    q = 0.6
    a = to_akms(NamedModel.with_defaults("hoyt", q=q)).params
    b = to_akms(NamedModel.with_defaults("eta-mu", eta=q * q, mu=0.5)).params
    assert (a.kappa, a.mu, a.m) == pytest.approx((b.kappa, b.mu, b.m), rel=1e-15)
    np.testing.assert_allclose(core.pdf(a, G), core.pdf(b, G), rtol=1e-8)


def test_alpha_eta_mu_at_alpha_two_is_eta_mu():
    a = to_akms(NamedModel.with_defaults("alpha-eta-mu", alpha=2.0, eta=0.4, mu=1.3)).params
    b = to_akms(NamedModel.with_defaults("eta-mu", eta=0.4, mu=1.3)).params
    assert a == b


def test_limit_gap_shrinks_with_m():
    mdl = NamedModel.with_defaults("kappa-mu", kappa=2.0, mu=1.5)
    gaps = [limit_gap(mdl, 1.0, G, m) for m in (1e2, 1e3, 1e4)]
    assert gaps[0] > gaps[1] > gaps[2]
    # the gap falls like 1/m
    assert gaps[1] / gaps[2] == pytest.approx(10.0, rel=0.05)
    assert all(NamedModel.with_defaults(n).is_limit for n in LIMIT_MODELS)
    with pytest.raises(DomainError):
        limit_gap(NamedModel.with_defaults("hoyt"), 1.0, G)
