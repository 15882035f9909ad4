import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sc

from akms import core
from akms.core import AkmsParams, EnvelopeParams
from akms.errors import DomainError

mp.mp.dps = 40

RAYLEIGH = AkmsParams(2.0, 0.0, 1.0, 1.0)


def mp_pdf(p: AkmsParams, g):
    """The density written out directly in high precision."""
    a, k, mu, m, gb = (mp.mpf(v) for v in (p.alpha, p.kappa, p.mu, p.m, p.mean_snr))
    x = mu * k / (mu * k + m)
    c = ((mu * k + m) ** m * mp.gamma(mu) / (m**m * mp.gamma(mu + 2 / a) * mp.hyp2f1(m, mu + 2 / a, mu, x))) ** (a / 2)
    g = mp.mpf(g)
    y = (g / gb) ** (a / 2)
    return (
        a * m**m * (g / gb) ** (a * mu / 2 - 1)
        / (2 * c**mu * mp.gamma(mu) * gb * (mu * k + m) ** m)
        * mp.exp(-y / c)
        * mp.hyp1f1(m, mu, x * y / c)
    )


def test_params_validation():
    for bad in (dict(alpha=0.0), dict(mu=-1.0), dict(m=math.nan), dict(kappa=-0.1), dict(mean_snr=math.inf)):
        kw = dict(alpha=2.0, kappa=1.0, mu=1.0, m=1.0, mean_snr=1.0) | bad
        with pytest.raises(DomainError):
            AkmsParams(**kw)
    assert AkmsParams(2.5, 3.0, 3.0, 2.0).diversity == 3.75
    with pytest.raises(DomainError):
        EnvelopeParams(RAYLEIGH, 0.0)


def test_normalization_constant_special_cases():
    for a, mu in ((2.0, 1.0), (3.1, 0.7), (0.9, 4.0)):
        expect = (math.gamma(mu) / math.gamma(mu + 2 / a)) ** (a / 2)
        assert core.normalization_c(AkmsParams(a, 0.0, mu, 3.0)) == pytest.approx(expect, rel=1e-13)
        # mu == m collapses the 2F1
        k = 2.5
        p = AkmsParams(a, k, mu, mu)
        assert core.normalization_c(p) == pytest.approx(expect * mu / (mu * k + mu), rel=1e-12)


@pytest.mark.parametrize(
    "p", [AkmsParams(2.3, 3.0, 1.8, 5.5), AkmsParams(1.5, 3.0, 3.2, 7.3), AkmsParams(0.8, 10.0, 0.6, 0.5, 4.0)]
)
def test_pdf_matches_high_precision(p):
    g = np.array([0.01, 0.3, 1.0, 2.5, 6.0]) * p.mean_snr
    ref = np.array([float(mp_pdf(p, v)) for v in g])
    res = core.pdf_with_error(p, g)
    np.testing.assert_allclose(res.value, ref, rtol=1e-12)
    assert np.all(np.abs(res.value - ref) <= np.maximum(4 * res.abs_err_estimate, 1e-14 * ref))


def test_rayleigh_reduction():
    g = np.linspace(0.0, 6.0, 13)
    np.testing.assert_allclose(core.pdf(RAYLEIGH, g), np.exp(-g), rtol=1e-13)
    np.testing.assert_allclose(core.cdf(RAYLEIGH, g), -np.expm1(-g), rtol=1e-12, atol=1e-15)
    assert core.pdf(RAYLEIGH, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert core.moment(RAYLEIGH, 2.0) == pytest.approx(2.0, rel=1e-13)
    assert core.moment(RAYLEIGH, 0.0) == 1.0


def test_pdf_at_origin():
    assert core.pdf(AkmsParams(2.5, 1.0, 2.0, 1.0), 0.0) == 0.0
    # alpha*mu == 2: exponent vanishes, density is finite
    p = AkmsParams(2.0, 1.5, 1.0, 2.0)
    assert core.pdf(p, 0.0) == pytest.approx(core.pdf(p, 1e-12), rel=1e-9)
    with pytest.raises(DomainError):
        core.pdf(AkmsParams(1.0, 1.0, 1.0, 1.0), 0.0)
    with pytest.raises(DomainError):
        core.pdf(RAYLEIGH, -1.0)
    with pytest.raises(DomainError):
        core.cdf(RAYLEIGH, -1.0)


def test_cdf_matches_high_precision_series():
    p = AkmsParams(2.3, 3.0, 1.8, 5.5)
    for g in (0.2, 1.0, 3.0):
        # t = g v^(1/s) removes the t^(s-1) endpoint singularity
        s = mp.mpf(p.alpha) * p.mu / 2
        ref = mp.quad(lambda v: mp_pdf(p, g * v ** (1 / s)) * g * v ** (1 / s - 1) / s, [0, 0.5, 1])
        assert core.cdf(p, g) == pytest.approx(float(ref), abs=1e-13)


def test_phi2_cdf_agrees_with_cdf():
    p = AkmsParams(3.1, 10.0, 6.0, 1.0)
    for g in (0.3, 0.8, 1.2, 2.0):
        closed = core.phi2_cdf(p, g)
        assert closed is not None
        assert closed.value == pytest.approx(core.cdf(p, g), abs=1e-12)


def test_kappa_has_no_effect_when_mu_equals_m():
    g = np.geomspace(0.01, 8.0, 30)
    ref = core.pdf(AkmsParams(2.7, 0.0, 2.5, 2.5), g)
    for k in (1.0, 5.0, 20.0):
        np.testing.assert_allclose(core.pdf(AkmsParams(2.7, k, 2.5, 2.5), g), ref, rtol=1e-10)


@settings(max_examples=20, deadline=None)
@given(
    alpha=st.floats(0.7, 4.0),
    kappa=st.floats(0.0, 15.0),
    mu=st.floats(0.5, 5.0),
    m=st.floats(0.4, 30.0),
)
def test_cdf_monotone_and_mean_anchored(alpha, kappa, mu, m):
    p = AkmsParams(alpha, kappa, mu, m, 2.0)
    f = core.cdf(p, np.geomspace(1e-3, 50.0, 25))
    assert np.all(np.diff(f) >= -1e-12)
    assert np.all((f >= 0) & (f <= 1))
    assert core.moment(p, 1.0) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("p", [AkmsParams(2.3, 3.0, 1.8, 5.5), AkmsParams(0.9, 1.0, 0.6, 2.0, 3.0)])
def test_moments_match_quadrature(p):
    for n in (0.5, 1.0, 2.0, 3.0):
        quad = core.integrate_against_pdf(p, lambda x, n=n: x**n, tol=1e-12, g_power=n).value
        assert core.moment(p, n) == pytest.approx(quad, rel=1e-9)
    with pytest.raises(DomainError):
        core.moment(p, -0.5)


def test_envelope_change_of_variables():
    p = AkmsParams(2.3, 3.0, 1.8, 5.5, 2.0)
    omega = 0.7
    e = EnvelopeParams(p, omega)
    r = np.linspace(0.05, 3.0, 40)
    lhs = core.envelope_pdf(e, r)
    rhs = 2.0 * p.mean_snr * r / omega * core.pdf(p, p.mean_snr * r * r / omega)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)
    from akms.numerics import integrate_semi_infinite

    assert integrate_semi_infinite(lambda x: core.envelope_pdf(e, x), scale=1.0).value == pytest.approx(1.0, abs=1e-9)


def test_rayleigh_envelope():
    r = np.linspace(0.0, 3.0, 16)
    np.testing.assert_allclose(core.envelope_pdf(EnvelopeParams(RAYLEIGH, 1.0), r), 2 * r * np.exp(-r * r), rtol=1e-13)
    with pytest.raises(DomainError):
        core.envelope_pdf(EnvelopeParams(RAYLEIGH, 1.0), -0.1)


def test_large_m_matches_kappa_mu_limit():
    # kappa-mu density (m -> inf) through its Bessel closed form
    k, mu = 2.0, 1.5
    g = np.geomspace(0.05, 4.0, 20)
    ref = (
        mu * (1 + k) ** ((mu + 1) / 2) / (k ** ((mu - 1) / 2) * math.exp(mu * k))
        * g ** ((mu - 1) / 2) * np.exp(-mu * (1 + k) * g) * sc.iv(mu - 1, 2 * mu * np.sqrt(k * (1 + k) * g))
    )
    got = core.pdf(AkmsParams(2.0, k, mu, 1e9), g)
    np.testing.assert_allclose(got, ref, rtol=1e-7)
