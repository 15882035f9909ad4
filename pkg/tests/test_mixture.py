import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from akms import core
from akms.core import AkmsParams
from akms.errors import DomainError
from akms.mixture import (
    AlphaMuParams,
    ConditioningWarning,
    MixtureDist,
    alpha_mu_pdf,
    build_mixture,
    component_means,
    mixture_as_alpha_mu,
    mixture_cdf,
    mixture_pdf,
)
from akms.numerics import integrate_semi_infinite


def test_two_one_weights():
    k = 1.7
    spec = build_mixture(k, 2, 1)
    live = [c for c in spec.components if c.weight != 0.0]
    assert [c.order for c in live] == [1, 1]
    assert live[0].weight == pytest.approx(-1.0 / (2 * k), rel=1e-15)
    assert live[1].weight == pytest.approx((2 * k + 1) / (2 * k), rel=1e-15)
    assert live[0].scale == 1.0
    assert live[1].scale == pytest.approx(2 * k + 1, rel=1e-15)
    assert spec.weight_sum() == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(kappa=st.floats(0.01, 50.0), mu=st.integers(1, 8), m=st.integers(1, 8))
def test_weights_sum_to_one(kappa, mu, m):
    assert build_mixture(kappa, mu, m).weight_sum() == pytest.approx(1.0, abs=1e-9)


def test_mu_not_above_m_has_positive_weights():
    spec = build_mixture(2.0, 2, 5)
    assert spec.M == 3
    assert all(w > 0 for w in spec.weights)


@pytest.mark.parametrize("args", [(2.0, 1.5, 2), (2.0, 2, 0), (-1.0, 2, 2)])
def test_build_rejects_bad_arguments(args):
    with pytest.raises(DomainError):
        build_mixture(*args)


def test_zero_kappa_above_m_is_rejected():
    with pytest.raises(DomainError):
        build_mixture(0.0, 3, 1)


@pytest.mark.parametrize(
    "p",
    [
        AkmsParams(2.3, 3.0, 2, 5),
        AkmsParams(1.4, 2.0, 4, 1, 3.0),
        AkmsParams(3.0, 0.5, 3, 3),
        AkmsParams(2.0, 0.0, 1, 4),
    ],
)
def test_mixture_matches_general_form(p):
    d = MixtureDist.from_params(p)
    g = np.geomspace(0.05, 5.0, 30) * p.mean_snr
    np.testing.assert_allclose(mixture_pdf(d, g), core.pdf(p, g), rtol=1e-9)
    np.testing.assert_allclose(mixture_cdf(d, g), core.cdf(p, g), rtol=1e-8, atol=1e-12)
    assert isinstance(mixture_pdf(d, 1.0), float)


def test_component_view_reassembles_density():
    p = AkmsParams(2.3, 3.0, 3, 2, 2.0)
    d = MixtureDist.from_params(p)
    g = np.linspace(0.1, 6.0, 12)
    total = sum(w * alpha_mu_pdf(am, g) for w, am in mixture_as_alpha_mu(d) if w != 0.0)
    np.testing.assert_allclose(total, core.pdf(p, g), rtol=1e-9)
    means = component_means(d)
    assert math.fsum(w * mu for w, mu in zip(d.spec.weights, means)) == pytest.approx(2.0, rel=1e-9)


def test_small_kappa_falls_back_with_warning():
    p = AkmsParams(2.0, 1e-5, 3, 1)
    d = MixtureDist.from_params(p)
    with pytest.warns(ConditioningWarning):
        v = mixture_pdf(d, 1.0)
    assert v == pytest.approx(core.pdf(p, 1.0), rel=1e-12)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        mixture_pdf(MixtureDist.from_params(AkmsParams(2.0, 1.0, 3, 1)), 1.0)


def test_negative_snr_rejected():
    d = MixtureDist.from_params(AkmsParams(2.0, 1.0, 2, 2))
    with pytest.raises(DomainError):
        mixture_pdf(d, -1.0)
    with pytest.raises(DomainError):
        mixture_cdf(d, [1.0, -1.0])


@pytest.mark.parametrize("alpha,mu,mean", [(2.0, 1.0, 1.0), (0.8, 2.5, 3.0), (3.5, 0.7, 0.2)])
def test_alpha_mu_law_normalized(alpha, mu, mean):
    p = AlphaMuParams(alpha, mu, mean)
    f = lambda x: alpha_mu_pdf(p, x)  # noqa: E731
    assert integrate_semi_infinite(f, scale=mean).value == pytest.approx(1.0, rel=1e-9)
    assert integrate_semi_infinite(lambda x: x * f(x), scale=mean).value == pytest.approx(mean, rel=1e-9)


def test_alpha_mu_at_origin():
    assert alpha_mu_pdf(AlphaMuParams(2.0, 1.0), 0.0) == pytest.approx(1.0)
    assert alpha_mu_pdf(AlphaMuParams(2.0, 2.0), 0.0) == 0.0
    assert alpha_mu_pdf(AlphaMuParams(1.0, 1.0), 0.0) == math.inf
    with pytest.raises(DomainError):
        AlphaMuParams(0.0, 1.0)
