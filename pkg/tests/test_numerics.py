import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from akms.errors import ConvergenceError, DomainError
from akms.mixture import build_mixture
from akms.numerics import (
    Ecdf,
    central_difference,
    compensated_sum,
    dkw_threshold,
    integrate_interval,
    integrate_semi_infinite,
    ks_statistic,
    ks_two_sample,
)


def test_semi_infinite_exponential():
    res = integrate_semi_infinite(lambda x: np.exp(-x))
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.abs_err_estimate < 1e-10


def test_endpoint_singularity():
    res = integrate_interval(lambda x: x**-0.5, 0.0, 1.0, endpoint_power=-0.5)
    assert res.value == pytest.approx(2.0, rel=1e-12)
    res = integrate_interval(lambda x: x**-0.5, 0.0, 1.0)
    assert res.value == pytest.approx(2.0, rel=1e-8)


def test_scale_finds_a_distant_peak():
    f = lambda x: np.exp(-0.5 * ((x - 1e6) / 1e4) ** 2) / (1e4 * math.sqrt(2 * math.pi))  # noqa: E731
    assert integrate_semi_infinite(f, scale=1e6).value == pytest.approx(1.0, rel=1e-9)


def test_split_additivity():
    f = lambda x: x**1.5 * np.exp(-x)  # noqa: E731
    t = 2.7
    head = integrate_interval(f, 0.0, t)
    tail = integrate_semi_infinite(f, start=t)
    full = integrate_semi_infinite(f)
    slack = head.abs_err_estimate + tail.abs_err_estimate + full.abs_err_estimate + 1e-14
    assert abs(head.value + tail.value - full.value) <= slack
    assert full.value == pytest.approx(math.gamma(2.5), rel=1e-10)


def test_quadrature_errors():
    with pytest.raises(DomainError):
        integrate_interval(np.exp, 1.0, 1.0)
    with pytest.raises(DomainError):
        integrate_interval(np.exp, 0.0, 1.0, endpoint_power=-1.5)
    with pytest.raises(DomainError):
        integrate_semi_infinite(np.exp, scale=0.0)
    with pytest.raises(ConvergenceError):
        integrate_interval(lambda x: np.where(x > 0, 1.0 / x, 0.0), 0.0, 1.0)


def test_central_difference():
    assert central_difference(math.sin, 0.3, 1e-5) == pytest.approx(math.cos(0.3), rel=1e-9)
    with pytest.raises(DomainError):
        central_difference(math.sin, 0.0, 0.0)


def test_compensated_sum_examples():
    assert compensated_sum([1.0, 1e-16, -1.0]) == 1e-16
    assert compensated_sum([]) == 0.0
    weights = build_mixture(0.1, 8, 2).weights
    assert max(abs(w) for w in weights) > 1.0  # alternating, large entries
    assert compensated_sum(weights) == pytest.approx(1.0, abs=1e-9)


def test_ecdf_and_ks_examples():
    e = Ecdf.from_samples([3.0, 1.0, 2.0])
    assert e.n == 3
    np.testing.assert_allclose(e([0.5, 1.0, 2.5, 3.0]), [0.0, 1 / 3, 2 / 3, 1.0])
    assert ks_statistic(Ecdf.from_samples([0.0]), lambda x: np.full_like(x, 0.5)) == 0.5
    with pytest.raises(DomainError):
        Ecdf.from_samples([])
    assert ks_two_sample([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert dkw_threshold(10**6) == pytest.approx(1.95e-3)


def test_ks_below_dkw_for_true_law():
    rng = np.random.default_rng(11)
    n = 10**6
    e = Ecdf.from_samples(rng.exponential(size=n))
    assert ks_statistic(e, lambda x: -np.expm1(-x)) < dkw_threshold(n)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), power=st.floats(0.2, 5.0), shift=st.floats(-3.0, 3.0))
def test_ks_invariant_under_monotone_map(seed, power, shift):
    x = np.random.default_rng(seed).exponential(size=200)
    cdf = lambda v: -np.expm1(-v)  # noqa: E731
    base = ks_statistic(Ecdf.from_samples(x), cdf)
    mapped = x**power + shift
    back = lambda v: cdf(np.maximum(v - shift, 0.0) ** (1.0 / power))  # noqa: E731
    assert ks_statistic(Ecdf.from_samples(mapped), back) == pytest.approx(base, abs=1e-12)
