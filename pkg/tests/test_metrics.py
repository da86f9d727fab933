import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import wasserstein_distance

from stickycouple.metrics import (
    Sample1D,
    ar1_stationary,
    gaussian_tv_same_var,
    silverman_bandwidth,
    tv_kde,
    w1_empirical_1d,
)
from stickycouple.streams import substream

finite = st.floats(-100.0, 100.0)


@given(
    a=arrays(float, st.integers(1, 60), elements=finite),
    b=arrays(float, st.integers(1, 60), elements=finite),
)
@settings(max_examples=150)
def test_w1_matches_scipy_for_equal_sizes(a, b):
    n = min(a.size, b.size)
    a, b = a[:n], b[:n]
    assert w1_empirical_1d(a, b) == pytest.approx(
        wasserstein_distance(a, b), rel=1e-10, abs=1e-10
    )


def test_w1_shift_identity():
    rng = substream(1)
    x = rng.standard_normal(1000)
    assert w1_empirical_1d(x, x + 0.7) == pytest.approx(0.7, rel=1e-12)
    assert w1_empirical_1d(x, x) == 0.0


def test_w1_unequal_sizes_subsamples_deterministically():
    rng = substream(2)
    x = rng.standard_normal(50_000)
    y = rng.standard_normal(7_000) + 0.5
    d1 = w1_empirical_1d(x, y)
    d2 = w1_empirical_1d(x, y)
    assert d1 == d2
    # still close to the true mean gap for Gaussians of the same spread
    assert d1 == pytest.approx(0.5, abs=0.05)


def test_sample_validation():
    with pytest.raises(ValueError):
        Sample1D.make([])
    with pytest.raises(ValueError):
        Sample1D.make([1.0, math.nan])


def test_silverman_formula():
    rng = substream(3)
    x = rng.standard_normal(10_000)
    expected = 1.06 * float(np.std(x, ddof=1)) * 10_000 ** (-0.2)
    assert silverman_bandwidth(x) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        silverman_bandwidth(np.ones(100))


def test_tv_kde_of_identical_samples_is_zero():
    rng = substream(4)
    x = rng.standard_normal(5_000)
    assert tv_kde(x, x.copy()) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        tv_kde(x[:50], x)


def test_tv_kde_matches_exact_gaussian_tv():
    rng = substream(5)
    n = 200_000
    gap = 1.0
    x = rng.standard_normal(n)
    y = rng.standard_normal(n) + gap
    exact = gaussian_tv_same_var(gap, 1.0)
    assert tv_kde(x, y) == pytest.approx(exact, abs=0.02)


def test_tv_kde_separated_samples_saturates():
    rng = substream(6)
    x = rng.standard_normal(2_000)
    y = rng.standard_normal(2_000) + 100.0
    assert tv_kde(x, y) == pytest.approx(1.0, abs=1e-3)


def test_gaussian_tv_closed_form():
    assert gaussian_tv_same_var(0.0, 1.0) == 0.0
    # quadrature cross-check of 0.5 * integral |phi(x) - phi(x - gap)|
    from scipy.integrate import quad

    gap, std = 1.3, 0.8

    def diff(x):
        za = (x / std) ** 2
        zb = ((x - gap) / std) ** 2
        return abs(math.exp(-za / 2) - math.exp(-zb / 2)) / (std * math.sqrt(2 * math.pi))

    oracle = 0.5 * quad(diff, -12, 14, limit=200)[0]
    assert gaussian_tv_same_var(gap, std) == pytest.approx(oracle, rel=1e-8)
    with pytest.raises(ValueError):
        gaussian_tv_same_var(-1.0, 1.0)
    with pytest.raises(ValueError):
        gaussian_tv_same_var(1.0, 0.0)


def test_ar1_stationary_is_a_fixed_point():
    rho_, gamma, sigma, shift = 1.0, 0.05, 1.2, 0.4
    (m0, v), (m1, v1) = ar1_stationary(rho_, gamma, sigma, shift)
    assert m0 == 0.0 and m1 == shift and v == v1
    # one chain step preserves the variance: v = (1-gamma*rho)^2 v + sigma^2 gamma
    assert v == pytest.approx((1 - gamma * rho_) ** 2 * v + sigma**2 * gamma, rel=1e-12)
    with pytest.raises(ValueError):
        ar1_stationary(0.0, gamma, sigma, shift)
    with pytest.raises(ValueError):
        ar1_stationary(1.0, 1.5, sigma, shift)
