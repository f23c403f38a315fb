import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nomaperf import chebyshev
from nomaperf.channel import (
    ChannelDraw,
    Geometry,
    cdf_alpha2,
    cdf_exact,
    effective_gain,
    order_statistic_cdf,
    order_statistic_pdf,
    pdf_exact,
    sample_channel_draw,
    sample_gains,
    sample_sorted_block,
    sample_unordered_gain,
)
from nomaperf.numerics import DomainError, integrate


def test_geometry_validation():
    with pytest.raises(DomainError):
        Geometry(0.0, 2.0, 1)
    with pytest.raises(DomainError):
        Geometry(5.0, 0.5, 1)
    with pytest.raises(DomainError):
        Geometry(5.0, 2.0, 0)


def test_effective_gain_centre_and_edge():
    assert effective_gain(0.0, 1.0, Geometry(5.0, 3.0)) == 1.0
    assert effective_gain(1.0, 2.0, Geometry(1.0, 2.0)) == pytest.approx(1.0)


def test_single_draw_and_sorting():
    rng = np.random.default_rng(0)
    assert sample_channel_draw(rng, Geometry(5.0, 2.0, 1)).gains.shape == (1,)
    assert ChannelDraw(np.sort([0.3, 0.1])).gains.tolist() == [0.1, 0.3]
    with pytest.raises(DomainError):
        ChannelDraw([0.3, 0.1])
    assert sample_unordered_gain(rng, Geometry(5.0, 2.0)) >= 0


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
@settings(max_examples=25, deadline=None)
def test_sorting_is_a_permutation(seed, m):
    geo = Geometry(5.0, 3.0, m)
    raw = sample_gains(np.random.default_rng(seed), geo, m)
    draw = sample_channel_draw(np.random.default_rng(seed), geo)
    assert np.all(np.diff(draw.gains) >= 0)
    assert sorted(raw.tolist()) == draw.gains.tolist()


def test_cdf_exact_limits(geo53):
    assert cdf_exact(0.0, geo53) == 0.0
    assert cdf_exact(math.inf, geo53) == 1.0
    assert cdf_exact(200.0, geo53) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        cdf_exact(-1.0, geo53)


def test_cdf_exact_alpha2_closed_form(geo52):
    ys = np.concatenate(([1e-6, 1e-3], np.linspace(0.01, 10.0, 60)))
    closed = cdf_alpha2(ys, 5.0)
    np.testing.assert_allclose([cdf_exact(y, geo52) for y in ys], closed, atol=1e-8, rtol=0)
    np.testing.assert_allclose(cdf_exact(ys, geo52), closed, atol=1e-8, rtol=0)


def test_cdf_exact_monotone_and_bounded(geo53):
    ys = np.linspace(0.0, 30.0, 300)
    f = cdf_exact(ys, geo53)
    assert np.all(np.diff(f) >= -1e-12)
    assert f.min() >= 0.0 and f.max() <= 1.0


def test_pdf_exact_is_derivative(geo53):
    h = 1e-5
    for y in (0.05, 0.3, 1.0, 3.0):
        fd = (cdf_exact(y + h, geo53) - cdf_exact(y - h, geo53)) / (2 * h)
        assert pdf_exact(y, geo53) == pytest.approx(fd, rel=1e-5)


def test_order_statistic_trivial_cases(geo52):
    one = Geometry(5.0, 2.0, 1)
    f = lambda x: 0.5  # noqa: E731
    pdf = lambda x: 0.7  # noqa: E731
    assert order_statistic_pdf(0.3, 1, one, f, pdf) == 0.7
    assert order_statistic_pdf(0.3, 2, geo52, f, pdf) == pytest.approx(0.7)
    with pytest.raises(DomainError):
        order_statistic_pdf(0.3, 3, geo52, f, pdf)


@pytest.mark.parametrize("m_users", [1, 2, 3, 5])
def test_order_statistic_pdf_integrates_to_one(m_users):
    geo = Geometry(5.0, 2.0, m_users)
    cdf = lambda x: cdf_alpha2(x, 5.0)  # noqa: E731
    pdf = lambda x: pdf_exact(x, geo)  # noqa: E731
    for m in range(1, m_users + 1):
        mass = integrate(lambda x: order_statistic_pdf(x, m, geo, cdf, pdf), 0.0, math.inf)
        assert mass == pytest.approx(1.0, abs=1e-6)


def test_order_statistic_cdf_matches_integral(model53):
    geo = Geometry(5.0, 3.0, 4)
    cdf = lambda x: chebyshev.cdf_approx(model53, x)  # noqa: E731
    pdf = lambda x: chebyshev.pdf_approx(model53, x)  # noqa: E731
    for m in range(1, 5):
        for x in (0.01, 0.2, 1.5):
            quad = integrate(lambda t: order_statistic_pdf(t, m, geo, cdf, pdf), 0.0, x)
            assert order_statistic_cdf(x, m, geo, cdf) == pytest.approx(quad, abs=1e-10)


def test_unordered_samples_follow_exact_cdf():
    geo = Geometry(5.0, 3.0, 1)
    x = np.sort(sample_gains(np.random.default_rng(11), geo, 10**6))
    grid = np.quantile(x, np.linspace(0.001, 0.999, 400))
    emp = np.searchsorted(x, grid, side="right") / x.size
    assert np.max(np.abs(emp - cdf_exact(grid, geo))) < 0.002


def test_strongest_gain_follows_cdf_power():
    geo = Geometry(5.0, 2.0, 3)
    best = np.sort(sample_sorted_block(np.random.default_rng(5), geo, 10**6)[:, -1])
    grid = np.quantile(best, np.linspace(0.001, 0.999, 400))
    emp = np.searchsorted(best, grid, side="right") / best.size
    assert np.max(np.abs(emp - cdf_alpha2(grid, 5.0) ** 3)) < 0.002
