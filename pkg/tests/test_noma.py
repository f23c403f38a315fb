import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nomaperf.channel import ChannelDraw, Geometry, sample_sorted_block
from nomaperf.noma import (
    InfeasibleUserError,
    PowerAllocation,
    RateTargets,
    achievable_rates,
    achievable_rates_array,
    default_allocation,
    feasibility,
    outage_thresholds,
    psi_thresholds,
    rate_j_to_m,
)
from nomaperf.numerics import DomainError


def test_default_allocation_values():
    np.testing.assert_allclose(default_allocation(2).coeffs, [0.8, 0.2])
    np.testing.assert_allclose(default_allocation(3).coeffs, [3 / 6, 2 / 6, 1 / 6])
    np.testing.assert_allclose(default_allocation(1).coeffs, [1.0])


@pytest.mark.parametrize("m", range(2, 25))
def test_default_allocation_sums_to_one_and_decreases(m):
    a = default_allocation(m).coeffs
    assert abs(a.sum() - 1.0) <= 1e-12
    assert np.all(np.diff(a) < 0)


def test_allocation_validation():
    with pytest.raises(DomainError):
        PowerAllocation([0.5, 0.6])
    with pytest.raises(DomainError):
        PowerAllocation([0.2, 0.8])
    with pytest.raises(DomainError):
        PowerAllocation([1.0, 0.0])
    with pytest.raises(DomainError):
        RateTargets([0.5, 0.0])


def test_rate_j_to_m_examples():
    a = default_allocation(2)
    assert rate_j_to_m(0.0, 10.0, a, 1) == 0.0
    assert rate_j_to_m(0.0, 10.0, a, 2) == 0.0
    assert rate_j_to_m(15.0, 1.0, a, 2) == pytest.approx(2.0)
    assert rate_j_to_m(1e12, 1e3, a, 1) == pytest.approx(math.log2(5.0), rel=1e-9)
    with pytest.raises(DomainError):
        rate_j_to_m(1.0, 1.0, a, 3)


def test_achievable_rates_examples():
    a = default_allocation(3)
    assert achievable_rates(ChannelDraw([0.0, 0.0, 0.0]), 100.0, a).total == 0.0
    one = achievable_rates(ChannelDraw([0.7]), 20.0, PowerAllocation([1.0]))
    assert one.rates[0] == pytest.approx(math.log2(1 + 14.0))


def test_sic_always_succeeds_in_case_two():
    geo = Geometry(5.0, 3.0, 4)
    a = default_allocation(4)
    gains = sample_sorted_block(np.random.default_rng(3), geo, 10**4)
    rho = 10.0 ** 2.5
    own = achievable_rates_array(gains, rho, a)
    for j in range(1, 5):
        for m in range(j, 5):
            at_m = rate_j_to_m(gains[:, m - 1], rho, a, j)
            assert np.all(at_m >= own[:, j - 1] - 1e-12)


def test_feasibility_examples():
    a = default_allocation(2)
    phi1 = 2**0.1 - 1
    assert phi1 == pytest.approx(0.0717734625)
    assert feasibility(a, RateTargets([0.1, 0.5])).tolist() == [True, True]
    assert feasibility(a, RateTargets([3.0, 0.5])).tolist() == [False, True]
    assert feasibility(PowerAllocation([1.0]), RateTargets([9.0])).tolist() == [True]


def test_feasibility_equality_is_infeasible():
    a = PowerAllocation([0.75, 0.25])
    # phi_1 = 3 exactly, so a_1 = phi_1 * a_2
    assert not feasibility(a, RateTargets([2.0, 0.5]))[0]


def test_psi_examples():
    psi, star = psi_thresholds(PowerAllocation([1.0]), RateTargets([1.0]), 10.0)
    assert psi[0] == pytest.approx(0.1)
    psi, star = psi_thresholds(default_allocation(2), RateTargets([1.0, 1.0]), 10.0)
    assert psi[1] == pytest.approx(0.5)
    assert psi[0] == pytest.approx(1 / 6)
    assert star[1] == pytest.approx(0.5)


def test_psi_names_infeasible_user():
    with pytest.raises(InfeasibleUserError) as info:
        psi_thresholds(default_allocation(2), RateTargets([3.0, 0.5]), 10.0)
    assert info.value.user == 1
    star = outage_thresholds(default_allocation(2), RateTargets([3.0, 0.5]), 10.0)
    assert np.all(np.isinf(star))
    # the strongest user has no interference term, so any target stays feasible
    star = outage_thresholds(default_allocation(2), RateTargets([0.1, 5.0]), 10.0)
    assert star[1] == pytest.approx(31.0 / 2.0)


@given(
    st.integers(1, 6),
    st.floats(0.01, 0.3),
    st.floats(0.0, 6.0),
)
@settings(max_examples=50, deadline=None)
def test_psi_scales_inverse_with_snr(m, rate, snr_db):
    a = default_allocation(m)
    t = RateTargets([rate] * m)
    if not feasibility(a, t).all():
        return
    rho = 10 ** (snr_db / 10)
    psi1, star1 = psi_thresholds(a, t, rho)
    psi10, star10 = psi_thresholds(a, t, 10 * rho)
    np.testing.assert_allclose(psi10, psi1 / 10, rtol=1e-14)
    assert np.all(np.diff(star1) >= 0)
