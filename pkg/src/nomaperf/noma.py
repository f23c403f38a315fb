"""Downlink NOMA with SIC: power allocation, achievable rates, and the
decodability condition that decides whether a target rate is reachable."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelDraw
from .numerics import DomainError


class InfeasibleUserError(ValueError):
    """The rate target of ``user`` (1-based) violates a_j > phi_j * sum_{i>j} a_i."""

    def __init__(self, user: int):
        super().__init__(f"user {user} violates the SIC decodability condition")
        self.user = user


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PowerAllocation:
    """Power fractions a_1 >= ... >= a_M > 0 summing to one (user 1 weakest)."""

    coeffs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise DomainError("power allocation must be a nonempty vector")
        if np.any(a <= 0):
            raise DomainError("power coefficients must be positive")
        if abs(a.sum() - 1.0) > 1e-12:
            raise DomainError(f"power coefficients sum to {a.sum()!r}, expected 1")
        if np.any(np.diff(a) > 0):
            raise DomainError("power coefficients must be nonincreasing in the user index")
        object.__setattr__(self, "coeffs", _frozen(a))

    @property
    def num_users(self) -> int:
        return self.coeffs.size

    @property
    def residual(self) -> np.ndarray:
        """a~_m = sum_{i>m} a_i for each user; zero for the strongest."""
        a = self.coeffs
        return _frozen(np.concatenate((np.cumsum(a[::-1])[::-1][1:], [0.0])))


@dataclass(frozen=True, eq=False)
class RateTargets:
    targets: np.ndarray  # BPCU

    def __post_init__(self):
        t = np.asarray(self.targets, dtype=float)
        if t.ndim != 1 or t.size == 0 or np.any(t <= 0):
            raise DomainError("rate targets must be a nonempty vector of positive rates")
        object.__setattr__(self, "targets", _frozen(t))

    @property
    def phi(self) -> np.ndarray:
        """SINR thresholds 2^R - 1."""
        return np.expm1(self.targets * np.log(2.0))


def default_allocation(m_users: int) -> PowerAllocation:
    """(0.8, 0.2) for two users, otherwise a_m proportional to M - m + 1."""
    if m_users < 1:
        raise DomainError("need at least one user")
    if m_users == 2:
        return PowerAllocation([0.8, 0.2])
    w = np.arange(m_users, 0, -1, dtype=float)
    return PowerAllocation(w / w.sum())


def rate_j_to_m(gain_m, rho: float, alloc: PowerAllocation, j: int):
    """Rate at which a receiver with gain ``gain_m`` decodes user ``j``'s message
    after cancelling users 1..j-1."""
    if not 1 <= j <= alloc.num_users:
        raise DomainError(f"user index {j} outside 1..{alloc.num_users}")
    g = np.asarray(gain_m, dtype=float) * rho
    a_j = alloc.coeffs[j - 1]
    interf = alloc.residual[j - 1]
    out = np.log2(1.0 + g * a_j / (g * interf + 1.0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class RateVector:
    rates: np.ndarray

    @property
    def total(self) -> float:
        return float(self.rates.sum())


def achievable_rates_array(gains: np.ndarray, rho: float, alloc: PowerAllocation) -> np.ndarray:
    """Own-message rates for a (..., M) array of sorted gains."""
    g = np.asarray(gains, dtype=float) * rho
    if g.shape[-1] != alloc.num_users:
        raise DomainError("gain vector length does not match the allocation")
    return np.log2(1.0 + g * alloc.coeffs / (g * alloc.residual + 1.0))


def achievable_rates(draw: ChannelDraw, rho: float, alloc: PowerAllocation) -> RateVector:
    return RateVector(_frozen(achievable_rates_array(draw.gains, rho, alloc)))


def feasibility(alloc: PowerAllocation, targets: RateTargets) -> np.ndarray:
    """Per-user flag for a_j - phi_j * sum_{i>j} a_i > 0; equality is infeasible."""
    _check_lengths(alloc, targets)
    return alloc.coeffs - targets.phi * alloc.residual > 0


def _check_lengths(alloc: PowerAllocation, targets: RateTargets):
    if alloc.num_users != targets.targets.size:
        raise DomainError(
            f"{alloc.num_users} power coefficients but {targets.targets.size} rate targets"
        )


def psi_thresholds(alloc: PowerAllocation, targets: RateTargets, rho: float):
    """Gain thresholds psi_j and their running maxima psi*_m.

    Raises
    ------
    InfeasibleUserError
        For the first user whose threshold is undefined.
    """
    ok = feasibility(alloc, targets)
    if not ok.all():
        raise InfeasibleUserError(int(np.argmin(ok)) + 1)
    phi = targets.phi
    psi = phi / (rho * (alloc.coeffs - phi * alloc.residual))
    return psi, np.maximum.accumulate(psi)


def outage_thresholds(alloc: PowerAllocation, targets: RateTargets, rho: float) -> np.ndarray:
    """psi*_m for every user, ``inf`` where some user j <= m is infeasible.

    User m avoids outage exactly when its gain exceeds this value.
    """
    ok = feasibility(alloc, targets)
    phi = targets.phi
    with np.errstate(divide="ignore"):
        psi = np.where(ok, phi / (rho * np.where(ok, alloc.coeffs - phi * alloc.residual, 1.0)), np.inf)
    return np.maximum.accumulate(psi)
