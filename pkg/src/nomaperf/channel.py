"""Disc deployment with Rayleigh fading: sampling of effective channel gains
and the exact (numerically integrated) gain distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .numerics import DEFAULT_QUADRATURE, DomainError, QuadratureSpec, integrate, integrate_vector


@dataclass(frozen=True)
class Geometry:
    """Base station at the centre of a disc of radius ``radius_rd`` metres,
    ``num_users`` users dropped uniformly over its area."""

    radius_rd: float
    alpha: float
    num_users: int = 1

    def __post_init__(self):
        if not self.radius_rd > 0:
            raise DomainError(f"radius_rd must be positive, got {self.radius_rd}")
        if not self.alpha >= 1:
            raise DomainError(f"alpha must be >= 1, got {self.alpha}")
        if int(self.num_users) != self.num_users or self.num_users < 1:
            raise DomainError(f"num_users must be a positive integer, got {self.num_users}")


@dataclass(frozen=True)
class ChannelDraw:
    gains: np.ndarray
    seed_tag: int = 0

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise DomainError("gains must be a nonempty vector")
        if np.any(g < 0) or np.any(np.diff(g) < 0):
            raise DomainError("gains must be nonnegative and sorted ascending")
        g.flags.writeable = False
        object.__setattr__(self, "gains", g)

    @property
    def num_users(self) -> int:
        return self.gains.size


def effective_gain(u, fading_power, geometry: Geometry):
    """|g|^2 / (1 + d^alpha) with the distance obtained as d = R_D sqrt(u)."""
    d = geometry.radius_rd * np.sqrt(u)
    return fading_power / (1.0 + d**geometry.alpha)


def sample_gains(rng: np.random.Generator, geometry: Geometry, size=None) -> np.ndarray:
    """Unordered gains; ``size`` follows numpy's convention."""
    u = rng.random(size)
    fading = rng.standard_exponential(size)
    return effective_gain(u, fading, geometry)


def sample_unordered_gain(rng: np.random.Generator, geometry: Geometry) -> float:
    return float(sample_gains(rng, geometry))


def sample_channel_draw(rng: np.random.Generator, geometry: Geometry, seed_tag: int = 0) -> ChannelDraw:
    raw = sample_gains(rng, geometry, geometry.num_users)
    return ChannelDraw(np.sort(raw, kind="stable"), seed_tag)


def sample_sorted_block(rng: np.random.Generator, geometry: Geometry, trials: int) -> np.ndarray:
    """``trials`` x M array, each row a sorted channel draw."""
    raw = sample_gains(rng, geometry, (trials, geometry.num_users))
    return np.sort(raw, axis=1, kind="stable")


def _check_y(y):
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("channel gain argument must be >= 0")
    return arr


def cdf_exact(y, geometry: Geometry, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """CDF of the unordered gain, (2/R^2) int_0^R (1 - e^{-(1+z^a) y}) z dz.

    Accepts a scalar or an array; arrays are integrated jointly with a
    vector-valued adaptive rule.
    """
    arr = _check_y(y)
    r, a = geometry.radius_rd, geometry.alpha
    scale = 2.0 / (r * r)
    if arr.ndim == 0:
        yv = float(arr)
        if yv == 0.0:
            return 0.0
        if math.isinf(yv):
            return 1.0
        return scale * integrate(lambda z: -math.expm1(-(1.0 + z**a) * yv) * z, 0.0, r, spec)
    flat = arr.ravel()
    out = np.ones_like(flat)
    fin = np.isfinite(flat)
    yf = flat[fin]
    out[fin] = scale * integrate_vector(lambda z: -np.expm1(-(1.0 + z**a) * yf) * z, 0.0, r, spec)
    return out.reshape(arr.shape)


def pdf_exact(y, geometry: Geometry, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Derivative of :func:`cdf_exact`: (2/R^2) int_0^R (1+z^a) e^{-(1+z^a) y} z dz."""
    arr = _check_y(y)
    r, a = geometry.radius_rd, geometry.alpha
    scale = 2.0 / (r * r)
    if arr.ndim == 0:
        yv = float(arr)
        return scale * integrate(lambda z: (1.0 + z**a) * math.exp(-(1.0 + z**a) * yv) * z, 0.0, r, spec)
    flat = arr.ravel()
    val = scale * integrate_vector(lambda z: (1.0 + z**a) * np.exp(-(1.0 + z**a) * flat) * z, 0.0, r, spec)
    return val.reshape(arr.shape)


def cdf_alpha2(y, radius_rd: float):
    """Closed form of the unordered-gain CDF for alpha = 2.

    int_0^R e^{-(1+z^2) y} z dz = e^{-y} (1 - e^{-R^2 y}) / (2 y).
    """
    y = np.asarray(y, dtype=float)
    r2 = radius_rd * radius_rd
    with np.errstate(invalid="ignore", divide="ignore"):
        tail = np.where(y > 0, np.exp(-y) * -np.expm1(-r2 * y) / (r2 * y), 1.0)
    out = 1.0 - tail
    return float(out) if out.ndim == 0 else out


def _binomial_prefactor(m: int, num_users: int) -> float:
    return math.exp(
        math.lgamma(num_users + 1) - math.lgamma(m) - math.lgamma(num_users - m + 1)
    )


def _check_rank(m: int, num_users: int):
    if not 1 <= m <= num_users:
        raise DomainError(f"order statistic index {m} outside 1..{num_users}")


def order_statistic_pdf(
    x,
    m: int,
    geometry: Geometry,
    cdf_provider: Callable,
    pdf_provider: Callable,
):
    """Density of the m-th smallest of M i.i.d. gains (1-based ``m``)."""
    num_users = geometry.num_users
    _check_rank(m, num_users)
    f_cdf = cdf_provider(x)
    f_pdf = pdf_provider(x)
    tau = _binomial_prefactor(m, num_users)
    return tau * f_cdf ** (m - 1) * (1.0 - f_cdf) ** (num_users - m) * f_pdf


def order_statistic_cdf(x, m: int, geometry: Geometry, cdf_provider: Callable):
    """P(|h_m|^2 <= x) through the regularized incomplete beta function."""
    _check_rank(m, geometry.num_users)
    f = np.clip(cdf_provider(x), 0.0, 1.0)
    out = special.betainc(m, geometry.num_users - m + 1, f)
    return float(out) if np.ndim(out) == 0 else out
