"""Gauss-Chebyshev approximation of the unordered channel-gain distribution.

With nodes theta_n = cos((2n-1) pi / 2N) the CDF becomes a finite sum of
exponentials,

    F(y) ~= (1/R_D) sum_{n=0}^{N} b_n exp(-c_n y),    c_0 = 0,

and the pdf is (1/R_D) sum_{n=1}^{N} beta_n exp(-c_n y) with beta_n = -b_n c_n.

The plain rule with w_n = pi/N does not integrate the radial weight exactly:
b_0 / R_D = pi / (2N sin(pi/2N)), about 1.0041 at N = 10, so F(inf) != 1.
``normalize=True`` (the default) rescales b_n and beta_n by that factor,
which makes F(0) = 0 and F(inf) = 1 hold together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Geometry
from .numerics import DomainError

DEFAULT_ORDER = 10


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class ChebyshevModel:
    order_n: int
    radius_rd: float
    alpha: float
    nodes: np.ndarray  # theta_n, n = 1..N
    weight: float  # w_n = pi/N
    c: np.ndarray  # c_n, n = 1..N
    beta: np.ndarray  # beta_n, n = 1..N
    b: np.ndarray  # b_n, n = 0..N
    normalized: bool = True

    @property
    def c_full(self) -> np.ndarray:
        """Exponents including c_0 = 0, aligned with :attr:`b`."""
        return np.concatenate(([0.0], self.c))

    @property
    def eta(self) -> float:
        """Slope of the CDF at the origin, (1/R_D) sum beta_n."""
        return float(self.beta.sum() / self.radius_rd)

    @property
    def tail_mass(self) -> float:
        """F(inf) = b_0 / R_D."""
        return float(self.b[0] / self.radius_rd)


def build_model(geometry: Geometry, order_n: int = DEFAULT_ORDER, normalize: bool = True) -> ChebyshevModel:
    if int(order_n) != order_n or order_n < 1:
        raise DomainError(f"quadrature order must be a positive integer, got {order_n}")
    n = np.arange(1, order_n + 1)
    theta = np.cos((2 * n - 1) * np.pi / (2 * order_n))
    w = math.pi / order_n
    half = geometry.radius_rd / 2.0
    radius = half * theta + half
    c = 1.0 + radius**geometry.alpha
    mass = w * np.sqrt(1.0 - theta**2) * radius
    if normalize:
        mass = mass * geometry.radius_rd / mass.sum()
    b_tail = -mass
    b = np.concatenate(([-b_tail.sum()], b_tail))
    beta = mass * c
    return ChebyshevModel(
        order_n=int(order_n),
        radius_rd=float(geometry.radius_rd),
        alpha=float(geometry.alpha),
        nodes=_frozen(theta),
        weight=w,
        c=_frozen(c),
        beta=_frozen(beta),
        b=_frozen(b),
        normalized=normalize,
    )


def _check_y(y) -> np.ndarray:
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("channel gain argument must be >= 0")
    return arr


def _out(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def cdf_approx(model: ChebyshevModel, y):
    # b_0 + sum b_n e^{-c_n y} regrouped as sum |b_n| (1 - e^{-c_n y}) plus the
    # b_0 residual, which keeps small-y values free of cancellation
    arr = _check_y(y)
    tail = -model.b[1:]
    one_minus = -np.expm1(-np.multiply.outer(arr, model.c))
    val = (one_minus @ tail + (model.b[0] - tail.sum())) / model.radius_rd
    return _out(np.asarray(val))


def survival_approx(model: ChebyshevModel, y):
    """1 - F(y) = 1 - b_0/R_D - (1/R_D) sum_{n>=1} b_n e^{-c_n y}, free of
    cancellation in the tail."""
    arr = _check_y(y)
    val = np.exp(-np.multiply.outer(arr, model.c)) @ (-model.b[1:]) / model.radius_rd
    val = val + (1.0 - model.tail_mass)
    return _out(np.asarray(val))


def pdf_approx(model: ChebyshevModel, y):
    arr = _check_y(y)
    val = np.exp(-np.multiply.outer(arr, model.c)) @ model.beta / model.radius_rd
    return _out(np.asarray(val))


def small_y_cdf(model: ChebyshevModel, y):
    """First-order expansion at the origin, eta * y."""
    return _out(model.eta * np.asarray(y, dtype=float))


def small_y_pdf(model: ChebyshevModel, y):
    """(1/R_D) sum beta_n (1 - c_n y)."""
    arr = np.asarray(y, dtype=float)
    val = (1.0 - np.multiply.outer(arr, model.c)) @ model.beta / model.radius_rd
    return _out(np.asarray(val))
