"""Shared numerical kernels: adaptive quadrature, root bracketing, E1 and
multinomial coefficients, log-log line fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _spi
from scipy import optimize as _spo

EULER_GAMMA = 0.57721566490153286061


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class IntegrationError(ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    The best estimate and its error bound are kept on the exception so a
    caller can still inspect them.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(ValueError):
    """Root finder was handed an interval without a sign change."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 10**6

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def _semi_infinite(f: Callable[[float], float], a: float) -> Callable[[float], float]:
    # x = a + t/(1-t), dx = dt/(1-t)^2
    def g(t):
        if t >= 1.0:
            return 0.0
        s = 1.0 - t
        return f(a + t / s) / (s * s)

    return g


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Adaptive Gauss-Kronrod quadrature of a scalar function on [a, b].

    ``b`` may be ``inf``; the half line is then mapped onto [0, 1) with
    ``t = (x - a) / (1 + x - a)`` so the error control stays on a finite
    interval.

    Raises
    ------
    IntegrationError
        If the subdivision budget is exhausted before the tolerance is met.
    """
    if not math.isfinite(a):
        raise DomainError("lower limit must be finite")
    if b == a:
        return 0.0
    if b < a:
        return -integrate(f, b, a, spec)
    if math.isinf(b):
        g, lo, hi = _semi_infinite(f, a), 0.0, 1.0
    else:
        g, lo, hi = f, a, b

    out = _spi.quad(
        g,
        lo,
        hi,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    val, err = out[0], out[1]
    # a fourth element is QUADPACK's warning message (ier != 0)
    if len(out) > 3 and err > max(spec.abs_tol, spec.rel_tol * abs(val)):
        raise IntegrationError(str(out[3]).splitlines()[0], val, err)
    return float(val)


def integrate_vector(
    f: Callable[[float], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Vector-valued counterpart of :func:`integrate` (max-norm error control)."""
    if b == a:
        return np.zeros_like(np.asarray(f(a), dtype=float))
    if math.isinf(b):
        g, lo, hi = _semi_infinite(f, a), 0.0, 1.0
    else:
        g, lo, hi = f, a, b
    val, err, info = _spi.quad_vec(
        g,
        lo,
        hi,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        norm="max",
        limit=spec.max_subdivisions,
        full_output=True,
    )
    if not info.success:
        raise IntegrationError(info.message, val, err)
    return np.asarray(val, dtype=float)


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    """Root of ``f`` inside a sign-changing bracket, to interval width ``tol``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    return float(_spo.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))


def _e1_series(z: np.ndarray) -> np.ndarray:
    # E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
    total = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(1, 60):
        term = term * (-z) / k
        total += term / k
    return -EULER_GAMMA - np.log(z) - total


def _e1_scaled_cf(z: np.ndarray) -> np.ndarray:
    # modified Lentz on e^z E1(z) = 1/(z+1- 1^2/(z+3- 2^2/(z+5- ...)))
    tiny = 1e-300
    b = z + 1.0
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    active = np.arange(z.size)
    for i in range(1, 1000):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h[active] *= delta
        keep = np.abs(delta - 1.0) > 2e-16
        if not keep.any():
            break
        active, b, c, d = active[keep], b[keep], c[keep], d[keep]
    return h


def exp_e1_scaled(z) -> np.ndarray | float:
    """``e^z E1(z)`` for ``z > 0`` without overflow at large ``z``."""
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("E1 requires z > 0")
    flat = arr.ravel()
    out = np.empty_like(flat)
    small = flat < 1.0
    if small.any():
        zs = flat[small]
        out[small] = np.exp(zs) * _e1_series(zs)
    if (~small).any():
        out[~small] = _e1_scaled_cf(flat[~small])
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def exp_e1(z) -> np.ndarray | float:
    """Exponential integral E1(z) = int_z^inf e^{-t}/t dt for z > 0.

    Power series below 1, continued fraction above; about 1e-15 relative
    accuracy across the range.
    """
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("E1 requires z > 0")
    flat = arr.ravel()
    out = np.empty_like(flat)
    small = flat < 1.0
    if small.any():
        out[small] = _e1_series(flat[small])
    if (~small).any():
        zl = flat[~small]
        out[~small] = np.exp(-zl) * _e1_scaled_cf(zl)
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def log_multinomial(m_total: int, k: Sequence[int]) -> float:
    """ln(M! / (k_0! ... k_N!))."""
    if any(ki < 0 for ki in k):
        raise DomainError("composition entries must be nonnegative")
    if sum(k) != m_total:
        raise DomainError(f"composition sums to {sum(k)}, expected {m_total}")
    return math.lgamma(m_total + 1) - sum(math.lgamma(ki + 1) for ki in k)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Unweighted least-squares slope of log10(y) against log10(x)."""
    lx = np.log10(np.asarray(x, dtype=float))
    ly = np.log10(np.asarray(y, dtype=float))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def db_to_linear(snr_db):
    out = np.power(10.0, np.asarray(snr_db, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out
