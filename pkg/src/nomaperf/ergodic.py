"""Ergodic sum-rate analytics for opportunistic rates: the high-SNR sum rate built
from a multinomial expansion of F^M, the extreme-value growth function, and
the large-M asymptote."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np
from scipy import special

from . import chebyshev
from .chebyshev import ChebyshevModel
from .noma import PowerAllocation
from .numerics import DomainError, exp_e1_scaled, find_root

MAX_COMPOSITIONS = 10**7


@dataclass
class ErgodicReport:
    snr_db: float
    high_snr_rate: float | None
    empirical_rate: float
    empirical_ci95: float
    asymptote: float | None
    baseline_random: float
    baseline_opportunistic: float


def composition_count(m_users: int, order_n: int, exclude_all_k0: bool = False) -> int:
    return math.comb(m_users + order_n, order_n) - int(exclude_all_k0)


def enumerate_compositions(m_users: int, order_n: int, exclude_all_k0: bool = False) -> Iterator[tuple[int, ...]]:
    """Every (k_0, ..., k_N) >= 0 with sum M, in descending lexicographic order.

    With ``exclude_all_k0`` the leading (M, 0, ..., 0) is skipped.
    """
    if m_users < 1 or order_n < 1:
        raise DomainError("need m_users >= 1 and order_n >= 1")

    def rec(remaining: int, parts: int):
        if parts == 1:
            yield (remaining,)
            return
        for k in range(remaining, -1, -1):
            for rest in rec(remaining - k, parts - 1):
                yield (k,) + rest

    it = rec(m_users, order_n + 1)
    if exclude_all_k0:
        next(it)
    yield from it


@lru_cache(maxsize=32)
def _composition_table(total: int, parts: int) -> np.ndarray:
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for k in range(total, -1, -1):
        rest = _composition_table(total - k, parts - 1)
        blocks.append(np.column_stack((np.full(rest.shape[0], k, dtype=np.int64), rest)))
    out = np.concatenate(blocks)
    out.flags.writeable = False
    return out


def composition_array(m_users: int, order_n: int, exclude_all_k0: bool = False) -> np.ndarray:
    """Same ordering as :func:`enumerate_compositions`, as a (count, N+1) array."""
    count = composition_count(m_users, order_n)
    if count > MAX_COMPOSITIONS:
        raise DomainError(
            f"{count} compositions for M={m_users}, N={order_n} exceed the cap of "
            f"{MAX_COMPOSITIONS}; reduce the quadrature order"
        )
    table = _composition_table(m_users, order_n + 1)
    return table[1:] if exclude_all_k0 else table


def whittaker_term(z):
    """e^{z/2} z^{-1/2} W_{-1/2,0}(z), evaluated as e^z E1(z)."""
    return exp_e1_scaled(z)


def expansion_terms(model: ChebyshevModel, m_users: int, exclude_all_k0: bool = True):
    """Signed coefficients and exponents of F^M = sum coef * exp(-s x).

    coef = multinomial(M; k) * prod b_n^{k_n} / R_D^M and s = sum k_n c_n.
    Products are formed in log-magnitude with the sign tracked separately
    (b_n < 0 for n >= 1).
    """
    k = composition_array(m_users, model.order_n, exclude_all_k0)
    log_coef = special.gammaln(m_users + 1) - special.gammaln(k + 1).sum(axis=1)
    log_abs_b = np.log(np.abs(model.b))
    log_mag = log_coef + k @ log_abs_b - m_users * math.log(model.radius_rd)
    negatives = k[:, 1:].sum(axis=1) + (k[:, 0] if model.b[0] < 0 else 0)
    sign = np.where(negatives % 2 == 0, 1.0, -1.0)
    coef = sign * np.exp(log_mag)
    exponent = k @ model.c_full
    return coef, exponent


def excluded_term(model: ChebyshevModel, m_users: int) -> float:
    """Value of the (M, 0, ..., 0) term of F^M, i.e. (b_0 / R_D)^M."""
    return float(np.exp(m_users * math.log(model.b[0] / model.radius_rd)))


def interference_limited_rate(alloc: PowerAllocation) -> float:
    """sum_{m<M} log2(1 + a_m / a~_m)."""
    a, res = alloc.coeffs[:-1], alloc.residual[:-1]
    return float(np.log2(1.0 + a / res).sum())


def ergodic_high_snr(model: ChebyshevModel, alloc: PowerAllocation, rho: float) -> float:
    """High-SNR ergodic NOMA sum rate in BPCU.

    The strongest user's term is -(1/ln 2) sum_k coef_k e^{z_k} E1(z_k) with
    z_k = s_k / (rho a_M), summed exactly rounded (math.fsum) so the result
    does not depend on evaluation order.
    """
    if not rho > 0:
        raise DomainError("rho must be positive")
    m_users = alloc.num_users
    coef, exponent = expansion_terms(model, m_users, exclude_all_k0=True)
    z = exponent / (rho * alloc.coeffs[-1])
    strongest = -math.fsum(coef * whittaker_term(z)) / math.log(2.0)
    return interference_limited_rate(alloc) + strongest


def growth_function(model: ChebyshevModel, x):
    """(1 - F(x)) / f(x) on the Chebyshev pair."""
    return chebyshev.survival_approx(model, x) / chebyshev.pdf_approx(model, x)


def growth_limit(model: ChebyshevModel) -> float:
    """lim_{x->inf} G(x) = -b_N / beta_N, where N indexes the smallest c_n."""
    n_min = int(np.argmin(model.c))
    if n_min != model.order_n - 1:
        raise DomainError("smallest exponent is not at the last node")
    return float(-model.b[-1] / model.beta[-1])


class UMSolution(NamedTuple):
    root: float
    leading_order: float


def solve_u_m(model: ChebyshevModel, m_users: int, tol: float = 1e-10) -> UMSolution:
    """Root of 1 - F(u) = 1/M, with the leading-order ln(M)/c_N for comparison."""
    if m_users < 2:
        raise DomainError("u_M needs M >= 2")
    target = 1.0 / m_users

    def g(u):
        return chebyshev.survival_approx(model, u) - target

    hi = 1.0
    while g(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            raise DomainError("could not bracket u_M")
    root = find_root(g, 0.0, hi, tol)
    c_n = float(model.c.min())
    return UMSolution(root, math.log(m_users) / c_n)


def asymptotic_sum_rate(rho: float, m_users: int) -> float:
    """log2(rho ln ln M), meaningful for M >= 16."""
    if m_users <= 15:
        raise DomainError("the large-M asymptote needs M >= 16")
    if not rho > 0:
        raise DomainError("rho must be positive")
    return math.log2(rho * math.log(math.log(m_users)))
