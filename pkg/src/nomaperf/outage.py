"""Outage probability with fixed rate targets: order-statistic integral,
high-SNR closed form, and diversity-order fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence


from . import chebyshev
from .channel import Geometry, cdf_exact, order_statistic_cdf, order_statistic_pdf
from .chebyshev import ChebyshevModel
from .noma import PowerAllocation, RateTargets, outage_thresholds
from .numerics import DomainError, QuadratureSpec, integrate, loglog_slope

OUTAGE_QUADRATURE = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-10)

# Monte Carlo outage curves are only fitted where the estimate is resolvable
EMPIRICAL_FIT_WINDOW = (1e-6, 0.1)


@dataclass
class OutageReport:
    """Per-user outage figures for one SNR point (lists indexed by user - 1)."""

    snr_db: float
    feasible: list[bool]
    analytic_exact: list[float]
    analytic_reference: list[float]
    analytic_high_snr: list[float]
    empirical: list[float] = field(default_factory=list)
    empirical_ci95: list[float] = field(default_factory=list)
    diversity_slope: list[float | None] = field(default_factory=list)


def tau(m: int, num_users: int) -> float:
    """M! / ((m-1)! (M-m)!)."""
    return math.exp(math.lgamma(num_users + 1) - math.lgamma(m) - math.lgamma(num_users - m + 1))


def _check_user(m: int, num_users: int):
    if not 1 <= m <= num_users:
        raise DomainError(f"user index {m} outside 1..{num_users}")


def outage_exact(
    model: ChebyshevModel,
    geometry: Geometry,
    alloc: PowerAllocation,
    targets: RateTargets,
    rho: float,
    m: int,
) -> float:
    """P(|h_m|^2 <= psi*_m) by integrating the order-statistic density built on
    the Chebyshev CDF/pdf pair. Users with an infeasible j <= m get 1."""
    _check_user(m, alloc.num_users)
    threshold = float(outage_thresholds(alloc, targets, rho)[m - 1])
    if math.isinf(threshold):
        return 1.0
    if threshold <= 0.0:
        return 0.0
    geo = Geometry(geometry.radius_rd, geometry.alpha, alloc.num_users)
    density = partial(
        order_statistic_pdf,
        m=m,
        geometry=geo,
        cdf_provider=partial(chebyshev.cdf_approx, model),
        pdf_provider=partial(chebyshev.pdf_approx, model),
    )
    return integrate(density, 0.0, threshold, OUTAGE_QUADRATURE)


def outage_reference(
    geometry: Geometry,
    alloc: PowerAllocation,
    targets: RateTargets,
    rho: float,
    m: int,
) -> float:
    """Same event probability on the exact (quadrature) CDF, for gauging the
    Chebyshev error separately."""
    _check_user(m, alloc.num_users)
    threshold = float(outage_thresholds(alloc, targets, rho)[m - 1])
    if math.isinf(threshold):
        return 1.0
    geo = Geometry(geometry.radius_rd, geometry.alpha, alloc.num_users)
    return order_statistic_cdf(threshold, m, geo, partial(cdf_exact, geometry=geo))


def outage_high_snr(
    model: ChebyshevModel,
    alloc: PowerAllocation,
    targets: RateTargets,
    rho: float,
    m: int,
) -> float:
    """(tau_m / m) * eta^m * (psi*_m)^m; 1 for infeasible users.

    Unbounded above at low SNR, it is a high-SNR asymptote, not a probability.
    """
    num_users = alloc.num_users
    _check_user(m, num_users)
    threshold = float(outage_thresholds(alloc, targets, rho)[m - 1])
    if math.isinf(threshold):
        return 1.0
    return tau(m, num_users) / m * (model.eta * threshold) ** m


def fit_diversity_order(
    prob_curve: Sequence[tuple[float, float]],
    window: tuple[float, float] | None = None,
) -> float:
    """Negative log-log slope of outage against linear SNR.

    ``window`` restricts the fit to probabilities inside [lo, hi]; use
    :data:`EMPIRICAL_FIT_WINDOW` for Monte Carlo curves.
    """
    pts = sorted((float(r), float(p)) for r, p in prob_curve)
    if any(not 0.0 < p < 1.0 for _, p in pts):
        raise DomainError("probabilities must lie strictly inside (0, 1) for a log-log fit")
    if window is not None:
        lo, hi = window
        pts = [(r, p) for r, p in pts if lo <= p <= hi]
    if len(pts) < 3:
        raise DomainError("need at least three points for a diversity fit")
    rhos = [r for r, _ in pts]
    if rhos[0] <= 0 or 10 * math.log10(rhos[-1] / rhos[0]) < 20.0 - 1e-9:
        raise DomainError("SNR points must span at least 20 dB")
    return -loglog_slope(rhos, [p for _, p in pts])

