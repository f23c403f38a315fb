"""Built-in consistency checks run by ``nomaperf validate``."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import chebyshev, ergodic, montecarlo, outage
from .channel import Geometry, cdf_exact
from .chebyshev import ChebyshevModel
from .config import ScenarioConfig
from .noma import PowerAllocation, RateTargets, default_allocation
from .numerics import db_to_linear, exp_e1, find_root, integrate

# The N = 10 rule is about 1.2e-3 to 1.6e-3 off the exact CDF for the
# geometries used here; this diagnostic flags anything worse.
CDF_SUP_TOLERANCE = 2e-3

FAULTS = ("b0",)


@dataclass
class Check:
    name: str
    measured: float
    tolerance: str
    passed: bool


def _inject(model: ChebyshevModel, fault: str | None) -> ChebyshevModel:
    if fault is None:
        return model
    if fault == "b0":
        b = model.b.copy()
        b[0] *= 1.01
        b.flags.writeable = False
        return dataclasses.replace(model, b=b)
    raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")


def default_outage_config(trials: int = 200_000, seed: int = 0) -> ScenarioConfig:
    return ScenarioConfig(users=2, radius_m=5.0, alpha=3.0, snr_db=[20.0, 30.0],
                          targets_bpcu=[0.1, 0.5], trials=trials, seed=seed)


def default_ergodic_config(trials: int = 200_000, seed: int = 0) -> ScenarioConfig:
    return ScenarioConfig(users=2, radius_m=5.0, alpha=2.0, snr_db=[40.0], trials=trials, seed=seed)


def chebyshev_checks(model: ChebyshevModel, geometry: Geometry) -> list[Check]:
    out = []
    r = model.radius_rd
    s = abs(float(model.b.sum()))
    out.append(Check("sum of b_n is zero", s, "<= 1e-12 R_D", s <= 1e-12 * r))
    ident = float(np.max(np.abs(model.beta + model.b[1:] * model.c) / model.beta))
    out.append(Check("beta_n = -b_n c_n", ident, "<= 1e-12 rel", ident <= 1e-12))
    ends = max(abs(chebyshev.cdf_approx(model, 0.0)), abs(chebyshev.cdf_approx(model, 1e6) - 1.0))
    out.append(Check("F(0) = 0 and F(inf) = 1", ends, "<= 1e-9", ends <= 1e-9))
    mass = integrate(lambda y: chebyshev.pdf_approx(model, y), 0.0, math.inf)
    out.append(Check("pdf integrates to one", abs(mass - 1.0), "<= 1e-3", abs(mass - 1.0) <= 1e-3))
    y_hi = find_root(lambda y: cdf_exact(y, geometry) - 0.999, 1e-9, 1e4)
    ys = np.linspace(0.0, y_hi, 200)
    sup = float(np.max(np.abs(chebyshev.cdf_approx(model, ys) - cdf_exact(ys, geometry))))
    out.append(Check(f"Chebyshev CDF sup error (N={model.order_n})", sup,
                     f"<= {CDF_SUP_TOLERANCE:g}", sup <= CDF_SUP_TOLERANCE))
    for m_users in (2, 5):
        ex = abs(ergodic.excluded_term(model, m_users) - 1.0)
        out.append(Check(f"(b_0/R_D)^M = 1, M={m_users}", ex, "<= 1e-12", ex <= 1e-12))
    return out


def special_function_checks() -> list[Check]:
    out = []
    for z in (0.1, 1.0, 10.0):
        quad = integrate(lambda t: math.exp(-z * t) / (1.0 + t), 0.0, math.inf)
        err = abs(ergodic.whittaker_term(z) - quad)
        out.append(Check(f"Whittaker term vs integral, z={z:g}", err, "<= 1e-8", err <= 1e-8))
    quad = integrate(lambda t: math.exp(-t) / t, 1.0, math.inf)
    err = abs(exp_e1(1.0) - quad)
    out.append(Check("E1(1) vs integral", err, "<= 1e-8", err <= 1e-8))
    return out


def outage_checks(cfg: ScenarioConfig, model: ChebyshevModel, workers: int = 1) -> list[Check]:
    out = []
    geometry, alloc, targets = cfg.geometry(), cfg.allocation(), cfg.rate_targets()
    for snr in cfg.snr_db:
        setup = montecarlo.SimulationSetup(geometry, alloc, snr, cfg.trials, cfg.seed, targets, cfg.oma_split)
        ests = montecarlo.estimate_outage_all(setup, workers)
        for m in range(1, cfg.users + 1):
            est = ests[m - 1]
            ana = outage.outage_exact(model, geometry, alloc, targets, setup.rho, m)
            dev = abs(est.mean - ana)
            tol = 3 * est.ci95_halfwidth + 2e-3
            out.append(Check(f"outage MC vs analytic, {snr:g} dB, user {m}", dev, f"<= {tol:.3g}", dev <= tol))
            other = montecarlo.estimate_outage_via_sinr(setup, m, workers)
            sigma = math.hypot(est.ci95_halfwidth, other.ci95_halfwidth) / montecarlo.Z95
            gap = abs(other.mean - est.mean)
            tol = 3 * sigma + 1.0 / cfg.trials
            out.append(Check(f"threshold vs SINR estimator, {snr:g} dB, user {m}", gap, f"<= {tol:.3g}", gap <= tol))
    feasible = cfg.feasible()
    snrs = np.arange(30.0, 50.5, 2.5)
    for m in range(1, cfg.users + 1):
        if not feasible[m - 1]:
            continue
        curve = [(db_to_linear(s), outage.outage_exact(model, geometry, alloc, targets, db_to_linear(s), m))
                 for s in snrs]
        slope = outage.fit_diversity_order(curve)
        out.append(Check(f"diversity order, user {m}", slope, f"in [{m - 0.3:g}, {m + 0.3:g}]", abs(slope - m) <= 0.3))
    return out


def always_one_checks(trials: int, seed: int, workers: int = 1) -> list[Check]:
    geometry = Geometry(5.0, 3.0, 2)
    alloc = default_allocation(2)
    targets = RateTargets([math.log2(5.0) + 0.05, 0.5])
    model = chebyshev.build_model(geometry)
    worst = min(
        outage.outage_exact(model, geometry, alloc, targets, db_to_linear(s), m)
        for s in range(0, 55, 5)
        for m in (1, 2)
    )
    out = [Check("infeasible targets: analytic outage is one", worst, "== 1", worst == 1.0)]
    setup = montecarlo.SimulationSetup(geometry, alloc, 40.0, trials, seed, targets)
    emp = min(montecarlo.estimate_outage_via_sinr(setup, m, workers).mean for m in (1, 2))
    out.append(Check("infeasible targets: simulated outage at 40 dB", emp, ">= 0.999", emp >= 0.999))
    return out


def ergodic_checks(cfg: ScenarioConfig, model: ChebyshevModel, workers: int = 1) -> list[Check]:
    out = []
    single = PowerAllocation([1.0])
    rho = 100.0
    eq = ergodic.ergodic_high_snr(model, single, rho)
    direct = integrate(lambda x: math.log2(1.0 + rho * x) * chebyshev.pdf_approx(model, x), 0.0, math.inf)
    rel = abs(eq - direct) / direct
    out.append(Check("closed-form rate, M=1 vs direct integral", rel, "<= 1e-8 rel", rel <= 1e-8))
    alloc = cfg.allocation()
    for snr in cfg.snr_db:
        setup = montecarlo.SimulationSetup(cfg.geometry(), alloc, snr, cfg.trials, cfg.seed)
        emp = montecarlo.estimate_sum_rate(setup, "noma", workers).mean
        rel = abs(ergodic.ergodic_high_snr(model, alloc, setup.rho) - emp) / emp
        out.append(Check(f"closed-form sum rate vs MC, {snr:g} dB", rel, "< 5% rel", rel < 0.05))
    setup = montecarlo.SimulationSetup(cfg.geometry(), alloc, cfg.snr_db[0], min(cfg.trials, 3 * montecarlo.BLOCK_SIZE + 17), cfg.seed)
    a = montecarlo.estimate_sum_rate(setup, "noma", 1).mean
    b = montecarlo.estimate_sum_rate(setup, "noma", 4).mean
    out.append(Check("estimator independent of worker count", abs(a - b), "== 0", a == b))
    return out


def run_checks(
    cfg: ScenarioConfig | None = None,
    fault: str | None = None,
    trials: int = 200_000,
    seed: int = 0,
    workers: int = 1,
) -> list[Check]:
    """Run every check; ``cfg`` replaces the built-in scenario it matches."""
    outage_cfg = default_outage_config(trials, seed)
    ergodic_cfg = default_ergodic_config(trials, seed)
    if cfg is not None:
        if cfg.targets_bpcu is not None:
            outage_cfg = cfg
        else:
            ergodic_cfg = cfg
    checks: list[Check] = []
    cheb_geo = ergodic_cfg.geometry()
    cheb_model = _inject(ergodic_cfg.model(), fault)
    checks += chebyshev_checks(cheb_model, cheb_geo)
    checks += special_function_checks()
    checks += outage_checks(outage_cfg, _inject(outage_cfg.model(), fault), workers)
    checks += always_one_checks(trials, seed, workers)
    checks += ergodic_checks(ergodic_cfg, cheb_model, workers)
    return checks


def format_table(checks: list[Check], emit: Callable[[str], None] = print) -> None:
    width = max(len(c.name) for c in checks)
    emit(f"{'check':<{width}}  {'measured':>12}  {'tolerance':<16}  status")
    for c in checks:
        emit(f"{c.name:<{width}}  {c.measured:>12.4g}  {c.tolerance:<16}  {'PASS' if c.passed else 'FAIL'}")
    failed = sum(not c.passed for c in checks)
    emit(f"{len(checks) - failed}/{len(checks)} checks passed")
