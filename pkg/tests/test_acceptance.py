"""Acceptance criteria, each at its stated tolerance. A one-line PASS/FAIL
summary per criterion is printed at the end of the session."""

import math
import time

import numpy as np
import pytest

from nomaperf import chebyshev, ergodic, montecarlo, outage
from nomaperf.channel import Geometry, cdf_exact, order_statistic_cdf, sample_sorted_block
from nomaperf.cli import build_parser, cmd_outage
from nomaperf.noma import PowerAllocation, RateTargets, default_allocation
from nomaperf.numerics import db_to_linear, find_root, integrate

OUTAGE_GEOMETRY = Geometry(5.0, 3.0, 2)
OUTAGE_TARGETS = RateTargets([0.1, 0.5])
ALLOC2 = default_allocation(2)


@pytest.mark.parametrize("radius, alpha", [(5.0, 2.0), (5.0, 3.0), (10.0, 3.0)])
def test_01_chebyshev_fidelity(criterion, radius, alpha):
    start = time.perf_counter()
    geo = Geometry(radius, alpha, 1)
    model = chebyshev.build_model(geo, 10)
    y_hi = find_root(lambda y: cdf_exact(y, geo) - 0.999, 1e-9, 1e6)
    ys = np.linspace(0.0, y_hi, 200)
    sup = float(np.max(np.abs(chebyshev.cdf_approx(model, ys) - cdf_exact(ys, geo))))
    mass = integrate(lambda y: chebyshev.pdf_approx(model, y), 0.0, math.inf)
    elapsed = time.perf_counter() - start
    ok = sup < 1e-3 and abs(mass - 1.0) <= 1e-3 and elapsed < 10.0
    criterion(1, ok, f"(R={radius:g},a={alpha:g}) sup={sup:.3g} mass={mass:.6f} t={elapsed:.1f}s")
    assert sup < 1e-3
    assert abs(mass - 1.0) <= 1e-3
    assert elapsed < 10.0


def test_02_order_statistics_sampler(criterion):
    start = time.perf_counter()
    geo = Geometry(5.0, 3.0, 3)
    gains = sample_sorted_block(np.random.default_rng(2), geo, 100_000)
    worst = 0.0
    for m in (1, 2, 3):
        x = np.sort(gains[:, m - 1])
        n = x.size
        theo = order_statistic_cdf(x, m, geo, lambda y: cdf_exact(y, geo))
        ks = max(np.max(np.arange(1, n + 1) / n - theo), np.max(theo - np.arange(n) / n))
        worst = max(worst, float(ks))
    elapsed = time.perf_counter() - start
    criterion(2, worst <= 0.01 and elapsed < 30, f"max KS={worst:.4f} t={elapsed:.1f}s")
    assert worst <= 0.01
    assert elapsed < 30.0


def test_03_outage_cross_validation(criterion):
    start = time.perf_counter()
    model = chebyshev.build_model(OUTAGE_GEOMETRY, 10)
    worst_ratio, worst_sigma = 0.0, 0.0
    for snr in (10.0, 20.0, 30.0, 40.0):
        setup = montecarlo.SimulationSetup(OUTAGE_GEOMETRY, ALLOC2, snr, 1_000_000, 11, OUTAGE_TARGETS)
        ests = montecarlo.estimate_outage_all(setup, workers=4)
        for m in (1, 2):
            est = ests[m - 1]
            ana = outage.outage_exact(model, OUTAGE_GEOMETRY, ALLOC2, OUTAGE_TARGETS, setup.rho, m)
            worst_ratio = max(worst_ratio, abs(est.mean - ana) / (3 * est.ci95_halfwidth + 2e-3))
            other = montecarlo.estimate_outage_via_sinr(setup, m, workers=4)
            sigma = math.hypot(est.ci95_halfwidth, other.ci95_halfwidth) / montecarlo.Z95
            gap = abs(other.mean - est.mean)
            worst_sigma = max(worst_sigma, gap / sigma if sigma > 0 else (0.0 if gap == 0 else math.inf))
    elapsed = time.perf_counter() - start
    ok = worst_ratio <= 1.0 and worst_sigma <= 3.0 and elapsed < 120
    criterion(3, ok, f"max dev/(3CI+2e-3)={worst_ratio:.3f} max estimator gap={worst_sigma:.2f} sigma t={elapsed:.1f}s")
    assert worst_ratio <= 1.0
    assert worst_sigma <= 3.0
    assert elapsed < 120.0


def test_04_diversity_orders(criterion):
    model = chebyshev.build_model(OUTAGE_GEOMETRY, 10)
    snrs = np.arange(30.0, 50.5, 2.5)
    slopes = []
    for m in (1, 2):
        curve = [(db_to_linear(s), outage.outage_exact(model, OUTAGE_GEOMETRY, ALLOC2, OUTAGE_TARGETS, db_to_linear(s), m))
                 for s in snrs]
        slopes.append(outage.fit_diversity_order(curve))
    ok = all(abs(s - m) <= 0.3 for m, s in zip((1, 2), slopes))
    criterion(4, ok, "slopes " + ", ".join(f"m={m}: {s:.3f}" for m, s in zip((1, 2), slopes)))
    for m, s in zip((1, 2), slopes):
        assert abs(s - m) <= 0.3


def test_05_always_one_outage(criterion):
    targets = RateTargets([math.log2(5.0) + 0.01, 0.5])
    model = chebyshev.build_model(OUTAGE_GEOMETRY, 10)
    analytic = [outage.outage_exact(model, OUTAGE_GEOMETRY, ALLOC2, targets, db_to_linear(s), m)
                for s in range(0, 65, 5) for m in (1, 2)]
    setup = montecarlo.SimulationSetup(OUTAGE_GEOMETRY, ALLOC2, 40.0, 100_000, 5, targets)
    empirical = [montecarlo.estimate_outage_via_sinr(setup, m).mean for m in (1, 2)]
    ok = all(p == 1.0 for p in analytic) and min(empirical) >= 0.999
    criterion(5, ok, f"min analytic={min(analytic):g} min empirical@40dB={min(empirical):.4f}")
    assert all(p == 1.0 for p in analytic)
    assert min(empirical) >= 0.999


@pytest.mark.parametrize("snr", [30.0, 35.0, 40.0])
def test_06_ergodic_high_snr(criterion, snr):
    start = time.perf_counter()
    geo = Geometry(5.0, 2.0, 2)
    model = chebyshev.build_model(geo, 10)
    setup = montecarlo.SimulationSetup(geo, ALLOC2, snr, 1_000_000, 6)
    emp = montecarlo.estimate_sum_rate(setup, "noma", workers=4).mean
    ana = ergodic.ergodic_high_snr(model, ALLOC2, setup.rho)
    rel = abs(ana - emp) / emp
    elapsed = time.perf_counter() - start
    criterion(6, rel < 0.05 and elapsed < 120, f"{snr:g} dB rel={100 * rel:.2f}%")
    assert rel < 0.05
    assert elapsed < 120.0


@pytest.mark.parametrize("z", [0.1, 1.0, 10.0])
def test_07_whittaker_identity(criterion, z):
    quad = integrate(lambda t: math.exp(-z * t) / (1.0 + t), 0.0, math.inf)
    err = abs(ergodic.whittaker_term(z) - quad)
    criterion(7, err <= 1e-8, f"z={z:g} err={err:.1e}")
    assert err <= 1e-8


def _rates(m_users, snr):
    setup = montecarlo.SimulationSetup(Geometry(5.0, 2.0, m_users), default_allocation(m_users), snr, 100_000, 8)
    return {k: montecarlo.estimate_sum_rate(setup, k, workers=4).mean for k in montecarlo.SCHEMES}


def test_08_scheme_ordering(criterion):
    start = time.perf_counter()
    above = {snr: _rates(2, snr) for snr in (30.0, 35.0, 40.0)}
    noma_wins = all(r["noma"] > r["oma_random"] for r in above.values())
    gap2 = above[30.0]["opportunistic"] - above[30.0]["noma"]
    r10 = _rates(10, 30.0)
    gap10 = r10["opportunistic"] - r10["noma"]
    elapsed = time.perf_counter() - start
    criterion(8, noma_wins and gap10 < gap2 and elapsed < 180,
              f"NOMA>OMA at 30-40 dB: {noma_wins}; gap M=2 {gap2:.3f} vs M=10 {gap10:.3f} t={elapsed:.1f}s")
    assert noma_wins
    assert gap10 < gap2
    assert elapsed < 180.0


def test_09_u_m_solver(criterion):
    model = chebyshev.build_model(Geometry(5.0, 2.0, 1), 10)
    sol = ergodic.solve_u_m(model, 10**6)
    ratio = sol.root / sol.leading_order
    criterion(9, 0.75 <= ratio <= 1.25, f"u_M/((1/c_N) ln M) at M=1e6 = {ratio:.3f}")
    assert 0.75 <= ratio <= 1.25


def test_10_determinism(criterion, tmp_path):
    cfg = tmp_path / "outage_feasible.json"
    cfg.write_text('{"schema": 1, "users": 2, "radius_m": 5.0, "alpha": 3.0, "snr_db": [0, 10, 20, 30, 40],'
                   ' "targets_bpcu": [0.1, 0.5], "trials": 200000, "seed": 3}')
    blobs = []
    for run, workers in enumerate((1, 8, 1)):
        out = tmp_path / f"run{run}"
        args = build_parser().parse_args(["outage", "--config", str(cfg), "--out", str(out), "--workers", str(workers)])
        assert cmd_outage(args) == 0
        blobs.append((out / "outage.csv").read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2]
    criterion(10, ok, "CSV identical for workers 1, 8 and a repeat" if ok else "CSV differs")
    assert ok
