"""Per-SNR sweeps that combine analytic and Monte Carlo results into rows
ready for plotting, plus the CSV/JSON writers.

CSV layout (one row per SNR point; ``u{m}`` columns repeat for m = 1..M):

outage
    snr_db, rho, feasible_u{m}, outage_exact_u{m}, outage_exact_ref_u{m},
    outage_high_snr_u{m}, outage_mc_u{m}, outage_mc_ci_u{m},
    outage_mc_sinr_u{m}, oma_outage_analytic, oma_outage_mc, oma_outage_mc_ci
ergodic
    snr_db, rho, noma_mc, noma_mc_ci, oma_random_mc, oma_random_mc_ci,
    opportunistic_mc, opportunistic_mc_ci, noma_eq22, noma_eq25
sweep
    users, alpha, followed by the ergodic columns

Empty cells mark values that do not exist for the scenario (the large-M
asymptote below M = 16, the closed form beyond the composition cap).
``outage_high_snr`` is an asymptote and is capped at 1 on output.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import subprocess
from pathlib import Path

from . import __version__, chebyshev, ergodic, montecarlo, outage
from .config import ScenarioConfig
from .numerics import DomainError, db_to_linear

OUTAGE_PER_USER = (
    "feasible",
    "outage_exact",
    "outage_exact_ref",
    "outage_high_snr",
    "outage_mc",
    "outage_mc_ci",
    "outage_mc_sinr",
)
ERGODIC_COLUMNS = [
    "snr_db",
    "rho",
    "noma_mc",
    "noma_mc_ci",
    "oma_random_mc",
    "oma_random_mc_ci",
    "opportunistic_mc",
    "opportunistic_mc_ci",
    "noma_eq22",
    "noma_eq25",
]
SWEEP_COLUMNS = ["users", "alpha"] + ERGODIC_COLUMNS


def outage_columns(users: int) -> list[str]:
    cols = ["snr_db", "rho"]
    for m in range(1, users + 1):
        cols += [f"{name}_u{m}" for name in OUTAGE_PER_USER]
    return cols + ["oma_outage_analytic", "oma_outage_mc", "oma_outage_mc_ci"]


def _setup(cfg: ScenarioConfig, snr_db: float, users=None, alpha=None, targets=True):
    return montecarlo.SimulationSetup(
        geometry=cfg.geometry(users, alpha),
        alloc=cfg.allocation(users),
        snr_db=float(snr_db),
        trials=cfg.trials,
        seed=cfg.seed,
        targets=cfg.rate_targets() if targets else None,
        oma_split=cfg.oma_split,
    )


def outage_sweep(cfg: ScenarioConfig, workers: int = 1) -> tuple[list[dict], list[outage.OutageReport]]:
    if cfg.targets_bpcu is None:
        raise DomainError("the outage sweep needs targets_bpcu")
    geometry = cfg.geometry()
    model = cfg.model()
    alloc, targets = cfg.allocation(), cfg.rate_targets()
    feasible = cfg.feasible()
    rows, reports = [], []
    for snr in cfg.snr_db:
        rho = db_to_linear(snr)
        setup = _setup(cfg, snr)
        mc_threshold = montecarlo.estimate_outage_all(setup, workers)
        report = outage.OutageReport(snr_db=float(snr), feasible=feasible, analytic_exact=[],
                                     analytic_reference=[], analytic_high_snr=[])
        row = {"snr_db": float(snr), "rho": rho}
        for m in range(1, cfg.users + 1):
            exact = outage.outage_exact(model, geometry, alloc, targets, rho, m)
            ref = outage.outage_reference(geometry, alloc, targets, rho, m)
            high = outage.outage_high_snr(model, alloc, targets, rho, m)
            sinr = montecarlo.estimate_outage_via_sinr(setup, m, workers)
            est = mc_threshold[m - 1]
            report.analytic_exact.append(exact)
            report.analytic_reference.append(ref)
            report.analytic_high_snr.append(high)
            report.empirical.append(est.mean)
            report.empirical_ci95.append(est.ci95_halfwidth)
            row.update({
                f"feasible_u{m}": feasible[m - 1],
                f"outage_exact_u{m}": exact,
                f"outage_exact_ref_u{m}": ref,
                f"outage_high_snr_u{m}": min(high, 1.0),
                f"outage_mc_u{m}": est.mean,
                f"outage_mc_ci_u{m}": est.ci95_halfwidth,
                f"outage_mc_sinr_u{m}": sinr.mean,
            })
        oma = montecarlo.estimate_oma_outage(setup, workers)
        row["oma_outage_analytic"] = chebyshev.cdf_approx(model, montecarlo.oma_threshold(setup))
        row["oma_outage_mc"] = oma.mean
        row["oma_outage_mc_ci"] = oma.ci95_halfwidth
        rows.append(row)
        reports.append(report)
    _attach_slopes(reports, cfg)
    return rows, reports


SLOPE_SPAN_DB = 20.0


def _attach_slopes(reports: list[outage.OutageReport], cfg: ScenarioConfig):
    # fit the top SLOPE_SPAN_DB of the grid, where the high-SNR slope has set in
    top = max(r.snr_db for r in reports)
    tail = [r for r in reports if r.snr_db >= top - SLOPE_SPAN_DB]
    for m in range(cfg.users):
        try:
            slope = outage.fit_diversity_order(
                [(db_to_linear(r.snr_db), r.analytic_exact[m]) for r in tail]
            )
        except DomainError:
            slope = None
        for r in reports:
            r.diversity_slope.append(slope)


def _ergodic_row(cfg: ScenarioConfig, snr: float, workers: int, users=None, alpha=None) -> dict:
    setup = _setup(cfg, snr, users, alpha, targets=False)
    m_users = setup.geometry.num_users
    row = {"snr_db": float(snr), "rho": setup.rho}
    for scheme in montecarlo.SCHEMES:
        est = montecarlo.estimate_sum_rate(setup, scheme, workers)
        row[f"{scheme}_mc"] = est.mean
        row[f"{scheme}_mc_ci"] = est.ci95_halfwidth
    try:
        row["noma_eq22"] = ergodic.ergodic_high_snr(cfg.model(alpha), setup.alloc, setup.rho)
    except DomainError:
        row["noma_eq22"] = None
    row["noma_eq25"] = ergodic.asymptotic_sum_rate(setup.rho, m_users) if m_users >= 16 else None
    return row


def ergodic_sweep(cfg: ScenarioConfig, workers: int = 1) -> list[dict]:
    return [_ergodic_row(cfg, snr, workers) for snr in cfg.snr_db]


def grid_sweep(cfg: ScenarioConfig, workers: int = 1) -> list[dict]:
    rows = []
    for m_users in cfg.users_grid or [cfg.users]:
        for alpha in cfg.alpha_grid or [cfg.alpha]:
            for snr in cfg.snr_db:
                row = {"users": m_users, "alpha": float(alpha)}
                row.update(_ergodic_row(cfg, snr, workers, m_users, alpha))
                rows.append(row)
    return rows


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".12g")


def render_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _git_hash() -> str | None:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return None
    return out.stdout.strip() or None


def write_artifacts(
    rows: list[dict],
    columns: list[str],
    out_dir: str | Path,
    stem: str,
    cfg: ScenarioConfig,
    extra: dict | None = None,
) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"
    csv_path.write_text(render_csv(rows, columns))
    meta = {
        "tool": "nomaperf",
        "version": __version__,
        "git_hash": _git_hash(),
        "seed": cfg.seed,
        "trials": cfg.trials,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.to_dict(),
    }
    if extra:
        meta.update(extra)
    payload = {"metadata": meta, "columns": columns, "rows": [{c: row.get(c) for c in columns} for row in rows]}
    json_path.write_text(json.dumps(payload, indent=2) + "\n")
    return csv_path, json_path
