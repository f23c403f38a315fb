"""Run the four bundled scenarios and plot them.

    python scripts/run_scenarios.py --out results [--trials 100000]

CSV/JSON artifacts land in ``--out``; PNGs are added when matplotlib is
installed.
"""

import argparse
import csv
from pathlib import Path

from nomaperf.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent
RUNS = [
    ("outage", "outage_feasible"),
    ("outage", "outage_infeasible"),
    ("ergodic", "sumrate_two_users"),
    ("sweep", "sumrate_vs_users"),
]


def read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def num(s):
    return float(s) if s not in ("", None) else float("nan")


def plot(out: Path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping plots")
        return

    for name in ("outage_feasible", "outage_infeasible"):
        rows = read(out / name / "outage.csv")
        snr = [num(r["snr_db"]) for r in rows]
        fig, ax = plt.subplots()
        for m in (1, 2):
            ax.semilogy(snr, [num(r[f"outage_exact_u{m}"]) for r in rows], "-", label=f"user {m} analytic")
            ax.semilogy(snr, [max(num(r[f"outage_mc_u{m}"]), 1e-7) for r in rows], "o", label=f"user {m} MC")
            ax.semilogy(snr, [num(r[f"outage_high_snr_u{m}"]) for r in rows], ":", label=f"user {m} high SNR")
        ax.semilogy(snr, [num(r["oma_outage_mc"]) for r in rows], "k--", label="OMA")
        ax.set(xlabel="SNR (dB)", ylabel="outage probability", ylim=(1e-6, 1.5))
        ax.legend(fontsize=8)
        fig.savefig(out / f"{name}.png", dpi=120)
        plt.close(fig)

    rows = read(out / "sumrate_two_users" / "ergodic.csv")
    snr = [num(r["snr_db"]) for r in rows]
    fig, ax = plt.subplots()
    for col, label in [("noma_mc", "NOMA"), ("noma_eq22", "NOMA high SNR"),
                       ("oma_random_mc", "OMA random"), ("opportunistic_mc", "opportunistic")]:
        ax.plot(snr, [num(r[col]) for r in rows], label=label)
    ax.set(xlabel="SNR (dB)", ylabel="sum rate (BPCU)")
    ax.legend()
    fig.savefig(out / "sumrate_two_users.png", dpi=120)
    plt.close(fig)

    rows = read(out / "sumrate_vs_users" / "sweep.csv")
    fig, ax = plt.subplots()
    for users in sorted({int(r["users"]) for r in rows}):
        sel = [r for r in rows if int(r["users"]) == users]
        ax.plot([num(r["snr_db"]) for r in sel], [num(r["noma_mc"]) for r in sel], "o-", label=f"M={users}")
        if users >= 16:
            ax.plot([num(r["snr_db"]) for r in sel], [num(r["noma_eq25"]) for r in sel], "--", label=f"M={users} large-M")
    ax.set(xlabel="SNR (dB)", ylabel="NOMA sum rate (BPCU)")
    ax.legend()
    fig.savefig(out / "sumrate_vs_users.png", dpi=120)
    plt.close(fig)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    ap.add_argument("--trials", type=int, help="override every config's trial count")
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()
    for cmd, name in RUNS:
        argv = [cmd, "--config", str(ROOT / "configs" / f"{name}.json"), "--out", str(args.out / name),
                "--workers", str(args.workers)]
        if args.trials:
            argv += ["--trials", str(args.trials)]
        code = cli_main(argv)
        if code:
            raise SystemExit(code)
    plot(args.out)


if __name__ == "__main__":
    main()
