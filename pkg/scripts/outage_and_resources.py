"""Achieved outage and resource use of each predictor across target outages.

    python scripts/outage_and_resources.py --quick --out results/matrix
    python scripts/outage_and_resources.py --full --workers 8
"""

import argparse
from pathlib import Path

from urllc_evt.experiment import ExperimentConfig, emit_report, run_experiment


def main():
    p = argparse.ArgumentParser(description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--full", action="store_true", help="100 draws x 1e5 slots (default: quick)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("results/matrix"))
    args = p.parse_args()

    base = ExperimentConfig(master_seed=args.seed, workers=args.workers)
    cfg = base.full() if args.full else base.quick()
    report = run_experiment(cfg)
    emit_report(report, args.out)

    for eta in cfg.confidence_levels:
        print(f"\neta = {eta}")
        print(f"{'target':>8s} " + " ".join(f"{m + ' out':>13s} {m + ' M/M*':>12s}"
                                             for m in cfg.methods))
        for eps in cfg.target_outages:
            cells = []
            for m in cfg.methods:
                a = report.aggregate(m, eta, eps)
                cells.append(f"{a['mean_achieved_outage']:13.3e} {a['mean_resource_ratio']:12.4f}")
            print(f"{eps:8.0e} " + " ".join(cells))
    print(f"\nwrote {args.out}/trials.csv and summary.json")


if __name__ == "__main__":
    main()
