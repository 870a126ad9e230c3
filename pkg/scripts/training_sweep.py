"""Outage at one target as the number of training samples grows.

The runtime trace of each draw is the same for every training size, so the
curves differ only through the fitted predictors.

    python scripts/training_sweep.py --sizes 50,100,300,1000,3000 --target 1e-5
"""

import argparse
import json
from pathlib import Path

from urllc_evt.experiment import ExperimentConfig, emit_report, sweep_training_sizes


def main():
    p = argparse.ArgumentParser(description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--sizes", default="50,100,300,1000,3000")
    p.add_argument("--target", type=float, default=1e-5)
    p.add_argument("--eta", type=float, default=0.99)
    p.add_argument("--full", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("results/sweep"))
    args = p.parse_args()

    base = ExperimentConfig(master_seed=args.seed, workers=args.workers,
                            confidence_levels=(args.eta,), target_outages=(args.target,))
    cfg = base.full() if args.full else base.quick()
    sizes = [int(s) for s in args.sizes.split(",")]
    reports = sweep_training_sizes(cfg, sizes)

    rows = []
    print(f"{'n':>6s} " + " ".join(f"{m:>12s}" for m in cfg.methods) + "   (outage / target)")
    for n, rep in reports.items():
        emit_report(rep, args.out / f"n{n}")
        ratio = {m: rep.aggregate(m, args.eta, args.target)["mean_achieved_outage"] / args.target
                 for m in cfg.methods}
        rows.append({"training_samples": n, **ratio})
        print(f"{n:6d} " + " ".join(f"{ratio[m]:12.3g}" for m in cfg.methods))
    (args.out / "sweep.json").write_text(json.dumps(rows, indent=2) + "\n")


if __name__ == "__main__":
    main()
