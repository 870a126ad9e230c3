"""Command-line entry point.

    urllc-evt run --quick --out results/quick
    urllc-evt run --config table1.json --full --methods mixture,genie --seed 3
    urllc-evt sweep-training --quick --sizes 50,100,300,1000,3000 --out results/sweep
    urllc-evt trace --inr-db 0 --length 10000 --out trace.csv
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import UrllcEvtError
from .experiment import ExperimentConfig, emit_report, run_experiment, sweep_training_sizes
from .interference import SimConfig, generate_trace
from .mixture import train


def _experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with ExperimentConfig fields")
    profile = p.add_mutually_exclusive_group()
    profile.add_argument("--quick", action="store_true", help="10 draws x 1e4 runtime slots")
    profile.add_argument("--full", action="store_true", help="100 draws x 1e5 runtime slots")
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--methods", help="comma-separated subset of mixture,dtmc,genie")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--max-blocklength", type=float)
    p.add_argument("--workers", type=int, default=1)


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if args.quick:
        cfg = cfg.quick()
    elif args.full:
        cfg = cfg.full()
    changes = {"workers": args.workers}
    if args.methods:
        changes["methods"] = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.max_blocklength is not None:
        changes["max_blocklength"] = args.max_blocklength
    return cfg.with_(**changes)


def _print_aggregates(report) -> None:
    print(f"{'method':8s} {'eta':>5s} {'target':>8s} {'outage':>10s} {'p99.99':>10s} {'ratio':>7s}")
    for a in report.aggregates:
        print(f"{a['method']:8s} {a['eta']:5.2f} {a['target_outage']:8.0e} "
              f"{a['mean_achieved_outage']:10.3e} {a['p9999_error']:10.3e} "
              f"{a['mean_resource_ratio']:7.4f}")


def cmd_run(args) -> int:
    report = run_experiment(_load_config(args))
    emit_report(report, args.out)
    _print_aggregates(report)
    if report.failed_draws:
        print(f"warning: {len(report.failed_draws)} draw(s) failed", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    reports = sweep_training_sizes(_load_config(args), sizes)
    index = []
    for n, rep in reports.items():
        emit_report(rep, args.out / f"n{n}")
        index.append({"training_samples": n, "aggregates": rep.aggregates})
        print(f"--- training_samples={n}")
        _print_aggregates(rep)
    (args.out / "sweep.json").write_text(json.dumps(index, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_trace(args) -> int:
    cfg = SimConfig(
        num_interferers=args.interferers, activation_factor=args.activation,
        mean_inr_db=args.inr_db, seed=args.seed,
    )
    generate_trace(cfg, args.length).to_csv(args.out)
    return 0


def cmd_train(args) -> int:
    import numpy as np
    from .interference import InterferenceTrace

    x = InterferenceTrace.from_csv(args.trace).values
    model = train(x, args.L, args.exceed_percentile)
    model.save(args.out)
    print(f"states={model.num_states} pooled_tails="
          f"{sum(m.pooled_tail for m in model.models)} "
          f"eta=0.99 table={np.round(model.quantile_table(0.99), 4).tolist()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="urllc-evt", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the experiment matrix")
    _experiment_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-training", help="vary the number of training samples")
    _experiment_args(p)
    p.add_argument("--sizes", default="50,100,300,1000,3000")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trace", help="export a simulated interference trace as CSV")
    p.add_argument("--inr-db", type=float, default=0.0)
    p.add_argument("--activation", type=float, default=0.4)
    p.add_argument("--interferers", type=int, default=5)
    p.add_argument("--length", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("train", help="fit a mixture predictor to a trace CSV and export JSON")
    p.add_argument("trace", type=Path)
    p.add_argument("--L", type=int, default=15)
    p.add_argument("--exceed-percentile", type=float, default=0.97)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_train)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UrllcEvtError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
