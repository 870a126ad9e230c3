"""Design variants of the mixture predictor side by side with the DTMC baseline.

Each variant changes one harness option and reports, at eta = 0.99, the mean
outage / target and the blocklength saving of the mixture relative to DTMC.

    python scripts/ablations.py
"""

import argparse

import numpy as np

from urllc_evt.experiment import ExperimentConfig, run_experiment

VARIANTS = {
    "default": {},
    "tail_refined": {"partition_scheme": "tail_refined"},
    "shared_threshold": {"per_state_threshold": False},
    "integer_blocklength": {"integer_blocklength": True},
    "training_3000": {"training_samples": 3000},
    "fixed_activation": {"activation_range": None},
}


def main():
    p = argparse.ArgumentParser(description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()

    base = ExperimentConfig(master_seed=args.seed, workers=args.workers,
                            confidence_levels=(0.99,)).quick()
    print(f"{'variant':20s} {'mix out/eps':>12s} {'dtmc out/eps':>13s} {'saving':>8s}")
    for name, changes in VARIANTS.items():
        rep = run_experiment(base.with_(**changes))
        mix = [rep.aggregate("mixture", 0.99, e) for e in base.target_outages]
        dtmc = [rep.aggregate("dtmc", 0.99, e) for e in base.target_outages]
        eps = np.array(base.target_outages)
        mo = np.mean([a["mean_achieved_outage"] for a in mix] / eps)
        do = np.mean([a["mean_achieved_outage"] for a in dtmc] / eps)
        saving = np.mean([1 - m["mean_blocklength"] / d["mean_blocklength"]
                          for m, d in zip(mix, dtmc)])
        print(f"{name:20s} {mo:12.3g} {do:13.3g} {saving:8.2%}")


if __name__ == "__main__":
    main()
