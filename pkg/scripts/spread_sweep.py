"""Outcome split versus GRNN spread, with and without load-order augmentation.

    python scripts/spread_sweep.py --seeds 42 7 2024 > sweep.csv
"""

import argparse
import csv
import sys

from phasebal.harness import ExperimentConfig, run_experiment

SPREADS = ["default", 0.5, 1, 2, 5, 10, 20, "mean-distance"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[42])
    ap.add_argument("--labels", choices=["greedy", "exact"], default="greedy")
    args = ap.parse_args()

    w = csv.writer(sys.stdout)
    w.writerow(["seed", "augment", "spread", "sigma", "BETTER", "SAME", "WORSE", "FAIL"])
    for seed in args.seeds:
        for augment in (True, False):
            for spread in SPREADS:
                cfg = ExperimentConfig(seed=seed, spread=spread, augment=augment, label_source=args.labels)
                s = run_experiment(cfg)
                w.writerow([seed, int(augment), spread, f"{s.spread:.4g}", *s.counts.values()])
                sys.stdout.flush()


if __name__ == "__main__":
    main()
