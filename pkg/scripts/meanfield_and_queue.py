"""Mean-field clause counts against PUR traces, and the queue emptying table."""

import argparse
import json
from dataclasses import asdict

from threshold_lab.constraints import HORN_2
from threshold_lab.experiments import meanfield_agreement
from threshold_lab.queueing import constant_rate, qempty_fixed_rate, qempty_mc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--trials", type=int, default=1200)
    ap.add_argument("--seed", type=int, default=20261015)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/meanfield_and_queue.json")
    args = ap.parse_args()

    pts = meanfield_agreement(HORN_2, args.n, 3 * args.n, args.trials, 20, args.seed, args.jobs)
    for p in pts:
        print(f"c={p.c} survivors={p.survivors} P {p.mean_P:.1f}/{p.predicted_P:.1f} N {p.mean_N:.1f}/{p.predicted_N:.1f}")
    table = []
    for lam in (0, 0.25, 0.5, 1, 1.5, 2, 3):
        est = qempty_mc(constant_rate(lam), 100_000, 10_000, seed=args.seed, jobs=args.jobs)
        table.append({"lambda": lam, "fixed_point": qempty_fixed_rate(lam), **asdict(est)})
        print(table[-1])
    with open(args.out, "w") as fh:
        json.dump({"seed": args.seed, "meanfield": [asdict(p) | {"rel_error_P": p.rel_error_P,
                                                                 "rel_error_N": p.rel_error_N} for p in pts],
                   "qempty": table}, fh, indent=2)


if __name__ == "__main__":
    main()
