"""Width-ratio trends: clausal 2-SAT, at-most-2 Horn, and the coarse NP-complete set."""

import argparse
import json
from dataclasses import asdict

from threshold_lab.constraints import CLAUSAL_2SAT, COARSE_NPC, HORN_2
from threshold_lab.experiments import sharpness_trend


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20261015)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--out", default="results/width_trends.json")
    args = ap.parse_args()

    runs = [("2sat", CLAUSAL_2SAT, [100, 400, 1600]), ("horn2", HORN_2, [100, 400, 1600]),
            ("coarse_npc", COARSE_NPC, [25, 50, 100])]
    out = {}
    for name, S, nlist in runs:
        tr = sharpness_trend(S, nlist, args.epsilon, "cdcl", args.trials, args.seed, jobs=args.jobs)
        print(name, tr.verdict)
        for r in tr.reports:
            print(f"  n={r.n} p_half={r.p_half:.3e} ratio={r.width_ratio:.3f} CI={r.ratio_ci}")
        out[name] = {"verdict": tr.verdict.value, "reports": [asdict(r) for r in tr.reports]}
    with open(args.out, "w") as fh:
        json.dump({"seed": args.seed, "trials": args.trials, "epsilon": args.epsilon, "trends": out}, fh, indent=2)


if __name__ == "__main__":
    main()
