"""Endpoint predictor accuracy at n = 20, and where SAT(S) crosses 1/2 relative to the endpoints."""

import argparse
import json
from dataclasses import asdict

import numpy as np

from threshold_lab.constraints import CLAUSAL_3SAT, COARSE_NPC
from threshold_lab.experiments import critical_values, endpoint_half_point, endpoint_predictor_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--half-trials", type=int, default=60)
    ap.add_argument("--nlist", default="50,200")
    ap.add_argument("--seed", type=int, default=20261015)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/endpoint_study.json")
    args = ap.parse_args()

    grid = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3]
    out = {}
    for name, S in (("coarse_npc", COARSE_NPC), ("3sat", CLAUSAL_3SAT)):
        pts = endpoint_predictor_study(S, 20, grid, args.trials, args.seed, jobs=args.jobs)
        for p in pts:
            print(f"{name} p={p.control:g}: success {p.success_rate:.3f} {p.success_ci}, bound {p.lower_bound:.3f}")
        out[name] = [asdict(p) for p in pts]

    halves = []
    for n in map(int, args.nlist.split(",")):
        crit = critical_values(COARSE_NPC, n, args.half_trials, "cdcl", seed=args.seed, jobs=args.jobs)
        row = {"n": n, "sat_half": float(np.median(crit)),
               "all_zeros_half": endpoint_half_point(COARSE_NPC, n, 0),
               "all_ones_half": endpoint_half_point(COARSE_NPC, n, 1)}
        print(row)
        halves.append(row)
    out["half_points"] = halves
    with open(args.out, "w") as fh:
        json.dump({"seed": args.seed, **out}, fh, indent=2)


if __name__ == "__main__":
    main()
