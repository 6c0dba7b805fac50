"""Long Monte Carlo runs shared between test modules, computed once per session."""

from functools import lru_cache

from threshold_lab.constraints import C, CLAUSAL_2SAT, HORN_2, ConstraintSet
from threshold_lab.experiments import case_theorem_check, sharpness_trend

SEED = 20261015
CASE_TRIALS = 2000

CASES = {
    "Case1": (HORN_2, 3.0),
    "Case2": (ConstraintSet([C(1, 0), C(1, 1)]), 2.0),
    "Case3": (ConstraintSet([C(0, 1), C(2, 0)]), 0.5),
}


@lru_cache(maxsize=None)
def case_run(case, n):
    S, c = CASES[case]
    return case_theorem_check(case, S, c, n, CASE_TRIALS, seed=SEED)


@lru_cache(maxsize=None)
def trend_run(name):
    S = {"2sat": CLAUSAL_2SAT, "horn2": HORN_2}[name]
    return sharpness_trend(S, [100, 400, 1600], 0.25, "cdcl", trials=500, seed=SEED)


@lru_cache(maxsize=None)
def coarse_npc_critical(n, trials):
    from threshold_lab.constraints import COARSE_NPC
    from threshold_lab.experiments import critical_values

    return critical_values(COARSE_NPC, n, trials, "cdcl", seed=SEED)
