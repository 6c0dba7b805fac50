import math

import numpy as np
import pytest

from threshold_lab.constraints import C, CLAUSAL_2SAT, CLAUSAL_3SAT, COARSE_NPC, HORN_2, ConstraintSet
from threshold_lab.experiments import (
    Case,
    NonMonotoneError,
    Trend,
    WidthReport,
    case_prediction,
    case_theorem_check,
    check_case_hypothesis,
    critical_values,
    endpoint_half_point,
    endpoint_predictor_study,
    meanfield_agreement,
    sandwich_check,
    sat_curve,
    threshold_points,
    trend_verdict,
)
from threshold_lab.queueing import qempty_fixed_rate

N_SYNTH = 100


def linear_decider(p, rng):
    return rng.random() < max(0.0, 1.0 - p * N_SYNTH)


def step_decider(p, rng):
    return p < 0.0123


def bumpy_decider(p, rng):
    prob = 0.35 if p < 0.4 else 0.95 if p < 0.8 else 0.0
    return rng.random() < prob


def test_curve_examples():
    pts = sat_curve(CLAUSAL_2SAT, 4, [0.0, 1.0], 50, "oracle", "const", seed=1)
    assert pts[0].estimate == 1.0 and pts[1].estimate == 0.0
    trivial = ConstraintSet([C(1, 1), C(2, 0)])
    pts = sat_curve(trivial, 8, [0.0, 0.3, 1.0], 30, "oracle", seed=2)
    assert all(p.estimate == 1.0 for p in pts)
    for p in pts:
        assert p.ci95[0] <= p.estimate <= p.ci95[1]


def test_curve_is_monotone_and_reproducible():
    controls = [0.005, 0.01, 0.02, 0.04]
    a = sat_curve(CLAUSAL_3SAT, 12, controls, 200, "oracle", seed=3)
    for lo, hi in zip(a, a[1:]):
        assert hi.ci95[0] <= lo.ci95[1]
    assert a == sat_curve(CLAUSAL_3SAT, 12, controls, 200, "oracle", seed=3, jobs=2)


def test_curve_multiset_density_and_pur_on_horn():
    pts = sat_curve(HORN_2, 60, [0.5, 4.0], 200, "pur", "multiset", seed=4)
    assert pts[0].metric == "satisfiable" and pts[0].model == "multiset"
    assert pts[0].estimate > pts[1].estimate


def test_curve_decider_errors():
    with pytest.raises(ValueError, match="n <= 30"):
        sat_curve(CLAUSAL_2SAT, 40, [0.1], 10, "oracle")
    with pytest.raises(ValueError, match="not Horn"):
        sat_curve(CLAUSAL_2SAT, 20, [0.1], 10, "pur")
    pts = sat_curve(CLAUSAL_2SAT, 20, [0.01], 10, "pur", allow_pur_accepts=True)
    assert pts[0].metric == "pur_accepts"


def test_bisection_inverts_linear_synthetic_curve():
    r = threshold_points(None, N_SYNTH, 0.25, linear_decider, trials=2000, seed=5, method="bisect")
    # exact levels: Pr = 1 - p n
    for got, level in ((r.p_eps, 0.25), (r.p_half, 0.5), (r.p_one_minus_eps, 0.75)):
        assert got == pytest.approx((1 - level) / N_SYNTH, rel=0.06)
    assert r.p_eps >= r.p_half >= r.p_one_minus_eps
    assert r.width_ratio == pytest.approx(1.0, rel=0.15)
    assert r.ratio_ci[0] <= r.width_ratio <= r.ratio_ci[1]


def test_bisection_on_step_function_has_vanishing_width():
    r = threshold_points(None, 10, 0.1, step_decider, trials=200, seed=6, method="bisect")
    assert r.p_half == pytest.approx(0.0123, rel=0.01)
    assert 0 <= r.width_ratio < 0.03


def test_bisection_reports_non_monotone_curves():
    with pytest.raises(NonMonotoneError):
        threshold_points(None, 10, 0.25, bumpy_decider, trials=400, seed=7, method="bisect", bracket=(0.1, 1.0))


def test_threshold_points_validation():
    with pytest.raises(ValueError):
        threshold_points(CLAUSAL_2SAT, 20, 0.5)
    with pytest.raises(ValueError):
        threshold_points(None, 20, 0.2, linear_decider, method="coupled")


def test_coupled_critical_values_match_direct_curve():
    crit = critical_values(CLAUSAL_3SAT, 12, 400, "oracle", seed=8)
    pts = sat_curve(CLAUSAL_3SAT, 12, [0.01, 0.02], 400, "oracle", seed=9)
    for p in pts:
        frac = float(np.mean(crit > p.control))
        assert abs(frac - p.estimate) < 0.1


def test_coupled_report_ordering_and_determinism():
    r = threshold_points(CLAUSAL_2SAT, 60, 0.25, "cdcl", trials=150, seed=10)
    assert r.p_eps >= r.p_half >= r.p_one_minus_eps > 0
    assert r.width_ratio >= 0 and r.ratio_ci[0] <= r.width_ratio <= r.ratio_ci[1]
    assert r == threshold_points(CLAUSAL_2SAT, 60, 0.25, "cdcl", trials=150, seed=10, jobs=2)
    m = threshold_points(CLAUSAL_2SAT, 60, 0.25, "cdcl", trials=150, seed=10, model="multiset")
    # densities: 2-SAT becomes unsatisfiable around m = n
    assert 0.5 < m.p_half < 2


def report(ratio, lo, hi):
    return WidthReport(1, 0.25, 0, 0, 0, ratio, (lo, hi), "coupled", 1)


def test_trend_rules():
    assert trend_verdict([report(0.3, 0.28, 0.32), report(0.2, 0.18, 0.22), report(0.1, 0.09, 0.11)]) is Trend.SHARP
    assert trend_verdict([report(0.6, 0.5, 0.7), report(0.55, 0.45, 0.65), report(0.58, 0.5, 0.66)]) is Trend.COARSE
    # a separated drop between the ends, but not at every step
    assert trend_verdict([report(0.6, 0.55, 0.65), report(0.58, 0.5, 0.64), report(0.4, 0.35, 0.45)]) \
        is Trend.INCONCLUSIVE


def test_case_hypotheses():
    check_case_hypothesis(Case.CASE1, HORN_2)
    check_case_hypothesis(Case.CASE2, ConstraintSet([C(1, 0), C(1, 1)]))
    check_case_hypothesis(Case.CASE3, ConstraintSet([C(0, 1), C(2, 0)]))
    with pytest.raises(ValueError, match="Case1"):
        check_case_hypothesis(Case.CASE1, ConstraintSet([C(1, 1), C(1, 0)]))
    with pytest.raises(ValueError, match="Case2"):
        check_case_hypothesis(Case.CASE2, HORN_2)
    with pytest.raises(ValueError, match="Case3"):
        check_case_hypothesis(Case.CASE3, HORN_2)


def test_case_predictions():
    assert case_prediction("Case3", ConstraintSet([C(0, 1), C(2, 0)]), 0.5) == pytest.approx(math.exp(-0.5))
    assert case_prediction("Case1", HORN_2, 3) == pytest.approx(0.2031878699, abs=1e-9)
    want = math.exp(-2) + (1 - math.exp(-2)) * qempty_fixed_rate(2)
    assert case_prediction("Case2", ConstraintSet([C(1, 0), C(1, 1)]), 2) == pytest.approx(want)
    assert want == pytest.approx(0.311, abs=5e-4)


def test_case_check_small_run():
    r = case_theorem_check("Case1", HORN_2, 3, 300, 120, seed=11)
    assert r.m == 900 and r.trials == 120
    assert r.ci95[0] <= r.empirical <= r.ci95[1]
    assert 0 <= r.predicted_seeded <= 1
    assert r.mean_initial_positive_units == pytest.approx(2, abs=0.5)
    assert r == case_theorem_check("Case1", HORN_2, 3, 300, 120, seed=11, jobs=2)
    r3 = case_theorem_check("Case3", ConstraintSet([C(0, 1), C(2, 0)]), 0.5, 300, 50, seed=12)
    assert r3.m == round(0.5 * 300 ** (4 / 3)) and r3.predicted_seeded is None


def test_endpoint_predictor_on_zero_valid_set():
    pts = endpoint_predictor_study(ConstraintSet([C(1, 1), C(2, 0)]), 10, [0.05, 0.5], 50, seed=13)
    assert all(p.success_rate == 1.0 and p.lower_bound == 1.0 for p in pts)


def test_endpoint_predictor_coarse_npc_bounded_below():
    grid = [1e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3]
    pts = endpoint_predictor_study(COARSE_NPC, 20, grid, 300, seed=14)
    worst = min(pts, key=lambda p: p.success_rate)
    assert worst.success_ci[0] > 0
    for p in pts:
        assert p.success_rate >= p.lower_bound - 1e-12


def test_endpoint_predictor_large_n_only_bound():
    pts = endpoint_predictor_study(CLAUSAL_3SAT, 60, [1e-4], 20, seed=15)
    assert pts[0].success_rate is None and 0 <= pts[0].lower_bound <= 1


def test_endpoint_half_point_is_exact():
    n = 40
    for endpoint, killers in ((0, math.comb(n, 3)), (1, math.comb(n, 2))):
        p = endpoint_half_point(COARSE_NPC, n, endpoint)
        assert (1 - p) ** killers == pytest.approx(0.5, rel=1e-12)
    assert endpoint_half_point(HORN_2.dual().dual(), n, 0) == pytest.approx(1 - 0.5 ** (1 / n))


def test_sandwich_bounds_hold():
    pts = sandwich_check(HORN_2, 12, [0.002, 0.01, 0.03], 300, seed=16)
    for p in pts:
        assert p.no_positive_unit <= p.satisfiable <= p.horn_part_satisfiable
    S = ConstraintSet([C(0, 1), C(1, 0), C(1, 1), C(1, 2), C(2, 0)])
    for p in sandwich_check(S, 10, [0.01, 0.05], 300, seed=17):
        (a_lo, _), (b_lo, b_hi), (_, c_hi) = p.cis
        assert a_lo <= b_hi and b_lo <= c_hi
        assert p.no_positive_unit <= p.satisfiable <= p.horn_part_satisfiable
    with pytest.raises(ValueError):
        sandwich_check(CLAUSAL_2SAT, 10, [0.1], 10)


def test_meanfield_agreement_small():
    pts = meanfield_agreement(HORN_2, 2000, 6000, 150, depth=5, seed=18)
    assert [p.c for p in pts] == [1, 2, 3, 4, 5]
    for p in pts:
        assert p.survivors > 50
        assert p.rel_error_P < 0.05 and p.rel_error_N < 0.05
