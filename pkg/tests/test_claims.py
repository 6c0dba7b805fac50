"""Slower checks of the experiment-level claims beyond the acceptance gate."""

import numpy as np
import pytest

from _runs import SEED, case_run, coarse_npc_critical
from threshold_lab.constraints import COARSE_NPC, CLAUSAL_2SAT
from threshold_lab.experiments import Trend, endpoint_half_point, sharpness_trend, threshold_points


@pytest.mark.slow
def test_case3_deviation_shrinks_with_n():
    assert abs(case_run("Case3", 10_000).deviation) <= abs(case_run("Case3", 1000).deviation)


@pytest.mark.slow
@pytest.mark.parametrize("case", ["Case1", "Case2"])
def test_case12_seeded_deviation_shrinks_with_n(case):
    big, small = case_run(case, 10_000), case_run(case, 1000)
    assert abs(big.deviation_seeded) <= abs(small.deviation_seeded)


@pytest.mark.slow
def test_two_sat_width_shrinks_from_100_to_400():
    a = threshold_points(CLAUSAL_2SAT, 100, 0.25, "cdcl", trials=400, seed=SEED)
    b = threshold_points(CLAUSAL_2SAT, 400, 0.25, "cdcl", trials=400, seed=SEED)
    assert b.ratio_ci[1] < a.ratio_ci[0]


@pytest.mark.slow
def test_coarse_npc_trend_is_coarse():
    tr = sharpness_trend(COARSE_NPC, [25, 50, 100], 0.25, "cdcl", trials=300, seed=SEED)
    assert tr.verdict is Trend.COARSE


def _half(n):
    return float(np.median(coarse_npc_critical(n, 60)))


@pytest.mark.slow
def test_coarse_npc_tracks_the_all_ones_endpoint():
    # same threshold function: the ratio to the all-ones half point stays put as n quadruples
    ratios = [_half(n) / endpoint_half_point(COARSE_NPC, n, 1) for n in (50, 200)]
    assert all(1 <= r <= 6 for r in ratios)
    assert 2 / 3 <= ratios[1] / ratios[0] <= 3 / 2


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="p_1/2 of SAT(S) sits near n^-2, the all-zeros half point near n^-3")
def test_coarse_npc_within_factor_two_of_all_zeros_endpoint():
    for n in (50, 200):
        ratio = _half(n) / endpoint_half_point(COARSE_NPC, n, 0)
        assert 0.5 <= ratio <= 2


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="the measured ratio to the all-ones half point is about 3, not within 2")
def test_coarse_npc_within_factor_two_of_all_ones_endpoint():
    for n in (50, 200):
        ratio = _half(n) / endpoint_half_point(COARSE_NPC, n, 1)
        assert 0.5 <= ratio <= 2
