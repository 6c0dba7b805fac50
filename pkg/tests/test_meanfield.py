from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from threshold_lab.constraints import C, CLAUSAL_3SAT, HORN_2, ConstraintSet
from threshold_lab.formula import enumerate_universe, universe_size
from threshold_lab.meanfield import (
    mf_trajectory,
    poly_P,
    poly_Q,
    predicted_counts,
    shift_matrix,
    trajectory_csv,
)

HORN_3 = ConstraintSet([C(0, 1), C(1, 0), C(1, 1), C(2, 1), C(3, 0)])
HORN_4 = ConstraintSet([C(1, 1), C(2, 1), C(3, 1), C(2, 0), C(4, 0)])


def test_polynomial_examples():
    S = ConstraintSet([C(1, 1), C(2, 1)])  # p_2 = p_3 = 1
    assert poly_P(S, 2, 3) == 4
    for S in (HORN_2, HORN_3, HORN_4, CLAUSAL_3SAT):
        for i in range(1, S.k + 1):
            assert poly_P(S, i, 0) == S.stats.p[i]
            assert poly_Q(S, i, 0) == S.stats.n[i]
    S = ConstraintSet([C(2, 0), C(1, 1)])
    assert all(poly_Q(S, 2, c) == 1 for c in range(20))
    with pytest.raises(ValueError):
        poly_P(S, 3, 0)


def test_shift_matrix_powers_are_binomial():
    for size in (3, 5, 8):
        A = shift_matrix(size)
        M = np.eye(size, dtype=np.int64) + A
        power = np.eye(size, dtype=np.int64)
        for k in range(1, 7):
            power = power @ M
            want = np.array([[comb(k, j - i) if j >= i else 0 for j in range(size)] for i in range(size)])
            assert np.array_equal(power, want)
        assert np.array_equal(np.linalg.matrix_power(A, size), np.zeros((size, size), np.int64))


def test_two_step_hand_iteration():
    st = mf_trajectory(HORN_3, 30, 90, 5)
    for c in range(6):
        assert st.x[2, 30 - c] == st.x[2, 30] + c * st.x[3, 30]
        assert st.x[3, 30 - c] == st.x[3, 30]


@pytest.mark.parametrize("S", [HORN_2, HORN_3, HORN_4, CLAUSAL_3SAT])
def test_recurrence_equals_closed_form_exactly(S):
    n = 80
    st = mf_trajectory(S, n, 5 * n, 50)
    for c in range(51):
        for i in range(2, S.k + 1):
            assert st.x[i, n - c] == st.closed_form_x(i, c)
            assert st.y[i, n - c] == st.closed_form_y(i, c)
            assert isinstance(st.x[i, n - c], Fraction)
            # P_i(c) scales the initial density when x_{j,n} is proportional to p_j
            assert st.x[i, n - c] == st.alpha_exact * poly_P(S, i, c)


def test_zero_stages_is_initialisation():
    st = mf_trajectory(HORN_3, 20, 50, 0)
    assert set(st.x) == {(2, 20), (3, 20)}
    assert list(st.stages) == [20]


@given(st.integers(5, 40), st.integers(0, 500))
def test_initial_predictions_are_exact_expectations(n, m):
    S = HORN_3
    state = mf_trajectory(S, n, m, 0)
    U = universe_size(S, n)
    clauses = enumerate_universe(S, n).clauses
    for i in range(2, S.k + 1):
        ones = sum(1 for c in clauses if len(c) == i and sum(x > 0 for x in c) == 1)
        zeros = sum(1 for c in clauses if len(c) == i and all(x < 0 for x in c))
        P, N = predicted_counts(state, i, n)
        assert P == pytest.approx(m * ones / U, rel=1e-12, abs=1e-12)
        assert N == pytest.approx(m * zeros / U, rel=1e-12, abs=1e-12)


def test_no_negative_templates_means_zero_y():
    S = ConstraintSet([C(1, 1), C(2, 1), C(0, 1)])
    st = mf_trajectory(S, 30, 60, 10)
    assert all(v == 0 for v in st.y.values())


def test_x_nonincreasing_in_t():
    st = mf_trajectory(HORN_4, 40, 400, 30)
    for i in range(2, 5):
        for t in range(40, 10, -1):
            assert st.x[i, t - 1] >= st.x[i, t]


def test_horn2_ratio_and_csv():
    n, m = 10_000, 30_000
    st = mf_trajectory(HORN_2, n, m, 20)
    P0 = predicted_counts(st, 2, n)[0]
    for c in (1, 7, 20):
        t = n - c
        assert predicted_counts(st, 2, t)[0] / P0 == pytest.approx(t * (t - 1) / (n * (n - 1)), rel=1e-12)
    text = trajectory_csv(st)
    assert text.splitlines()[0] == "t,i,predicted_P,predicted_N"
    assert len(text.splitlines()) == 1 + 21
    with pytest.raises(ValueError):
        predicted_counts(st, 2, n - 21)
