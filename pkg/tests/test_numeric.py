from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from coevolve.numeric import (
    NumericError,
    game_value,
    nullspace,
    parse_number,
    psd_pivots,
    rref,
    solve,
    solve_affine,
    tol_for,
)

small_ints = st.integers(min_value=-5, max_value=5)


def square(m):
    return st.lists(st.lists(small_ints, min_size=m, max_size=m), min_size=m, max_size=m)


def scipy_value(a):
    a = np.array(a, dtype=float)
    m, n = a.shape
    # maximise v subject to x'A >= v, x on the simplex
    c = np.zeros(m + 1)
    c[-1] = -1
    res = linprog(c, A_ub=np.hstack([-a.T, np.ones((n, 1))]), b_ub=np.zeros(n),
                  A_eq=np.append(np.ones(m), 0)[None, :], b_eq=[1],
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    return -res.fun


def test_parse_number_modes():
    assert parse_number("3/10") == F(3, 10)
    assert parse_number("0.35") == F(7, 20)
    assert parse_number("0.35", exact=False) == pytest.approx(0.35)
    with pytest.raises(NumericError):
        parse_number("abc")


def test_tol_for_is_exact_zero_for_fractions():
    t = tol_for(F(4, 5))
    assert t == 0 and not isinstance(t, float)
    assert F(4, 5) >= F(4, 5) - t
    assert tol_for(0.8) > 0


def test_matching_pennies_value_is_zero():
    v, row, col = game_value([[1, -1], [-1, 1]])
    assert v == 0 and row == [F(1, 2), F(1, 2)] and col == [F(1, 2), F(1, 2)]


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(square))
def test_game_value_matches_scipy(a):
    v, row, col = game_value([[F(x) for x in r] for r in a])
    assert float(v) == pytest.approx(scipy_value(a), abs=1e-9)
    # the strategies guarantee the value exactly
    m = len(a)
    assert sum(row) == 1 and sum(col) == 1
    assert min(sum(row[i] * a[i][j] for i in range(m)) for j in range(m)) == v
    assert max(sum(a[i][j] * col[j] for j in range(m)) for i in range(m)) == v


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(square), st.lists(small_ints, min_size=4, max_size=4))
def test_solve_affine_solutions_satisfy_system(a, b):
    m = len(a)
    a = [[F(x) for x in r] for r in a]
    rhs = [F(x) for x in b[:m]]
    sol = solve_affine(a, rhs)
    if sol is None:
        # inconsistent: rank of the augmented matrix exceeds the rank of a
        assert len(rref([r + [y] for r, y in zip(a, rhs)])[1]) > len(rref(a)[1])
        return
    x, basis = sol
    assert [sum(r[j] * x[j] for j in range(m)) for r in a] == rhs
    for v in basis:
        assert all(sum(r[j] * v[j] for j in range(m)) == 0 for r in a)


def test_solve_unique_and_nullspace():
    assert solve([[2, 1], [1, 3]], [3, 5]) == [F(4, 5), F(7, 5)]
    ns = nullspace([[1, 1], [2, 2]])
    assert len(ns) == 1 and ns[0][0] + ns[0][1] == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(square))
def test_psd_pivots_match_eigenvalues(a):
    q = [[F(a[i][j] + a[j][i], 2) for j in range(len(a))] for i in range(len(a))]
    psd, pd = psd_pivots(q)
    eig = np.linalg.eigvalsh(np.array(q, dtype=float))
    assert psd == bool(eig.min() >= -1e-9)
    assert pd == bool(eig.min() > 1e-9)
