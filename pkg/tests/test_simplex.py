"""Exact simplex: optima, certificates, and a float cross-check."""

from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from causalbox.simplex import (
    InfeasibleError,
    LpResult,
    UnboundedError,
    solve_lp,
    verify_lp_certificate,
)

F = Fraction


def test_simple_maximum():
    A = [[1, 1, 1]]
    b = [1]
    c = [3, 2, 0]
    res = solve_lp(A, b, c)
    assert res.value == 3
    assert res.x == (1, 0, 0)
    assert verify_lp_certificate(
        [[F(v) for v in row] for row in A], [F(1)], [F(v) for v in c], res
    )


def test_minimize():
    A = [[1, 1, -1, 0], [1, -1, 0, -1]]
    b = [2, 1]
    c = [2, 3, 0, 0]
    res = solve_lp(A, b, c, maximize=False)
    # x1 = 2, rest slack: constraints x1 + x2 >= ... check directly.
    assert res.value == sum(F(ci) * xi for ci, xi in zip(c, res.x))
    assert verify_lp_certificate(
        [[F(v) for v in row] for row in A],
        [F(v) for v in b],
        [F(v) for v in c],
        res,
        maximize=False,
    )


def test_negative_rhs_rows_are_flipped():
    # Same feasible set written with a negated row.
    res = solve_lp([[-1, -1, -1]], [-1], [3, 2, 0])
    assert res.value == 3
    assert verify_lp_certificate(
        [[F(-1), F(-1), F(-1)]], [F(-1)], [F(3), F(2), F(0)], res
    )


def test_redundant_rows_are_tolerated():
    A = [[1, 1], [2, 2]]
    b = [1, 2]
    res = solve_lp(A, b, [1, 0])
    assert res.value == 1
    assert verify_lp_certificate(
        [[F(1), F(1)], [F(2), F(2)]], [F(1), F(2)], [F(1), F(0)], res
    )


def test_infeasible():
    with pytest.raises(InfeasibleError):
        solve_lp([[1, 1], [1, 1]], [1, 2], [1, 1])


def test_unbounded():
    with pytest.raises(UnboundedError):
        solve_lp([[0, 1]], [1], [1, 0])


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_lp([[1, 2, 3]], [1, 2], [1, 1, 1])


def test_certificate_rejects_tampering():
    res = solve_lp([[1, 1, 1]], [1], [3, 2, 0])
    forged = LpResult(res.value + 1, res.x, res.y)
    assert not verify_lp_certificate(
        [[F(1), F(1), F(1)]], [F(1)], [F(3), F(2), F(0)], forged
    )


def test_fractional_data():
    res = solve_lp([[F(1, 2), F(1, 3)]], [F(1, 6)], [F(1), F(1)])
    assert res.value == F(1, 2)  # put all mass on the second variable


def test_against_float_solver():
    rng = np.random.default_rng(5)
    for _ in range(30):
        m, n = 3, 6
        A = rng.integers(-3, 4, size=(m, n))
        x0 = rng.integers(0, 4, size=n)
        b = A @ x0
        c = rng.integers(-5, 6, size=n)
        try:
            res = solve_lp(A.tolist(), b.tolist(), c.tolist())
        except UnboundedError:
            ref = linprog(
                -c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs"
            )
            assert ref.status == 3  # unbounded
            continue
        ref = linprog(
            -c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs"
        )
        assert ref.status == 0
        assert abs(float(res.value) + ref.fun) < 1e-7
        assert verify_lp_certificate(
            [[F(int(v)) for v in row] for row in A],
            [F(int(v)) for v in b],
            [F(int(v)) for v in c],
            res,
        )
