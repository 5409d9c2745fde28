#!/usr/bin/env python3
"""
Tests for the exact and floating LP backends and their infeasibility certificates.
"""

import math
from fractions import Fraction

import pytest

from contextkit.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, max_residual, rationalize, solve_lp, verify_farkas


def test_exact_optimum_is_a_fraction():
    res = solve_lp([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6], maximize=True)
    assert res.status == OPTIMAL
    assert res.exact
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]
    assert res.objective == Fraction(14, 5)
    assert max_residual(None, None, [[1, 2], [3, 1]], [4, 6], res.x) == 0


def test_exact_infeasibility_certificate_verifies():
    A_eq, b_eq = [[1, 1]], [1]
    A_ub, b_ub = [[1, 1]], [Fraction(1, 2)]
    res = solve_lp([0, 0], A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub)
    assert res.status == INFEASIBLE
    assert not res.feasible
    assert res.has_certificate
    assert verify_farkas(A_eq, b_eq, A_ub, b_ub, res.farkas_eq, res.farkas_ub)


def test_negative_right_hand_side_is_handled():
    res = solve_lp([0], A_eq=[[1]], b_eq=[-1])
    assert res.status == INFEASIBLE
    assert verify_farkas([[1]], [-1], None, None, res.farkas_eq, res.farkas_ub)


def test_unbounded_program():
    assert solve_lp([1, 0], A_ub=[[1, -1]], b_ub=[1], maximize=True).status == UNBOUNDED


def test_irrational_coefficients_use_the_floating_path():
    res = solve_lp([1], A_ub=[[-math.sqrt(2)]], b_ub=[-1])
    assert res.status == OPTIMAL
    assert not res.exact
    assert res.objective == pytest.approx(1 / math.sqrt(2))

    forced = solve_lp([1], A_ub=[[-math.sqrt(2)]], b_ub=[-1], exact=True)
    assert not forced.exact


def test_floating_infeasibility_certificate_verifies():
    A_eq, b_eq = [[1.0, 1.0]], [math.sqrt(2)]
    A_ub, b_ub = [[1.0, 1.0]], [1.0]
    res = solve_lp([0, 0], A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub)
    assert res.status == INFEASIBLE
    assert verify_farkas(A_eq, b_eq, A_ub, b_ub, res.farkas_eq, res.farkas_ub, tol=1e-9)


def test_verify_farkas_rejects_non_certificates():
    assert not verify_farkas([[1, 1]], [1], None, None, [1], None)
    assert not verify_farkas(None, None, [[1]], [-1], None, [-1])
    assert not verify_farkas(None, None, None, None, None, None)


@pytest.mark.parametrize("value,expected", [
    (0.5, Fraction(1, 2)),
    (0.1, Fraction(1, 10)),
    ("3/4", Fraction(3, 4)),
    (7, Fraction(7)),
    (math.sqrt(2), None),
    (float("nan"), None),
    (True, None),
    ("x", None),
])
def test_rationalize(value, expected):
    assert rationalize(value) == expected
