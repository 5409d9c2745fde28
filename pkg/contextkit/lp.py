"""
Linear programming backend

Rational instances are solved exactly with a two-phase tableau simplex over
Fractions (Bland's rule); anything else goes through scipy's HiGHS. Both
paths return an infeasibility certificate that verify_farkas re-checks.

Problem form:  min/max c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
Certificate:   (u_eq free, u_ub >= 0) with u_eq.A_eq + u_ub.A_ub >= 0 and
               u_eq.b_eq + u_ub.b_ub < 0.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from . import config
from .errors import InternalError, SolverError

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: Optional[List[Number]] = None
    objective: Optional[Number] = None
    farkas_eq: Optional[List[Number]] = None
    farkas_ub: Optional[List[Number]] = None
    exact: bool = False
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE

    @property
    def has_certificate(self) -> bool:
        return self.farkas_eq is not None or self.farkas_ub is not None


def rationalize(x: Any, max_denominator: Optional[int] = None) -> Optional[Fraction]:
    """
    Exact value of x, or None when x is not recognisably rational.
    A float qualifies only if it equals a small-denominator fraction exactly.
    """
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            return None
    if isinstance(x, (float, np.floating)):
        xf = float(x)
        if not math.isfinite(xf):
            return None
        fr = Fraction(xf).limit_denominator(max_denominator or config.RATIONAL_MAX_DENOMINATOR)
        return fr if float(fr) == xf else None
    return None


def rationalize_all(values: Iterable[Any]) -> Optional[List[Fraction]]:
    out = []
    for v in values:
        fr = rationalize(v)
        if fr is None:
            return None
        out.append(fr)
    return out


def _seq(values) -> list:
    return [] if values is None else list(values)


def _exact_matrix(rows: Optional[Sequence[Sequence[Any]]]) -> Optional[List[List[Fraction]]]:
    if rows is None:
        return []
    out = []
    for row in rows:
        fr = rationalize_all(row)
        if fr is None:
            return None
        out.append(fr)
    return out


def solve_lp(c: Sequence[Any],
             A_eq: Optional[Sequence[Sequence[Any]]] = None,
             b_eq: Optional[Sequence[Any]] = None,
             A_ub: Optional[Sequence[Sequence[Any]]] = None,
             b_ub: Optional[Sequence[Any]] = None,
             maximize: bool = False,
             exact: Optional[bool] = None,
             tol: Optional[float] = None) -> LPResult:
    """
    Solve an LP over x >= 0.
    exact=None picks the exact path whenever every coefficient is rational.
    """
    tol = config.EPS_CONTEXT if tol is None else tol
    n = len(c)
    if A_eq is not None and len(A_eq) and any(len(r) != n for r in A_eq):
        raise InternalError("A_eq width does not match objective length")
    if A_ub is not None and len(A_ub) and any(len(r) != n for r in A_ub):
        raise InternalError("A_ub width does not match objective length")

    if exact is not False:
        data = (rationalize_all(c), _exact_matrix(A_eq), rationalize_all(_seq(b_eq)),
                _exact_matrix(A_ub), rationalize_all(_seq(b_ub)))
        if all(d is not None for d in data):
            return _solve_exact(*data, maximize=maximize)
        if exact:
            logger.info("non-rational coefficients present; using floating LP")
    return _solve_float(c, A_eq, b_eq, A_ub, b_ub, maximize=maximize, tol=tol)


# --- exact two-phase simplex ---

def _pivot(rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int], r: int, e: int):
    piv = rows[r][e]
    prow = [v / piv for v in rows[r]]
    prhs = rhs[r] / piv
    rows[r], rhs[r] = prow, prhs
    nz = [k for k, v in enumerate(prow) if v != 0]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[e]
        if f == 0:
            continue
        for k in nz:
            row[k] -= f * prow[k]
        rhs[i] -= f * prhs
    basis[r] = e


def _reduced_costs(rows: List[List[Fraction]], basis: List[int], cost: List[Fraction], width: int) -> List[Fraction]:
    red = list(cost[:width])
    for i, b in enumerate(basis):
        cb = cost[b]
        if cb == 0:
            continue
        row = rows[i]
        for k in range(width):
            if row[k] != 0:
                red[k] -= cb * row[k]
    return red


def _run_simplex(rows, rhs, basis, cost, width) -> Tuple[str, int, List[Fraction]]:
    """Minimize cost over the current canonical tableau with Bland's rule."""
    iterations = 0
    limit = 50 * (len(rows) + width) + 1000
    while True:
        red = _reduced_costs(rows, basis, cost, width)
        entering = next((k for k in range(width) if red[k] < 0), None)
        if entering is None:
            return OPTIMAL, iterations, red
        leave, best = None, None
        for i, row in enumerate(rows):
            a = row[entering]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            return UNBOUNDED, iterations, red
        _pivot(rows, rhs, basis, leave, entering)
        iterations += 1
        if iterations > limit:
            raise InternalError("exact simplex exceeded its pivot limit")


def _solve_exact(c, A_eq, b_eq, A_ub, b_ub, maximize: bool) -> LPResult:
    n = len(c)
    m_eq, m_ub = len(A_eq), len(A_ub)
    n_real = n + m_ub
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for i in range(m_eq):
        rows.append(list(A_eq[i]) + [Fraction(0)] * m_ub)
        rhs.append(b_eq[i])
    for i in range(m_ub):
        slack = [Fraction(0)] * m_ub
        slack[i] = Fraction(1)
        rows.append(list(A_ub[i]) + slack)
        rhs.append(b_ub[i])
    m = len(rows)
    signs = []
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            signs.append(-1)
        else:
            signs.append(1)
    for i in range(m):
        rows[i].extend(Fraction(1) if k == i else Fraction(0) for k in range(m))
    basis = [n_real + i for i in range(m)]
    width = n_real + m

    cost1 = [Fraction(0)] * n_real + [Fraction(1)] * m
    _, it1, red = _run_simplex(rows, rhs, basis, cost1, width)
    infeasibility = sum((rhs[i] for i in range(m) if basis[i] >= n_real), Fraction(0))
    logger.debug("exact simplex phase I: %d pivots, residual %s", it1, infeasibility)
    if infeasibility > 0:
        y = [Fraction(1) - red[n_real + j] for j in range(m)]
        u = [-y[j] * signs[j] for j in range(m)]
        return LPResult(INFEASIBLE, farkas_eq=u[:m_eq], farkas_ub=u[m_eq:], exact=True, iterations=it1)

    # Drive remaining (zero-valued) artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(m):
        if basis[i] >= n_real:
            col = next((k for k in range(n_real) if rows[i][k] != 0), None)
            if col is None:
                continue
            _pivot(rows, rhs, basis, i, col)
        keep.append(i)
    rows = [rows[i][:n_real] for i in keep]
    rhs = [rhs[i] for i in keep]
    basis = [basis[i] for i in keep]

    sign = Fraction(-1) if maximize else Fraction(1)
    cost2 = [sign * v for v in c] + [Fraction(0)] * m_ub
    status, it2, _ = _run_simplex(rows, rhs, basis, cost2, n_real)
    logger.debug("exact simplex phase II: %d pivots, status %s", it2, status)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, exact=True, iterations=it1 + it2)
    x = [Fraction(0)] * n_real
    for i, b in enumerate(basis):
        x[b] = rhs[i]
    x = x[:n]
    objective = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, x=x, objective=objective, exact=True, iterations=it1 + it2)


# --- floating path ---

def _as_array(rows, n: int) -> Optional[np.ndarray]:
    if rows is None or len(rows) == 0:
        return None
    return np.array([[float(v) for v in row] for row in rows], dtype=float).reshape(-1, n)


def _as_vector(vals) -> Optional[np.ndarray]:
    if vals is None or len(vals) == 0:
        return None
    return np.array([float(v) for v in vals], dtype=float)


def _solve_float(c, A_eq, b_eq, A_ub, b_ub, maximize: bool, tol: float) -> LPResult:
    n = len(c)
    cv = np.array([float(v) for v in c], dtype=float)
    Aeq, beq = _as_array(A_eq, n), _as_vector(b_eq)
    Aub, bub = _as_array(A_ub, n), _as_vector(b_ub)
    res = linprog(-cv if maximize else cv, A_ub=Aub, b_ub=bub, A_eq=Aeq, b_eq=beq,
                  bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": max(tol, 1e-10)})
    logger.debug("HiGHS status %s: %s", res.status, res.message)
    if res.status == 0:
        x = [float(v) for v in res.x]
        return LPResult(OPTIMAL, x=x, objective=float(cv @ res.x), iterations=int(getattr(res, "nit", 0)))
    if res.status == 2:
        u_eq, u_ub = _float_farkas(Aeq, beq, Aub, bub, n, tol)
        if u_eq is None and u_ub is None:
            logger.warning("HiGHS reports infeasible but no Farkas certificate was recovered")
        return LPResult(INFEASIBLE, farkas_eq=u_eq, farkas_ub=u_ub)
    if res.status == 3:
        return LPResult(UNBOUNDED)
    raise SolverError(f"floating LP failed: {res.message}")


def _float_farkas(Aeq, beq, Aub, bub, n: int, tol: float):
    """Solve the Farkas alternative with box-bounded multipliers."""
    m_eq = 0 if Aeq is None else Aeq.shape[0]
    m_ub = 0 if Aub is None else Aub.shape[0]
    if m_eq + m_ub == 0:
        return None, None
    A = np.vstack([M for M in (Aeq, Aub) if M is not None])
    b = np.concatenate([v for v in (beq, bub) if v is not None])
    bounds = [(-1.0, 1.0)] * m_eq + [(0.0, 1.0)] * m_ub
    res = linprog(b, A_ub=-A.T, b_ub=np.zeros(n), bounds=bounds, method="highs")
    if res.status != 0 or res.fun >= -tol:
        return None, None
    u = [float(v) for v in res.x]
    return (u[:m_eq] if m_eq else None), (u[m_eq:] if m_ub else None)


# --- independent checks ---

def verify_farkas(A_eq, b_eq, A_ub, b_ub, u_eq, u_ub, tol: float = 0.0) -> bool:
    """Re-check an infeasibility certificate from scratch."""
    rows = [(r, bb, u) for r, bb, u in zip(_seq(A_eq), _seq(b_eq), _seq(u_eq))]
    rows += [(r, bb, u) for r, bb, u in zip(_seq(A_ub), _seq(b_ub), _seq(u_ub))]
    if not rows:
        return False
    if any(u < -tol for u in _seq(u_ub)):
        return False
    n = len(rows[0][0])
    combo = [sum(u * r[k] for r, _, u in rows) for k in range(n)]
    rhs = sum(u * bb for _, bb, u in rows)
    return all(v >= -tol for v in combo) and rhs < -tol


def max_residual(A_eq, b_eq, A_ub, b_ub, x) -> float:
    """Largest constraint violation of x (0 for a feasible point)."""
    worst = 0.0
    for v in x:
        worst = max(worst, float(-v))
    for row, bb in zip(_seq(A_eq), _seq(b_eq)):
        worst = max(worst, abs(float(sum(a * xi for a, xi in zip(row, x)) - bb)))
    for row, bb in zip(_seq(A_ub), _seq(b_ub)):
        worst = max(worst, float(sum(a * xi for a, xi in zip(row, x)) - bb))
    return worst
