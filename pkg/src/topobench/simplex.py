"""Self-contained dense revised simplex for the flow LPs.

Bounded-variable revised simplex over sparse constraint columns with a dense
LU-factorized basis and product-form eta updates. Intended for desk-scale
instances; the HiGHS backend in `flow` is the fast path for larger sweeps,
and this solver provides an external-dependency-free cross-check.

Problem form:

    minimize c.x  subject to  A_eq x = b_eq, A_ub x <= b_ub, 0 <= x <= upper
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

_AT_LOWER = 0
_AT_UPPER = 1
_BASIC = 2

_REFACTOR_EVERY = 64
_STALL_LIMIT = 512
_BLAND_SPAN = 128


@dataclass
class SimplexResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit | timeout | numerical
    x: np.ndarray | None
    fun: float
    iterations: int


class _Basis:
    """Dense LU of the basis matrix plus eta updates since the last refactor."""

    def __init__(self, A: sp.csc_matrix, basis: np.ndarray):
        self.A = A
        self.m = A.shape[0]
        self.refactor(basis)

    def refactor(self, basis: np.ndarray) -> None:
        dense = self.A[:, basis].toarray()
        self.lu = sla.lu_factor(dense, check_finite=False)
        self.etas: list[tuple[int, np.ndarray]] = []

    def ftran(self, col: np.ndarray) -> np.ndarray:
        v = sla.lu_solve(self.lu, col, check_finite=False)
        for r, w in self.etas:
            t = v[r] / w[r]
            if t != 0.0:
                v -= t * w
            v[r] = t
        return v

    def btran(self, rhs: np.ndarray) -> np.ndarray:
        z = rhs.copy()
        for r, w in reversed(self.etas):
            zr = z[r]
            s = w @ z - w[r] * zr
            z[r] = (zr - s) / w[r]
        return sla.lu_solve(self.lu, z, trans=1, check_finite=False)

    def push_eta(self, row: int, w: np.ndarray) -> None:
        self.etas.append((row, w.copy()))

    @property
    def age(self) -> int:
        return len(self.etas)


def _assemble(c, A_eq, b_eq, A_ub, b_ub, upper):
    """Build the working arrays: structural vars + slacks + artificials."""
    n = len(c)
    blocks = []
    rhs_parts = []
    m_eq = 0
    if A_eq is not None and A_eq.shape[0]:
        blocks.append(sp.csc_matrix(A_eq))
        rhs_parts.append(np.asarray(b_eq, dtype=float))
        m_eq = blocks[-1].shape[0]
    m_ub = 0
    if A_ub is not None and A_ub.shape[0]:
        blocks.append(sp.csc_matrix(A_ub))
        rhs_parts.append(np.asarray(b_ub, dtype=float))
        m_ub = blocks[-1].shape[0]
    if not blocks:
        raise ValueError("LP needs at least one constraint row")
    A_struct = sp.vstack(blocks, format="csc")
    b = np.concatenate(rhs_parts)
    m = m_eq + m_ub

    lower = np.zeros(n)
    up = np.full(n, math.inf) if upper is None else np.asarray(upper, dtype=float).copy()

    # Slacks for <= rows.
    slack_cols = sp.csc_matrix(
        (np.ones(m_ub), (np.arange(m_eq, m), np.arange(m_ub))), shape=(m, m_ub)
    )
    # One artificial per row; sign matches b so the artificial starts at |b|.
    art_sign = np.where(b >= 0, 1.0, -1.0)
    art_cols = sp.csc_matrix((art_sign, (np.arange(m), np.arange(m))), shape=(m, m))

    A = sp.hstack([A_struct, slack_cols, art_cols], format="csc")
    lower = np.concatenate([lower, np.zeros(m_ub), np.zeros(m)])
    up = np.concatenate([up, np.full(m_ub, math.inf), np.abs(b)])
    return A, b, lower, up, n, m, m_eq, m_ub


def _ratio_test(g, basis, x_basic, lower, up, bound_gap):
    """Smallest step before a basic variable (or the entering bound) blocks.

    Returns (theta, leaving_row, bound_hit); leaving_row = -1 means a bound
    flip of the entering variable. Ties prefer the largest pivot magnitude.
    """
    piv_tol = 1e-9
    lb = lower[basis]
    ub = up[basis]
    t = np.full(g.shape, math.inf)
    pos = g > piv_tol
    if pos.any():
        t[pos] = (x_basic[pos] - lb[pos]) / g[pos]
    neg = (g < -piv_tol) & np.isfinite(ub)
    if neg.any():
        t[neg] = (x_basic[neg] - ub[neg]) / g[neg]
    tmin = float(t.min()) if t.size else math.inf
    if bound_gap < tmin - 1e-12:
        return bound_gap, -1, _AT_LOWER
    if math.isinf(tmin):
        return math.inf, -1, _AT_LOWER
    candidates = np.nonzero(t <= tmin + 1e-12)[0]
    leave = int(candidates[np.argmax(np.abs(g[candidates]))])
    leave_to = _AT_LOWER if g[leave] > 0 else _AT_UPPER
    return tmin, leave, leave_to


def solve_lp(
    c,
    A_eq=None,
    b_eq=None,
    A_ub=None,
    b_ub=None,
    upper=None,
    maximize: bool = False,
    tol: float = 1e-9,
    max_iter: int | None = None,
    time_limit: float | None = None,
) -> SimplexResult:
    """Solve a bounded LP with the built-in revised simplex.

    `upper` holds per-variable upper bounds (inf allowed); lower bounds are 0.
    """
    c_in = np.asarray(c, dtype=float)
    if maximize:
        c_in = -c_in
    A, b, lower, up, n, m, m_eq, m_ub = _assemble(c_in, A_eq, b_eq, A_ub, b_ub, upper)
    n_slack = m_ub
    n_art = m
    total = n + n_slack + n_art
    art_start = n + n_slack

    status = np.full(total, _AT_LOWER, dtype=np.int8)
    values = lower.copy()

    basis = np.empty(m, dtype=int)
    # Prefer slacks as the starting basis on <= rows with b >= 0.
    for i in range(m):
        if m_eq <= i and b[i] >= 0:
            col = n + (i - m_eq)
        else:
            col = art_start + i
        basis[i] = col
        status[col] = _BASIC
        values[col] = abs(b[i]) if col >= art_start else b[i]

    art_mask = np.zeros(total, dtype=bool)
    art_mask[art_start:] = True

    art_basic_values = values[art_start:][status[art_start:] == _BASIC]
    need_phase1 = bool(np.any(art_basic_values > tol))

    if max_iter is None:
        max_iter = 50 * (m + total) + 10_000
    deadline = time.monotonic() + time_limit if time_limit else None

    cost = np.zeros(total)
    if need_phase1:
        cost[art_start:] = 1.0
        phase = 1
    else:
        up[art_start:] = 0.0
        cost[:n] = c_in
        phase = 2

    fac = _Basis(A, basis)
    x_basic = values[basis].astype(float)
    iterations = 0
    stall = 0
    bland_left = 0

    def current_x() -> np.ndarray:
        full = np.where(status == _AT_UPPER, up, lower)
        full[basis] = x_basic
        return full

    def recompute_basics() -> np.ndarray:
        # Fresh x_B = B^-1 (b - N x_N) right after a refactor; curbs drift.
        full = np.where(status == _AT_UPPER, up, lower)
        full[basis] = 0.0
        return fac.ftran(b - A.dot(full))

    while True:
        if iterations >= max_iter:
            return SimplexResult("iteration_limit", current_x()[:n], math.nan, iterations)
        if deadline is not None and time.monotonic() > deadline:
            return SimplexResult("timeout", current_x()[:n], math.nan, iterations)

        # Pricing: reduced costs over nonbasic columns.
        y = fac.btran(cost[basis])
        d = cost - A.T.dot(y)
        movable = up - lower > tol
        can_enter = np.where(
            (status == _AT_LOWER) & movable, -d, np.where((status == _AT_UPPER) & movable, d, -math.inf)
        )
        can_enter[status == _BASIC] = -math.inf
        if phase == 2:
            can_enter[art_mask] = -math.inf

        if bland_left > 0:
            eligible = np.nonzero(can_enter > tol)[0]
            if eligible.size == 0:
                entering = -1
            else:
                entering = int(eligible[0])
            bland_left -= 1
        else:
            entering = int(np.argmax(can_enter))
            if can_enter[entering] <= tol:
                entering = -1

        if entering < 0:
            # Optimal for the current phase.
            if phase == 1:
                obj = cost[basis] @ x_basic
                if obj > 1e-7 * max(1.0, float(np.abs(b).max())):
                    return SimplexResult("infeasible", None, math.nan, iterations)
                up[art_start:] = 0.0
                x_basic[basis >= art_start] = 0.0
                cost = np.zeros(total)
                cost[:n] = c_in
                phase = 2
                stall = 0
                continue
            x_full = current_x()
            fun = float(c_in @ x_full[:n])
            if maximize:
                fun = -fun
            return SimplexResult("optimal", x_full[:n], fun, iterations)

        sigma = 1.0 if status[entering] == _AT_LOWER else -1.0
        w = fac.ftran(A[:, entering].toarray().ravel())
        g = sigma * w
        theta, leave, leave_to = _ratio_test(g, basis, x_basic, lower, up, up[entering] - lower[entering])

        if leave >= 0 and abs(w[leave]) < 1e-11 and fac.age:
            # Pivot too small through stale etas: refactor and redo the step.
            fac.refactor(basis)
            w = fac.ftran(A[:, entering].toarray().ravel())
            g = sigma * w
            theta, leave, leave_to = _ratio_test(
                g, basis, x_basic, lower, up, up[entering] - lower[entering]
            )

        if math.isinf(theta):
            if phase == 1:
                return SimplexResult("numerical", None, math.nan, iterations)
            return SimplexResult("unbounded", None, math.nan, iterations)
        theta = max(theta, 0.0)

        if leave < 0:
            # Bound flip: the entering variable crosses to its other bound.
            x_basic -= theta * g
            status[entering] = _AT_UPPER if status[entering] == _AT_LOWER else _AT_LOWER
        else:
            x_basic -= theta * g
            left_var = basis[leave]
            status[left_var] = leave_to
            value_in = (lower[entering] + theta) if sigma > 0 else (up[entering] - theta)
            basis[leave] = entering
            status[entering] = _BASIC
            x_basic[leave] = value_in
            fac.push_eta(leave, w)
            if fac.age >= _REFACTOR_EVERY:
                fac.refactor(basis)
                x_basic = recompute_basics()

        iterations += 1
        if theta <= 1e-10:
            stall += 1
            if stall >= _STALL_LIMIT and bland_left == 0:
                bland_left = _BLAND_SPAN
                stall = 0
        else:
            stall = 0
