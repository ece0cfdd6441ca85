import math

import numpy as np
import pytest
from scipy.optimize import linprog

from topobench.simplex import solve_lp


def test_known_maximization():
    res = solve_lp(
        [1.0, 1.0], A_ub=np.array([[1.0, 2.0], [3.0, 1.0]]), b_ub=[4.0, 6.0],
        maximize=True,
    )
    assert res.status == "optimal"
    assert res.fun == pytest.approx(2.8)
    assert res.x == pytest.approx([1.6, 1.2])


def test_equality_with_upper_bounds():
    res = solve_lp(
        [1.0, 1.0], A_eq=np.array([[1.0, 1.0]]), b_eq=[3.0],
        upper=[1.0, math.inf],
    )
    assert res.status == "optimal"
    assert res.fun == pytest.approx(3.0)
    assert res.x == pytest.approx([1.0, 2.0])


def test_bound_flip_optimum():
    # Optimum sits at an upper bound, exercising the flip path.
    res = solve_lp([-1.0, -1.0], A_ub=np.array([[1.0, 1.0]]), b_ub=[10.0],
                   upper=[2.0, 3.0], maximize=False)
    assert res.status == "optimal"
    assert res.fun == pytest.approx(-5.0)


def test_infeasible():
    res = solve_lp([1.0], A_ub=np.array([[1.0]]), b_ub=[-1.0])
    assert res.status == "infeasible"


def test_unbounded():
    res = solve_lp([1.0], A_ub=np.array([[-1.0]]), b_ub=[1.0], maximize=True)
    assert res.status == "unbounded"


def test_degenerate_many_ties():
    # Highly degenerate: many identical rows force zero-step pivots.
    A = np.ones((6, 4))
    res = solve_lp([-1.0, -1.0, -1.0, -1.0], A_ub=A, b_ub=np.ones(6))
    assert res.status == "optimal"
    assert res.fun == pytest.approx(-1.0)


@pytest.mark.parametrize("trial", range(40))
def test_random_inequality_lps_match_highs(trial):
    rng = np.random.default_rng(1000 + trial)
    m, n = int(rng.integers(2, 9)), int(rng.integers(2, 11))
    A = rng.normal(size=(m, n))
    b = rng.uniform(0.5, 3.0, size=m)
    c = rng.normal(size=n)
    ub = np.where(rng.random(n) < 0.5, rng.uniform(0.5, 4.0, n), math.inf)
    ref = linprog(
        c, A_ub=A, b_ub=b,
        bounds=[(0, None if math.isinf(u) else u) for u in ub], method="highs",
    )
    mine = solve_lp(c, A_ub=A, b_ub=b, upper=ub)
    if ref.status == 0:
        assert mine.status == "optimal"
        assert mine.fun == pytest.approx(ref.fun, rel=1e-7, abs=1e-9)
    elif ref.status == 3:
        assert mine.status == "unbounded"
    elif ref.status == 2:
        assert mine.status == "infeasible"


@pytest.mark.parametrize("trial", range(30))
def test_random_equality_lps_match_highs(trial):
    rng = np.random.default_rng(5000 + trial)
    m, n = int(rng.integers(2, 6)), int(rng.integers(4, 12))
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0, 1, size=n)  # guarantees feasibility
    b = A @ x0
    c = rng.normal(size=n)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, 2.0)] * n, method="highs")
    mine = solve_lp(c, A_eq=A, b_eq=b, upper=np.full(n, 2.0))
    assert ref.status == 0
    assert mine.status == "optimal"
    assert mine.fun == pytest.approx(ref.fun, rel=1e-6, abs=1e-9)


def test_mixed_rows_and_negative_b():
    rng = np.random.default_rng(77)
    for _ in range(20):
        n = 6
        A_eq = rng.normal(size=(2, n))
        x0 = rng.uniform(0, 1, size=n)
        b_eq = A_eq @ x0
        A_ub = rng.normal(size=(3, n))
        b_ub = A_ub @ x0 + rng.uniform(0.0, 1.0, size=3)  # some slack
        c = rng.normal(size=n)
        ref = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=[(0, 3.0)] * n, method="highs")
        mine = solve_lp(c, A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub,
                        upper=np.full(n, 3.0))
        assert ref.status == 0 and mine.status == "optimal"
        assert mine.fun == pytest.approx(ref.fun, rel=1e-6, abs=1e-9)


def test_iteration_limit_reported():
    rng = np.random.default_rng(9)
    A = rng.normal(size=(10, 30))
    b = np.abs(A @ rng.uniform(0, 1, 30))
    res = solve_lp(rng.normal(size=30), A_ub=A, b_ub=b, max_iter=2)
    assert res.status in ("iteration_limit", "optimal")
