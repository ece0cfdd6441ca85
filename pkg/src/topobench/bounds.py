"""Closed-form throughput and path-length bounds.

The degree-based ASPL lower bound counts nodes in a best-case BFS tree: r
nodes at distance 1, r(r-1) at distance 2, and so on, with the last level
holding the remainder R. The throughput bounds combine total capacity,
average shortest path length, and (for two-cluster networks) the capacity
crossing the cluster cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class BoundReport:
    """Bundle of the closed-form bounds that apply to one instance.

    `hetero_bound` is always min(path_bound, cut_bound); `d_star` and
    `c_bar_star` are NaN when not applicable / not requested.
    """

    d_star: float = math.nan
    homog_bound: float = math.nan
    path_bound: float = math.nan
    cut_bound: float = math.nan
    hetero_bound: float = math.nan
    c_bar_star: float = math.nan


def _check_degree(n_nodes: int, degree: int) -> None:
    if n_nodes < 2:
        raise ValueError(f"invalid degree: need at least 2 nodes, got {n_nodes}")
    if degree < 1 or degree >= n_nodes:
        raise ValueError(f"invalid degree: r={degree} not in [1, {n_nodes - 1}]")


def aspl_bound_level(n_nodes: int, degree: int) -> tuple[int, Fraction]:
    """The deepest tree level k and remainder R behind the ASPL bound.

    k is the largest integer keeping R = (N-1) - sum_{j<k} r(r-1)^(j-1)
    non-negative. Exact integer arithmetic avoids misclassifying the level
    boundaries.
    """
    _check_degree(n_nodes, degree)
    remaining = n_nodes - 1
    k = 1
    prefix = 0
    while True:
        shell = degree * (degree - 1) ** (k - 1)
        if shell == 0 or prefix + shell > remaining:
            break
        prefix += shell
        k += 1
    return k, Fraction(remaining - prefix)


def aspl_lower_bound_exact(n_nodes: int, degree: int) -> Fraction:
    """Exact rational value of the degree-based ASPL lower bound d*."""
    k, remainder = aspl_bound_level(n_nodes, degree)
    weighted = sum(
        j * degree * (degree - 1) ** (j - 1) for j in range(1, k)
    )
    return (Fraction(weighted) + k * remainder) / (n_nodes - 1)


def aspl_lower_bound(n_nodes: int, degree: int) -> float:
    """d*: no r-regular graph on N nodes has a smaller all-pairs ASPL."""
    return float(aspl_lower_bound_exact(n_nodes, degree))


def homog_throughput_bound(
    n_nodes: int, degree: int, flows: float, aspl: float | None = None
) -> float:
    """Uniform-traffic throughput cap N*r / (<D> * f) for r-regular networks.

    With no measured ASPL the universal bound (via d*) is returned; supplying
    a measured value can only tighten it.
    """
    _check_degree(n_nodes, degree)
    if flows <= 0:
        raise ValueError("no flows")
    d = aspl if aspl is not None else aspl_lower_bound(n_nodes, degree)
    if d <= 0:
        raise ValueError(f"invalid average path length {d}")
    return n_nodes * degree / (d * flows)


def hetero_throughput_bound(
    total_cap: float,
    cut_cap: float,
    n1: float,
    n2: float,
    mean_distance: float,
) -> tuple[float, float, float]:
    """(path_bound, cut_bound, min) for a two-cluster network with n1/n2
    servers: C / (<D>(n1+n2)) against C-bar (n1+n2) / (2 n1 n2)."""
    if min(total_cap, cut_cap, n1, n2, mean_distance) <= 0:
        raise ValueError("all inputs must be positive")
    path_bound = total_cap / (mean_distance * (n1 + n2))
    cut_bound = cut_cap * (n1 + n2) / (2.0 * n1 * n2)
    return path_bound, cut_bound, min(path_bound, cut_bound)


def drop_threshold(t_star: float, n1: float, n2: float) -> float:
    """Cut capacity below which throughput must fall under the peak t_star."""
    if t_star <= 0:
        raise ValueError("t_star must be positive")
    if min(n1, n2) <= 0:
        raise ValueError("cluster server counts must be positive")
    return t_star * 2.0 * n1 * n2 / (n1 + n2)
