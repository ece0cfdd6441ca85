"""Independent oracles used by the tests.

These deliberately avoid the library's own code paths wherever they check
one: distances come from a dict-based BFS, throughput from an all-simple-
paths LP solved with the built-in simplex (the production path is the
edge-based LP on HiGHS), and small graph families from brute enumeration.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from topobench import simplex
from topobench.topology import Topology
from topobench.traffic import TrafficMatrix


def bfs_distances(adj: dict[int, list[int]], src: int) -> dict[int, int]:
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def mean_pairwise_distance(adj: dict[int, list[int]]) -> float:
    nodes = sorted(adj)
    total = 0
    count = 0
    for i, u in enumerate(nodes):
        dist = bfs_distances(adj, u)
        for v in nodes[i + 1 :]:
            total += dist[v]
            count += 1
    return total / count


def petersen_adjacency() -> dict[int, list[int]]:
    """The canonical 3-regular 10-vertex graph: outer 5-cycle, inner
    5-star, spokes."""
    adj = {v: [] for v in range(10)}

    def add(u, v):
        adj[u].append(v)
        adj[v].append(u)

    for i in range(5):
        add(i, (i + 1) % 5)          # outer cycle
        add(5 + i, 5 + (i + 2) % 5)  # inner pentagram
        add(i, 5 + i)                # spokes
    return adj


def connected_regular_graphs(n: int, r: int) -> list[frozenset[frozenset[int]]]:
    """Brute-force enumeration of connected simple r-regular graphs on
    labeled vertices 0..n-1 (tiny n only)."""
    all_pairs = list(itertools.combinations(range(n), 2))
    need_edges = n * r // 2
    out = []
    for combo in itertools.combinations(all_pairs, need_edges):
        deg = [0] * n
        for u, v in combo:
            deg[u] += 1
            deg[v] += 1
        if any(d != r for d in deg):
            continue
        adj = {v: [] for v in range(n)}
        for u, v in combo:
            adj[u].append(v)
            adj[v].append(u)
        if len(bfs_distances(adj, 0)) == n:
            out.append(frozenset(frozenset(e) for e in combo))
    return out


def all_paths_throughput(topo: Topology, tm: TrafficMatrix) -> float:
    """Maximum concurrent throughput via an LP over every simple switch path
    of every commodity, solved with the built-in simplex."""
    adj = topo.adjacency()
    if tm.aggregation == "server":
        sw_of = {s.server_id: s.switch_id for s in topo.servers}
        resolve = lambda e: sw_of[e]
    else:
        resolve = lambda e: e

    arcs: dict[tuple[int, int], float] = {}
    for link in topo.links:
        arcs[(link.a, link.b)] = arcs.get((link.a, link.b), 0.0) + link.capacity
        arcs[(link.b, link.a)] = arcs.get((link.b, link.a), 0.0) + link.capacity
    arc_ids = {k: i for i, k in enumerate(sorted(arcs))}
    caps = np.array([arcs[k] for k in sorted(arcs)])

    t_up = math.inf
    if tm.aggregation == "server":
        acc = {s.server_id: s.access_capacity for s in topo.servers}
        up: dict[int, float] = {}
        down: dict[int, float] = {}
        for s, d, dem in tm.commodities:
            up[s] = up.get(s, 0.0) + dem
            down[d] = down.get(d, 0.0) + dem
        for sid, load in up.items():
            t_up = min(t_up, acc[sid] / load)
        for sid, load in down.items():
            t_up = min(t_up, acc[sid] / load)

    def simple_paths(u: int, v: int):
        stack = [(u, [u])]
        while stack:
            node, path = stack.pop()
            for w in adj[node]:
                if w == v:
                    yield list(zip(path, path[1:] + [v]))
                elif w not in path:
                    stack.append((w, path + [w]))

    cols: list[list[int]] = []
    col_comm: list[int] = []
    routed = []
    for ci, (s, d, dem) in enumerate(tm.commodities):
        u, v = resolve(s), resolve(d)
        if u == v:
            continue
        routed.append(ci)
        for p in simple_paths(u, v):
            cols.append([arc_ids[a] for a in p])
            col_comm.append(ci)
    if not routed:
        if math.isinf(t_up):
            raise ValueError("unbounded instance")
        return t_up

    crow = {ci: i for i, ci in enumerate(routed)}
    n_cols = len(cols)
    A_eq = np.zeros((len(routed), n_cols + 1))
    for j, ci in enumerate(col_comm):
        A_eq[crow[ci], j] = 1.0
    for ci in routed:
        A_eq[crow[ci], n_cols] = -tm.commodities[ci][2]
    A_ub = np.zeros((len(caps), n_cols + 1))
    for j, rows in enumerate(cols):
        for a in rows:
            A_ub[a, j] += 1.0
    c = np.zeros(n_cols + 1)
    c[n_cols] = 1.0
    upper = np.full(n_cols + 1, math.inf)
    upper[n_cols] = t_up
    res = simplex.solve_lp(
        c, A_eq=A_eq, b_eq=np.zeros(len(routed)), A_ub=A_ub, b_ub=caps,
        upper=upper, maximize=True,
    )
    if res.status != "optimal":
        raise RuntimeError(f"oracle LP failed: {res.status}")
    return float(res.x[n_cols])


def random_small_instance(rng: np.random.Generator):
    """A connected topology with <= 5 switches / <= 6 servers plus a
    permutation-style traffic matrix, for oracle comparisons."""
    from topobench.generators import gen_rrg
    from topobench.topology import Link, PortGroup, ServerAttachment, SwitchSpec
    from topobench.traffic import random_permutation

    while True:
        n = int(rng.integers(3, 6))
        r = int(rng.integers(2, max(3, n - 1)))
        if r >= n:
            r = n - 1
        if n * r % 2:
            if r + 1 < n:
                r += 1
            else:
                continue
        topo = gen_rrg(n, r, int(rng.integers(2**32)))
        n_servers = int(rng.integers(2, 7))
        counts = [0] * n
        for _ in range(n_servers):
            counts[int(rng.integers(n))] += 1
        if sum(1 for c in counts if c) < 2:
            continue
        switches = []
        for sw in topo.switches:
            extra = counts[sw.id]
            groups = list(sw.ports)
            if extra:
                groups.append(PortGroup(float(rng.choice([1.0, 2.0])), extra))
            switches.append(SwitchSpec(sw.id, tuple(groups)))
        servers = []
        sid = 0
        for v, c in enumerate(counts):
            speed = switches[v].ports[-1].speed if c else 1.0
            for _ in range(c):
                servers.append(ServerAttachment(sid, v, speed))
                sid += 1
        capscale = float(rng.choice([1.0, 2.0]))
        links = tuple(Link(l.a, l.b, l.capacity * capscale) for l in topo.links)
        topo = Topology(switches=tuple(switches), servers=tuple(servers), links=links)
        try:
            tm = random_permutation(topo, int(rng.integers(2**32)))
        except Exception:
            continue
        return topo, tm
