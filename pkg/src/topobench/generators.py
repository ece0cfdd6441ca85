"""Topology generators: random regular graphs, two-class heterogeneous
interconnects with controlled cross-cluster connectivity, line-speed
overlays, VL2-style Clos fabrics, and their randomized rewirings.

Every generator is a pure function of (config, seed). Randomness comes from
numpy's PCG64 bit generator, so a given (config, seed) produces the same
topology on every platform. Sub-streams (repair retries, overlay wiring)
derive their seeds with `derive_seed`, a fixed blake2b-based hash.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .topology import Link, PortGroup, ServerAttachment, SwitchSpec, Topology, bfs_hops

_MASK64 = (1 << 64) - 1

# Stream tags keep the different generators' RNG streams independent.
_TAG_RRG = 0x52
_TAG_BIASED = 0x42
_TAG_OVERLAY = 0x4F
_TAG_REWIRED = 0x57
_TAG_POOLED = 0x50


class GenerationError(ValueError):
    """Infeasible generator parameters or failed randomized construction."""


def derive_seed(*parts: int) -> int:
    """Fixed 64-bit seed derivation: blake2b over little-endian u64 parts."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(struct.pack("<Q", part & _MASK64))
    return int.from_bytes(h.digest(), "little")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def largest_remainder(weights: Sequence[float], total: int) -> list[int]:
    """Apportion `total` integer units proportionally to `weights`.

    Floor shares first, then one extra unit per largest fractional remainder;
    ties go to the lowest index. Exact rational arithmetic keeps the
    tie-breaking deterministic.
    """
    if total < 0:
        raise ValueError("total must be non-negative")
    wsum = Fraction(0)
    fracs = [Fraction(w) for w in weights]
    for f in fracs:
        if f < 0:
            raise ValueError("weights must be non-negative")
        wsum += f
    if total == 0:
        return [0] * len(fracs)
    if wsum == 0:
        raise ValueError("weights sum to zero")
    shares = [f * total / wsum for f in fracs]
    base = [int(s) for s in shares]
    extras = total - sum(base)
    order = sorted(range(len(fracs)), key=lambda i: (-(shares[i] - base[i]), i))
    for i in order[:extras]:
        base[i] += 1
    return base


# ---------------------------------------------------------------------------
# Stub matching with bounded repair


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


def _match_simple(
    rng: np.random.Generator,
    stubs: Sequence[int],
    stubs_b: Sequence[int] | None = None,
    forbidden: frozenset[tuple[int, int]] | set[tuple[int, int]] = frozenset(),
    rounds: int = 600,
) -> list[tuple[int, int]] | None:
    """Uniform random stub matching into a simple edge set.

    One list: pair within `stubs`, rejecting self-loops, repeated pairs, and
    `forbidden` pairs. With `stubs_b`: bipartite pairing of the two lists.
    Conflicting pairs are re-pooled and re-matched; lingering conflicts are
    fixed by swaps against accepted pairs. Returns None if repair fails.
    """
    bipartite = stubs_b is not None
    if bipartite:
        left = np.array(stubs, dtype=int)
        right = np.array(stubs_b, dtype=int)
        if len(left) != len(right):
            raise ValueError("bipartite stub lists must have equal length")
        rng.shuffle(left)
        rng.shuffle(right)
        pairs = [(int(u), int(v)) for u, v in zip(left, right)]
    else:
        pool = np.array(stubs, dtype=int)
        if len(pool) % 2:
            raise ValueError("odd number of stubs")
        rng.shuffle(pool)
        pairs = [(int(pool[2 * i]), int(pool[2 * i + 1])) for i in range(len(pool) // 2)]

    if not pairs:
        return []

    def classify() -> tuple[set[tuple[int, int]], list[int]]:
        kept: set[tuple[int, int]] = set()
        bad: list[int] = []
        for i, (u, v) in enumerate(pairs):
            k = _key(u, v)
            if u == v or k in forbidden or k in kept:
                bad.append(i)
            else:
                kept.add(k)
        return kept, bad

    prev_bad = len(pairs) + 1
    stagnant = 0
    for _ in range(rounds):
        kept, bad = classify()
        if not bad:
            return pairs
        stagnant = stagnant + 1 if len(bad) >= prev_bad else 0
        prev_bad = len(bad)

        if stagnant < 20:
            # Re-pool the conflicting stubs and re-match them among themselves.
            if bipartite:
                bl = np.array([pairs[i][0] for i in bad])
                br = np.array([pairs[i][1] for i in bad])
                rng.shuffle(bl)
                rng.shuffle(br)
                for i, u, v in zip(bad, bl, br):
                    pairs[i] = (int(u), int(v))
            else:
                pooled = np.array([s for i in bad for s in pairs[i]])
                rng.shuffle(pooled)
                for j, i in enumerate(bad):
                    pairs[i] = (int(pooled[2 * j]), int(pooled[2 * j + 1]))
            continue

        # Deadlock: swap each conflicting pair against random accepted pairs.
        good = [i for i in range(len(pairs)) if i not in set(bad)]
        if not good:
            return None
        for i in bad:
            u, v = pairs[i]
            fixed = False
            for _try in range(60):
                j = int(good[rng.integers(len(good))])
                x, y = pairs[j]
                if bipartite:
                    variants = [((u, y), (x, v))]
                else:
                    variants = [((u, x), (v, y)), ((u, y), (v, x))]
                    rng.shuffle(variants)
                for (p1, p2) in variants:
                    k1, k2 = _key(*p1), _key(*p2)
                    if p1[0] == p1[1] or p2[0] == p2[1] or k1 == k2:
                        continue
                    kj = _key(x, y)
                    current = kept - {kj}
                    if k1 in current or k2 in current or k1 in forbidden or k2 in forbidden:
                        continue
                    pairs[i], pairs[j] = p1, p2
                    kept.discard(kj)
                    kept.add(k1)
                    kept.add(k2)
                    fixed = True
                    break
                if fixed:
                    break
        stagnant = 0

    kept, bad = classify()
    return pairs if not bad else None


# ---------------------------------------------------------------------------
# Connectivity repair via degree-preserving swaps within an edge group


def _components(nodes: Iterable[int], edges: Iterable[tuple[int, int]]) -> list[set[int]]:
    adj: dict[int, list[int]] = {v: [] for v in nodes}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen: set[int] = set()
    comps = []
    for v in adj:
        if v in seen:
            continue
        comp = set(bfs_hops(adj, v))
        seen |= comp
        comps.append(comp)
    return comps


def _repair_connectivity(
    rng: np.random.Generator,
    nodes: Sequence[int],
    groups: dict[str, list[tuple[int, int]]],
    speed_of: Mapping[str, float],
    bipartite_groups: frozenset[str] | set[str] = frozenset(),
    static_edges: Sequence[tuple[int, int]] = (),
    attempts: int = 2000,
) -> bool:
    """Merge graph components by 2-edge swaps inside one group at a time.

    Swaps preserve every node degree and every group's edge count (so a cross
    -cluster link budget stays exact). Returns True when connected.
    """
    pair_sets: dict[float, set[tuple[int, int]]] = {}
    for g, edges in groups.items():
        pair_sets.setdefault(speed_of[g], set()).update(_key(u, v) for u, v in edges)

    def all_edges() -> list[tuple[int, int]]:
        out = list(static_edges)
        for edges in groups.values():
            out.extend(edges)
        return out

    budget = attempts
    while budget > 0:
        comps = _components(nodes, all_edges())
        if len(comps) <= 1:
            return True
        comps.sort(key=len)
        small = comps[0]
        merged = False
        names = list(groups)
        rng.shuffle(names)
        for g in names:
            edges = groups[g]
            inside = [i for i, (u, v) in enumerate(edges) if u in small and v in small]
            outside = [i for i, (u, v) in enumerate(edges) if u not in small and v not in small]
            if not inside or not outside:
                continue
            speed = speed_of[g]
            pairs = pair_sets[speed]
            for _try in range(200):
                budget -= 1
                i = int(inside[rng.integers(len(inside))])
                j = int(outside[rng.integers(len(outside))])
                a, b = edges[i]
                c, d = edges[j]
                if g in bipartite_groups:
                    variants = [((a, d), (c, b))]
                else:
                    variants = [((a, c), (b, d)), ((a, d), (b, c))]
                    rng.shuffle(variants)
                done = False
                for (p1, p2) in variants:
                    k1, k2 = _key(*p1), _key(*p2)
                    if p1[0] == p1[1] or p2[0] == p2[1] or k1 == k2:
                        continue
                    without = pairs - {_key(a, b), _key(c, d)}
                    if k1 in without or k2 in without:
                        continue
                    edges[i], edges[j] = p1, p2
                    pairs.discard(_key(a, b))
                    pairs.discard(_key(c, d))
                    pairs.add(k1)
                    pairs.add(k2)
                    done = True
                    break
                if done:
                    merged = True
                    break
            if merged:
                break
        if not merged:
            return False
    return False


# ---------------------------------------------------------------------------
# Server placement helpers


def attach_uniform_servers(
    t: Topology, per_switch: int, access_capacity: float = 1.0
) -> Topology:
    """Attach `per_switch` servers to every switch (ids from 0 upward), adding
    the matching server-facing ports to each switch's inventory."""
    servers = []
    switches = []
    sid = 0
    for sw in t.switches:
        groups = list(sw.ports)
        for gi, g in enumerate(groups):
            if g.speed == access_capacity:
                groups[gi] = PortGroup(g.speed, g.count + per_switch)
                break
        else:
            groups.append(PortGroup(access_capacity, per_switch))
        switches.append(SwitchSpec(sw.id, tuple(groups)))
        for _ in range(per_switch):
            servers.append(ServerAttachment(sid, sw.id, access_capacity))
            sid += 1
    return Topology(
        switches=tuple(switches),
        servers=tuple(servers),
        links=t.links,
        cluster_of=t.cluster_of,
    )


def _attach_by_counts(
    switches: Sequence[SwitchSpec], counts: Sequence[int], access_capacity: float
) -> tuple[ServerAttachment, ...]:
    servers = []
    sid = 0
    for sw, n in zip(switches, counts):
        for _ in range(n):
            servers.append(ServerAttachment(sid, sw.id, access_capacity))
            sid += 1
    return tuple(servers)


# ---------------------------------------------------------------------------
# Configs


@dataclass(frozen=True)
class TwoClassConfig:
    """Two switch classes sharing one line-speed: counts, ports, and servers."""

    n_large: int
    n_small: int
    ports_large: int
    ports_small: int
    total_servers: int

    def __post_init__(self) -> None:
        for name in ("n_large", "n_small", "ports_large", "ports_small", "total_servers"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.total_servers > self.total_ports:
            raise ValueError("total_servers exceeds total ports")

    @property
    def port_counts(self) -> list[int]:
        return [self.ports_large] * self.n_large + [self.ports_small] * self.n_small

    @property
    def total_ports(self) -> int:
        return self.n_large * self.ports_large + self.n_small * self.ports_small


@dataclass(frozen=True)
class LineSpeedOverlayConfig:
    """Two-class base plus extra high-speed ports on the large switches."""

    base: TwoClassConfig
    high_ports_per_large: int
    high_speed: float

    def __post_init__(self) -> None:
        if self.high_ports_per_large < 0:
            raise ValueError("high_ports_per_large must be >= 0")
        if self.high_speed < 1:
            raise ValueError("high_speed must be >= 1")


@dataclass(frozen=True)
class RewiredVl2Config:
    """VL2 switch inventory to be rewired: ToR internals stay fixed."""

    da: int
    di: int
    num_tors: int
    servers_per_tor: int = 20
    tor_uplinks: int = 2
    uplink_speed: float = 10.0
    server_speed: float = 1.0

    def __post_init__(self) -> None:
        if self.da <= 0 or self.da % 2 or self.di <= 0 or self.di % 2:
            raise ValueError("invalid VL2 parameters: DA and DI must be positive and even")
        if self.num_tors < 0:
            raise ValueError("num_tors must be >= 0")


# ---------------------------------------------------------------------------
# Random regular graphs


def gen_rrg(n_switches: int, degree: int, seed: int) -> Topology:
    """Connected simple `degree`-regular graph on `n_switches` switches with
    unit link capacities and no servers attached.

    Configuration-model stub matching with repair, then connectivity fix-up
    by random 2-edge swaps; a bounded number of derived seeds is tried before
    giving up.
    """
    if degree >= n_switches or degree < 1 or n_switches * degree % 2:
        raise GenerationError(
            f"infeasible degree sequence: N={n_switches}, r={degree}"
        )
    stubs = [v for v in range(n_switches) for _ in range(degree)]
    for attempt in range(24):
        rng = _rng(derive_seed(seed, _TAG_RRG, attempt))
        edges = _match_simple(rng, stubs)
        if edges is None:
            continue
        groups = {"net": edges}
        if not _repair_connectivity(
            rng, range(n_switches), groups, {"net": 1.0}
        ):
            continue
        switches = tuple(
            SwitchSpec(v, (PortGroup(1.0, degree),)) for v in range(n_switches)
        )
        links = tuple(Link(u, v, 1.0) for u, v in groups["net"])
        return Topology(switches=switches, links=links)
    raise GenerationError("generation failed: could not build a connected graph")


# ---------------------------------------------------------------------------
# Server distributions


def server_distribution_two_class(cfg: TwoClassConfig, x: float) -> list[int]:
    """Per-switch server counts when the large-switch share is `x` times the
    port-proportional share. Within each class counts differ by at most one;
    lowest ids take the extras.
    """
    if x < 0:
        raise GenerationError("infeasible distribution: x must be >= 0")
    p_large = cfg.n_large * cfg.ports_large
    p_small = cfg.n_small * cfg.ports_small
    to_large = _round_half_up(x * cfg.total_servers * p_large / (p_large + p_small))
    if to_large > cfg.total_servers:
        raise GenerationError("infeasible distribution: large share exceeds total")
    to_small = cfg.total_servers - to_large
    counts = largest_remainder([1] * cfg.n_large, to_large) + largest_remainder(
        [1] * cfg.n_small, to_small
    )
    ports = cfg.port_counts
    for i, (c, p) in enumerate(zip(counts, ports)):
        if c > p:
            raise GenerationError(
                f"infeasible distribution: switch {i} needs {c} server ports, has {p}"
            )
    return counts


def server_distribution_powerlaw(
    ports: Sequence[int], beta: float, total_servers: int
) -> list[int]:
    """Per-switch counts proportional to port_count**beta, summing exactly."""
    if total_servers > sum(ports):
        raise GenerationError("infeasible distribution: more servers than ports")
    weights = [float(k) ** beta for k in ports]
    counts = largest_remainder(weights, total_servers)
    for i, (c, p) in enumerate(zip(counts, ports)):
        if c >= p:
            raise GenerationError(
                f"infeasible distribution: switch {i} assigned {c} of {p} ports"
            )
    return counts


# ---------------------------------------------------------------------------
# Two-class interconnects


def is_graphical(degrees: Sequence[int]) -> bool:
    """Erdos-Gallai test: can `degrees` be realized as a simple graph?"""
    seq = sorted((int(d) for d in degrees), reverse=True)
    if any(d < 0 for d in seq) or sum(seq) % 2:
        return False
    n = len(seq)
    prefix = 0
    for k in range(1, n + 1):
        prefix += seq[k - 1]
        tail = sum(min(d, k) for d in seq[k:])
        if prefix > k * (k - 1) + tail:
            return False
    return True


def expected_cross_links(p1: int, p2: int) -> float:
    """Expected cross-cluster link count under uniform stub matching."""
    if p1 + p2 < 2:
        return 0.0
    return p1 * p2 / (p1 + p2 - 1)


def _two_class_switches(cfg: TwoClassConfig) -> tuple[SwitchSpec, ...]:
    large = [SwitchSpec(i, (PortGroup(1.0, cfg.ports_large),)) for i in range(cfg.n_large)]
    small = [
        SwitchSpec(cfg.n_large + i, (PortGroup(1.0, cfg.ports_small),))
        for i in range(cfg.n_small)
    ]
    return tuple(large + small)


def gen_two_cluster_biased(
    cfg: TwoClassConfig,
    server_counts: Sequence[int],
    x_cross: float,
    seed: int,
    access_capacity: float = 1.0,
) -> Topology:
    """Two-class random interconnect with a controlled cross-cluster volume.

    Exactly round(x_cross * expected) cross links are wired by uniform random
    stub matching between the clusters; leftovers match uniformly within each
    cluster. x_cross = 1 reproduces unbiased randomness in expectation.
    Cluster labels: large = 0, small = 1.
    """
    n_total = cfg.n_large + cfg.n_small
    if len(server_counts) != n_total:
        raise GenerationError("server_counts length must match switch count")
    ports = cfg.port_counts
    stubs_per_switch = []
    for i, (p, s) in enumerate(zip(ports, server_counts)):
        if s < 0 or s > p:
            raise GenerationError(f"infeasible bias: switch {i} server count {s} of {p} ports")
        stubs_per_switch.append(p - s)
    p1 = sum(stubs_per_switch[: cfg.n_large])
    p2 = sum(stubs_per_switch[cfg.n_large :])
    target = _round_half_up(x_cross * expected_cross_links(p1, p2))
    if target > min(p1, p2) or (p1 - target) % 2 or (p2 - target) % 2:
        raise GenerationError(
            f"infeasible bias: {target} cross links from stub pools ({p1}, {p2})"
        )

    large_ids = list(range(cfg.n_large))
    small_ids = list(range(cfg.n_large, n_total))
    stubs_large = [v for v in large_ids for _ in range(stubs_per_switch[v])]
    stubs_small = [v for v in small_ids for _ in range(stubs_per_switch[v])]

    for attempt in range(24):
        rng = _rng(derive_seed(seed, _TAG_BIASED, attempt))
        sl = np.array(stubs_large, dtype=int)
        ss = np.array(stubs_small, dtype=int)
        rng.shuffle(sl)
        rng.shuffle(ss)
        cross = _match_simple(rng, sl[:target].tolist(), ss[:target].tolist())
        intra1 = _match_simple(rng, sl[target:].tolist())
        intra2 = _match_simple(rng, ss[target:].tolist())
        if cross is None or intra1 is None or intra2 is None:
            continue
        groups = {"cross": cross, "large": intra1, "small": intra2}
        speed_of = {"cross": 1.0, "large": 1.0, "small": 1.0}
        # Swaps keep the cross-link count exact, so repair cannot (and must
        # not) bridge clusters when target == 0; such graphs stay split.
        _repair_connectivity(
            rng, range(n_total), groups, speed_of, bipartite_groups={"cross"}
        )
        switches = _two_class_switches(cfg)
        links = tuple(
            Link(u, v, 1.0)
            for part in ("cross", "large", "small")
            for u, v in groups[part]
        )
        clusters = {v: 0 for v in large_ids}
        clusters.update({v: 1 for v in small_ids})
        return Topology(
            switches=switches,
            servers=_attach_by_counts(switches, server_counts, access_capacity),
            links=links,
            cluster_of=clusters,
        )
    raise GenerationError("generation failed: biased matching did not converge")


def gen_linespeed_overlay(
    cfg: LineSpeedOverlayConfig,
    server_counts: Sequence[int],
    x_cross: float,
    seed: int,
    access_capacity: float = 1.0,
) -> Topology:
    """Two-cluster biased base graph plus a random regular matching of the
    large switches' high-speed ports (capacity = high_speed per direction)."""
    h = cfg.high_ports_per_large
    n_large = cfg.base.n_large
    if h and n_large * h % 2:
        raise GenerationError("infeasible overlay: odd number of high-speed stubs")
    base = gen_two_cluster_biased(cfg.base, server_counts, x_cross, seed, access_capacity)
    if h == 0:
        return base
    # High-speed links live in their own simplicity class unless the speed
    # collides with the base class.
    forbidden: set[tuple[int, int]] = set()
    if cfg.high_speed == 1.0:
        forbidden = {link.key() for link in base.links}
    stubs = [v for v in range(n_large) for _ in range(h)]
    overlay = None
    for attempt in range(24):
        rng = _rng(derive_seed(seed, _TAG_OVERLAY, attempt))
        overlay = _match_simple(rng, stubs, forbidden=frozenset(forbidden))
        if overlay is not None:
            break
    if overlay is None:
        raise GenerationError("generation failed: overlay matching did not converge")

    switches = []
    for sw in base.switches:
        if sw.id < n_large:
            if cfg.high_speed == 1.0:
                merged = PortGroup(1.0, sw.ports[0].count + h)
                switches.append(SwitchSpec(sw.id, (merged,)))
            else:
                switches.append(
                    SwitchSpec(sw.id, sw.ports + (PortGroup(cfg.high_speed, h),))
                )
        else:
            switches.append(sw)
    links = base.links + tuple(Link(u, v, cfg.high_speed) for u, v in overlay)
    return Topology(
        switches=tuple(switches),
        servers=base.servers,
        links=links,
        cluster_of=base.cluster_of,
    )


def gen_random_from_ports(
    ports: Sequence[int],
    server_counts: Sequence[int],
    seed: int,
    access_capacity: float = 1.0,
    cluster_of: Mapping[int, int] | None = None,
) -> Topology:
    """Unbiased uniform random interconnect over whatever ports remain after
    server attachment; switch i gets ports[i] unit-speed ports."""
    if len(ports) != len(server_counts):
        raise GenerationError("ports and server_counts must align")
    stubs_per_switch = []
    for i, (p, s) in enumerate(zip(ports, server_counts)):
        if s < 0 or s > p:
            raise GenerationError(f"infeasible distribution: switch {i} has {s} of {p}")
        stubs_per_switch.append(p - s)
    if sum(stubs_per_switch) % 2:
        raise GenerationError("infeasible distribution: odd total stub count")
    if not is_graphical(stubs_per_switch):
        raise GenerationError(
            "infeasible distribution: remaining ports are not simple-graphable"
        )
    n = len(ports)
    stubs = [v for v in range(n) for _ in range(stubs_per_switch[v])]
    for attempt in range(24):
        rng = _rng(derive_seed(seed, _TAG_POOLED, attempt))
        edges = _match_simple(rng, stubs)
        if edges is None:
            continue
        groups = {"net": edges}
        _repair_connectivity(rng, range(n), groups, {"net": 1.0})
        switches = tuple(SwitchSpec(v, (PortGroup(1.0, ports[v]),)) for v in range(n))
        return Topology(
            switches=switches,
            servers=_attach_by_counts(switches, server_counts, access_capacity),
            links=tuple(Link(u, v, 1.0) for u, v in groups["net"]),
            cluster_of=dict(cluster_of) if cluster_of is not None else None,
        )
    raise GenerationError("generation failed: pooled matching did not converge")


# ---------------------------------------------------------------------------
# VL2 and its rewiring


def gen_vl2(da: int, di: int, num_tors: int | None = None) -> Topology:
    """Canonical VL2: DI aggregation switches (DA ports), DA/2 cores (DI
    ports), full agg-core bipartite at 10 units, and ToRs with 20 unit-speed
    servers plus 2 ten-unit uplinks spread round-robin over the aggs.

    The fabric hosts at most DA*DI/4 ToRs; asking for more is rejected
    because the aggregation down-ports are exhausted.
    """
    if da <= 0 or di <= 0 or da % 2 or di % 2:
        raise GenerationError("invalid VL2 parameters: DA and DI must be positive and even")
    max_tors = da * di // 4
    if num_tors is None:
        num_tors = max_tors
    if num_tors < 0:
        raise GenerationError("invalid VL2 parameters: negative ToR count")
    if num_tors > max_tors:
        raise GenerationError(
            f"invalid VL2 parameters: {num_tors} ToRs exceed {max_tors} supported"
        )
    n_core = da // 2
    aggs = [SwitchSpec(i, (PortGroup(10.0, da),)) for i in range(di)]
    cores = [SwitchSpec(di + i, (PortGroup(10.0, di),)) for i in range(n_core)]
    tor_base = di + n_core
    tors = [
        SwitchSpec(tor_base + j, (PortGroup(1.0, 20), PortGroup(10.0, 2)))
        for j in range(num_tors)
    ]
    links = [Link(a.id, c.id, 10.0) for a in aggs for c in cores]
    for j in range(num_tors):
        links.append(Link(tor_base + j, (2 * j) % di, 10.0))
        links.append(Link(tor_base + j, (2 * j + 1) % di, 10.0))
    servers = []
    sid = 0
    for j in range(num_tors):
        for _ in range(20):
            servers.append(ServerAttachment(sid, tor_base + j, 1.0))
            sid += 1
    return Topology(
        switches=tuple(aggs + cores + tors), servers=tuple(servers), links=tuple(links)
    )


def gen_rewired_vl2(cfg: RewiredVl2Config, seed: int) -> Topology:
    """Same inventory as VL2(DA, DI) with the 10-unit fabric rewired: ToR
    uplinks spread over aggs and cores in proportion to their port counts
    (largest remainder), remaining fabric ports matched uniformly at random.
    An odd leftover stub is dropped from the lowest-id switch holding one.
    """
    da, di = cfg.da, cfg.di
    n_core = da // 2
    pool_ports = [da] * di + [di] * n_core
    uplinks = cfg.tor_uplinks * cfg.num_tors
    if uplinks > sum(pool_ports):
        raise GenerationError("infeasible: more ToR uplinks than fabric ports")

    quotas = largest_remainder(pool_ports, uplinks)
    if cfg.num_tors and max(quotas) > cfg.num_tors:
        raise GenerationError("infeasible: quota exceeds one uplink per ToR per switch")

    tor_base = di + n_core
    stubs_after = [p - q for p, q in zip(pool_ports, quotas)]
    tor_links: list[tuple[int, int]] = []
    if cfg.num_tors:
        if cfg.tor_uplinks != 2:
            raise GenerationError("infeasible: only 2 uplinks per ToR supported")
        rng_place = _rng(derive_seed(seed, _TAG_REWIRED, 0xA11))
        # Quota slots ordered fabric-port-scarce first, then the first half
        # folds onto the second: switches left with few fabric ports get
        # port-richer partners, which keeps their ToR demand from hiding
        # behind a thin random fabric. Each switch's slots are contiguous and
        # its quota is at most num_tors = len(slots)/2, so the fold can never
        # pair a switch with itself. Seeded variation enters through the
        # duplicate-spreading swaps below and the fabric matching.
        slots = [i for i, q in enumerate(quotas) for _ in range(q)]
        slots.sort(key=lambda i: (stubs_after[i], i))
        half = len(slots) // 2
        scarce, rich = slots[:half], np.array(slots[half:])
        pairs: list[tuple[int, int]] = []
        for _try in range(50):
            rng_place.shuffle(rich)
            pairs = [(scarce[i], int(rich[i])) for i in range(half)]
            if all(a != b for a, b in pairs):
                break
        else:
            # Sorted fold is always self-pair free (contiguous slots, quota
            # at most num_tors); use it when the shuffle keeps colliding.
            pairs = [(slots[i], slots[half + i]) for i in range(half)]
        if any(a == b for a, b in pairs):
            raise GenerationError("infeasible: cannot place distinct ToR uplinks")
        # Spread home pairs: two ToRs sharing both switches concentrate their
        # demand behind one pair's spare ports. Best effort.
        for _ in range(20 * cfg.num_tors + 100):
            seen: dict[tuple[int, int], int] = {}
            dup = []
            for j, (a, b) in enumerate(pairs):
                pk = _key(a, b)
                if pk in seen:
                    dup.append(j)
                else:
                    seen[pk] = j
            if not dup:
                break
            changed = False
            for j in dup:
                a, b = pairs[j]
                for _try in range(40):
                    k = int(rng_place.integers(len(pairs)))
                    if k == j:
                        continue
                    c, d = pairs[k]
                    if a == d or c == b or b == d or a == c:
                        continue
                    if _key(a, d) in seen or _key(c, b) in seen:
                        continue
                    pairs[j], pairs[k] = (a, d), (c, b)
                    changed = True
                    break
            if not changed:
                break
        order = rng_place.permutation(len(pairs))
        for j in range(cfg.num_tors):
            a, b = pairs[int(order[j])]
            tor_links.append((tor_base + j, a))
            tor_links.append((tor_base + j, b))

    stubs_per_switch = list(stubs_after)
    if sum(stubs_per_switch) % 2:
        for i, s in enumerate(stubs_per_switch):
            if s > 0:
                stubs_per_switch[i] -= 1
                break
    stubs = [v for v in range(len(pool_ports)) for _ in range(stubs_per_switch[v])]

    fabric = None
    for attempt in range(24):
        rng = _rng(derive_seed(seed, _TAG_REWIRED, attempt))
        fabric = _match_simple(rng, stubs)
        if fabric is None:
            continue
        groups = {"fabric": fabric}
        _repair_connectivity(
            rng,
            range(tor_base + cfg.num_tors),
            groups,
            {"fabric": cfg.uplink_speed},
            static_edges=tor_links,
        )
        fabric = groups["fabric"]
        break
    if fabric is None:
        raise GenerationError("generation failed: fabric matching did not converge")

    aggs = [SwitchSpec(i, (PortGroup(cfg.uplink_speed, da),)) for i in range(di)]
    cores = [SwitchSpec(di + i, (PortGroup(cfg.uplink_speed, di),)) for i in range(n_core)]
    tors = [
        SwitchSpec(
            tor_base + j,
            (
                PortGroup(cfg.server_speed, cfg.servers_per_tor),
                PortGroup(cfg.uplink_speed, cfg.tor_uplinks),
            ),
        )
        for j in range(cfg.num_tors)
    ]
    links = [Link(u, v, cfg.uplink_speed) for u, v in tor_links]
    links += [Link(u, v, cfg.uplink_speed) for u, v in fabric]
    servers = []
    sid = 0
    for j in range(cfg.num_tors):
        for _ in range(cfg.servers_per_tor):
            servers.append(ServerAttachment(sid, tor_base + j, cfg.server_speed))
            sid += 1
    return Topology(
        switches=tuple(aggs + cores + tors), servers=tuple(servers), links=tuple(links)
    )
