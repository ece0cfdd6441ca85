"""Switch-level topology model: validation, capacity accounting, cuts, and
shortest-path metrics.

Capacities are dimensionless; by convention 1 unit = the base line-speed
(1 Gbps in the VL2-style presets). Distances are unweighted hop counts on
the switch graph, so a 10x link is still one hop, and server access links
never contribute hops. Capacity totals (C, C-bar) count switch-switch links
only, each direction separately; access links act purely as constraints.

All values are immutable after construction and safe to share between
threads; every function here is pure.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class TopologyError(ValueError):
    """Structurally invalid input: bad labels, unknown ids, unreachable pairs."""


@dataclass(frozen=True)
class PortGroup:
    """A group of same-speed ports on one switch."""

    speed: float
    count: int


@dataclass(frozen=True)
class SwitchSpec:
    """A switch with one or more port groups of distinct line-speeds."""

    id: int
    ports: tuple[PortGroup, ...]

    def port_count(self, speed: float) -> int:
        for group in self.ports:
            if group.speed == speed:
                return group.count
        return 0

    @property
    def total_ports(self) -> int:
        return sum(group.count for group in self.ports)


@dataclass(frozen=True)
class ServerAttachment:
    """A server on a switch, with a per-direction access capacity (NIC rate)."""

    server_id: int
    switch_id: int
    access_capacity: float = 1.0


@dataclass(frozen=True)
class Link:
    """An undirected switch-switch link carrying `capacity` per direction."""

    a: int
    b: int
    capacity: float = 1.0

    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a <= self.b else (self.b, self.a)


@dataclass(frozen=True, eq=True)
class Topology:
    switches: tuple[SwitchSpec, ...]
    servers: tuple[ServerAttachment, ...] = ()
    links: tuple[Link, ...] = ()
    cluster_of: Mapping[int, int] | None = None

    def switch_ids(self) -> list[int]:
        return [s.id for s in self.switches]

    def switch_by_id(self) -> dict[int, SwitchSpec]:
        return {s.id: s for s in self.switches}

    def servers_by_switch(self) -> dict[int, list[ServerAttachment]]:
        out: dict[int, list[ServerAttachment]] = {s.id: [] for s in self.switches}
        for srv in self.servers:
            out.setdefault(srv.switch_id, []).append(srv)
        return out

    def server_by_id(self) -> dict[int, ServerAttachment]:
        return {srv.server_id: srv for srv in self.servers}

    def adjacency(self) -> dict[int, list[int]]:
        """Neighbor lists over the switch graph (parallel classes merged)."""
        neigh: dict[int, set[int]] = {s.id: set() for s in self.switches}
        for link in self.links:
            neigh[link.a].add(link.b)
            neigh[link.b].add(link.a)
        return {v: sorted(ns) for v, ns in neigh.items()}

    def switch_degrees(self) -> dict[int, int]:
        """Link endpoints per switch, counting parallel classes separately."""
        deg = {s.id: 0 for s in self.switches}
        for link in self.links:
            deg[link.a] += 1
            deg[link.b] += 1
        return deg


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]
    connected: bool


def bfs_hops(adj: Mapping[int, Sequence[int]], source: int) -> dict[int, int]:
    """Hop counts from `source` to every reachable node of an adjacency map."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def is_connected(t: Topology) -> bool:
    ids = t.switch_ids()
    if len(ids) <= 1:
        return True
    return len(bfs_hops(t.adjacency(), ids[0])) == len(ids)


def validate(t: Topology) -> ValidationReport:
    """Check every structural invariant; problems are reported, never raised.

    Connectivity is computed over the switch graph ignoring capacities and is
    reported separately: a disconnected but otherwise clean topology is `ok`.
    """
    violations: list[str] = []

    seen_switch: set[int] = set()
    for sw in t.switches:
        if sw.id in seen_switch:
            violations.append(f"duplicate switch id {sw.id}")
        seen_switch.add(sw.id)
        speeds = [g.speed for g in sw.ports]
        if len(set(speeds)) != len(speeds):
            violations.append(f"switch {sw.id}: repeated port speed")
        for g in sw.ports:
            if g.count < 1:
                violations.append(f"switch {sw.id}: port count {g.count} < 1")
            if g.speed <= 0:
                violations.append(f"switch {sw.id}: non-positive port speed")

    seen_server: set[int] = set()
    for srv in t.servers:
        if srv.server_id in seen_server:
            violations.append(f"duplicate server id {srv.server_id}")
        seen_server.add(srv.server_id)
        if srv.switch_id not in seen_switch:
            violations.append(f"server {srv.server_id}: unknown switch {srv.switch_id}")
        if srv.access_capacity <= 0:
            violations.append(f"server {srv.server_id}: non-positive access capacity")

    pair_class: Counter[tuple[int, int, float]] = Counter()
    for link in t.links:
        if link.a == link.b:
            violations.append(f"self-link at switch {link.a}")
        if link.a not in seen_switch or link.b not in seen_switch:
            violations.append(f"link ({link.a},{link.b}): unknown endpoint")
        if link.capacity <= 0:
            violations.append(f"link ({link.a},{link.b}): non-positive capacity")
        pair_class[(*link.key(), link.capacity)] += 1
    for (a, b, cap), n in sorted(pair_class.items()):
        if n > 1:
            violations.append(f"duplicate link ({a},{b}) at speed {cap:g}")

    # Port budget: a server consumes one port of its access-speed class, a
    # link consumes one port of its capacity class at each endpoint.
    by_id = t.switch_by_id()
    used: dict[int, Counter[float]] = {sid: Counter() for sid in seen_switch}
    for srv in t.servers:
        if srv.switch_id in used:
            used[srv.switch_id][srv.access_capacity] += 1
    for link in t.links:
        for end in (link.a, link.b):
            if end in used:
                used[end][link.capacity] += 1
    for sid in sorted(used):
        for speed in sorted(used[sid]):
            have = by_id[sid].port_count(speed)
            need = used[sid][speed]
            if have == 0:
                violations.append(f"switch {sid}: no port of speed {speed:g}")
            elif need > have:
                violations.append(
                    f"switch {sid}: port budget exceeded at speed {speed:g} "
                    f"({need} > {have})"
                )

    return ValidationReport(
        ok=not violations,
        violations=tuple(violations),
        connected=is_connected(t),
    )


def total_capacity(t: Topology) -> float:
    """Total network capacity C: switch-switch links, each direction counted."""
    return 2.0 * sum(link.capacity for link in t.links)


def cut_capacity(t: Topology, clusters: Mapping[int, int] | None = None) -> float:
    """Directed capacity C-bar of links crossing the 0/1 cluster partition."""
    labels = clusters if clusters is not None else t.cluster_of
    if labels is None:
        raise TopologyError("missing cluster label: no clusters given")
    for sid in t.switch_ids():
        if sid not in labels:
            raise TopologyError(f"missing cluster label for switch {sid}")
    return 2.0 * sum(
        link.capacity for link in t.links if labels[link.a] != labels[link.b]
    )


def aspl(t: Topology, pairs: Iterable[tuple[int, int]] | None = None) -> float:
    """Mean hop count over switch pairs: all unordered pairs by default, or an
    explicit (multi)set of pairs, e.g. the host-switch pairs of a traffic
    matrix. Same-switch pairs contribute distance 0; an empty selection is 0.
    """
    adj = t.adjacency()
    if pairs is None:
        ids = t.switch_ids()
        if len(ids) < 2:
            return 0.0
        total = 0
        count = 0
        for i, src in enumerate(ids):
            dist = bfs_hops(adj, src)
            for dst in ids[i + 1 :]:
                if dst not in dist:
                    raise TopologyError(f"unreachable pair ({src},{dst})")
                total += dist[dst]
                count += 1
        return total / count

    pair_list = list(pairs)
    if not pair_list:
        return 0.0
    dist_cache: dict[int, dict[int, int]] = {}
    total = 0
    for src, dst in pair_list:
        if src == dst:
            continue
        if src not in dist_cache:
            if src not in adj:
                raise TopologyError(f"unknown switch {src}")
            dist_cache[src] = bfs_hops(adj, src)
        d = dist_cache[src].get(dst)
        if d is None:
            raise TopologyError(f"unreachable pair ({src},{dst})")
        total += d
    return total / len(pair_list)


def _num(x: float) -> int | float:
    if isinstance(x, int):
        return x
    if float(x).is_integer():
        return int(x)
    return float(x)


def topology_to_json(t: Topology, indent: int | None = 2) -> str:
    """Serialize to the interchange JSON layout (round-trips exactly for
    integer-valued capacities)."""
    doc: dict = {
        "switches": [
            {
                "id": sw.id,
                "ports": [{"speed": _num(g.speed), "count": g.count} for g in sw.ports],
            }
            for sw in t.switches
        ],
        "servers": [
            {"id": srv.server_id, "switch": srv.switch_id, "speed": _num(srv.access_capacity)}
            for srv in t.servers
        ],
        "links": [
            {"a": link.a, "b": link.b, "capacity": _num(link.capacity)} for link in t.links
        ],
    }
    if t.cluster_of is not None:
        doc["clusters"] = {str(k): int(v) for k, v in sorted(t.cluster_of.items())}
    return json.dumps(doc, indent=indent)


def topology_from_json(text: str) -> Topology:
    doc = json.loads(text)
    switches = tuple(
        SwitchSpec(
            id=int(sw["id"]),
            ports=tuple(PortGroup(float(g["speed"]), int(g["count"])) for g in sw["ports"]),
        )
        for sw in doc["switches"]
    )
    servers = tuple(
        ServerAttachment(int(s["id"]), int(s["switch"]), float(s["speed"]))
        for s in doc.get("servers", [])
    )
    links = tuple(
        Link(int(l["a"]), int(l["b"]), float(l["capacity"])) for l in doc.get("links", [])
    )
    clusters = doc.get("clusters")
    cluster_of = {int(k): int(v) for k, v in clusters.items()} if clusters is not None else None
    return Topology(switches=switches, servers=servers, links=links, cluster_of=cluster_of)


def save_topology(t: Topology, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(topology_to_json(t))
        fh.write("\n")


def load_topology(path: str) -> Topology:
    with open(path) as fh:
        return topology_from_json(fh.read())
