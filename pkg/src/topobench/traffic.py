"""Traffic-matrix families over a topology's servers.

Demands are 1 unit per server (its NIC rate); throughput is reported per
unit demand. Permutation-style matrices never pair servers on the same
switch: such flows would use no network capacity and dilute the min-flow
measurement. Server-aggregated ("switch") matrices carry one commodity per
ordered switch pair with demand s_i * s_j.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .generators import _rng, derive_seed
from .topology import Topology


class TrafficError(ValueError):
    """No valid matrix exists for the requested pattern on this topology."""


@dataclass(frozen=True)
class TrafficMatrix:
    """Commodities (src, dst, demand); endpoints are server ids for
    aggregation="server" and switch ids for aggregation="switch"."""

    commodities: tuple[tuple[int, int, float], ...]
    aggregation: str = "server"

    def __post_init__(self) -> None:
        if self.aggregation not in ("server", "switch"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")

    @property
    def total_demand(self) -> float:
        return sum(d for _, _, d in self.commodities)


def _mismatch_permutation(rng: np.random.Generator, labels: list[int]) -> np.ndarray:
    """Random permutation p with labels[i] != labels[p[i]] for all i.

    Uniform shuffle plus random conflict swaps; feasible iff no label owns
    more than half the items.
    """
    n = len(labels)
    counts = Counter(labels)
    if n < 2 or 2 * max(counts.values()) > n:
        raise TrafficError("no valid permutation: one switch holds too many endpoints")
    lab = np.array(labels)
    perm = rng.permutation(n)
    for _ in range(200 * n + 500):
        bad = np.nonzero(lab == lab[perm])[0]
        if bad.size == 0:
            return perm
        for i in bad:
            j = int(rng.integers(n))
            if lab[i] != lab[perm[j]] and lab[j] != lab[perm[i]]:
                perm[i], perm[j] = perm[j], perm[i]
    raise TrafficError("no valid permutation: repair did not converge")


def random_permutation(t: Topology, seed: int) -> TrafficMatrix:
    """Each server sends to and receives from exactly one other server, on a
    different switch; demand 1 per commodity."""
    servers = sorted(t.servers, key=lambda s: s.server_id)
    if len(servers) < 2:
        raise TrafficError("no valid permutation: need at least 2 servers")
    switches = {s.switch_id for s in servers}
    if len(switches) < 2:
        raise TrafficError("no valid permutation: all servers on one switch")
    labels = [s.switch_id for s in servers]
    perm = _mismatch_permutation(_rng(seed), labels)
    commodities = tuple(
        (servers[i].server_id, servers[int(perm[i])].server_id, 1.0)
        for i in range(len(servers))
    )
    return TrafficMatrix(commodities=commodities, aggregation="server")


def all_to_all(t: Topology, aggregate: str = "server") -> TrafficMatrix:
    """Every server talks to every other server.

    aggregate="server": S(S-1) unit commodities, same-switch pairs included.
    aggregate="switch": one commodity per ordered switch pair (i, j), i != j,
    with demand s_i * s_j; the matrix then rides directly on the switch graph.
    """
    servers = sorted(t.servers, key=lambda s: s.server_id)
    if len(servers) < 2:
        raise TrafficError("need at least 2 servers")
    if aggregate == "server":
        ids = [s.server_id for s in servers]
        commodities = tuple(
            (a, b, 1.0) for a in ids for b in ids if a != b
        )
        return TrafficMatrix(commodities=commodities, aggregation="server")
    if aggregate == "switch":
        counts: Counter[int] = Counter(s.switch_id for s in servers)
        hosts = sorted(counts)
        commodities = tuple(
            (i, j, float(counts[i] * counts[j]))
            for i in hosts
            for j in hosts
            if i != j
        )
        return TrafficMatrix(commodities=commodities, aggregation="switch")
    raise ValueError(f"unknown aggregation {aggregate!r}")


def chunky(t: Topology, x_percent: float, seed: int) -> TrafficMatrix:
    """x% of the server-hosting switches (ToRs) form a ToR-level permutation;
    within a ToR pair A->B, the k-th server of A sends 1 unit to the k-th
    server of B. The remaining ToRs run a server-level permutation among
    themselves."""
    if not 0 < x_percent <= 100:
        raise TrafficError("x_percent must be in (0, 100]")
    by_switch: dict[int, list[int]] = {}
    for s in t.servers:
        by_switch.setdefault(s.switch_id, []).append(s.server_id)
    tors = sorted(by_switch)
    if len(tors) < 2:
        raise TrafficError("need servers on at least 2 switches")
    k = int(np.floor(x_percent / 100.0 * len(tors) + 0.5))
    if k == 1:
        raise TrafficError("no valid ToR permutation: chunky subset of size 1")
    rng = _rng(derive_seed(seed, 0xC))

    commodities: list[tuple[int, int, float]] = []
    chunky_tors: list[int] = []
    if k >= 2:
        picked = rng.choice(len(tors), size=k, replace=False)
        chunky_tors = sorted(tors[i] for i in picked)
        perm = _mismatch_permutation(rng, list(range(k)))
        for idx, tor in enumerate(chunky_tors):
            dst_tor = chunky_tors[int(perm[idx])]
            src_servers = sorted(by_switch[tor])
            dst_servers = sorted(by_switch[dst_tor])
            for a, b in zip(src_servers, dst_servers):
                commodities.append((a, b, 1.0))

    rest = [tor for tor in tors if tor not in set(chunky_tors)]
    rest_servers = [(sid, tor) for tor in rest for sid in sorted(by_switch[tor])]
    if rest_servers:
        if len(rest) < 2:
            raise TrafficError("no valid permutation: one residual switch")
        labels = [tor for _, tor in rest_servers]
        perm = _mismatch_permutation(rng, labels)
        for i, (sid, _) in enumerate(rest_servers):
            commodities.append((sid, rest_servers[int(perm[i])][0], 1.0))

    return TrafficMatrix(commodities=tuple(commodities), aggregation="server")


def _num(x: float) -> int | float:
    return int(x) if float(x).is_integer() else float(x)


def traffic_to_json(tm: TrafficMatrix, indent: int | None = 2) -> str:
    doc = {
        "aggregation": tm.aggregation,
        "commodities": [
            {"src": s, "dst": d, "demand": _num(dem)} for s, d, dem in tm.commodities
        ],
    }
    return json.dumps(doc, indent=indent)


def traffic_from_json(text: str) -> TrafficMatrix:
    doc = json.loads(text)
    return TrafficMatrix(
        commodities=tuple(
            (int(c["src"]), int(c["dst"]), float(c["demand"]))
            for c in doc["commodities"]
        ),
        aggregation=doc.get("aggregation", "server"),
    )


def save_traffic(tm: TrafficMatrix, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(traffic_to_json(tm))
        fh.write("\n")


def load_traffic(path: str) -> TrafficMatrix:
    with open(path) as fh:
        return traffic_from_json(fh.read())
