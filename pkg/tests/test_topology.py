import json
import math

import numpy as np
import pytest

from oracles import mean_pairwise_distance, petersen_adjacency
from topobench.generators import gen_rrg
from topobench.topology import (
    Link,
    PortGroup,
    ServerAttachment,
    SwitchSpec,
    Topology,
    TopologyError,
    aspl,
    cut_capacity,
    topology_from_json,
    topology_to_json,
    total_capacity,
    validate,
)


def ring(n, ports=3, servers_per=1, cap=1.0):
    switches = tuple(SwitchSpec(i, (PortGroup(1.0, ports),)) for i in range(n))
    links = tuple(Link(i, (i + 1) % n, cap) for i in range(n))
    servers = tuple(
        ServerAttachment(i * servers_per + j, i, 1.0)
        for i in range(n)
        for j in range(servers_per)
    )
    return Topology(switches=switches, servers=servers, links=links)


def complete(n):
    switches = tuple(SwitchSpec(i, (PortGroup(1.0, n),)) for i in range(n))
    links = tuple(Link(i, j, 1.0) for i in range(n) for j in range(i + 1, n))
    servers = tuple(ServerAttachment(i, i, 1.0) for i in range(n))
    return Topology(switches=switches, servers=servers, links=links)


class TestValidate:
    def test_clean_ring(self):
        rep = validate(ring(4))
        assert rep.ok and rep.connected and rep.violations == ()

    def test_port_budget_exceeded(self):
        # 2 ports but 3 incident links
        switches = tuple(SwitchSpec(i, (PortGroup(1.0, 2 if i == 0 else 4),)) for i in range(4))
        links = (Link(0, 1), Link(0, 2), Link(0, 3))
        rep = validate(Topology(switches=switches, links=links))
        assert not rep.ok
        assert any("port budget exceeded" in v for v in rep.violations)

    def test_disconnected_is_ok_but_flagged(self):
        switches = tuple(SwitchSpec(i, (PortGroup(1.0, 2),)) for i in range(6))
        links = tuple(
            Link(a, b) for a, b in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
        )
        rep = validate(Topology(switches=switches, links=links))
        assert rep.ok
        assert not rep.connected

    def test_self_link_and_duplicate(self):
        switches = tuple(SwitchSpec(i, (PortGroup(1.0, 4),)) for i in range(2))
        rep = validate(Topology(switches=switches, links=(Link(0, 0),)))
        assert any("self-link" in v for v in rep.violations)
        rep = validate(Topology(switches=switches, links=(Link(0, 1), Link(1, 0))))
        assert any("duplicate link" in v for v in rep.violations)

    def test_parallel_links_of_distinct_speeds_allowed(self):
        switches = tuple(
            SwitchSpec(i, (PortGroup(1.0, 2), PortGroup(10.0, 2))) for i in range(2)
        )
        rep = validate(Topology(switches=switches, links=(Link(0, 1, 1.0), Link(0, 1, 10.0))))
        assert rep.ok

    def test_unknown_refs_and_bad_capacity(self):
        switches = (SwitchSpec(0, (PortGroup(1.0, 4),)),)
        rep = validate(
            Topology(
                switches=switches,
                servers=(ServerAttachment(0, 7), ServerAttachment(1, 0, -1.0)),
                links=(Link(0, 9), Link(0, 0, 0.0)),
            )
        )
        msgs = " ".join(rep.violations)
        assert "unknown switch" in msgs
        assert "unknown endpoint" in msgs
        assert "non-positive" in msgs


class TestCapacities:
    def test_ring_total(self):
        assert total_capacity(ring(4)) == 8.0

    def test_regular_total(self):
        topo = gen_rrg(40, 13, seed=7)
        assert total_capacity(topo) == 40 * 13

    def test_direction_counted(self):
        switches = tuple(SwitchSpec(i, (PortGroup(10.0, 1),)) for i in range(2))
        t = Topology(switches=switches, links=(Link(0, 1, 10.0),))
        assert total_capacity(t) == 20.0

    def test_cut_alternating_vs_paired(self):
        t = ring(4)
        assert cut_capacity(t, {0: 0, 1: 1, 2: 0, 3: 1}) == 8.0
        assert cut_capacity(t, {0: 0, 1: 0, 2: 1, 3: 1}) == 4.0
        assert cut_capacity(t, {i: 0 for i in range(4)}) == 0.0

    def test_cut_missing_label(self):
        with pytest.raises(TopologyError, match="missing cluster label"):
            cut_capacity(ring(4), {0: 0, 1: 1})
        with pytest.raises(TopologyError, match="missing cluster label"):
            cut_capacity(ring(4))

    def test_cut_identity_and_bound(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(4, 12))
            r = int(rng.integers(2, 4))
            if n * r % 2:
                n += 1
            topo = gen_rrg(n, r, int(rng.integers(2**32)))
            labels = {v: int(rng.integers(2)) for v in topo.switch_ids()}
            cut = cut_capacity(topo, labels)
            intra = sum(
                l.capacity for l in topo.links if labels[l.a] == labels[l.b]
            )
            assert cut + 2 * intra == pytest.approx(total_capacity(topo))
            assert cut <= total_capacity(topo)

    def test_total_invariant_under_relabeling(self):
        topo = gen_rrg(10, 3, seed=2)
        mapping = {v: 9 - v for v in range(10)}
        relabeled = Topology(
            switches=tuple(SwitchSpec(mapping[s.id], s.ports) for s in topo.switches),
            links=tuple(Link(mapping[l.a], mapping[l.b], l.capacity) for l in topo.links),
        )
        assert total_capacity(relabeled) == total_capacity(topo)


class TestAspl:
    def test_ring4(self):
        assert aspl(ring(4)) == pytest.approx(4 / 3)

    def test_complete(self):
        assert aspl(complete(5)) == 1.0

    def test_petersen_matches_bfs_oracle(self):
        adj = petersen_adjacency()
        switches = tuple(SwitchSpec(v, (PortGroup(1.0, 3),)) for v in range(10))
        links = []
        seen = set()
        for u in adj:
            for v in adj[u]:
                if (min(u, v), max(u, v)) not in seen:
                    seen.add((min(u, v), max(u, v)))
                    links.append(Link(u, v))
        topo = Topology(switches=switches, links=tuple(links))
        assert aspl(topo) == pytest.approx(5 / 3)
        assert aspl(topo) == pytest.approx(mean_pairwise_distance(adj))

    def test_pair_selection_and_same_switch(self):
        t = ring(4)
        assert aspl(t, [(0, 1), (0, 2)]) == pytest.approx(1.5)
        assert aspl(t, [(2, 2)]) == 0.0
        assert aspl(t, []) == 0.0

    def test_unreachable_pair(self):
        switches = tuple(SwitchSpec(i, (PortGroup(1.0, 2),)) for i in range(4))
        links = (Link(0, 1), Link(2, 3))
        t = Topology(switches=switches, links=links)
        with pytest.raises(TopologyError, match="unreachable pair"):
            aspl(t)
        with pytest.raises(TopologyError, match="unreachable pair"):
            aspl(t, [(0, 3)])


class TestJson:
    def test_round_trip_value_equality(self):
        topo = ring(5, cap=10.0)
        topo = Topology(
            switches=topo.switches,
            servers=topo.servers,
            links=topo.links,
            cluster_of={0: 0, 1: 0, 2: 1, 3: 1, 4: 1},
        )
        again = topology_from_json(topology_to_json(topo))
        assert again == topo

    def test_integer_capacities_round_trip_bit_exact(self):
        topo = ring(4, cap=10.0)
        text1 = topology_to_json(topo)
        text2 = topology_to_json(topology_from_json(text1))
        assert text1 == text2
        assert '"capacity": 10' in text1  # integers stay integers

    def test_field_names(self):
        doc = json.loads(topology_to_json(ring(3)))
        assert set(doc) == {"switches", "servers", "links"}
        assert set(doc["switches"][0]) == {"id", "ports"}
        assert set(doc["switches"][0]["ports"][0]) == {"speed", "count"}
        assert set(doc["servers"][0]) == {"id", "switch", "speed"}
        assert set(doc["links"][0]) == {"a", "b", "capacity"}

    def test_infinite_access_round_trips(self):
        t = Topology(
            switches=(SwitchSpec(0, (PortGroup(1.0, 2),)), SwitchSpec(1, (PortGroup(1.0, 2),))),
            servers=(ServerAttachment(0, 0, math.inf),),
            links=(Link(0, 1),),
        )
        again = topology_from_json(topology_to_json(t))
        assert math.isinf(again.servers[0].access_capacity)
