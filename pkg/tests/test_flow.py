import math

import numpy as np
import pytest

from oracles import all_paths_throughput, random_small_instance
from topobench.flow import (
    BracketError,
    FlowError,
    decompose,
    demand_weighted_distance,
    formulate,
    max_supported_load,
    solve,
    two_cluster_classes,
    utilization_by_class,
    verify_solution,
)
from topobench.generators import (
    GenerationError,
    attach_uniform_servers,
    gen_rrg,
    gen_vl2,
)
from topobench.topology import (
    Link,
    PortGroup,
    ServerAttachment,
    SwitchSpec,
    Topology,
)
from topobench.traffic import TrafficMatrix, all_to_all, random_permutation


def cycle4(access=1.0):
    switches = tuple(SwitchSpec(i, (PortGroup(1.0, 3),)) for i in range(4))
    links = tuple(Link(i, (i + 1) % 4) for i in range(4))
    servers = tuple(ServerAttachment(i, i, access) for i in range(4))
    return Topology(switches=switches, servers=servers, links=links)


def cyclic_tm():
    return TrafficMatrix(commodities=tuple((i, (i + 1) % 4, 1.0) for i in range(4)))


class TestFormulate:
    def test_variable_count(self):
        model = formulate(cycle4(), cyclic_tm())
        # 8 switch arcs + 8 access arcs per commodity, plus t
        assert len(model.arcs) == 16
        assert model.n_variables == 4 * 16 + 1

    def test_empty_tm(self):
        with pytest.raises(FlowError, match="no commodities"):
            formulate(cycle4(), TrafficMatrix(commodities=()))

    def test_disconnected_commodity(self):
        switches = tuple(SwitchSpec(i, (PortGroup(1.0, 3),)) for i in range(4))
        links = (Link(0, 1), Link(2, 3))
        servers = tuple(ServerAttachment(i, i) for i in range(4))
        topo = Topology(switches=switches, servers=servers, links=links)
        tm = TrafficMatrix(commodities=((0, 2, 1.0),))
        with pytest.raises(FlowError, match="infeasible commodity"):
            formulate(topo, tm)
        # pairs within one component are fine
        formulate(topo, TrafficMatrix(commodities=((0, 1, 1.0),)))

    def test_switch_level_commodity_count(self):
        topo = attach_uniform_servers(gen_rrg(40, 13, 1), 5)
        tm = all_to_all(topo, aggregate="switch")
        assert len(tm.commodities) == 40 * 39
        model = formulate(topo, tm)
        assert len(model.arcs) == 2 * 260  # switch arcs only


class TestSolve:
    def test_cycle_with_unit_access(self):
        for backend in ("highs", "simplex"):
            sol = solve(formulate(cycle4(), cyclic_tm()), backend=backend)
            assert sol.throughput == pytest.approx(1.0, rel=1e-9)
            assert sol.solver_status == "optimal"
            checks = verify_solution(sol.model, sol)
            assert checks["capacity_violation"] <= 1e-9
            assert checks["conservation_residual"] <= 1e-9

    def test_cycle_uncapped_access(self):
        sol = solve(formulate(cycle4(access=math.inf), cyclic_tm()))
        assert sol.throughput == pytest.approx(4 / 3, rel=1e-9)

    def test_complete_graph_permutation(self):
        topo = attach_uniform_servers(gen_rrg(6, 5, 1), 1)
        tm = random_permutation(topo, 2)
        assert solve(formulate(topo, tm)).throughput == pytest.approx(1.0)

    def test_shared_link_half(self):
        switches = (SwitchSpec(0, (PortGroup(1.0, 3),)), SwitchSpec(1, (PortGroup(1.0, 3),)))
        servers = (
            ServerAttachment(0, 0), ServerAttachment(1, 0),
            ServerAttachment(2, 1), ServerAttachment(3, 1),
        )
        topo = Topology(switches=switches, servers=servers, links=(Link(0, 1),))
        tm = TrafficMatrix(commodities=((0, 2, 1.0), (1, 3, 1.0)))
        for backend in ("highs", "simplex"):
            assert solve(formulate(topo, tm), backend=backend).throughput == pytest.approx(0.5)

    def test_delivered_equals_t_times_demand(self):
        topo = attach_uniform_servers(gen_rrg(8, 3, 3), 2)
        tm = random_permutation(topo, 4)
        sol = solve(formulate(topo, tm))
        demands = np.array([d for _, _, d in tm.commodities])
        assert np.allclose(sol.commodity_delivered, sol.throughput * demands)

    def test_capacity_scaling_doubles_throughput(self):
        topo = attach_uniform_servers(gen_rrg(10, 3, 5), 2)
        tm = random_permutation(topo, 6)
        t1 = solve(formulate(topo, tm)).throughput
        doubled = Topology(
            switches=topo.switches,
            servers=tuple(
                ServerAttachment(s.server_id, s.switch_id, 2 * s.access_capacity)
                for s in topo.servers
            ),
            links=tuple(Link(l.a, l.b, 2 * l.capacity) for l in topo.links),
        )
        t2 = solve(formulate(doubled, tm)).throughput
        assert t2 == pytest.approx(2 * t1, rel=1e-6)

    def test_relabeling_invariance(self):
        topo = attach_uniform_servers(gen_rrg(8, 3, 9), 1)
        tm = random_permutation(topo, 3)
        t1 = solve(formulate(topo, tm)).throughput
        perm = {v: 7 - v for v in range(8)}
        relabeled = Topology(
            switches=tuple(
                SwitchSpec(perm[s.id], s.ports)
                for s in sorted(topo.switches, key=lambda s: perm[s.id])
            ),
            servers=tuple(
                ServerAttachment(s.server_id, perm[s.switch_id], s.access_capacity)
                for s in topo.servers
            ),
            links=tuple(Link(perm[l.a], perm[l.b], l.capacity) for l in topo.links),
        )
        assert solve(formulate(relabeled, tm)).throughput == pytest.approx(t1, rel=1e-6)

    def test_reversal_invariance(self):
        topo = attach_uniform_servers(gen_rrg(8, 3, 11), 1)
        tm = random_permutation(topo, 5)
        rev = TrafficMatrix(
            commodities=tuple((d, s, dem) for s, d, dem in tm.commodities)
        )
        t1 = solve(formulate(topo, tm)).throughput
        assert solve(formulate(topo, rev)).throughput == pytest.approx(t1, rel=1e-6)

    def test_same_switch_only_commodities(self):
        switches = (SwitchSpec(0, (PortGroup(1.0, 4),)), SwitchSpec(1, (PortGroup(1.0, 4),)))
        servers = (ServerAttachment(0, 0), ServerAttachment(1, 0))
        topo = Topology(switches=switches, servers=servers, links=(Link(0, 1),))
        tm = TrafficMatrix(commodities=((0, 1, 1.0), (1, 0, 1.0)))
        sol = solve(formulate(topo, tm))
        assert sol.throughput == pytest.approx(1.0)
        assert sol.arc_flows.sum() == 0.0


class TestOracleAgreement:
    @pytest.mark.parametrize("trial", range(12))
    def test_edge_lp_matches_path_lp(self, trial):
        rng = np.random.default_rng(4242 + trial)
        topo, tm = random_small_instance(rng)
        t_edge = solve(formulate(topo, tm)).throughput
        t_path = all_paths_throughput(topo, tm)
        assert t_edge == pytest.approx(t_path, rel=1e-6, abs=1e-9)

    def test_backends_agree(self):
        rng = np.random.default_rng(31)
        for _ in range(6):
            topo, tm = random_small_instance(rng)
            model = formulate(topo, tm)
            t_h = solve(model, backend="highs").throughput
            t_s = solve(model, backend="simplex").throughput
            assert t_h == pytest.approx(t_s, rel=1e-7, abs=1e-9)


class TestDecompose:
    def test_cycle_reference_values(self):
        topo, tm = cycle4(), cyclic_tm()
        sol = solve(formulate(topo, tm))
        dec = decompose(topo, tm, sol)
        assert dec.C == 8.0
        assert dec.U == pytest.approx(0.5)
        assert dec.D_flows == pytest.approx(1.0)
        assert dec.AS == pytest.approx(1.0)
        assert dec.throughput * dec.f_effective == pytest.approx(dec.C * dec.U)

    def test_stretch_one_on_forced_shortest_paths(self):
        # Two switches, single link: every flow takes the one-hop path.
        switches = (SwitchSpec(0, (PortGroup(1.0, 4),)), SwitchSpec(1, (PortGroup(1.0, 4),)))
        servers = (ServerAttachment(0, 0), ServerAttachment(1, 1))
        topo = Topology(switches=switches, servers=servers, links=(Link(0, 1),))
        tm = TrafficMatrix(commodities=((0, 1, 1.0), (1, 0, 1.0)))
        dec = decompose(topo, tm, solve(formulate(topo, tm)))
        assert dec.AS == pytest.approx(1.0)

    def test_identity_residual_random_instances(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(4, 20))
            r = int(rng.integers(2, 5))
            if n * r % 2:
                n += 1
            if r >= n:
                continue
            topo = attach_uniform_servers(gen_rrg(n, r, int(rng.integers(2**32))), 2)
            tm = random_permutation(topo, int(rng.integers(2**32)))
            dec = decompose(topo, tm, solve(formulate(topo, tm)))
            assert dec.identity_residual <= 1e-6

    def test_degenerate_rejected(self):
        topo, tm = cycle4(), cyclic_tm()
        sol = solve(formulate(topo, tm))
        zero = type(sol)(
            throughput=0.0, solver_status="optimal",
            arc_flows=sol.arc_flows * 0, commodity_delivered=sol.commodity_delivered * 0,
            model=sol.model,
        )
        with pytest.raises(FlowError, match="degenerate decomposition"):
            decompose(topo, tm, zero)


class TestUtilization:
    def test_single_class_matches_overall(self):
        topo, tm = cycle4(), cyclic_tm()
        sol = solve(formulate(topo, tm))
        util = utilization_by_class(topo, sol)
        assert set(util) == {"all"}
        assert util["all"] == pytest.approx(decompose(topo, tm, sol).U)

    def test_zero_flow(self):
        topo, tm = cycle4(), cyclic_tm()
        sol = solve(formulate(topo, tm))
        zero = type(sol)(
            throughput=1.0, solver_status="optimal",
            arc_flows=sol.arc_flows * 0, commodity_delivered=sol.commodity_delivered,
            model=sol.model,
        )
        assert utilization_by_class(topo, zero) == {"all": 0.0}

    def test_cluster_classes(self):
        labels = {0: 0, 1: 0, 2: 1, 3: 1}
        topo = cycle4()
        topo = Topology(switches=topo.switches, servers=topo.servers,
                        links=topo.links + (Link(0, 1, 10.0),), cluster_of=labels)
        fn = two_cluster_classes(topo)
        assert fn(Link(0, 1, 1.0)) == "large-large"
        assert fn(Link(1, 2, 1.0)) == "large-small"
        assert fn(Link(2, 3, 1.0)) == "small-small"
        assert fn(Link(0, 1, 10.0)) == "high-speed"


class TestDistances:
    def test_demand_weighted_distance(self):
        topo = cycle4()
        tm = TrafficMatrix(commodities=((0, 2, 2.0), (0, 1, 1.0)))
        # distances: 2 hops weighted 2, 1 hop weighted 1 -> 5/3
        assert demand_weighted_distance(topo, tm) == pytest.approx(5 / 3)


class TestMaxSupportedLoad:
    @staticmethod
    def vl2_builder(load, seed):
        topo = gen_vl2(4, 4, num_tors=load)
        return topo, random_permutation(topo, seed)

    def test_vl2_supports_exactly_four(self):
        got = max_supported_load(self.vl2_builder, runs=3, eps=1e-4,
                                 search_range=(2, 8))
        assert got == 4

    def test_degenerate_range(self):
        assert max_supported_load(self.vl2_builder, runs=2, eps=1e-4,
                                  search_range=(4, 4)) == 4
        with pytest.raises(BracketError):
            max_supported_load(self.vl2_builder, runs=2, eps=1e-4,
                               search_range=(5, 5))

    def test_bracket_errors(self):
        with pytest.raises(BracketError, match="not supported"):
            max_supported_load(self.vl2_builder, runs=2, eps=1e-4,
                               search_range=(5, 8))
        with pytest.raises(BracketError, match="still supported"):
            max_supported_load(self.vl2_builder, runs=2, eps=1e-4,
                               search_range=(2, 4))

    def test_builder_error_counts_as_unsupported(self):
        def builder(load, seed):
            if load > 3:
                raise GenerationError("nope")
            return self.vl2_builder(load, seed)

        assert max_supported_load(builder, runs=2, eps=1e-4,
                                  search_range=(2, 8)) == 3


class TestExport:
    def test_names_and_structure(self):
        model = formulate(cycle4(), cyclic_tm())
        text = model.export_lp()
        assert text.startswith("\\ concurrent-flow model")
        assert "Maximize\n obj: t\n" in text
        assert " cap_e0: " in text
        assert "f_c3_e15" in text
        assert text.rstrip().endswith("End")
        # source row carries the demand-scaled t term
        assert "- 1 t = 0" in text

    def test_deterministic(self):
        m1 = formulate(cycle4(), cyclic_tm())
        m2 = formulate(cycle4(), cyclic_tm())
        assert m1.export_lp() == m2.export_lp()

    def test_writes_file(self, tmp_path):
        path = tmp_path / "model.lp"
        formulate(cycle4(), cyclic_tm()).export_lp(str(path))
        assert path.read_text().startswith("\\ concurrent-flow model")

    def test_switch_level_injection_rows(self):
        topo = attach_uniform_servers(gen_rrg(4, 2, 1), 1)
        tm = all_to_all(topo, aggregate="switch")
        text = formulate(topo, tm).export_lp()
        assert "- 1 t = 0" in text or "- 1 t " in text
