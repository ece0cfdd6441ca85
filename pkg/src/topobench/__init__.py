"""Topology-design workbench: build data-center topologies, measure their
exact max-concurrent-flow throughput, and compare against analytic bounds."""

from .bounds import (
    BoundReport,
    aspl_lower_bound,
    aspl_lower_bound_exact,
    drop_threshold,
    hetero_throughput_bound,
    homog_throughput_bound,
)
from .experiments import (
    ExperimentSpec,
    PRESETS,
    ResultRow,
    ResultTable,
    export,
    export_summary,
    parse_csv,
    run_experiment,
    vl2_compare,
)
from .flow import (
    BracketError,
    DecompositionReport,
    FlowError,
    FlowSolution,
    LPModel,
    decompose,
    formulate,
    max_supported_load,
    solve,
    two_cluster_classes,
    utilization_by_class,
    verify_solution,
)
from .generators import (
    GenerationError,
    LineSpeedOverlayConfig,
    RewiredVl2Config,
    TwoClassConfig,
    attach_uniform_servers,
    derive_seed,
    expected_cross_links,
    gen_linespeed_overlay,
    gen_random_from_ports,
    gen_rewired_vl2,
    gen_rrg,
    gen_two_cluster_biased,
    gen_vl2,
    largest_remainder,
    server_distribution_powerlaw,
    server_distribution_two_class,
)
from .topology import (
    Link,
    PortGroup,
    ServerAttachment,
    SwitchSpec,
    Topology,
    TopologyError,
    ValidationReport,
    aspl,
    cut_capacity,
    load_topology,
    save_topology,
    topology_from_json,
    topology_to_json,
    total_capacity,
    validate,
)
from .traffic import (
    TrafficError,
    TrafficMatrix,
    all_to_all,
    chunky,
    load_traffic,
    random_permutation,
    save_traffic,
    traffic_from_json,
    traffic_to_json,
)

__version__ = "0.1.0"
