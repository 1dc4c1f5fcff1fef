"""Ring circulant network-on-chip toolkit.

Synthesizes circulant topologies and their mesh/torus baselines, routes
packets with table, clockwise, and adaptive strategies, and models the
memory and chip-resource cost of each approach.
"""

from .analysis import (
    DEFAULT_RESOURCE_MODEL,
    CapacityReport,
    ChipProfile,
    CycleReport,
    EfficiencyReport,
    MemoryReport,
    QuadraticCost,
    ResourceModel,
    adaptive_memory_bits,
    chip_capacity,
    clockwise_memory_bits,
    cycle_report,
    efficiency_k,
    max_cycle_count,
    memory_report,
    resource_usage,
    route_cycle_count,
    table_memory_bits,
)
from .errors import DisconnectedGraphError, LivelockError, ValidationError
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    FuzzConfig,
    FuzzReport,
    fuzz_termination,
    run_experiment,
    square_sizes,
)
from .routing import (
    ALGORITHMS,
    AS_PRINTED,
    CORRECTED,
    AdaptiveMode,
    HeadFlitAddress,
    RouteTrace,
    RouterConfig,
    RoutingTable,
    adaptive_step,
    arithmetic_min_hops,
    build_routing_table,
    candidate_hop_counts,
    clockwise_hop_count,
    clockwise_step,
    head_flit_address,
    payload_bits,
    port_for_step,
    step_cycles,
    step_for_port,
    table_next_hop,
    trace_route,
)
from .topology import (
    CirculantSpec,
    ComparisonRow,
    Graph,
    TopologyMetrics,
    bfs_distances,
    build_circulant,
    build_mesh,
    build_torus,
    circulant_distance_profile,
    compare_topologies,
    formula_optimal_circulant,
    graph_to_dot,
    graph_to_edge_csv,
    metrics,
    search_best_circulant2,
    search_best_ring_circulant,
)

__version__ = "0.1.0"
