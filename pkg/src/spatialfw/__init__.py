"""Monte Carlo toolkit for malware quarantine by spatial firewalls.

Devices are dropped on a wrap-around square by a Poisson point process and
linked when within communication range. A chosen fraction of devices become
firewalls, each clearing a circular secured zone; the remaining susceptible
subgraph is tested for percolation (torus-winding clusters) and can host
exact stochastic SIR outbreak simulations.
"""
from ._version import __version__
from .epidemic import (
    EpidemicParams,
    EpidemicTrace,
    MeanFieldTrajectory,
    simulate_sir,
    solve_mean_field_sir,
    trace_summary,
    write_trace_csv,
    write_trace_summary_json,
)
from .firewalls import (
    POLICY_KINDS,
    FirewallPolicy,
    QuarantineLayout,
    apply_secured_zones,
    select_firewalls,
)
from .graph import (
    INACTIVE,
    AdjacencyGraph,
    ClusterReport,
    build_rgg,
    connected_components,
    dump_edges,
)
from .harness import (
    CriticalEstimate,
    ExperimentConfig,
    LayoutSummary,
    SweepResult,
    SweepRow,
    default_config,
    default_policies,
    emit_results,
    estimate_critical_percentage,
    load_config,
    run_single,
    run_sweep,
)
from .percolation import (
    SPANNING_RULES,
    PercolationOutcome,
    cluster_stats,
    detect_spanning,
)
from .seeds import derive_seed, splitmix64
from .torus import DeviceSet, TorusRegion, sample_ppp, torus_displacement, torus_distance

__all__ = [
    "__version__",
    "AdjacencyGraph",
    "ClusterReport",
    "CriticalEstimate",
    "DeviceSet",
    "EpidemicParams",
    "EpidemicTrace",
    "ExperimentConfig",
    "FirewallPolicy",
    "INACTIVE",
    "LayoutSummary",
    "MeanFieldTrajectory",
    "POLICY_KINDS",
    "PercolationOutcome",
    "QuarantineLayout",
    "SPANNING_RULES",
    "SweepResult",
    "SweepRow",
    "TorusRegion",
    "apply_secured_zones",
    "build_rgg",
    "cluster_stats",
    "connected_components",
    "default_config",
    "default_policies",
    "derive_seed",
    "detect_spanning",
    "dump_edges",
    "emit_results",
    "estimate_critical_percentage",
    "load_config",
    "run_single",
    "run_sweep",
    "sample_ppp",
    "select_firewalls",
    "simulate_sir",
    "solve_mean_field_sir",
    "splitmix64",
    "torus_displacement",
    "torus_distance",
    "trace_summary",
    "write_trace_csv",
    "write_trace_summary_json",
]
