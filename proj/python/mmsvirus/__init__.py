"""MMS virus spread on synthetic call graphs."""

from ._core import (
    CallGraph,
    GraphError,
    ScenarioError,
    SimulationError,
    analytic_si_curve,
    assign_os,
    builtin_scenario_json,
    builtin_scenarios,
    components,
    delta_v,
    generate_graph,
    giant_fraction_curve,
    neighborhood,
    per_step_attack_probability,
    read_graph,
    run_naive,
    run_scenarios,
    run_temporal,
    scan_augmentation_curve,
    susceptible_components,
    volume_profile,
    write_graph,
)

UNLIMITED = None

__all__ = [name for name in dir() if not name.startswith("_")]
