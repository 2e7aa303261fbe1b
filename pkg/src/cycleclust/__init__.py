"""Exact analysis of a piecewise-affine model of clustered cell-cycle
dynamics with positive feedback.

k clusters move on the unit circle; clusters inside the feedback window
[r, 1) run faster by the fraction of clusters currently inside the
signalling window [0, s).  The package computes the Poincare return map
of this flow two ways, as an exact closed form on 14 affine cells
(k = 3) and by event-driven simulation (any k), and analyzes fixed
points, periodic orbits, parameter regions, and transition structure in
exact rational arithmetic.
"""

from __future__ import annotations

from .flow import (
    EventRecord,
    EventTrace,
    FlowState,
    HorizonTooLarge,
    advance_to_next_event,
    flow_state,
    map_F_simulated,
    return_map_simulated,
    return_map_times,
    simulate_flow,
    write_trace_jsonl,
)
from .model import (
    ModelError,
    OrderingViolation,
    OutOfRange,
    Parameters,
    SimplexPoint,
    SubcaseViolation,
    WedgeViolation,
    circular_distance,
    frac,
    mod1,
    point3,
    signal_fraction,
    validate_simplex,
    velocity,
)
from .orbits import (
    CatalogResult,
    EmptyFamily,
    InclusionViolation,
    Indeterminate,
    NeutralTriangle,
    NoOrbit,
    NoTriangle,
    OrbitRecord,
    OutsideStudiedWedge,
    ParamRegion,
    TRANSITION_TARGETS,
    bifurcation_boundaries,
    catalog,
    catalog_json,
    classify_parameters,
    classify_stability,
    classify_stability_from_moduli,
    corrected_transition_targets,
    cycle_record_from_points,
    eigenvalue_pair,
    neutral_triangle,
    observed_transitions,
    solve_code,
    transition_graph,
    verify_cycle,
)
from .pieces import (
    AffinePiece,
    Ineq,
    PIECE_ORDER,
    Unclassifiable,
    apply_F,
    build_pieces,
    classify_region,
    classify_xy,
    partition_json,
    region_polygon,
    sample_region,
    vertex_images,
)

__version__ = "0.1.0"

__all__ = [
    "AffinePiece",
    "CatalogResult",
    "EmptyFamily",
    "EventRecord",
    "EventTrace",
    "FlowState",
    "HorizonTooLarge",
    "InclusionViolation",
    "Indeterminate",
    "Ineq",
    "ModelError",
    "NeutralTriangle",
    "NoOrbit",
    "NoTriangle",
    "OrbitRecord",
    "OrderingViolation",
    "OutOfRange",
    "OutsideStudiedWedge",
    "ParamRegion",
    "Parameters",
    "PIECE_ORDER",
    "SimplexPoint",
    "SubcaseViolation",
    "TRANSITION_TARGETS",
    "Unclassifiable",
    "WedgeViolation",
    "advance_to_next_event",
    "apply_F",
    "bifurcation_boundaries",
    "build_pieces",
    "catalog",
    "catalog_json",
    "circular_distance",
    "classify_parameters",
    "classify_region",
    "classify_stability",
    "classify_stability_from_moduli",
    "classify_xy",
    "corrected_transition_targets",
    "cycle_record_from_points",
    "eigenvalue_pair",
    "flow_state",
    "frac",
    "map_F_simulated",
    "mod1",
    "neutral_triangle",
    "observed_transitions",
    "partition_json",
    "point3",
    "region_polygon",
    "return_map_simulated",
    "return_map_times",
    "sample_region",
    "signal_fraction",
    "simulate_flow",
    "solve_code",
    "transition_graph",
    "validate_simplex",
    "velocity",
    "verify_cycle",
    "vertex_images",
    "write_trace_jsonl",
]
