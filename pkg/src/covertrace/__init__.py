"""Exact tools for sensor-driven exploration of metric graphs: control
signals with a rational metric and geodesics, ported-graph environments with
deterministic unit-speed dynamics, canonical sensor traces, covering maps and
lifts, and equivalence deciders (sampled enumeration, bisimulation,
homomorphism search)."""

__version__ = "0.1.0"

from .covering import (
    CoveringCertificate,
    GraphMap,
    cyclic_cover,
    deck_rotation,
    degree_refinement,
    lift_environment,
    lift_sensor,
    lift_state_path,
    pullback_sensor,
    relabel_environment,
    universal_cover_truncation,
    verify_covering,
)
from .environments import (
    Environment,
    HistoryState,
    SensorTrace,
    Trajectory,
    apply,
    first_divergence,
    trace_of,
    trace_of_trajectory,
    trajectory,
    trajectory_distance,
)
from .equivalence import (
    BisimulationResult,
    DiscreteStateSpace,
    SampledVerdict,
    TraceComparison,
    check_equiv_sampled,
    compute_bisimulation,
    homomorphism_search,
    port_preserving_automorphisms,
    structure_map,
    traces_equal,
    verify_bisimulation,
)
from .errors import CovertraceError, PreconditionError, ValidationError
from .gallery import GALLERY, write_gallery
from .graphs import (
    Dart,
    Edge,
    EdgeState,
    GraphState,
    PortedGraph,
    VertexState,
    build_edges,
)
from .sensors import (
    BLANK,
    EDGE,
    BeamMark,
    BeamSensor,
    DegreeSensor,
    FilteredSensor,
    LabelSensor,
    mark_positions,
    sensor_from_json,
)
from .signals import EMPTY, HALT, ControlSignal, distance, geodesic

__all__ = [
    "BLANK",
    "BeamMark",
    "BeamSensor",
    "BisimulationResult",
    "ControlSignal",
    "CoveringCertificate",
    "CovertraceError",
    "Dart",
    "DegreeSensor",
    "DiscreteStateSpace",
    "EDGE",
    "EMPTY",
    "Edge",
    "EdgeState",
    "Environment",
    "FilteredSensor",
    "GALLERY",
    "GraphMap",
    "GraphState",
    "HALT",
    "HistoryState",
    "LabelSensor",
    "PortedGraph",
    "PreconditionError",
    "SampledVerdict",
    "SensorTrace",
    "TraceComparison",
    "Trajectory",
    "ValidationError",
    "VertexState",
    "apply",
    "build_edges",
    "check_equiv_sampled",
    "compute_bisimulation",
    "cyclic_cover",
    "deck_rotation",
    "degree_refinement",
    "distance",
    "first_divergence",
    "geodesic",
    "homomorphism_search",
    "lift_environment",
    "lift_sensor",
    "lift_state_path",
    "mark_positions",
    "port_preserving_automorphisms",
    "pullback_sensor",
    "relabel_environment",
    "sensor_from_json",
    "structure_map",
    "trace_of",
    "trace_of_trajectory",
    "traces_equal",
    "trajectory",
    "trajectory_distance",
    "verify_bisimulation",
    "verify_covering",
    "write_gallery",
]
