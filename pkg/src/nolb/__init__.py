"""Bounded-confidence opinion dynamics with connectivity-preserving controls.

Four models share one engine: plain bounded confidence (bc), the 1-D freeze
rule (nolb-freeze), velocity projection onto the cone spanned by an agent's
behind-neighbors (nolb), and the relaxed variant built on a randomly relaxed
behind graph (rnolb).
"""

__version__ = "0.1.0"

from .dynamics import (
    AgentConfiguration,
    InteractionFunction,
    Model,
    ModelParams,
    Trajectory,
    WeightMatrix,
    critical_region_members,
    interaction_weights,
    local_average,
    simulate,
    step_bounded_confidence,
    step_nolb,
    step_nolb_freeze,
    step_rnolb,
)
from .geometry import (
    ProjectionCertificate,
    ProjectionError,
    VelocityCone,
    bounding_box,
    hull_contains_2d,
    project_onto_cone,
    verify_kkt,
)
from .graphs import (
    DirectedGraph,
    UndirectedGraph,
    behind_graph,
    interaction_graph,
    is_connected,
    relax_behind_graph,
)
from .metrics import (
    MetricsSeries,
    clustering_number,
    consensus_reached,
    diameter,
    stopping_time,
    variance,
)

__all__ = [
    "AgentConfiguration",
    "DirectedGraph",
    "InteractionFunction",
    "MetricsSeries",
    "Model",
    "ModelParams",
    "ProjectionCertificate",
    "ProjectionError",
    "Trajectory",
    "UndirectedGraph",
    "VelocityCone",
    "WeightMatrix",
    "behind_graph",
    "bounding_box",
    "clustering_number",
    "consensus_reached",
    "critical_region_members",
    "diameter",
    "hull_contains_2d",
    "interaction_graph",
    "interaction_weights",
    "is_connected",
    "local_average",
    "project_onto_cone",
    "relax_behind_graph",
    "simulate",
    "step_bounded_confidence",
    "step_nolb",
    "step_nolb_freeze",
    "step_rnolb",
    "stopping_time",
    "variance",
    "verify_kkt",
]
