"""Interactive tutoring engine for first-layer Rubik's Cube learning.

Core layers: cube model (`cube`), distance search and stage goals (`solver`),
the knowledge-component task model (`task_model`), model/knowledge tracing
(`tracing`), targeted task generation (`taskgen`), hint payloads (`hints`),
and the session protocol service (`session`).
"""

__version__ = "0.1.0"

from .cube import (
    CubeState,
    Move,
    SOLVED,
    apply_move,
    inverse,
    is_legal,
    normalize_orientation,
    parse,
    parse_moves,
    scramble,
    serialize,
)
from .session import Session, compute_metrics, replay
from .solver import Stage, min_steps, solve_first_layer, stage_goal_met
from .task_model import CATALOG, KcId, canonical_macro, match_kc
from .taskgen import generate_task, pick_next_kc
from .tracing import Tracer, TracingParams, grade_attempt, segment_attempts

__all__ = [
    "CATALOG",
    "CubeState",
    "KcId",
    "Move",
    "SOLVED",
    "Session",
    "Stage",
    "Tracer",
    "TracingParams",
    "apply_move",
    "canonical_macro",
    "compute_metrics",
    "generate_task",
    "grade_attempt",
    "inverse",
    "is_legal",
    "match_kc",
    "min_steps",
    "normalize_orientation",
    "parse",
    "parse_moves",
    "pick_next_kc",
    "replay",
    "scramble",
    "segment_attempts",
    "serialize",
    "solve_first_layer",
    "stage_goal_met",
    "__version__",
]
