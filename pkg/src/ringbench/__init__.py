"""Deterministic travel-platform fraud-ring graph generator and harness.

Quick start:

    from ringbench import generate
    result = generate(scale="medium", seed=42,
                      n_ticketing_rings=30,
                      n_ghost_hotel_rings=30,
                      n_ato_rings=30)
    result.graph      # heterogeneous node tables + typed edge lists
    result.rings      # ground-truth ring records
"""

from ._version import __version__
from .config import GeneratorConfig, ScalePreset, resolve, resolve_preset
from .errors import ConfigError, GenerationError, RingbenchError, ValidationError
from .graph import (
    GraphData,
    ProjectedUserGraph,
    drop_relation,
    drop_user_feature,
    project_user_graph,
    validate,
)
from .pipeline import GenerationResult, generate, inject_all
from .rings import RingRecord
from .split import SplitAssignment, split, verify_no_leakage

__all__ = [
    "__version__",
    "ConfigError",
    "GenerationError",
    "GenerationResult",
    "GeneratorConfig",
    "GraphData",
    "ProjectedUserGraph",
    "RingRecord",
    "RingbenchError",
    "ScalePreset",
    "SplitAssignment",
    "ValidationError",
    "drop_relation",
    "drop_user_feature",
    "generate",
    "inject_all",
    "project_user_graph",
    "resolve",
    "resolve_preset",
    "split",
    "validate",
    "verify_no_leakage",
]
