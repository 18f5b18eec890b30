"""paramcad: in-context parametric design configuration.

Constrained parameter editing with snap-back, a declarative design DSL with a
built-in catalog, mesh generation and STL export, sketch-to-curve fitting,
anthropometric range recommendation, environment scan ingestion, and stability
and lighting estimation.
"""

from .core import (Configuration, Design, EditMode, Pose, SnapBackResult,
                   ValidityReport, apply_handle_drag, bind_measurement,
                   default_configuration, measure_distance, set_parameter,
                   set_pose, validate)
from .dsl import get_builtin, list_builtin, parse_design, serialize_design

__version__ = "0.1.0"

__all__ = [
    "Configuration", "Design", "EditMode", "Pose", "SnapBackResult",
    "ValidityReport", "apply_handle_drag", "bind_measurement",
    "default_configuration", "measure_distance", "set_parameter", "set_pose",
    "validate", "get_builtin", "list_builtin", "parse_design",
    "serialize_design", "__version__",
]
