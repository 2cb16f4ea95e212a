"""Contextuality analysis for finite measurement scenarios."""

from .errors import (
    CommensurabilityError,
    ContextualityError,
    GluingError,
    ModelError,
    NumericalError,
    SizeLimitError,
    UnsupportedShapeError,
    Violation,
)
from .hidden import bell_functional_value, check_hidden_distribution, chsh_functional, is_weakly_contextual
from .possibilistic import Level, classify, global_sections, is_extendable, non_extendability_chain
from .scenario import (
    EmpiricalModel,
    GlobalAssignment,
    MeasurementScenario,
    is_no_signalling,
    marginalize,
    restrict_assignment,
    support_of,
    validate_model,
)

__all__ = [
    "CommensurabilityError",
    "ContextualityError",
    "EmpiricalModel",
    "GlobalAssignment",
    "GluingError",
    "Level",
    "MeasurementScenario",
    "ModelError",
    "NumericalError",
    "SizeLimitError",
    "UnsupportedShapeError",
    "Violation",
    "bell_functional_value",
    "check_hidden_distribution",
    "chsh_functional",
    "classify",
    "global_sections",
    "is_extendable",
    "is_no_signalling",
    "is_weakly_contextual",
    "marginalize",
    "non_extendability_chain",
    "restrict_assignment",
    "support_of",
    "validate_model",
]
