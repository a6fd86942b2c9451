from .model import (
    Variable,
    Assignment,
    LookupTable,
    Scm,
    Violation,
    ValidationReport,
    validate,
    structurally_equal,
    ENDOGENOUS,
    NOISE,
    DEFAULT_MAX_CELLS,
)
from .inference import entailed, entailed_oracle, has_total_causal_effect
from .interventions import (
    Protocol,
    Atomic,
    Stochastic,
    General,
    apply,
    post_dist,
    covariate_specific,
    intervention_table,
)

__all__ = [
    "Variable",
    "Assignment",
    "LookupTable",
    "Scm",
    "Violation",
    "ValidationReport",
    "validate",
    "structurally_equal",
    "ENDOGENOUS",
    "NOISE",
    "DEFAULT_MAX_CELLS",
    "entailed",
    "entailed_oracle",
    "has_total_causal_effect",
    "Protocol",
    "Atomic",
    "Stochastic",
    "General",
    "apply",
    "post_dist",
    "covariate_specific",
    "intervention_table",
]
