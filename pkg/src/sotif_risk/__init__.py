"""Causal risk-chain analysis for SOTIF-style safety arguments.

The package models how harms arise through trigger -> behavior -> event ->
harm chains, bounds the probability of each harm without independence
assumptions, derives Poisson validation targets from acceptance criteria,
screens conditions qualitatively, and lints the terminology such arguments
are written in.  Brute-force oracles verify the closed forms.
"""

from .bounds import (
    HarmBound,
    RiskBound,
    chain_contribution,
    compensated_sum,
    exact_union_probability,
    harm_bound,
    risk_bound,
    single_tuple_reduction,
)
from .errors import (
    DivisionImpossibleError,
    DocumentError,
    InvalidModelError,
    OracleCapacityError,
    PeriodMismatchError,
    SotifRiskError,
    UnknownIdError,
)
from .model_io import (
    ModelDocument,
    RegistryDocument,
    load_model_document,
    load_registry_document,
    parse_model_document,
    parse_registry_document,
)
from .planning import (
    AcceptanceCriterion,
    BinaryClass,
    PlanResult,
    Rationale,
    ScreeningRecord,
    ScreeningResult,
    TolerableRate,
    ValidationObligation,
    ValidationTarget,
    legacy_tolerable_rate,
    plan_targets,
    poisson_validation_target,
    screen,
)
from .risk_model import (
    Behavior,
    BehaviorMode,
    Chain,
    Event,
    Harm,
    Hazard,
    RiskModel,
    Scenario,
    SeverityScale,
    Trigger,
    ValidationFinding,
    chains_for_harm,
    validate_model,
)
from .term_registry import (
    LintReport,
    Provenance,
    TermDef,
    TermRegistry,
    apply_amendments,
    lint,
)

__version__ = "0.1.0"

__all__ = [
    "AcceptanceCriterion",
    "Behavior",
    "BehaviorMode",
    "BinaryClass",
    "Chain",
    "DivisionImpossibleError",
    "DocumentError",
    "Event",
    "Harm",
    "HarmBound",
    "Hazard",
    "InvalidModelError",
    "LintReport",
    "ModelDocument",
    "OracleCapacityError",
    "PeriodMismatchError",
    "PlanResult",
    "Provenance",
    "Rationale",
    "RegistryDocument",
    "RiskBound",
    "RiskModel",
    "Scenario",
    "ScreeningRecord",
    "ScreeningResult",
    "SeverityScale",
    "SotifRiskError",
    "TermDef",
    "TermRegistry",
    "TolerableRate",
    "Trigger",
    "UnknownIdError",
    "ValidationFinding",
    "ValidationObligation",
    "ValidationTarget",
    "apply_amendments",
    "chain_contribution",
    "chains_for_harm",
    "compensated_sum",
    "exact_union_probability",
    "harm_bound",
    "legacy_tolerable_rate",
    "lint",
    "load_model_document",
    "load_registry_document",
    "parse_model_document",
    "parse_registry_document",
    "plan_targets",
    "poisson_validation_target",
    "risk_bound",
    "screen",
    "single_tuple_reduction",
    "validate_model",
]
