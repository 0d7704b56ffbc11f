"""Actual-cause decisions over finite structural causal models.

The package solves finite-domain structural equation models, evaluates
counterfactual formulas, decides actual causation under three rule variants
(fixed-contingency, subset-robust, and normality-extended), and implements
model surgery: conservative-extension checks, witness-killing extensions,
an alternating stability chain, and normality orders built from equation
deviations.
"""

from .causality import (
    DEFAULT_SOLVE_BUDGET,
    ExtendedCausalModel,
    NormalityOrder,
    RuleVariant,
    SearchBudget,
    Verdict,
    Witness,
    actual_world,
    best_witnesses,
    check_ac1,
    check_ac2a,
    check_ac2b,
    find_all_causes,
    find_witnesses,
    is_actual_cause,
    witness_world,
)
from .errors import (
    CyclicModel,
    DuplicateDefinition,
    EngineError,
    MalformedPhi,
    MissingNormalityOrder,
    NotAWitness,
    NoWitness,
    ParseError,
    PreconditionViolated,
    SearchBudgetExceeded,
    SignatureMismatch,
    UnknownVariable,
    ValueOutOfRange,
    WitnessEqualsActual,
)
from .dsl import (
    ModelDocument,
    parse_cause,
    parse_event,
    parse_formula,
    parse_model,
    print_formula,
    print_model,
)
from .formula import eval_formula, valid_in_model
from .model import (
    CausalModel,
    Signature,
    World,
    check_recursive,
    intervene,
    make_model,
    solve,
)
from .transforms import (
    AgreementReport,
    ExtensionReport,
    build_stability_model,
    check_formula_agreement,
    deviating_variables,
    is_conservative_extension,
    is_conservative_extension_extended,
    kill_all_witnesses,
    kill_witness,
    normality_from_respect,
    respects_equations,
)

__version__ = "0.1.0"

__all__ = [
    "CausalModel",
    "Signature",
    "World",
    "check_recursive",
    "intervene",
    "make_model",
    "solve",
    "eval_formula",
    "valid_in_model",
    "ModelDocument",
    "parse_model",
    "parse_formula",
    "parse_cause",
    "parse_event",
    "print_model",
    "print_formula",
    "RuleVariant",
    "Witness",
    "Verdict",
    "NormalityOrder",
    "ExtendedCausalModel",
    "SearchBudget",
    "DEFAULT_SOLVE_BUDGET",
    "actual_world",
    "witness_world",
    "check_ac1",
    "check_ac2a",
    "check_ac2b",
    "find_witnesses",
    "is_actual_cause",
    "find_all_causes",
    "best_witnesses",
    "is_conservative_extension",
    "is_conservative_extension_extended",
    "check_formula_agreement",
    "deviating_variables",
    "respects_equations",
    "normality_from_respect",
    "kill_witness",
    "kill_all_witnesses",
    "build_stability_model",
    "ExtensionReport",
    "AgreementReport",
    "EngineError",
    "CyclicModel",
    "UnknownVariable",
    "ValueOutOfRange",
    "DuplicateDefinition",
    "SignatureMismatch",
    "MalformedPhi",
    "MissingNormalityOrder",
    "SearchBudgetExceeded",
    "NotAWitness",
    "WitnessEqualsActual",
    "PreconditionViolated",
    "NoWitness",
    "ParseError",
]
