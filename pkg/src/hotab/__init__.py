"""Tableau prover for simple type theory with primitive equality.

Refutes branches of simply typed formulas with cut-free tableau rules,
emits checkable proofs, extracts finite models from saturated branches,
and decides the lambda-free, pure-disequation, and Bernays-Schoenfinkel-
Ramsey style fragments of the first-order sublanguage.
"""

from .branch import Branch, FormulaInfo, FormulaKind, branch_of
from .fragments import (
    FragmentReport,
    FragmentViolation,
    classify_branch,
    decide,
)
from .kernel import (
    App,
    Base,
    Bound,
    Fun,
    Lam,
    Name,
    Ref,
    Term,
    Type,
    app,
    diseq,
    eq,
    eq_const,
    forall,
    forall_const,
    fresh_var,
    free_vars,
    fun,
    imp,
    lam,
    neg,
    o,
    ref,
    show_term,
    show_type,
    sort,
    spine,
    type_of,
)
from .normalize import apply_norm, is_normal, normalize, substitute
from .problems import (
    ParseError,
    Problem,
    parse,
    parse_proof,
    serialize_problem,
    serialize_proof,
)
from .rules import (
    RuleId,
    RuleInstance,
    applicable_efo,
    applicable_stt,
    check_instance,
    make_instance,
)
from .search import (
    EvidenceReport,
    Proof,
    Refuted,
    Satisfiable,
    SearchConfig,
    Unknown,
    check_proof,
    is_evident,
    refute,
)
from .semantics import (
    DEFAULT_MAX_TABLE,
    CardinalityError,
    ExtractionFailure,
    Frame,
    Model,
    NotEvident,
    check_model,
    enumerate_models,
    eval_term,
    extract_model,
    has_model,
    show_model,
    sorts_in,
    variables_in,
)

__all__ = [
    "App",
    "Base",
    "Bound",
    "Branch",
    "CardinalityError",
    "DEFAULT_MAX_TABLE",
    "EvidenceReport",
    "ExtractionFailure",
    "FormulaInfo",
    "FormulaKind",
    "FragmentReport",
    "FragmentViolation",
    "Frame",
    "Fun",
    "Lam",
    "Model",
    "Name",
    "NotEvident",
    "ParseError",
    "Problem",
    "Proof",
    "Ref",
    "Refuted",
    "RuleId",
    "RuleInstance",
    "Satisfiable",
    "SearchConfig",
    "Term",
    "Type",
    "Unknown",
    "app",
    "applicable_efo",
    "applicable_stt",
    "apply_norm",
    "branch_of",
    "check_instance",
    "check_model",
    "check_proof",
    "classify_branch",
    "decide",
    "diseq",
    "enumerate_models",
    "eq",
    "eq_const",
    "eval_term",
    "extract_model",
    "forall",
    "forall_const",
    "free_vars",
    "fresh_var",
    "fun",
    "has_model",
    "imp",
    "is_evident",
    "is_normal",
    "lam",
    "make_instance",
    "neg",
    "normalize",
    "o",
    "parse",
    "parse_proof",
    "ref",
    "refute",
    "serialize_problem",
    "serialize_proof",
    "show_model",
    "show_term",
    "show_type",
    "sort",
    "sorts_in",
    "spine",
    "substitute",
    "type_of",
    "variables_in",
]
