"""Lambek calculus with a relevant modality: proof search, checking, encodings."""

from banglambek.calculus import (
    BANG_LSTAR,
    LSTAR,
    BRule,
    Derivation,
    DerivationError,
    Rule,
    System,
    check_derivation,
    lstar_with,
    normalize_perm_blocks,
)
from banglambek.formulas import (
    Bang,
    FragmentFlags,
    Formula,
    Over,
    ParseError,
    Sequent,
    Under,
    Var,
    classify,
    format_formula,
    format_sequent,
    parse_formula,
    parse_sequent,
    size,
)
from banglambek.prover import Budget, FragmentViolation, ProveResult, Status, decide_restricted, prove

__all__ = [
    "BANG_LSTAR",
    "LSTAR",
    "BRule",
    "Bang",
    "Budget",
    "Derivation",
    "DerivationError",
    "FragmentFlags",
    "FragmentViolation",
    "Formula",
    "Over",
    "ParseError",
    "ProveResult",
    "Rule",
    "Sequent",
    "Status",
    "System",
    "Under",
    "Var",
    "check_derivation",
    "classify",
    "decide_restricted",
    "format_formula",
    "format_sequent",
    "lstar_with",
    "normalize_perm_blocks",
    "parse_formula",
    "parse_sequent",
    "prove",
    "size",
]
