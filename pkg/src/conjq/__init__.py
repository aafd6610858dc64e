"""Unification for positive conjunctive queries, equation formulas and finite
substitutions."""

from .errors import (
    AlignmentError,
    ArityMismatch,
    ConjqError,
    DomainOverlap,
    EmptySet,
    Inconsistent,
    NotAQuery,
    NotApplicable,
    NotSubstitutible,
    ParseError,
    SignatureError,
    StepBudgetExceeded,
)
from .lattice import join, join_all, kernel_e, meet, meet_all, project, to_eformula, to_substitution
from .solver import (
    SolvedForm,
    canonical,
    canonicalize,
    equivalent,
    form_leq,
    isomorphic,
    more_general,
    query_diff,
    solve,
    solved,
)
from .subst import (
    BOTTOM,
    EPSILON,
    Substitution,
    apply_to_formula,
    apply_to_term,
    compose,
    kernel,
    more_general_subst,
    regular_extension,
    restrict,
    union,
)
from .syntax import (
    parse_formula,
    parse_query,
    parse_substitution,
    parse_term,
    parse_varset,
    print_formula,
    print_term,
)
from .terms import App, Atom, Eq, Exists, Signature, Var

__all__ = [name for name in dir() if not name.startswith("_")]
