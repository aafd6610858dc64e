"""E-formulas (queries without atoms) as a lattice, and its isomorphism with
substitutions."""

from __future__ import annotations

from functools import reduce

from .errors import EmptySet, Inconsistent, NotAQuery
from .solver import canonical, solved
from .subst import BOTTOM, EPSILON, Substitution, regular_extension
from .terms import (
    FALSE,
    TRUE,
    And,
    App,
    Eq,
    FreshVars,
    _free,
    card,
    conj,
    exists,
    is_query,
    subst_term,
)


def check_eformula(e) -> None:
    if not is_query(e) or card(e) != 0:
        raise NotAQuery("expected an equation formula without atoms")


def to_substitution(e) -> Substitution:
    """Solved equations plus identity bindings for every parameter."""
    check_eformula(e)
    s = solved(e)
    if s.is_false:
        return BOTTOM
    if s.is_true:
        return EPSILON
    return Substitution.of(list(s.eqns) + [(p, p) for p in s.params])


def to_eformula(sigma: Substitution):
    """The quantified equation system of ``sigma`` with its range renamed
    apart from its domain."""
    if sigma.bottom:
        return FALSE
    if not sigma.bindings:
        return TRUE
    fresh = FreshVars(sigma.dom | sigma.range)
    rename = {v: fresh() for v in sorted(sigma.range)}
    eqs = [Eq(x, subst_term(t, rename)) for x, t in sigma.bindings]
    return exists(sorted(rename.values()), conj(eqs))


def meet(e1, e2):
    check_eformula(e1)
    check_eformula(e2)
    return canonical(And((e1, e2))).to_formula()


def _generalize(s, t, table: dict, fresh: FreshVars):
    if type(s) is App and type(t) is App and s.fn == t.fn and len(s.args) == len(t.args):
        return App(s.fn, tuple(_generalize(a, b, table, fresh) for a, b in zip(s.args, t.args)))
    key = (s, t)
    if key not in table:
        table[key] = fresh()
    return table[key]


def join(e1, e2):
    """Least upper bound by anti-unification of the two substitutions,
    extended to a common domain."""
    check_eformula(e1)
    check_eformula(e2)
    s1, s2 = canonical(e1), canonical(e2)
    if s1.is_false:
        return s2.to_formula()
    if s2.is_false:
        return s1.to_formula()
    if s1.is_true or s2.is_true:
        return TRUE
    sig1, sig2 = to_substitution(s1.to_formula()), to_substitution(s2.to_formula())
    dom = sig1.dom | sig2.dom
    a = regular_extension(sig1, dom).as_dict()
    b = regular_extension(sig2, dom).as_dict()
    fresh = FreshVars(dom, prefix="G")
    fresh.counter = 1
    table = {}
    lub = Substitution.of({x: _generalize(a[x], b[x], table, fresh) for x in sorted(dom)})
    return canonical(to_eformula(lub)).to_formula()


def meet_all(es):
    es = list(es)
    if not es:
        raise EmptySet("meet of an empty set")
    if len(es) == 1:
        check_eformula(es[0])
        return canonical(es[0]).to_formula()
    return reduce(meet, es)


def join_all(es):
    es = list(es)
    if not es:
        raise EmptySet("join of an empty set")
    if len(es) == 1:
        check_eformula(es[0])
        return canonical(es[0]).to_formula()
    return reduce(join, es)


def project(e, variables):
    """Existentially close every free variable outside ``variables``."""
    check_eformula(e)
    keep = frozenset(variables)
    return exists(sorted(_free(e) - keep), e)


def kernel_e(e) -> frozenset:
    check_eformula(e)
    s = solved(e)
    if s.is_false:
        raise Inconsistent("an inconsistent formula has no kernel")
    return s.vars
