"""Finite substitutions, their preorder and their application to formulas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import DomainOverlap, NotApplicable
from .terms import (
    And,
    Atom,
    Bot,
    Eq,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    Var,
    _free,
    all_vars,
    diff_set,
    first_var_not_in,
    replace,
    subst_term,
    term_vars,
)


@dataclass(frozen=True)
class Substitution:
    """A finite map from variables to terms, or the bottom element.

    ``bindings`` is kept sorted by variable order, so equal maps compare
    equal.  Identity bindings are kept: they belong to the domain.
    """

    bindings: tuple = ()
    bottom: bool = False

    @classmethod
    def of(cls, mapping) -> "Substitution":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        d = {}
        for x, t in items:
            if x in d:
                raise ValueError(f"{x.name} bound twice")
            d[x] = t
        return cls(tuple(sorted(d.items(), key=lambda b: b[0].sort_key)))

    @property
    def dom(self) -> frozenset:
        return frozenset(x for x, _ in self.bindings)

    @property
    def range(self) -> frozenset:
        out = frozenset()
        for _, t in self.bindings:
            out |= term_vars(t)
        return out

    def as_dict(self) -> dict:
        return dict(self.bindings)

    def __getitem__(self, x: Var):
        for y, t in self.bindings:
            if y == x:
                return t
        raise KeyError(x)

    def __len__(self) -> int:
        return len(self.bindings)

    def iter_terms(self):
        for x, t in self.bindings:
            yield x
            yield t

    def to_text(self) -> str:
        from .syntax import print_term

        if self.bottom:
            return "bottom"
        inner = ", ".join(f"{x.name} -> {print_term(t)}" for x, t in self.bindings)
        return "{" + inner + "}"

    def to_json(self) -> dict:
        from .syntax import print_term

        if self.bottom:
            return {"bottom": True}
        return {
            "bindings": [{"var": x.name, "term": print_term(t)} for x, t in self.bindings]
        }

    def __str__(self) -> str:
        return self.to_text()


EPSILON = Substitution()
BOTTOM = Substitution(bottom=True)


def _need(sigma: Substitution) -> None:
    if sigma.bottom:
        raise NotApplicable(message="the bottom substitution cannot be applied")


def apply_to_term(sigma: Substitution, t):
    _need(sigma)
    d = sigma.as_dict()
    missing = term_vars(t) - d.keys()
    if missing:
        raise NotApplicable(sorted(missing))
    return subst_term(t, d)


def compose(sigma: Substitution, theta: Substitution) -> Substitution:
    """``x -> theta(sigma(x))`` over the domain of ``sigma``."""
    _need(sigma)
    _need(theta)
    missing = sigma.range - theta.dom
    if missing:
        raise NotApplicable(sorted(missing))
    d = theta.as_dict()
    return Substitution(tuple((x, subst_term(t, d)) for x, t in sigma.bindings))


def restrict(sigma: Substitution, variables) -> Substitution:
    _need(sigma)
    keep = frozenset(variables)
    return Substitution(tuple(b for b in sigma.bindings if b[0] in keep))


def union(sigma: Substitution, theta: Substitution) -> Substitution:
    _need(sigma)
    _need(theta)
    both = sigma.dom & theta.dom
    if both:
        names = ", ".join(v.name for v in sorted(both))
        raise DomainOverlap(f"both substitutions bind {names}")
    return Substitution.of(sigma.bindings + theta.bindings)


def is_permutation(sigma: Substitution) -> bool:
    _need(sigma)
    values = [t for _, t in sigma.bindings]
    return all(type(t) is Var for t in values) and len(set(values)) == len(values)


def regular_extension(sigma: Substitution, variables) -> Substitution:
    """Extend ``sigma`` to ``variables`` one variable at a time, in variable
    order: a new ``x`` maps to itself unless ``x`` already occurs in the
    current range, in which case it maps to the first variable that does not."""
    _need(sigma)
    d = sigma.as_dict()
    rng = set(sigma.range)
    for x in sorted(frozenset(variables) - d.keys()):
        y = x if x not in rng else first_var_not_in(rng)
        d[x] = y
        rng.add(y)
    return Substitution.of(d)


def kernel(sigma: Substitution) -> frozenset:
    """Variables whose binding cannot be dropped without changing the class.

    ``x`` is outside the kernel exactly when ``sigma(x)`` is a variable that
    occurs in no other binding.
    """
    _need(sigma)
    out = set()
    for x, t in sigma.bindings:
        if type(t) is not Var:
            out.add(x)
            continue
        if any(y != x and t in term_vars(s) for y, s in sigma.bindings):
            out.add(x)
    return frozenset(out)


def matcher(sigma: Substitution, theta: Substitution):
    """A substitution ``tau`` with ``sigma' = theta' tau`` on a common domain,
    or ``None`` if there is none.  Neither argument may be bottom."""
    dom = sigma.dom | theta.dom
    s = regular_extension(sigma, dom).as_dict()
    t = regular_extension(theta, dom).as_dict()
    tau = {}
    for x in dom:
        for a, b in diff_set(s[x], t[x]):
            if type(b) is not Var or tau.setdefault(b, a) != a:
                return None
    return Substitution.of(tau)


def more_general_subst(sigma: Substitution, theta: Substitution) -> bool:
    """Decide ``sigma ⪯ theta``: ``sigma`` is an instance of ``theta``."""
    if sigma.bottom:
        return True
    if theta.bottom:
        return False
    return matcher(sigma, theta) is not None


def equivalent_subst(sigma: Substitution, theta: Substitution) -> bool:
    return more_general_subst(sigma, theta) and more_general_subst(theta, sigma)


# ---------------------------------------------------------------------------
# application to formulas


def apply_to_formula(sigma: Substitution, f):
    """Apply ``sigma`` to an arbitrary formula, renaming bound variables that
    would capture a variable of the range."""
    _need(sigma)
    free = _free(f)
    ext = regular_extension(restrict(sigma, free), free)
    return _apply(f, ext.as_dict())


def _apply(f, d: dict):
    t = type(f)
    if t in (Top, Bot):
        return f
    if t is Eq:
        return Eq(subst_term(f.lhs, d), subst_term(f.rhs, d))
    if t is Atom:
        return Atom(f.pred, tuple(subst_term(a, d) for a in f.args))
    if t is Not:
        return Not(_apply(f.body, d))
    if t in (And, Or):
        return t(tuple(_apply(c, _only(d, c)) for c in f.items))
    if t in (Implies, Iff):
        return t(_apply(f.lhs, _only(d, f.lhs)), _apply(f.rhs, _only(d, f.rhs)))
    if t in (Exists, Forall):
        x, body = f.var, f.body
        rng = set()
        for s in d.values():
            rng |= term_vars(s)
        if x in rng:
            y = first_var_not_in(rng | all_vars(body))
            body = replace(body, [x], [y])
            x = y
        if x in _free(body):
            d = {**d, x: x}
        return t(x, _apply(body, d))
    raise TypeError(f"not a formula: {f!r}")


def _only(d: dict, f) -> dict:
    free = _free(f)
    return {x: s for x, s in d.items() if x in free}
