"""Seeded random generators for terms, queries, substitutions and formulas.

Everything takes an explicit :class:`random.Random`, so a seed fixes the
whole stream.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .solver import SolvedForm, redirect, solved
from .subst import Substitution
from .terms import (
    FALSE,
    TRUE,
    And,
    App,
    Atom,
    Eq,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    Signature,
    Var,
    _free,
    subst_term,
)


@dataclass(frozen=True)
class Vocabulary:
    signature: Signature
    free: tuple
    bound: tuple

    @property
    def constants(self) -> tuple:
        return self.signature.constants

    @property
    def functions(self) -> tuple:
        return tuple(sorted((f, a) for f, a in self.signature.functions.items() if a > 0))

    @property
    def predicates(self) -> tuple:
        return tuple(sorted(self.signature.predicates.items()))


def _vars(*names) -> tuple:
    return tuple(Var(n) for n in names)


# Small constants-only vocabulary for exact oracle checks.
SMALL = Vocabulary(
    Signature({"a": 0, "b": 0, "c": 0}, {"p": 1, "q": 2}),
    _vars("X", "Y", "Z", "U"),
    _vars("Z", "U"),
)

# Richer vocabulary with function symbols for shape and termination checks.
RICH = Vocabulary(
    Signature({"a": 0, "b": 0, "f": 2, "g": 1, "h": 3}, {"p": 2, "q": 1, "r": 3}),
    _vars("X", "Y", "Z", "U", "V", "W"),
    _vars("Z", "U", "V", "W", "V0", "V1"),
)

# Function symbols but small enough to enumerate generalizations.
MEDIUM = Vocabulary(
    Signature({"a": 0, "b": 0, "f": 2, "g": 1}, {"p": 2, "q": 1}),
    _vars("X", "Y", "Z", "U"),
    _vars("Z", "U", "V"),
)


def random_term(rng: random.Random, voc: Vocabulary, depth: int = 2, variables=None):
    variables = voc.free + voc.bound if variables is None else tuple(variables)
    funcs = voc.functions
    if depth <= 0 or not funcs or rng.random() < 0.45:
        if variables and (rng.random() < 0.6 or not voc.constants):
            return rng.choice(variables)
        return App(rng.choice(voc.constants))
    f, n = rng.choice(funcs)
    return App(f, tuple(random_term(rng, voc, depth - 1, variables) for _ in range(n)))


def _leaf(rng, voc, depth, allow_atoms, variables, weights):
    roll = rng.random()
    if allow_atoms and voc.predicates and roll < weights[0]:
        p, n = rng.choice(voc.predicates)
        return Atom(p, tuple(random_term(rng, voc, depth, variables) for _ in range(n)))
    if roll > 0.997:
        return TRUE
    if roll > 0.994:
        return FALSE
    lhs = random_term(rng, voc, depth, variables)
    if len(weights) > 1:
        return Eq(lhs, _reabstract(rng, subst_term(lhs, weights[1]), weights[1]))
    return Eq(lhs, random_term(rng, voc, depth, variables))


def random_query(rng: random.Random, voc: Vocabulary, size: int = 8, depth: int = 2,
                 allow_atoms: bool = True, atom_weight: float = 0.35):
    """A random positive conjunctive query with about ``size`` formula nodes."""
    return _query(rng, voc, size, depth, allow_atoms, voc.free, (atom_weight,))


def random_unifiable_query(rng: random.Random, voc: Vocabulary, size: int = 8,
                           depth: int = 2, atom_weight: float = 0.35):
    """Like :func:`random_query`, but every equation holds under one hidden
    ground valuation, so most draws are consistent."""
    hidden = {v: _ground_term(rng, voc, 2) for v in voc.free + voc.bound}
    return _query(rng, voc, size, depth, True, voc.free, (atom_weight, hidden))


def _ground_term(rng, voc, depth):
    funcs = voc.functions
    if depth <= 0 or not funcs or rng.random() < 0.4:
        return App(rng.choice(voc.constants))
    f, n = rng.choice(funcs)
    return App(f, tuple(_ground_term(rng, voc, depth - 1) for _ in range(n)))


def _reabstract(rng, g, hidden):
    """A term whose instance under ``hidden`` is the ground term ``g``."""
    matches = [v for v, t in hidden.items() if t == g]
    if matches and rng.random() < 0.6:
        return rng.choice(matches)
    if type(g) is App and g.args:
        return App(g.fn, tuple(_reabstract(rng, a, hidden) for a in g.args))
    return g


def _query(rng, voc, size, depth, allow_atoms, variables, weights):
    if size <= 1 or rng.random() < 0.15:
        return _leaf(rng, voc, depth, allow_atoms, variables, weights)
    if rng.random() < 0.3 and voc.bound:
        y = rng.choice(voc.bound)
        inner = tuple(dict.fromkeys(variables + (y,)))
        return Exists(y, _query(rng, voc, size - 1, depth, allow_atoms, inner, weights))
    parts = rng.randint(2, 3)
    sizes = _split(rng, size - 1, parts)
    return And(tuple(_query(rng, voc, s, depth, allow_atoms, variables, weights) for s in sizes))


def _split(rng, total, parts):
    total = max(total, parts)
    cuts = sorted(rng.sample(range(1, total), parts - 1)) if total > parts else list(range(1, parts))
    bounds = [0] + cuts + [total]
    return [max(1, b - a) for a, b in zip(bounds, bounds[1:])]


def random_eformula(rng: random.Random, voc: Vocabulary, size: int = 5, depth: int = 2):
    return random_query(rng, voc, size, depth, allow_atoms=False)


def random_consistent_eformula(rng, voc, size=5, depth=2, tries=100):
    for _ in range(tries):
        e = random_eformula(rng, voc, size, depth)
        if not solved(e).is_false:
            return e
    return TRUE


def random_substitution(rng: random.Random, voc: Vocabulary, max_dom: int = 4, depth: int = 2,
                        variables=None) -> Substitution:
    variables = voc.free if variables is None else tuple(variables)
    k = rng.randint(0, min(max_dom, len(variables)))
    dom = rng.sample(list(variables), k)
    pool = variables + voc.bound
    return Substitution.of({x: random_term(rng, voc, depth, pool) for x in dom})


def random_formula(rng: random.Random, voc: Vocabulary, size: int = 6, depth: int = 1,
                   variables=None):
    """A first-order formula using every connective."""
    variables = voc.free if variables is None else tuple(variables)
    if size <= 1 or rng.random() < 0.2:
        return _leaf(rng, voc, depth, True, variables, (0.6,))
    kind = rng.choice(("and", "or", "not", "imp", "iff", "ex", "all"))
    if kind == "not":
        return Not(random_formula(rng, voc, size - 1, depth, variables))
    if kind in ("ex", "all"):
        y = rng.choice(voc.bound + voc.free)
        inner = tuple(dict.fromkeys(variables + (y,)))
        body = random_formula(rng, voc, size - 1, depth, inner)
        return (Exists if kind == "ex" else Forall)(y, body)
    a, b = _split(rng, size - 1, 2)
    lhs = random_formula(rng, voc, a, depth, variables)
    rhs = random_formula(rng, voc, b, depth, variables)
    return {"and": lambda: And((lhs, rhs)), "or": lambda: Or((lhs, rhs)),
            "imp": lambda: Implies(lhs, rhs), "iff": lambda: Iff(lhs, rhs)}[kind]()


def random_solved_form(rng, voc, size=8, depth=2, tries=200) -> SolvedForm:
    """A consistent solved form with at least one equation or atom."""
    for _ in range(tries):
        s = solved(random_query(rng, voc, size, depth))
        if not s.is_false and not s.is_true:
            return s
    raise RuntimeError("could not draw a nontrivial solved form")


# ---------------------------------------------------------------------------
# isomorphic transformations and perturbations of solved forms


def permute(rng, s: SolvedForm) -> SolvedForm:
    eqns = list(s.eqns)
    bound = list(s.bound)
    rng.shuffle(eqns)
    rng.shuffle(bound)
    return SolvedForm(tuple(bound), tuple(eqns), s.atoms)


def rename_bound(rng, s: SolvedForm) -> SolvedForm:
    taken = {v.name for v in s.vars} | {v.name for v in s.bound}
    names = [f"R{i}" for i in range(len(s.bound) * 3 + 3) if f"R{i}" not in taken]
    rng.shuffle(names)
    mapping = {z: Var(n) for z, n in zip(s.bound, names)}
    return SolvedForm(
        tuple(mapping[z] for z in s.bound),
        tuple((x, subst_term(t, mapping)) for x, t in s.eqns),
        tuple(Atom(a.pred, tuple(subst_term(u, mapping) for u in a.args)) for a in s.atoms),
    )


def redirect_some(rng, s: SolvedForm) -> SolvedForm:
    cands = [x for x, t in s.eqns if type(t) is Var and t not in s.bound]
    rng.shuffle(cands)
    for x in cands[: rng.randint(0, len(cands))]:
        if x in s.elim and type(s.rhs(x)) is Var:
            s = redirect(s, x)
    return s


def isomorphic_variant(rng, s: SolvedForm) -> SolvedForm:
    for _ in range(rng.randint(1, 4)):
        s = rng.choice((permute, rename_bound, redirect_some))(rng, s)
    return s


def perturb(rng, s: SolvedForm, voc: Vocabulary) -> SolvedForm:
    """Change one leaf of one right-hand side or atom argument."""
    slots = [("e", i) for i in range(len(s.eqns))] + [("a", i) for i in range(len(s.atoms))]
    kind, i = rng.choice(slots)
    replacement_pool = [App(c) for c in voc.constants] + sorted(s.vars) + list(voc.free)
    new = rng.choice(replacement_pool)
    if kind == "e":
        x, t = s.eqns[i]
        t2 = _replace_leaf(rng, t, new)
        eqns = s.eqns[:i] + ((x, t2),) + s.eqns[i + 1 :]
        return SolvedForm(s.bound, eqns, s.atoms)
    a = s.atoms[i]
    j = rng.randrange(len(a.args)) if a.args else None
    if j is None:
        return s
    args = a.args[:j] + (_replace_leaf(rng, a.args[j], new),) + a.args[j + 1 :]
    atoms = s.atoms[:i] + (Atom(a.pred, args),) + s.atoms[i + 1 :]
    return SolvedForm(s.bound, s.eqns, atoms)


def _replace_leaf(rng, t, new):
    if type(t) is Var or not t.args:
        return new
    k = rng.randrange(len(t.args))
    args = t.args[:k] + (_replace_leaf(rng, t.args[k], new),) + t.args[k + 1 :]
    return App(t.fn, args)


def free_vars_of(f) -> frozenset:
    return _free(f)
