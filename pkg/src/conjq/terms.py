"""Terms, formulas, signatures and the structural operations on them.

Every value here is immutable.  Variables are ordered by :func:`var_key`:
the names ``X, Y, Z, U, V, W`` come first, then ``V0, V1, V2, ...``, then
every other name lexicographically.  Wherever an operation needs "the first
variable" (regular extension, renaming under a quantifier) it walks
:func:`enumerate_vars`, which yields exactly that prefix of the order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

from .errors import NotSubstitutible, SignatureError

_PREFERRED = ("X", "Y", "Z", "U", "V", "W")
_NUMBERED = re.compile(r"V(0|[1-9][0-9]*)\Z")


def var_key(name: str) -> tuple:
    if name in _PREFERRED:
        return (0, _PREFERRED.index(name), "")
    m = _NUMBERED.match(name)
    if m:
        return (0, len(_PREFERRED) + int(m.group(1)), "")
    return (1, 0, name)


def enumerate_vars() -> Iterator["Var"]:
    for name in _PREFERRED:
        yield Var(name)
    for i in itertools.count():
        yield Var(f"V{i}")


def first_var_not_in(avoid) -> "Var":
    """The first variable of the enumeration that is not in ``avoid``."""
    for v in enumerate_vars():
        if v not in avoid:
            return v
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __lt__(self, other: "Var") -> bool:
        return var_key(self.name) < var_key(other.name)

    @property
    def sort_key(self) -> tuple:
        return var_key(self.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    """Function symbol applied to arguments; constants have ``args == ()``."""

    fn: str
    args: tuple = ()
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_h", hash((self.fn, self.args)))

    def __hash__(self):
        return self._h

    @property
    def arity(self) -> int:
        return len(self.args)


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


@lru_cache(maxsize=1 << 16)
def term_vars(t: Term) -> frozenset:
    if type(t) is Var:
        return frozenset((t,))
    if not t.args:
        return frozenset()
    return frozenset().union(*map(term_vars, t.args))


def is_ground(t: Term) -> bool:
    return not term_vars(t)


def occurs(x: Var, t: Term) -> bool:
    return x in term_vars(t)


def term_size(t: Term) -> int:
    if type(t) is Var:
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def term_depth(t: Term) -> int:
    if type(t) is Var or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def subst_term(t: Term, mapping: Mapping[Var, Term]) -> Term:
    """Simultaneous replacement of variables in ``t``; unmapped ones stay."""
    if type(t) is Var:
        return mapping.get(t, t)
    if not t.args:
        return t
    args = tuple(subst_term(a, mapping) for a in t.args)
    if all(a is b for a, b in zip(args, t.args)):
        return t
    return App(t.fn, args)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if type(t) is App:
        for a in t.args:
            yield from subterms(a)


def diff_set(s, t) -> frozenset:
    """Difference set of two terms (or two atoms, treated positionally).

    Identical variables give ``{(x, x)}``, identical constants nothing, equal
    principal functors recurse into the arguments, and any other pair is
    returned as a single disagreement.
    """
    if type(s) is Var and type(t) is Var and s == t:
        return frozenset(((s, t),))
    if (
        type(s) is type(t)
        and type(s) in (App, Atom)
        and _head(s) == _head(t)
    ):
        out = set()
        for a, b in zip(s.args, t.args):
            out |= diff_set(a, b)
        return frozenset(out)
    return frozenset(((s, t),))


def _head(x) -> tuple:
    return (x.fn if type(x) is App else x.pred, len(x.args))


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True, slots=True)
class Top:
    def __repr__(self):
        return "TRUE"


@dataclass(frozen=True, slots=True)
class Bot:
    def __repr__(self):
        return "FALSE"


TRUE = Top()
FALSE = Bot()


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: Term
    rhs: Term
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((1, self.lhs, self.rhs)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple = ()
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_h", hash((2, self.pred, self.args)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    """Conjunction of two or more formulas (associativity is not implied)."""

    items: tuple
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.items, tuple):
            object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError("And needs at least two items")
        object.__setattr__(self, "_h", hash((3, self.items)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True)
class Or:
    items: tuple
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.items, tuple):
            object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError("Or needs at least two items")
        object.__setattr__(self, "_h", hash((4, self.items)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True, slots=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: Var
    body: "Formula"
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((5, self.var, self.body)))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True)
class Forall:
    var: Var
    body: "Formula"


Formula = Union[Top, Bot, Eq, Atom, Not, And, Or, Implies, Iff, Exists, Forall]
Quantifier = (Exists, Forall)
_QUERY_TYPES = (Top, Bot, Eq, Atom, And, Exists)


def conj(items: Iterable) -> "Formula":
    items = tuple(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def disj(items: Iterable) -> "Formula":
    items = tuple(items)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(items)


def exists(variables: Iterable[Var], body: "Formula") -> "Formula":
    """``exists v1 . exists v2 . ... body`` with ``v1`` outermost."""
    for v in reversed(tuple(variables)):
        body = Exists(v, body)
    return body


def forall(variables: Iterable[Var], body: "Formula") -> "Formula":
    for v in reversed(tuple(variables)):
        body = Forall(v, body)
    return body


def children(f) -> tuple:
    t = type(f)
    if t in (And, Or):
        return f.items
    if t in (Exists, Forall, Not):
        return (f.body,)
    if t in (Implies, Iff):
        return (f.lhs, f.rhs)
    return ()


@lru_cache(maxsize=1 << 16)
def _free(f) -> frozenset:
    t = type(f)
    if t is Eq:
        return term_vars(f.lhs) | term_vars(f.rhs)
    if t is Atom:
        return frozenset().union(*map(term_vars, f.args)) if f.args else frozenset()
    if t in (Exists, Forall):
        return _free(f.body) - {f.var}
    kids = children(f)
    if not kids:
        return frozenset()
    return frozenset().union(*map(_free, kids))


def free_var_set(f) -> frozenset:
    return _free(f)


def free_vars(f) -> tuple:
    """Free variables of a formula, in variable order."""
    return tuple(sorted(_free(f)))


def all_vars(f) -> frozenset:
    """Every variable occurring in ``f``, free or bound."""
    t = type(f)
    if t in (Eq, Atom):
        return _free(f)
    if t in (Exists, Forall):
        return all_vars(f.body) | {f.var}
    out = frozenset()
    for c in children(f):
        out |= all_vars(c)
    return out


def bound_vars(f) -> frozenset:
    t = type(f)
    if t in (Exists, Forall):
        return bound_vars(f.body) | {f.var}
    out = frozenset()
    for c in children(f):
        out |= bound_vars(c)
    return out


def is_closed(f) -> bool:
    return not _free(f)


def is_query(f) -> bool:
    if type(f) not in _QUERY_TYPES:
        return False
    return all(is_query(c) for c in children(f))


def card(f) -> int:
    """Number of atom nodes."""
    if type(f) is Atom:
        return 1
    return sum(card(c) for c in children(f))


def atoms_of(f) -> list:
    """Atom nodes in left-to-right order."""
    if type(f) is Atom:
        return [f]
    out = []
    for c in children(f):
        out.extend(atoms_of(c))
    return out


def formula_size(f) -> int:
    t = type(f)
    if t is Eq:
        return 1 + term_size(f.lhs) + term_size(f.rhs)
    if t is Atom:
        return 1 + sum(term_size(a) for a in f.args)
    return 1 + sum(formula_size(c) for c in children(f))


def map_terms(f, fn):
    """Rebuild ``f`` with ``fn`` applied to every top-level term of every
    equation and atom.  Binders are not consulted."""
    t = type(f)
    if t is Eq:
        return Eq(fn(f.lhs), fn(f.rhs))
    if t is Atom:
        return Atom(f.pred, tuple(fn(a) for a in f.args))
    if t in (Top, Bot):
        return f
    if t in (And, Or):
        return t(tuple(map_terms(c, fn) for c in f.items))
    if t in (Exists, Forall):
        return t(f.var, map_terms(f.body, fn))
    if t is Not:
        return Not(map_terms(f.body, fn))
    return t(map_terms(f.lhs, fn), map_terms(f.rhs, fn))


def replace(f, xs, ss):
    """Simultaneously replace the free occurrences of ``xs[i]`` by ``ss[i]``.

    Raises :class:`NotSubstitutible` if some ``ss[i]`` would be captured by a
    quantifier enclosing a free occurrence of ``xs[i]``.
    """
    xs = tuple(xs)
    ss = tuple(ss)
    if len(xs) != len(ss):
        raise ValueError("replace: variable and term lists differ in length")
    if len(set(xs)) != len(xs):
        raise ValueError("replace: variables must be distinct")
    return _replace(f, dict(zip(xs, ss)), frozenset())


def _replace(f, mapping, bound):
    live = mapping.keys() & _free(f)
    if not live:
        return f
    t = type(f)
    if t is Eq or t is Atom:
        for x in live:
            captured = term_vars(mapping[x]) & bound
            if captured:
                raise NotSubstitutible(x, mapping[x])
        sub = {x: mapping[x] for x in live}
        if t is Eq:
            return Eq(subst_term(f.lhs, sub), subst_term(f.rhs, sub))
        return Atom(f.pred, tuple(subst_term(a, sub) for a in f.args))
    if t in (Exists, Forall):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return t(f.var, _replace(f.body, inner, bound | {f.var}))
    if t in (And, Or):
        return t(tuple(_replace(c, mapping, bound) for c in f.items))
    if t is Not:
        return Not(_replace(f.body, mapping, bound))
    return t(_replace(f.lhs, mapping, bound), _replace(f.rhs, mapping, bound))


def is_variant(f, g) -> bool:
    """True iff ``f`` and ``g`` differ only by renaming of bound variables."""
    return _alpha(f, g, {}, {}, 0)


def _alpha_term(s, t, es, et) -> bool:
    if type(s) is Var:
        if type(t) is not Var:
            return False
        a, b = es.get(s), et.get(t)
        if a is None and b is None:
            return s == t
        return a == b
    if type(t) is not App or s.fn != t.fn or len(s.args) != len(t.args):
        return False
    return all(_alpha_term(a, b, es, et) for a, b in zip(s.args, t.args))


def _alpha(f, g, ef, eg, depth) -> bool:
    tf = type(f)
    if tf is not type(g):
        return False
    if tf in (Top, Bot):
        return True
    if tf is Eq:
        return _alpha_term(f.lhs, g.lhs, ef, eg) and _alpha_term(f.rhs, g.rhs, ef, eg)
    if tf is Atom:
        return (
            f.pred == g.pred
            and len(f.args) == len(g.args)
            and all(_alpha_term(a, b, ef, eg) for a, b in zip(f.args, g.args))
        )
    if tf in (Exists, Forall):
        return _alpha(
            f.body, g.body, {**ef, f.var: depth}, {**eg, g.var: depth}, depth + 1
        )
    kf, kg = children(f), children(g)
    return len(kf) == len(kg) and all(
        _alpha(a, b, ef, eg, depth) for a, b in zip(kf, kg)
    )


# ---------------------------------------------------------------------------
# signatures

RESERVED = frozenset({"=", "true", "false", "exists", "forall", "bottom"})
_SYMBOL = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Signature:
    functions: Mapping[str, int]
    predicates: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "functions", MappingProxyType(dict(self.functions)))
        object.__setattr__(self, "predicates", MappingProxyType(dict(self.predicates)))
        for name, arity in [*self.functions.items(), *self.predicates.items()]:
            if name in RESERVED or not _SYMBOL.match(name):
                raise SignatureError(f"illegal symbol name {name!r}")
            if not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"illegal arity {arity!r} for {name}")
        both = self.functions.keys() & self.predicates.keys()
        if both:
            raise SignatureError(
                f"symbols used both as function and predicate: {sorted(both)}"
            )
        if not self.constants:
            raise SignatureError("a signature needs at least one constant")

    @property
    def constants(self) -> tuple:
        return tuple(sorted(n for n, a in self.functions.items() if a == 0))

    @property
    def constants_only(self) -> bool:
        return all(a == 0 for a in self.functions.values())

    def merge(self, other: "Signature") -> "Signature":
        funcs = dict(self.functions)
        preds = dict(self.predicates)
        for name, arity in other.functions.items():
            if funcs.get(name, arity) != arity:
                raise SignatureError(f"arity clash for {name}")
            funcs[name] = arity
        for name, arity in other.predicates.items():
            if preds.get(name, arity) != arity:
                raise SignatureError(f"arity clash for {name}")
            preds[name] = arity
        return Signature(funcs, preds)

    def check(self, *objs) -> None:
        """Raise :class:`SignatureError` if any symbol is unknown or misused."""
        for kind, name, arity in _symbols(objs):
            table = self.functions if kind == "f" else self.predicates
            if name not in table:
                what = "function" if kind == "f" else "predicate"
                raise SignatureError(f"unknown {what} symbol {name}/{arity}")
            if table[name] != arity:
                raise SignatureError(
                    f"{name} has arity {table[name]}, used with {arity} arguments"
                )

    @classmethod
    def infer(cls, *objs, base: "Signature | None" = None) -> "Signature":
        funcs = dict(base.functions) if base else {}
        preds = dict(base.predicates) if base else {}
        for kind, name, arity in _symbols(objs):
            table = funcs if kind == "f" else preds
            if table.setdefault(name, arity) != arity:
                raise SignatureError(
                    f"{name} used with arities {table[name]} and {arity}"
                )
        if not any(a == 0 for a in funcs.values()):
            for cand in itertools.chain("abcd", (f"c{i}" for i in itertools.count())):
                if cand not in preds and cand not in funcs:
                    funcs[cand] = 0
                    break
        return cls(funcs, preds)

    def __str__(self) -> str:
        funcs = ", ".join(f"{n}/{a}" for n, a in sorted(self.functions.items()))
        preds = ", ".join(f"{n}/{a}" for n, a in sorted(self.predicates.items()))
        return f"{funcs}; {preds}" if preds else funcs


def _symbols(objs) -> Iterator[tuple]:
    for obj in objs:
        if obj is None:
            continue
        if type(obj) in (Var, App):
            yield from _term_symbols(obj)
        elif type(obj) in (Top, Bot, Eq, Atom, Not, And, Or, Implies, Iff, Exists, Forall):
            yield from _formula_symbols(obj)
        elif hasattr(obj, "iter_terms"):
            for t in obj.iter_terms():
                yield from _term_symbols(t)
        else:
            yield from _symbols(obj)


def _term_symbols(t) -> Iterator[tuple]:
    if type(t) is App:
        yield ("f", t.fn, len(t.args))
        for a in t.args:
            yield from _term_symbols(a)


def _formula_symbols(f) -> Iterator[tuple]:
    t = type(f)
    if t is Eq:
        yield from _term_symbols(f.lhs)
        yield from _term_symbols(f.rhs)
    elif t is Atom:
        yield ("p", f.pred, len(f.args))
        for a in f.args:
            yield from _term_symbols(a)
    else:
        for c in children(f):
            yield from _formula_symbols(c)


class FreshVars:
    """Generator of variables ``V0, V1, ...`` never handed out twice and never
    equal to a name in ``avoid``.  Not thread-safe; pass one per computation."""

    def __init__(self, avoid=(), prefix: str = "V"):
        self.prefix = prefix
        self.used = {v.name if isinstance(v, Var) else str(v) for v in avoid}
        self.counter = 0

    def reserve(self, variables) -> None:
        self.used.update(v.name for v in variables)

    def __call__(self) -> Var:
        while True:
            name = f"{self.prefix}{self.counter}"
            self.counter += 1
            if name not in self.used:
                self.used.add(name)
                return Var(name)
