"""Finite-model ground truth for the symbolic procedures.

Models are Herbrand-style: the universe is a finite set of ground terms and
every function symbol is interpreted by term construction, so equality is
syntactic identity.  With constants only this is a model of the free
equality axioms.  With function symbols the universe is cut at a depth and
the oracle can only refute.

For a query the oracle computes its provenance relation: the set of pairs
(valuation of the free variables, one ground atom per atom position) under
which the query holds when each position is fed exactly that atom.  Answer
sets are monotone in the multiinterpretation, so two queries have the same
answers under every multiinterpretation exactly when these relations agree,
and one is below the other exactly when its relation is contained in the
other's.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .errors import ArityMismatch, Inconsistent, NotApplicable
from .solver import canonicalize, form_leq, solved
from .subst import Substitution, equivalent_subst, restrict
from .terms import (
    And,
    App,
    Atom,
    Bot,
    Eq,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    Signature,
    Top,
    Var,
    _free,
    atoms_of,
    bound_vars,
    card,
    diff_set,
    subst_term,
    term_vars,
)

__all__ = [
    "CONFIRMED",
    "CONFIRMED_AT_DEPTH",
    "REFUTED",
    "INCONCLUSIVE",
    "Report",
    "FiniteModel",
    "herbrand_model",
    "fresh_constant_names",
    "valuations",
    "solutions",
    "eval_formula",
    "check_instances",
    "check_equiv",
    "check_leq",
    "disjunction_solutions",
    "check_disjunction_equiv",
    "disjunction_strictly_below",
    "enumerate_generalizations",
    "kernel_by_search",
    "diff_set",
    "member_exact",
]

CONFIRMED = "confirmed"
CONFIRMED_AT_DEPTH = "confirmed-at-depth"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Report:
    verdict: str
    witness: dict | None = None
    enumerated_count: int = 0
    elapsed_ms: float = 0.0

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        out["enumerated_count"] = self.enumerated_count
        out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class FiniteModel:
    universe: tuple
    relevant_vars: tuple = ()
    complete: bool = True  # False when the universe was cut by a size cap
    constants_only: bool = True

    def __post_init__(self):
        if not self.universe:
            raise ValueError("a model needs a nonempty universe")

    @property
    def nontrivial(self) -> bool:
        return len(self.universe) >= 2

    def with_vars(self, variables) -> "FiniteModel":
        return FiniteModel(
            self.universe, tuple(sorted(set(variables))), self.complete, self.constants_only
        )


def fresh_constant_names(count: int, taken) -> list:
    out, i = [], 0
    taken = set(taken)
    while len(out) < count:
        name = f"c{i}"
        i += 1
        if name not in taken:
            out.append(name)
    return out


def herbrand_model(sig: Signature, depth: int = 0, fresh: int = 0,
                   relevant_vars=(), max_size: int = 400) -> FiniteModel:
    """Ground terms of depth at most ``depth`` over ``sig`` plus ``fresh``
    new constants."""
    taken = set(sig.functions) | set(sig.predicates)
    consts = [App(c) for c in sig.constants]
    consts += [App(c) for c in fresh_constant_names(fresh, taken)]
    funcs = sorted((f, a) for f, a in sig.functions.items() if a > 0)
    universe = list(dict.fromkeys(consts))
    complete = True
    layer = list(universe)
    for _ in range(depth if funcs else 0):
        new = []
        seen = set(universe)
        for f, a in funcs:
            for args in itertools.product(universe, repeat=a):
                if not any(t in layer for t in args):
                    continue
                t = App(f, args)
                if t not in seen:
                    seen.add(t)
                    new.append(t)
                    if len(universe) + len(new) >= max_size:
                        complete = False
                        break
            if not complete:
                break
        universe += new
        layer = new
        if not complete:
            break
    return FiniteModel(tuple(universe), tuple(sorted(set(relevant_vars))), complete, not funcs)


def valuations(model: FiniteModel, variables=None):
    variables = tuple(sorted(model.relevant_vars if variables is None else variables))
    for values in itertools.product(model.universe, repeat=len(variables)):
        yield dict(zip(variables, values))


def _key(h: dict) -> tuple:
    return tuple(sorted(h.items(), key=lambda b: b[0].sort_key))


# ---------------------------------------------------------------------------
# direct evaluation


def _ground(t, h):
    return subst_term(t, h)


def _ground_atom(a: Atom, h) -> Atom:
    return Atom(a.pred, tuple(_ground(t, h) for t in a.args))


def _sat(q, multi, offset: int, h: dict, universe) -> bool:
    t = type(q)
    if t is Top:
        return True
    if t is Bot:
        return False
    if t is Eq:
        return _ground(q.lhs, h) == _ground(q.rhs, h)
    if t is Atom:
        return _ground_atom(q, h) in multi[offset]
    if t is And:
        for c in q.items:
            if not _sat(c, multi, offset, h, universe):
                return False
            offset += card(c)
        return True
    if t is Exists:
        if q.var not in _free(q.body):
            return _sat(q.body, multi, offset, h, universe)
        return any(_sat(q.body, multi, offset, {**h, q.var: d}, universe) for d in universe)
    raise TypeError("queries only")


def solutions(q, multi, model: FiniteModel, relevant_vars=None) -> frozenset:
    """Valuations (as sorted binding tuples) satisfying ``q`` when the i-th
    atom reads the i-th interpretation of ``multi``."""
    multi = tuple(frozenset(i) for i in multi)
    if len(multi) != card(q):
        raise ArityMismatch(f"query has {card(q)} atoms, got {len(multi)} interpretations")
    rv = model.relevant_vars if relevant_vars is None else tuple(sorted(relevant_vars))
    if not _free(q) <= set(rv):
        raise ValueError("relevant variables must cover the free variables")
    return frozenset(
        _key(h) for h in valuations(model, rv) if _sat(q, multi, 0, h, model.universe)
    )


def eval_formula(f, interp, h: dict, model: FiniteModel) -> bool:
    """Truth of an arbitrary formula; ``interp`` is a set of ground atoms."""
    t = type(f)
    if t is Top:
        return True
    if t is Bot:
        return False
    if t is Eq:
        return _ground(f.lhs, h) == _ground(f.rhs, h)
    if t is Atom:
        return _ground_atom(f, h) in interp
    if t is Not:
        return not eval_formula(f.body, interp, h, model)
    if t is And:
        return all(eval_formula(c, interp, h, model) for c in f.items)
    if t is Or:
        return any(eval_formula(c, interp, h, model) for c in f.items)
    if t is Implies:
        return not eval_formula(f.lhs, interp, h, model) or eval_formula(f.rhs, interp, h, model)
    if t is Iff:
        return eval_formula(f.lhs, interp, h, model) == eval_formula(f.rhs, interp, h, model)
    if t is Exists:
        return any(eval_formula(f.body, interp, {**h, f.var: d}, model) for d in model.universe)
    if t is Forall:
        return all(eval_formula(f.body, interp, {**h, f.var: d}, model) for d in model.universe)
    raise TypeError(f"not a formula: {f!r}")


def valid_in(f, interp, model: FiniteModel) -> bool:
    """Truth of the universal closure of ``f``."""
    return all(eval_formula(f, interp, h, model) for h in valuations(model, _free(f)))


def check_instances(sigma: Substitution, model: FiniteModel, relevant_vars=None) -> frozenset:
    """Valuations ``h`` with ``h(x) = g(sigma(x))`` for some ``g``."""
    if sigma.bottom:
        raise NotApplicable(message="the bottom substitution has no instances")
    rv = tuple(sorted(model.relevant_vars if relevant_vars is None else relevant_vars))
    if not sigma.dom <= set(rv):
        raise ValueError("relevant variables must cover the domain")
    uni = set(model.universe)
    images = set()
    for g in valuations(model, sigma.range):
        img = {x: subst_term(t, g) for x, t in sigma.bindings}
        if all(v in uni for v in img.values()):
            images.add(_key(img))
    rest = [v for v in rv if v not in sigma.dom]
    out = set()
    for img in images:
        for values in itertools.product(model.universe, repeat=len(rest)):
            out.add(_key({**dict(img), **dict(zip(rest, values))}))
    return frozenset(out)


# ---------------------------------------------------------------------------
# provenance relations


class _Rel:
    __slots__ = ("vars", "rows")

    def __init__(self, variables, rows):
        self.vars = tuple(variables)
        self.rows = rows  # set of (values, atoms)


def _assignments(variables, universe):
    return itertools.product(universe, repeat=len(variables))


def _relation(q, universe, budget: list) -> _Rel:
    t = type(q)
    if t is Top:
        return _Rel((), {((), ())})
    if t is Bot:
        return _Rel((), set())
    if t is Eq:
        return _eq_relation(q, universe, budget)
    if t is Atom:
        vs = tuple(sorted(_free(q)))
        rows = set()
        for values in _assignments(vs, universe):
            h = dict(zip(vs, values))
            budget[0] += 1
            rows.add((values, (_ground_atom(q, h),)))
        return _Rel(vs, rows)
    if t is And:
        rel = _relation(q.items[0], universe, budget)
        for c in q.items[1:]:
            rel = _join(rel, _relation(c, universe, budget), budget)
        return rel
    if t is Exists:
        rel = _relation(q.body, universe, budget)
        if q.var not in rel.vars:
            return rel
        i = rel.vars.index(q.var)
        rows = {(vals[:i] + vals[i + 1 :], atoms) for vals, atoms in rel.rows}
        return _Rel(rel.vars[:i] + rel.vars[i + 1 :], rows)
    raise TypeError("queries only")


def _eq_relation(q, universe, budget: list) -> _Rel:
    """Enumerate the side with fewer variables; the other side's variables
    are then fixed by matching against the ground value."""
    s, t = q.lhs, q.rhs
    if len(term_vars(s)) > len(term_vars(t)):
        s, t = t, s
    vs = tuple(sorted(_free(q)))
    src = tuple(sorted(term_vars(s)))
    members = set(universe)
    rows = set()
    for values in _assignments(src, universe):
        budget[0] += 1
        h = dict(zip(src, values))
        if _match(t, _ground(s, h), h) and all(h[v] in members for v in vs):
            rows.add((tuple(h[v] for v in vs), ()))
    return _Rel(vs, rows)


def _match(t, g, h: dict) -> bool:
    """Extend ``h`` so that ``t`` grounds to ``g``."""
    if type(t) is Var:
        if t in h:
            return h[t] == g
        h[t] = g
        return True
    if t.fn != g.fn or len(t.args) != len(g.args):
        return False
    return all(_match(a, b, h) for a, b in zip(t.args, g.args))


def _join(a: _Rel, b: _Rel, budget: list) -> _Rel:
    shared = [v for v in a.vars if v in b.vars]
    out_vars = tuple(sorted(set(a.vars) | set(b.vars)))
    ia = [a.vars.index(v) for v in shared]
    ib = [b.vars.index(v) for v in shared]
    index = {}
    for vals, atoms in b.rows:
        index.setdefault(tuple(vals[i] for i in ib), []).append((vals, atoms))
    pos = []
    for v in out_vars:
        pos.append((0, a.vars.index(v)) if v in a.vars else (1, b.vars.index(v)))
    rows = set()
    for va, aa in a.rows:
        for vb, ab in index.get(tuple(va[i] for i in ia), ()):
            budget[0] += 1
            both = (va, vb)
            rows.add((tuple(both[s][i] for s, i in pos), aa + ab))
    return _Rel(out_vars, rows)


def _extend(rel: _Rel, variables, universe) -> set:
    """Rows over ``variables`` (a sorted superset of the relation's)."""
    missing = [v for v in variables if v not in rel.vars]
    out = set()
    for vals, atoms in rel.rows:
        h = dict(zip(rel.vars, vals))
        for extra in _assignments(missing, universe):
            g = {**h, **dict(zip(missing, extra))}
            out.add((tuple(g[v] for v in variables), atoms))
    return out


def _multi_from_row(atoms) -> tuple:
    return tuple(frozenset((a,)) for a in atoms)


# ---------------------------------------------------------------------------
# exact membership by unification (an independent route for function symbols)


def _walk(t, s):
    while type(t) is Var and t in s:
        t = s[t]
    return t


def _occurs(x, t, s) -> bool:
    t = _walk(t, s)
    if type(t) is Var:
        return t == x
    return any(_occurs(x, a, s) for a in t.args)


def _unify(pairs) -> bool:
    s = {}
    stack = list(pairs)
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, s), _walk(b, s)
        if a == b:
            continue
        if type(a) is Var:
            if _occurs(a, b, s):
                return False
            s[a] = b
        elif type(b) is Var:
            if _occurs(b, a, s):
                return False
            s[b] = a
        elif a.fn != b.fn or len(a.args) != len(b.args):
            return False
        else:
            stack.extend(zip(a.args, b.args))
    return True


def member_exact(q, h: dict, atoms) -> bool:
    """Does ``q`` hold under ``h`` when atom position i is fed ``atoms[i]``
    alone, over the full (unbounded) Herbrand universe?"""
    counter = itertools.count()
    pairs = []
    slots = list(atoms)
    ok = True

    def walk(f, env):
        nonlocal ok
        t = type(f)
        if t is Bot:
            ok = False
        elif t is Eq:
            pairs.append((subst_term(f.lhs, env), subst_term(f.rhs, env)))
        elif t is Atom:
            g = slots.pop(0)
            if g.pred != f.pred or len(g.args) != len(f.args):
                ok = False
            else:
                pairs.extend(zip((subst_term(a, env) for a in f.args), g.args))
        elif t is And:
            for c in f.items:
                walk(c, env)
        elif t is Exists:
            walk(f.body, {**env, f.var: Var(f"#{next(counter)}")})

    walk(q, dict(h))
    return ok and _unify(pairs)


# ---------------------------------------------------------------------------
# equivalence and order checks


def _signature_for(*qs, sig=None) -> Signature:
    return Signature.infer(*qs, base=sig)


def _fresh_count(*qs) -> int:
    free, bound = set(), set()
    for q in qs:
        free |= _free(q)
        bound |= bound_vars(q)
    return len(free) + len(bound) + 1


def _witness(h_vars, row, side: str) -> dict:
    from .syntax import print_formula, print_term

    vals, atoms = row
    return {
        "valuation": {v.name: print_term(t) for v, t in zip(h_vars, vals)},
        "multiinterpretation": [[print_formula(a)] for a in atoms],
        "holds_in": side,
    }


def _compare(q1, q2, mode: str, sig=None, depth: int = 3, fresh_constants=None,
             max_universe: int = 400, cross_check: bool = False,
             max_interps: int = 4096) -> Report:
    start = time.perf_counter()
    # Queries with different atom counts only agree when both have no answers.
    same_card = card(q1) == card(q2)
    sig = _signature_for(q1, q2, sig=sig)
    k = _fresh_count(q1, q2) if fresh_constants is None else fresh_constants
    model = herbrand_model(sig, depth if not sig.constants_only else 0, k,
                           max_size=max_universe)
    if len(model.universe) < 2:
        model = herbrand_model(sig, depth, k + 1, max_size=max_universe)
    universe = model.universe
    budget = [0]
    xs = tuple(sorted(_free(q1) | _free(q2)))
    r1 = _extend(_relation(q1, universe, budget), xs, universe)
    r2 = _extend(_relation(q2, universe, budget), xs, universe)
    if mode == "equiv":
        candidates = [(row, "left") for row in r1 - r2] + [(row, "right") for row in r2 - r1]
    else:
        candidates = [(row, "left") for row in r1 - r2]
    exact = model.constants_only
    for row, side in sorted(candidates, key=lambda c: repr(c[0])):
        h = dict(zip(xs, row[0]))
        if not same_card:
            in1 = side == "left" and _recheck(q1, h, row[1], exact, universe)
            in2 = side == "right" and _recheck(q2, h, row[1], exact, universe)
        elif exact:
            multi = _multi_from_row(row[1])
            in1 = _sat(q1, multi, 0, h, universe)
            in2 = _sat(q2, multi, 0, h, universe)
        else:
            in1 = member_exact(q1, h, row[1])
            in2 = member_exact(q2, h, row[1])
        if (mode == "equiv" and in1 != in2) or (mode == "leq" and in1 and not in2):
            return Report(REFUTED, _witness(xs, row, side), budget[0],
                          (time.perf_counter() - start) * 1000)
    if exact:
        if cross_check:
            _cross_check(q1, q2, mode, model, xs, max_interps)
        verdict = CONFIRMED if not candidates else INCONCLUSIVE
    else:
        verdict = CONFIRMED_AT_DEPTH if model.complete else INCONCLUSIVE
    return Report(verdict, None, budget[0], (time.perf_counter() - start) * 1000)


def _recheck(q, h, atoms, exact, universe) -> bool:
    if exact:
        return _sat(q, _multi_from_row(atoms), 0, h, universe)
    return member_exact(q, h, atoms)


def _exists_depth(q) -> int:
    if type(q) is Exists:
        return (q.var in _free(q.body)) + _exists_depth(q.body)
    if type(q) is And:
        return max(_exists_depth(c) for c in q.items)
    return 0


def _cross_check(q1, q2, mode, model, xs, max_interps, max_eval_cost=500_000):
    """Enumerate every multiinterpretation over the predicates of both
    queries when there are few enough, and compare answer sets directly."""
    preds = {}
    for a in atoms_of(q1) + atoms_of(q2):
        preds[a.pred] = len(a.args)
    ground = [
        Atom(p, args)
        for p, n in sorted(preds.items())
        for args in itertools.product(model.universe, repeat=n)
    ]
    n = max(card(q1), card(q2))
    if 2 ** (len(ground) * n) > max_interps:
        return
    nesting = max(_exists_depth(q1), _exists_depth(q2))
    cost = 2 ** (len(ground) * n) * len(model.universe) ** (len(xs) + nesting)
    if cost > max_eval_cost:
        return
    subsets = [
        frozenset(c) for r in range(len(ground) + 1) for c in itertools.combinations(ground, r)
    ]
    m = model.with_vars(xs)
    if card(q1) != card(q2):
        for side in (q1, q2) if mode == "equiv" else (q1,):
            if any(solutions(side, multi, m) for multi in itertools.product(subsets, repeat=card(side))):
                raise AssertionError("provenance and enumeration routes disagree")
        return
    for multi in itertools.product(subsets, repeat=n):
        a = solutions(q1, multi, m)
        b = solutions(q2, multi, m)
        ok = a == b if mode == "equiv" else a <= b
        if not ok:
            raise AssertionError("provenance and enumeration routes disagree")


def check_equiv(q1, q2, **kw) -> Report:
    """Semantic equivalence over a finite Herbrand model with fresh constants."""
    return _compare(q1, q2, "equiv", **kw)


def check_leq(q1, q2, **kw) -> Report:
    """Semantic ``q1 ⪯ q2``: every answer of ``q1`` is an answer of ``q2``."""
    return _compare(q1, q2, "leq", **kw)


# ---------------------------------------------------------------------------
# disjunctions of equation formulas


def disjunction_solutions(es, model: FiniteModel, relevant_vars) -> frozenset:
    out = set()
    for e in es:
        out |= solutions(e, (), model, relevant_vars)
    return frozenset(out)


def check_disjunction_equiv(es, e, sig: Signature, depth: int = 3, fresh: int = 0,
                            max_universe: int = 400) -> Report:
    start = time.perf_counter()
    model = herbrand_model(sig, depth, fresh, max_size=max_universe)
    xs = set(_free(e))
    for d in es:
        xs |= _free(d)
    left = disjunction_solutions(es, model, xs)
    right = solutions(e, (), model, xs)
    count = len(model.universe) ** len(xs)
    elapsed = (time.perf_counter() - start) * 1000
    if left != right:
        diff = sorted(left ^ right, key=repr)[0]
        from .syntax import print_term

        w = {"valuation": {v.name: print_term(t) for v, t in diff}}
        return Report(REFUTED, w, count, elapsed)
    if model.constants_only:
        return Report(CONFIRMED, None, count, elapsed)
    return Report(CONFIRMED_AT_DEPTH if model.complete else INCONCLUSIVE, None, count, elapsed)


def disjunction_strictly_below(es, e, sig: Signature | None = None, fresh=None) -> bool:
    """``e1 | ... | en`` implies ``e`` and not conversely, judged over a
    constants-only model with enough fresh constants."""
    sig = _signature_for(e, *es, sig=sig)
    if not sig.constants_only:
        raise ValueError("exact disjunction checks need a constants-only signature")
    k = _fresh_count(e, *es) if fresh is None else fresh
    model = herbrand_model(sig, 0, k)
    xs = set(_free(e))
    for d in es:
        xs |= _free(d)
    left = disjunction_solutions(es, model, xs)
    right = solutions(e, (), model, xs)
    return left < right


# ---------------------------------------------------------------------------
# bounded enumeration of generalizations


def _term_options(t, cuts_allowed: bool = True):
    """Ways to abstract ``t``: keep it, cut it to a hole, or descend."""
    yield ("keep", t)
    yield ("hole", t)
    if type(t) is App and t.args:
        child_opts = [list(_term_options(a)) for a in t.args]
        for combo in itertools.product(*child_opts):
            if all(c[0] == "keep" for c in combo):
                continue
            yield ("node", t.fn, combo)


def _holes(opt, out: list):
    if opt[0] == "hole":
        out.append(opt[1])
    elif opt[0] == "node":
        for c in opt[2]:
            _holes(c, out)


def _fill(opt, labels: iter):
    if opt[0] == "keep":
        return opt[1]
    if opt[0] == "hole":
        return next(labels)
    return App(opt[1], tuple(_fill(c, labels) for c in opt[2]))


def _partitions(items):
    """Set partitions of ``items`` (a list of indices), as block-id lists."""
    n = len(items)
    if n == 0:
        yield []
        return

    def rec(i, blocks, acc):
        if i == n:
            yield list(acc)
            return
        for b in range(blocks + 1):
            acc.append(b)
            yield from rec(i + 1, max(blocks, b + 1), acc)
            acc.pop()

    yield from rec(0, 0, [])


def enumerate_generalizations(e, size_bound: int | None = None, max_candidates: int = 200_000):
    """All ``e'`` with ``e ⪯ e'``, one canonical solved form per class.

    A generalization corresponds to a substitution ``theta`` over the
    variables of ``e`` that has ``sigma`` (the substitution of ``e``) as an
    instance; such ``theta`` arise by cutting subterms of ``sigma`` to
    variables, with equal labels only on equal subterms.
    """
    from .lattice import to_eformula, to_substitution

    s = solved(e)
    if s.is_false:
        raise Inconsistent("generalizations are enumerated for consistent formulas")
    sigma = to_substitution(s.to_formula())
    if size_bound is not None:
        from .terms import term_size

        total = sum(term_size(t) for _, t in sigma.bindings)
        if total > size_bound:
            raise ValueError(f"formula exceeds size bound {size_bound}")
    keys = [x for x, _ in sigma.bindings]
    per_var = [list(_term_options(t)) for _, t in sigma.bindings]
    avoid = {v.name for v in sigma.dom | sigma.range}
    seen = {}
    produced = 0
    for choice in itertools.product(*per_var):
        holes = []
        for opt in choice:
            _holes(opt, holes)
        groups = {}
        for i, h in enumerate(holes):
            groups.setdefault(h, []).append(i)
        group_lists = list(groups.values())
        for parts in itertools.product(*(list(_partitions(g)) for g in group_lists)):
            label_of = [None] * len(holes)
            n = 0
            for g, blocks in zip(group_lists, parts):
                base = n
                for i, b in zip(g, blocks):
                    label_of[i] = base + b
                n = base + (max(blocks) + 1 if blocks else 0)
            k = 0
            pool = []
            while len(pool) < n:
                k += 1
                if f"H{k}" not in avoid:
                    pool.append(Var(f"H{k}"))
            labels = iter(pool[i] for i in label_of)
            theta = Substitution.of({x: _fill(opt, labels) for x, opt in zip(keys, choice)})
            produced += 1
            if produced > max_candidates:
                raise RuntimeError("generalization enumeration exceeded its candidate cap")
            form = canonicalize(solved(to_eformula(theta)))
            if form not in seen:
                seen[form] = theta
    out = [f for f in seen if form_leq(s, f)]
    return out


# ---------------------------------------------------------------------------
# exhaustive kernel


def kernel_by_search(sigma: Substitution) -> list:
    """Every smallest ``X`` with ``sigma`` restricted to ``X`` equivalent to
    ``sigma``, found by trying subsets of the domain in order of size."""
    if sigma.bottom:
        raise NotApplicable(message="the bottom substitution has no kernel")
    dom = sorted(sigma.dom)
    for k in range(len(dom) + 1):
        hits = [
            frozenset(xs)
            for xs in itertools.combinations(dom, k)
            if equivalent_subst(restrict(sigma, xs), sigma)
        ]
        if hits:
            return hits
    raise AssertionError("the full domain always qualifies")
