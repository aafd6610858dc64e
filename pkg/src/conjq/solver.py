"""Transformation of queries to solved form and the decisions built on it.

The rewriting engine applies twelve elementary steps under a fixed strategy:
the highest-priority step class present anywhere in the query wins, ties go
to the innermost-leftmost position.  Conjunctions are kept flat (n-ary), so a
rewrite that produces a conjunction inside a conjunction is spliced in place.

Each node's applicable steps are summarised once and cached by identity, so a
rewrite only re-examines the spine from the root to the rewritten node.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .errors import AlignmentError, NotAQuery, StepBudgetExceeded
from .terms import (
    FALSE,
    TRUE,
    And,
    App,
    Atom,
    Bot,
    Eq,
    Exists,
    FreshVars,
    Top,
    Var,
    _free,
    all_vars,
    card,
    conj,
    diff_set,
    exists,
    is_query,
    replace,
    subst_term,
    term_vars,
)

DEFAULT_STEP_BUDGET = 100_000

# step number -> priority class (lower wins)
_CLASS = {12: 0, 2: 1, 3: 1, 4: 2, 1: 3, 7: 4, 5: 5, 6: 5, 9: 6, 8: 7, 10: 8, 11: 9}
_LAST = 1 << 30  # sorts a node after all of its descendants
_HERE = (_LAST, ())


def _cons(path: tuple) -> tuple:
    out = _HERE
    for i in reversed(path):
        out = (i, out)
    return out


def _uncons(pos: tuple) -> tuple:
    out = []
    while pos[0] != _LAST:
        out.append(pos[0])
        pos = pos[1]
    return tuple(out)


# ---------------------------------------------------------------------------
# solved forms


@dataclass(frozen=True)
class SolvedForm:
    """``exists bound . x1 = s1 & ... & xn = sn & atoms`` or TRUE/FALSE.

    TRUE is the form with nothing in it; FALSE sets ``false``.
    """

    bound: tuple = ()
    eqns: tuple = ()
    atoms: tuple = ()
    false: bool = False

    @property
    def is_false(self) -> bool:
        return self.false

    @property
    def is_true(self) -> bool:
        return not self.false and not self.eqns and not self.atoms and not self.bound

    @property
    def elim(self) -> tuple:
        return tuple(x for x, _ in self.eqns)

    @property
    def vars(self) -> frozenset:
        return _free(self.to_formula())

    @property
    def params(self) -> tuple:
        return tuple(sorted(self.vars - set(self.elim)))

    @property
    def card(self) -> int:
        return len(self.atoms)

    def rhs(self, x: Var):
        for y, t in self.eqns:
            if y == x:
                return t
        raise KeyError(x)

    def to_formula(self):
        if self.false:
            return FALSE
        body = conj([Eq(x, s) for x, s in self.eqns] + list(self.atoms))
        return exists(self.bound, body)

    def to_text(self) -> str:
        from .syntax import print_formula

        return print_formula(self.to_formula())

    def __str__(self) -> str:
        return self.to_text()

    @classmethod
    def from_formula(cls, f) -> "SolvedForm":
        """Read the shape of a solved form; invariants are not checked here."""
        shape = _shape(f)
        if shape is None:
            raise NotAQuery("formula does not have the shape of a solved form")
        return shape


TRUE_FORM = SolvedForm()
FALSE_FORM = SolvedForm(false=True)


def _flatten_items(f) -> list:
    if type(f) is And:
        out = []
        for c in f.items:
            out.extend(_flatten_items(c))
        return out
    return [f]


def _shape(f):
    if type(f) is Top:
        return TRUE_FORM
    if type(f) is Bot:
        return FALSE_FORM
    bound = []
    while type(f) is Exists:
        bound.append(f.var)
        f = f.body
    items = _flatten_items(f)
    eqns, atoms = [], []
    for it in items:
        if type(it) is Eq and not atoms and type(it.lhs) is Var:
            eqns.append((it.lhs, it.rhs))
        elif type(it) is Atom:
            atoms.append(it)
        else:
            return None
    return SolvedForm(tuple(bound), tuple(eqns), tuple(atoms))


def check_solved(s: SolvedForm) -> bool:
    """The four solved-form conditions on an already shaped value."""
    if s.false or s.is_true:
        return True
    elim = s.elim
    if len(set(elim)) != len(elim) or len(set(s.bound)) != len(s.bound):
        return False
    if set(elim) & set(s.bound):
        return False
    used = set()
    for _, t in s.eqns:
        used |= term_vars(t)
        if type(t) is Var and t in s.bound:
            return False
    for a in s.atoms:
        used |= _free(a)
    if used & set(elim):
        return False
    return all(z in used for z in s.bound)


def is_solved_form(f) -> bool:
    if isinstance(f, SolvedForm):
        return check_solved(f)
    shape = _shape(f)
    return shape is not None and check_solved(shape)


# ---------------------------------------------------------------------------
# the rewriting engine


@dataclass(frozen=True)
class TraceStep:
    step: int
    path: tuple
    before: object
    after: object

    def to_text(self) -> str:
        from .syntax import print_formula

        at = "/" + "/".join(map(str, self.path))
        return (
            f"step={self.step} at={at} before={print_formula(self.before)} "
            f"after={print_formula(self.after)}"
        )


def trace_lines(trace) -> list:
    return [s.to_text() for s in trace]


def flatten(f):
    """Flatten nested conjunctions of a query; nothing else changes."""
    t = type(f)
    if t is And:
        return conj([c for c in _flatten_items(And(tuple(map(flatten, f.items))))])
    if t is Exists:
        return Exists(f.var, flatten(f.body))
    return f


def node_at(f, path):
    for i in path:
        f = f.items[i] if type(f) is And else f.body
    return f


def replace_at(f, path, new):
    """Put ``new`` at ``path``; a conjunction landing in a conjunction is
    spliced into it."""
    if not path:
        return new
    i, rest = path[0], path[1:]
    if type(f) is Exists:
        return Exists(f.var, replace_at(f.body, rest, new))
    child = replace_at(f.items[i], rest, new)
    mid = child.items if type(child) is And else (child,)
    return And(f.items[:i] + mid + f.items[i + 1 :])


def replay(q, trace):
    f = flatten(q)
    for s in trace:
        if node_at(f, s.path) != s.before:
            raise ValueError(f"trace does not match at {s.path}")
        f = replace_at(f, s.path, s.after)
    return f


class _Engine:
    def __init__(self, fresh: FreshVars):
        self.fresh = fresh
        self.cache = {}

    # analysis --------------------------------------------------------------

    def analyze(self, node, top: bool) -> dict:
        """Best candidate per step class in the subtree of ``node``.

        Positions are cons lists ``(i, (j, ... (_LAST, ())))``; comparing
        them as tuples gives post-order, so descendants precede ancestors.
        """
        key = (id(node), top)
        hit = self.cache.get(key)
        if hit is not None and hit[0] is node:
            return hit[1]
        best = {}
        t = type(node)
        if t is And:
            for i, c in enumerate(node.items):
                cb = self.analyze(c, True)
                for cls, (pos, step, data) in cb.items():
                    if cls not in best:
                        best[cls] = ((i, pos), step, data)
        elif t is Exists:
            for cls, (pos, step, data) in self.analyze(node.body, False).items():
                best[cls] = ((0, pos), step, data)
        if t is not Atom:
            for step, data in self._own(node):
                cls = _CLASS[step]
                if cls not in best:
                    best[cls] = (_HERE, step, data)
        if top:
            for step, path, data in self._chain(node):
                cls = _CLASS[step]
                pos = _cons(path)
                if cls not in best or pos < best[cls][0]:
                    best[cls] = (pos, step, data)
        self.cache[key] = (node, best)
        return best

    @staticmethod
    def _own(node) -> Iterator[tuple]:
        t = type(node)
        if t is Bot:
            yield 12, None
        elif t is Eq:
            s, u = node.lhs, node.rhs
            if type(s) is App and type(u) is App:
                if s.fn == u.fn and len(s.args) == len(u.args):
                    yield 1, None
                else:
                    yield 2, None
            elif type(s) is Var:
                if s == u:
                    yield 4, None
                elif s in term_vars(u):
                    yield 3, None
            elif type(u) is Var:
                yield 7, None
        elif t is And:
            items = node.items
            for i in range(len(items) - 1):
                if type(items[i]) is Atom and type(items[i + 1]) is Eq:
                    yield 10, i
                    break
            for i, c in enumerate(items):
                if type(c) is Top:
                    yield 11, i
                    break
            for i, c in enumerate(items):
                if type(c) is Exists:
                    yield 9, i
                    break
        elif t is Exists:
            if node.var not in _free(node.body):
                yield 8, None

    @staticmethod
    def _chain(node) -> list:
        """Context-dependent equation steps for the chain of quantifiers
        starting at ``node`` over a conjunction of equations and atoms."""
        ys = set()
        path = ()
        core = node
        while type(core) is Exists:
            ys.add(core.var)
            core = core.body
            path += (0,)
        if type(core) is Eq:
            entries = [(None, core)]
            counts = None
        elif type(core) is And and all(type(c) in (Eq, Atom) for c in core.items):
            entries = [(i, c) for i, c in enumerate(core.items) if type(c) is Eq]
            counts = Counter()
            for c in core.items:
                counts.update(_free(c))
        else:
            return []
        found = {}
        for i, e in entries:
            if len(found) == 2:
                break
            s, u = e.lhs, e.rhs
            if type(s) is not Var or s == u:
                continue
            eq_path = path if i is None else path + (i,)
            if 7 not in found and type(u) is Var and s not in ys and u in ys:
                found[7] = (7, eq_path, None)
            if 5 not in found and s not in term_vars(u):
                if s in ys:
                    found[5] = (6, eq_path, i)
                elif counts is not None and counts[s] >= 2:
                    found[5] = (5, eq_path, i)
        return list(found.values())

    # rewriting -------------------------------------------------------------

    def pick(self, root):
        if type(root) is Bot:
            return None
        best = self.analyze(root, True)
        if not best:
            return None
        pos, step, data = best[min(best)]
        return _uncons(pos), step, data

    def rewrite(self, root, cand):
        path, step, data = cand
        if step == 12:
            return (), root, FALSE
        if step in (5, 6):
            i = data
            core_path = path if i is None else path[:-1]
            core = node_at(root, core_path)
            if i is None:
                return core_path, core, TRUE
            eq = core.items[i]
            sub = {eq.lhs: eq.rhs}
            items = []
            for j, c in enumerate(core.items):
                if j == i:
                    items.append(eq if step == 5 else TRUE)
                elif type(c) is Eq:
                    items.append(Eq(subst_term(c.lhs, sub), subst_term(c.rhs, sub)))
                else:
                    items.append(Atom(c.pred, tuple(subst_term(a, sub) for a in c.args)))
            return core_path, core, And(tuple(items))
        node = node_at(root, path)
        if step in (2, 3):
            return path, node, FALSE
        if step == 4:
            return path, node, TRUE
        if step == 1:
            pairs = [Eq(a, b) for a, b in zip(node.lhs.args, node.rhs.args)]
            return path, node, conj(pairs)
        if step == 7:
            return path, node, Eq(node.rhs, node.lhs)
        if step == 8:
            return path, node, node.body
        items = node.items
        if step == 10:
            i = data
            swapped = items[:i] + (items[i + 1], items[i]) + items[i + 2 :]
            return path, node, And(swapped)
        if step == 11:
            rest = items[:data] + items[data + 1 :]
            return path, node, conj(rest)
        if step == 9:
            return path, node, self._pull(node, data)
        raise AssertionError(step)

    def _pull(self, node, i):
        others = node.items[:i] + node.items[i + 1 :]
        blocked = set()
        for c in others:
            blocked |= _free(c)
        chain = []
        body = node.items[i]
        while type(body) is Exists:
            v = body.var
            if v in blocked:
                new = self.fresh()
                body = Exists(new, replace(body.body, [v], [new]))
                v = new
            chain.append(v)
            body = body.body
        mid = body.items if type(body) is And else (body,)
        return exists(chain, And(node.items[:i] + mid + node.items[i + 1 :]))


def solve(q, *, fresh: FreshVars | None = None, max_steps: int = DEFAULT_STEP_BUDGET,
          record: bool = True):
    """Return ``(solved_form, trace)`` for a query."""
    if not is_query(q):
        raise NotAQuery("solve expects a positive conjunctive query")
    if fresh is None:
        fresh = FreshVars(all_vars(q))
    else:
        fresh.reserve(all_vars(q))
    engine = _Engine(fresh)
    root = flatten(q)
    trace = []
    steps = 0
    while True:
        cand = engine.pick(root)
        if cand is None:
            break
        steps += 1
        if steps > max_steps:
            raise StepBudgetExceeded(f"no solved form within {max_steps} steps")
        path, before, after = engine.rewrite(root, cand)
        if record:
            trace.append(TraceStep(cand[1], path, before, after))
        root = replace_at(root, path, after)
    form = _shape(root)
    if form is None:
        raise AssertionError(f"solver stopped on a non-solved shape: {root!r}")
    return form, tuple(trace)


def solved(q, **kw) -> SolvedForm:
    """Solved form only, without recording a trace."""
    return solve(q, record=False, **kw)[0]


def is_consistent(q) -> bool:
    return not solved(q).is_false


# ---------------------------------------------------------------------------
# isomorphism and canonical forms


def _rename_form(s: SolvedForm, mapping) -> SolvedForm:
    """Simultaneously rename variables everywhere, left sides included."""
    if not mapping:
        return s
    return SolvedForm(
        tuple(mapping.get(z, z) for z in s.bound),
        tuple((mapping.get(x, x), subst_term(t, mapping)) for x, t in s.eqns),
        tuple(Atom(a.pred, tuple(subst_term(u, mapping) for u in a.args)) for a in s.atoms),
    )


def redirect(s: SolvedForm, x: Var) -> SolvedForm:
    """Turn ``x = v`` (``v`` a variable) into ``v = x``, swapping the two
    variables throughout."""
    t = s.rhs(x)
    if type(t) is not Var:
        raise ValueError(f"{x.name} is not bound to a variable")
    return _rename_form(s, {x: t, t: x})


def _term_order_vars(t, out: list, seen: set):
    if type(t) is Var:
        if t not in seen:
            seen.add(t)
            out.append(t)
    else:
        for a in t.args:
            _term_order_vars(a, out, seen)


def canonicalize(s: SolvedForm) -> SolvedForm:
    if s.false or s.is_true:
        return s
    params = set(s.params)
    classes = {}
    for x, t in s.eqns:
        if type(t) is Var and t in params:
            classes.setdefault(t, [t]).append(x)
    swap = {}
    for p, members in classes.items():
        top = max(members, key=lambda v: v.sort_key)
        if top != p:
            swap[p] = top
            swap[top] = p
    s = _rename_form(s, swap)
    eqns = tuple(sorted(s.eqns, key=lambda e: e[0].sort_key))
    order, seen = [], set()
    for _, t in eqns:
        _term_order_vars(t, order, seen)
    for a in s.atoms:
        for u in a.args:
            _term_order_vars(u, order, seen)
    bound = set(s.bound)
    ranked = [v for v in order if v in bound]
    ranked += sorted(bound - set(ranked))
    taken = {v.name for v in _free(s.to_formula())}
    mapping, n = {}, 0
    for z in ranked:
        n += 1
        while f"B{n}" in taken:
            n += 1
        mapping[z] = Var(f"B{n}")
    renamed = _rename_form(SolvedForm(s.bound, eqns, s.atoms), mapping)
    return SolvedForm(tuple(mapping[z] for z in ranked), renamed.eqns, renamed.atoms)


def canonical(q) -> SolvedForm:
    return canonicalize(solved(q))


def isomorphic(s1: SolvedForm, s2: SolvedForm) -> bool:
    return canonicalize(s1) == canonicalize(s2)


# ---------------------------------------------------------------------------
# equivalence and generality


def equivalent(q1, q2) -> bool:
    if card(q1) != card(q2):
        return False
    c1, c2 = canonical(q1), canonical(q2)
    if c1.false or c2.false:
        return c1.false and c2.false
    return c1 == c2


def more_general(q1, q2) -> bool:
    """Decide ``q1 ⪯ q2``.

    Atom counts are compared on the inputs, so an inconsistent query is
    below exactly the queries with as many atoms as it had before solving."""
    if card(q1) != card(q2):
        return False
    return form_leq(solved(q1), solved(q2))


def form_leq(s1: SolvedForm, s2: SolvedForm) -> bool:
    if s1.false:
        return True
    if s2.false:
        return False
    if s2.is_true:
        return True
    if s1.is_true:
        return False
    if len(s1.atoms) != len(s2.atoms):
        return False
    fresh = FreshVars(all_vars(s1.to_formula()) | all_vars(s2.to_formula()))
    s2 = _rename_form(s2, {z: fresh() for z in s2.bound})
    elim1 = set(s1.elim)
    for x, p in s2.eqns:
        if x in elim1:
            continue
        if type(p) is not Var or p not in elim1 or s1.rhs(p) != x:
            return False
        s1 = redirect(s1, p)
        elim1 = set(s1.elim)
    if not elim1 >= set(s2.elim) or not s1.vars >= s2.vars:
        return False
    pairs = set()
    for x, t in s2.eqns:
        pairs |= diff_set(s1.rhs(x), t)
    for a, b in zip(s1.atoms, s2.atoms):
        pairs |= diff_set(a, b)
    bound2 = set(s2.bound)
    image = {}
    for r, z in pairs:
        if type(z) is not Var:
            return False
        if z in bound2:
            if image.setdefault(z, r) != r:
                return False
        elif z in elim1:
            if r != s1.rhs(z):
                return False
        elif r != z:
            return False
    return True


def strictly_more_general(q1, q2) -> bool:
    return more_general(q1, q2) and not more_general(q2, q1)


def query_diff(s1: SolvedForm, s2: SolvedForm) -> frozenset:
    if s1.false or s2.false:
        raise AlignmentError("difference sets need consistent solved forms")
    if s1.elim != s2.elim:
        raise AlignmentError("eliminable variables differ")
    if len(s1.atoms) != len(s2.atoms):
        raise AlignmentError("atom counts differ")
    out = set()
    for (_, a), (_, b) in zip(s1.eqns, s2.eqns):
        out |= diff_set(a, b)
    for a, b in zip(s1.atoms, s2.atoms):
        out |= diff_set(a, b)
    return frozenset(out)
