"""Command-line front end: one-shot verbs, batch scripts and a REPL.

Exit codes: 0 on success, 1 on a domain error, 2 on a syntax error.
"""

from __future__ import annotations

import argparse
import json
import random
import shlex
import sys

from . import lattice, oracle, solver, subst
from .errors import ConjqError, ParseError, SignatureError
from .syntax import (
    parse_formula,
    parse_query,
    parse_substitution,
    parse_term,
    parse_varset,
    print_any,
    print_formula,
    print_varset,
)
from .terms import Signature, diff_set

VERBS = {
    # verb: (min args, max args or None)
    "solve": (1, 1),
    "equiv": (2, 2),
    "leq": (2, 2),
    "meet": (1, None),
    "join": (1, None),
    "project": (2, 2),
    "kernel": (1, 1),
    "gamma": (1, 1),
    "ungamma": (1, 1),
    "apply": (2, 2),
    "compose": (2, 2),
    "restrict": (2, 2),
    "regext": (2, 2),
    "diff": (2, 2),
    "oracle": (2, 2),
    "generalize": (1, 1),
    "fuzz": (1, 2),
}


def parse_signature(text: str) -> Signature:
    """``"a/0, f/2; p/1"``: function symbols, then predicates after ``;``."""
    funcs_text, _, preds_text = text.partition(";")

    def table(part):
        out = {}
        for item in part.split(","):
            item = item.strip()
            if not item:
                continue
            name, slash, arity = item.partition("/")
            if not slash or not arity.strip().isdigit():
                raise SignatureError(f"expected name/arity, got {item!r}")
            out[name.strip()] = int(arity)
        return out

    return Signature(table(funcs_text), table(preds_text))


def _is_subst_text(text: str) -> bool:
    s = text.strip()
    return s.startswith("{") and ("->" in s or s.replace(" ", "") == "{}") or s == "bottom"


class Session:
    def __init__(self, sig: Signature | None = None, infer: bool = True, as_json: bool = False,
                 trace: bool = False, depth: int = 3, fresh_constants=None,
                 max_interps: int = 4096, seed: int = 0):
        self.sig = sig
        self.infer = infer
        self.as_json = as_json
        self.trace = trace
        self.depth = depth
        self.fresh_constants = fresh_constants
        self.max_interps = max_interps
        self.seed = seed

    # signature handling ----------------------------------------------------

    def _checked(self, obj):
        if self.infer:
            self.sig = Signature.infer(obj, base=self.sig)
        else:
            self.sig.check(obj)
        return obj

    def query(self, text):
        return self._checked(parse_query(text))

    def formula(self, text):
        return self._checked(parse_formula(text))

    def substitution(self, text):
        return self._checked(parse_substitution(text))

    def term(self, text):
        return self._checked(parse_term(text))

    # dispatch --------------------------------------------------------------

    def run(self, verb: str, args: list) -> str:
        if verb not in VERBS:
            raise ConjqError(f"unknown verb {verb!r}")
        lo, hi = VERBS[verb]
        if len(args) < lo or (hi is not None and len(args) > hi):
            want = str(lo) if lo == hi else f"{lo}+" if hi is None else f"{lo}-{hi}"
            raise ConjqError(f"{verb} takes {want} argument(s), got {len(args)}")
        result, extra = getattr(self, "_" + verb)(*args)
        if self.as_json:
            payload = {"verb": verb, "inputs": list(args), "result": result}
            payload.update(extra)
            return json.dumps(payload, sort_keys=False)
        lines = list(extra.get("trace", [])) if self.trace else []
        if isinstance(result, list):
            lines.extend(result)
        elif isinstance(result, dict):
            lines.append(json.dumps(result))
        else:
            lines.append(result)
        return "\n".join(lines)

    def _solve(self, q):
        form, trace = solver.solve(self.query(q))
        extra = {}
        if self.trace or self.as_json:
            extra["trace"] = solver.trace_lines(trace)
        return form.to_text(), extra

    def _equiv(self, a, b):
        return _bool(solver.equivalent(self.query(a), self.query(b))), {}

    def _leq(self, a, b):
        return _bool(solver.more_general(self.query(a), self.query(b))), {}

    def _meet(self, *es):
        return print_formula(lattice.meet_all([self.query(e) for e in es])), {}

    def _join(self, *es):
        return print_formula(lattice.join_all([self.query(e) for e in es])), {}

    def _project(self, e, xs):
        return print_formula(lattice.project(self.query(e), parse_varset(xs))), {}

    def _kernel(self, x):
        if _is_subst_text(x):
            return print_varset(subst.kernel(self.substitution(x))), {}
        return print_varset(lattice.kernel_e(self.query(x))), {}

    def _gamma(self, e):
        sigma = lattice.to_substitution(self.query(e))
        return _subst_out(sigma, self.as_json), {}

    def _ungamma(self, s):
        return print_formula(lattice.to_eformula(self.substitution(s))), {}

    def _apply(self, s, f):
        return print_formula(subst.apply_to_formula(self.substitution(s), self.formula(f))), {}

    def _compose(self, a, b):
        out = subst.compose(self.substitution(a), self.substitution(b))
        return _subst_out(out, self.as_json), {}

    def _restrict(self, s, xs):
        return _subst_out(subst.restrict(self.substitution(s), parse_varset(xs)), self.as_json), {}

    def _regext(self, s, xs):
        out = subst.regular_extension(self.substitution(s), parse_varset(xs))
        return _subst_out(out, self.as_json), {}

    def _diff(self, a, b):
        try:
            s, t = self.term(a), self.term(b)
            pairs = diff_set(s, t)
        except ParseError:
            q1, q2 = self.query(a), self.query(b)
            pairs = solver.query_diff(solver.solved(q1), solver.solved(q2))
        return _pairs_out(pairs, self.as_json), {}

    def _oracle(self, a, b):
        report = oracle.check_equiv(
            self.query(a), self.query(b), sig=self.sig, depth=self.depth,
            fresh_constants=self.fresh_constants, max_interps=self.max_interps,
        )
        if self.as_json:
            return report.to_json(), {}
        line = report.verdict
        if report.witness is not None:
            line += " " + json.dumps(report.witness, sort_keys=True)
        return line, {}

    def _generalize(self, e):
        forms = oracle.enumerate_generalizations(self.query(e))
        return sorted(f.to_text() for f in forms), {}

    def _fuzz(self, kind, count="5"):
        from . import fuzz

        rng = random.Random(self.seed)
        makers = {
            "query": lambda: print_formula(fuzz.random_query(rng, fuzz.MEDIUM, 6)),
            "eformula": lambda: print_formula(fuzz.random_eformula(rng, fuzz.MEDIUM, 5)),
            "substitution": lambda: fuzz.random_substitution(rng, fuzz.MEDIUM).to_text(),
            "formula": lambda: print_formula(fuzz.random_formula(rng, fuzz.SMALL, 6)),
        }
        if kind not in makers:
            raise ConjqError(f"fuzz kind must be one of {sorted(makers)}")
        return [makers[kind]() for _ in range(int(count))], {}


def _bool(b: bool) -> str:
    return "true" if b else "false"


def _subst_out(sigma, as_json):
    return sigma.to_json() if as_json else sigma.to_text()


def _pairs_out(pairs, as_json):
    rows = sorted((print_any(a), print_any(b)) for a, b in pairs)
    if as_json:
        return [list(r) for r in rows]
    return "{" + ", ".join(f"({a}, {b})" for a, b in rows) + "}"


# ---------------------------------------------------------------------------
# entry points


def _report(exc: Exception) -> int:
    if isinstance(exc, ParseError):
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    if isinstance(exc, ConjqError):
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    raise exc


def _execute(session: Session, verb: str, args: list) -> int:
    try:
        print(session.run(verb, args))
        return 0
    except (ConjqError, ValueError) as exc:
        if not isinstance(exc, ConjqError):
            exc = ConjqError(str(exc))
        return _report(exc)


def _split_line(line: str):
    try:
        return shlex.split(line, comments=True)
    except ValueError as exc:
        raise ParseError(0, "balanced quotes", line) from exc


def run_script(session: Session, path: str) -> int:
    worst = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            try:
                words = _split_line(line)
            except ParseError as exc:
                worst = max(worst, _report(exc))
                continue
            if words:
                worst = max(worst, _execute(session, words[0], words[1:]))
    return worst


def repl(session: Session, stream=None) -> int:
    stream = sys.stdin if stream is None else stream
    interactive = stream.isatty()
    while True:
        if interactive:
            print("conjq> ", end="", flush=True)
        line = stream.readline()
        if not line:
            return 0
        line = line.strip()
        if not line:
            continue
        if line.startswith(":"):
            cmd, _, rest = line[1:].partition(" ")
            rest = rest.strip()
            if cmd in ("quit", "q", "exit"):
                return 0
            if cmd == "trace":
                if rest not in ("on", "off"):
                    print("error[usage]: :trace on|off", file=sys.stderr)
                else:
                    session.trace = rest == "on"
                continue
            if cmd == "sig":
                try:
                    if rest:
                        extra = parse_signature(rest)
                        session.sig = extra if session.sig is None else session.sig.merge(extra)
                    print(session.sig if session.sig is not None else "(inferred)")
                except ConjqError as exc:
                    _report(exc)
                continue
            print(f"error[usage]: unknown command :{cmd}", file=sys.stderr)
            continue
        try:
            words = _split_line(line)
        except ParseError as exc:
            _report(exc)
            continue
        _execute(session, words[0], words[1:])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="conjq",
        description="Solve, compare and combine positive conjunctive queries.",
    )
    p.add_argument("verb", nargs="?", help="one of: " + ", ".join(sorted(VERBS)) + ", repl")
    p.add_argument("args", nargs="*")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--script", metavar="FILE", help="run one command per line")
    p.add_argument("--sig", help='signature, e.g. "a/0, f/2; p/1"')
    p.add_argument("--infer-sig", action="store_true",
                   help="extend --sig with unknown symbols instead of rejecting them")
    p.add_argument("--trace", action="store_true", help="print rewrite steps for solve")
    p.add_argument("--depth", type=int, default=3, help="oracle term depth")
    p.add_argument("--fresh-constants", type=int, default=None)
    p.add_argument("--max-interps", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0, help="seed for the fuzz verb")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_intermixed_args(argv)
    try:
        sig = parse_signature(ns.sig) if ns.sig else None
    except ConjqError as exc:
        return _report(exc)
    session = Session(
        sig=sig, infer=ns.infer_sig or sig is None, as_json=ns.json, trace=ns.trace,
        depth=ns.depth, fresh_constants=ns.fresh_constants, max_interps=ns.max_interps,
        seed=ns.seed,
    )
    if ns.script:
        return run_script(session, ns.script)
    if ns.verb is None or ns.verb == "repl":
        return repl(session)
    return _execute(session, ns.verb, ns.args)


if __name__ == "__main__":
    sys.exit(main())
