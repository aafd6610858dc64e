"""Text syntax: a tokenizer, a recursive-descent parser and a printer.

Precedence from loosest to tightest: ``<->`` (non-associative), ``->``
(right-associative), ``|``, ``&``, ``~``.  A quantifier ``exists X Y . F``
extends as far to the right as possible.  The printer emits exactly the text
the parser reads back to the same value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import NotAQuery, ParseError
from .terms import (
    FALSE,
    TRUE,
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
    is_query,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><->|->|[()=&|~.,{}]))"
)
_KEYWORDS = {"exists", "forall", "true", "false", "bottom"}


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "var", "sym", "kw", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list:
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            out.append(Token("end", "", pos))
            return out
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(pos, "a token", text)
        start = m.start("ident") if m.group("ident") else m.start("op")
        if m.group("ident"):
            word = m.group("ident")
            if word in _KEYWORDS:
                kind = "kw"
            elif word[0].isupper() or word[0] == "_":
                kind = "var"
            else:
                kind = "sym"
            out.append(Token(kind, word, start))
        else:
            out.append(Token("op", m.group("op"), start))
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        t = self.tok
        self.i += 1
        return t

    def fail(self, expected: str):
        raise ParseError(self.tok.pos, expected, self.text)

    def finish(self):
        if self.tok.kind != "end":
            self.fail("end of input")

    # terms -----------------------------------------------------------------

    def term(self):
        t = self.tok
        if t.kind == "var":
            self.i += 1
            return Var(t.text)
        if t.kind == "sym":
            self.i += 1
            return App(t.text, self.arglist())
        self.fail("a term")

    def arglist(self) -> tuple:
        if not self.at("("):
            return ()
        self.i += 1
        args = [self.term()]
        while self.at(","):
            self.i += 1
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    # formulas --------------------------------------------------------------

    def formula(self):
        lhs = self.implication()
        if self.at("<->"):
            self.i += 1
            rhs = self.implication()
            if self.at("<->"):
                self.fail("no second '<->' without parentheses")
            return Iff(lhs, rhs)
        return lhs

    def implication(self):
        lhs = self.disjunction()
        if self.at("->"):
            self.i += 1
            return Implies(lhs, self.implication())
        return lhs

    def disjunction(self):
        items = [self.conjunction()]
        while self.at("|"):
            self.i += 1
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction(self):
        items = [self.unary()]
        while self.at("&"):
            self.i += 1
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self):
        if self.at("~"):
            self.i += 1
            return Not(self.unary())
        if self.at("exists") or self.at("forall"):
            kind = Exists if self.tok.text == "exists" else Forall
            self.i += 1
            variables = []
            while self.tok.kind == "var":
                variables.append(Var(self.tok.text))
                self.i += 1
            if not variables:
                self.fail("a variable")
            self.expect(".")
            body = self.formula()
            for v in reversed(variables):
                body = kind(v, body)
            return body
        return self.primary()

    def primary(self):
        if self.at("true"):
            self.i += 1
            return TRUE
        if self.at("false"):
            self.i += 1
            return FALSE
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        t = self.tok
        if t.kind not in ("var", "sym"):
            self.fail("a formula")
        lhs = self.term()
        if self.at("="):
            self.i += 1
            return Eq(lhs, self.term())
        if type(lhs) is Var:
            self.fail("'='")
        return Atom(lhs.fn, lhs.args)

    # substitutions and variable sets --------------------------------------

    def substitution(self):
        from .subst import BOTTOM, Substitution

        if self.at("bottom"):
            self.i += 1
            return BOTTOM
        self.expect("{")
        pairs = {}
        if not self.at("}"):
            while True:
                t = self.tok
                if t.kind != "var":
                    self.fail("a variable")
                self.i += 1
                self.expect("->")
                if Var(t.text) in pairs:
                    raise ParseError(t.pos, "distinct variables", self.text)
                pairs[Var(t.text)] = self.term()
                if not self.at(","):
                    break
                self.i += 1
        self.expect("}")
        return Substitution.of(pairs)

    def varset(self) -> frozenset:
        braced = self.at("{")
        if braced:
            self.i += 1
        out = []
        if self.tok.kind == "var":
            out.append(Var(self.tok.text))
            self.i += 1
            while self.at(","):
                self.i += 1
                if self.tok.kind != "var":
                    self.fail("a variable")
                out.append(Var(self.tok.text))
                self.i += 1
        if braced:
            self.expect("}")
        return frozenset(out)


def _run(text: str, method: str):
    p = _Parser(text)
    result = getattr(p, method)()
    p.finish()
    return result


def parse_term(text: str, sig: Signature | None = None):
    t = _run(text, "term")
    if sig is not None:
        sig.check(t)
    return t


def parse_formula(text: str, sig: Signature | None = None):
    f = _run(text, "formula")
    if sig is not None:
        sig.check(f)
    return f


def parse_query(text: str, sig: Signature | None = None):
    f = parse_formula(text, sig)
    if not is_query(f):
        raise NotAQuery(f"not a positive conjunctive query: {text}")
    return f


def parse_substitution(text: str, sig: Signature | None = None):
    s = _run(text, "substitution")
    if sig is not None:
        sig.check(s)
    return s


def parse_varset(text: str) -> frozenset:
    return _run(text, "varset")


# ---------------------------------------------------------------------------
# printing

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_ATOMIC = 6


def _prec(f) -> int:
    t = type(f)
    if t in (Exists, Forall):
        return 0
    return _PREC.get(t, _ATOMIC)


def print_term(t) -> str:
    if type(t) is Var:
        return t.name
    if not t.args:
        return t.fn
    return f"{t.fn}({', '.join(print_term(a) for a in t.args)})"


def print_formula(f) -> str:
    return _fmt(f)


print_query = print_formula


def _wrap(f, min_prec: int) -> str:
    text = _fmt(f)
    if _prec(f) < min_prec:
        return f"({text})"
    return text


def _fmt(f) -> str:
    t = type(f)
    if t is Top:
        return "true"
    if t is Bot:
        return "false"
    if t is Eq:
        return f"{print_term(f.lhs)} = {print_term(f.rhs)}"
    if t is Atom:
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(print_term(a) for a in f.args)})"
    if t in (Exists, Forall):
        names = []
        body = f
        while type(body) is t:
            names.append(body.var.name)
            body = body.body
        word = "exists" if t is Exists else "forall"
        return f"{word} {' '.join(names)} . {_fmt(body)}"
    if t is Not:
        return "~" + _wrap(f.body, _PREC[Not])
    if t is And:
        return " & ".join(_wrap(c, _PREC[And] + 1) for c in f.items)
    if t is Or:
        return " | ".join(_wrap(c, _PREC[Or] + 1) for c in f.items)
    if t is Implies:
        return f"{_wrap(f.lhs, _PREC[Implies] + 1)} -> {_wrap(f.rhs, _PREC[Implies])}"
    if t is Iff:
        return f"{_wrap(f.lhs, _PREC[Iff] + 1)} <-> {_wrap(f.rhs, _PREC[Iff] + 1)}"
    raise TypeError(f"not a formula: {f!r}")


def print_varset(vs) -> str:
    return "{" + ", ".join(v.name for v in sorted(vs)) + "}"


def print_any(obj) -> str:
    """Print a term, formula, substitution, solved form or variable set."""
    if type(obj) in (Var, App):
        return print_term(obj)
    if hasattr(obj, "to_text"):
        return obj.to_text()
    if isinstance(obj, (set, frozenset)):
        return print_varset(obj)
    return print_formula(obj)
