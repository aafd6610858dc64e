"""Exception hierarchy shared by every module.

The CLI maps :class:`ParseError` to exit code 2 and every other
:class:`ConjqError` to exit code 1; ``code`` is the stable machine-readable
name printed in diagnostics.
"""


class ConjqError(Exception):
    code = "error"


class ParseError(ConjqError, ValueError):
    code = "syntax"

    def __init__(self, position, expected, text=""):
        self.position = position
        self.expected = expected
        self.text = text
        super().__init__(f"at position {position}: expected {expected}")


class SignatureError(ConjqError, ValueError):
    code = "signature"


class NotAQuery(ConjqError, ValueError):
    code = "not-a-query"


class NotSubstitutible(ConjqError):
    code = "not-substitutible"

    def __init__(self, var, term):
        self.var = var
        self.term = term
        super().__init__(f"{term} is not substitutible for {var}")


class NotApplicable(ConjqError):
    code = "not-applicable"

    def __init__(self, missing=(), message=None):
        self.missing = tuple(missing)
        if message is None:
            names = ", ".join(v.name for v in self.missing)
            message = f"substitution does not bind {{{names}}}"
        super().__init__(message)


class DomainOverlap(ConjqError):
    code = "domain-overlap"


class AlignmentError(ConjqError):
    code = "alignment"


class Inconsistent(ConjqError):
    code = "inconsistent"


class EmptySet(ConjqError, ValueError):
    code = "empty-set"


class ArityMismatch(ConjqError):
    code = "arity-mismatch"


class StepBudgetExceeded(ConjqError, RuntimeError):
    code = "step-budget"
