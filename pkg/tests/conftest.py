import random
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from conjq.syntax import parse_formula, parse_query, parse_substitution, parse_term, print_formula

settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=100,
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rngs():
    return seeds.map(random.Random)


def q(text):
    return parse_query(text)


def f(text):
    return parse_formula(text)


def t(text):
    return parse_term(text)


def s(text):
    return parse_substitution(text)


def show(x):
    return print_formula(x)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n))
