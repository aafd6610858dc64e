import pytest
from hypothesis import given, settings

from conjq import fuzz
from conjq.errors import DomainOverlap, NotApplicable, NotSubstitutible
from conjq.oracle import herbrand_model, kernel_by_search, valid_in
from conjq.subst import (
    BOTTOM,
    EPSILON,
    Substitution,
    apply_to_formula,
    apply_to_term,
    compose,
    equivalent_subst,
    is_permutation,
    kernel,
    matcher,
    more_general_subst,
    regular_extension,
    restrict,
    union,
)
from conjq.syntax import print_formula
from conjq.terms import Atom, Var, all_vars, free_var_set, is_variant, replace

from .conftest import f, rngs, s, t

X, Y, Z, U = Var("X"), Var("Y"), Var("Z"), Var("U")
XY = {X, Y}


# application to terms ------------------------------------------------------


def test_apply_to_term_examples():
    assert apply_to_term(s("{X -> f(Y)}"), t("g(X)")) == t("g(f(Y))")
    assert apply_to_term(EPSILON, t("a")) == t("a")


def test_apply_to_term_needs_every_variable():
    with pytest.raises(NotApplicable) as info:
        apply_to_term(s("{X -> Y}"), t("f(X, Z)"))
    assert info.value.missing == (Z,)


def test_bottom_cannot_be_applied():
    with pytest.raises(NotApplicable):
        apply_to_term(BOTTOM, t("a"))


# composition, restriction, union -------------------------------------------


def test_compose_examples():
    assert compose(s("{X -> Y}"), s("{Y -> Y}")) == s("{X -> Y}")
    assert compose(s("{X -> f(Y)}"), s("{Y -> a}")) == s("{X -> f(a)}")
    with pytest.raises(NotApplicable):
        compose(s("{X -> Z}"), s("{Y -> a}"))


def test_restrict_examples():
    assert restrict(s("{X -> a, Y -> b}"), {X}) == s("{X -> a}")
    assert restrict(s("{X -> a}"), set()) == EPSILON
    assert restrict(s("{X -> f(Z, X)}"), XY) == s("{X -> f(Z, X)}")


def test_union_examples():
    assert union(s("{X -> a}"), s("{Y -> b}")) == s("{X -> a, Y -> b}")
    sigma = s("{X -> f(Y)}")
    assert union(sigma, EPSILON) == sigma
    with pytest.raises(DomainOverlap):
        union(s("{X -> a}"), s("{X -> b}"))


def test_is_permutation_examples():
    assert is_permutation(s("{X -> Y, Y -> X}"))
    assert not is_permutation(s("{X -> Y, Z -> Y}"))
    assert not is_permutation(s("{X -> a}"))


# regular extension ---------------------------------------------------------


def test_regular_extension_examples():
    assert regular_extension(s("{X -> f(Z, X)}"), XY) == s("{X -> f(Z, X), Y -> Y}")
    assert regular_extension(s("{X -> f(Z, Y)}"), XY) == s("{X -> f(Z, Y), Y -> X}")
    assert regular_extension(EPSILON, set()) == EPSILON


@given(rngs())
def test_regular_extension_is_injective_on_new_variables(rng):
    sigma = fuzz.random_substitution(rng, fuzz.MEDIUM)
    ext = regular_extension(sigma, set(fuzz.MEDIUM.free) | {Var("V7")})
    new = [ext[x] for x in ext.dom - sigma.dom]
    assert all(type(v) is Var and v not in sigma.range for v in new)
    assert len(set(new)) == len(new)
    assert equivalent_subst(sigma, ext)


# application to formulas ---------------------------------------------------


def test_apply_renames_captured_binder():
    g = f("exists Z . p(X, Y, Z)")
    assert print_formula(apply_to_formula(s("{X -> Z, Y -> X}"), g)) == "exists U . p(Z, X, U)"


def test_apply_with_irrelevant_binding_for_bound_name():
    g = f("exists Z . p(X, Y, Z)")
    out = apply_to_formula(s("{X -> f(Z, X), Z -> g(X, Y, Z)}"), g)
    assert print_formula(out) == "exists U . p(f(Z, X), Y, U)"


def test_apply_with_regular_extension_of_free_variable():
    g = f("exists Z . p(X, Y, Z)")
    out = apply_to_formula(s("{X -> f(Z, Y), Z -> g(X, Y, Z)}"), g)
    assert print_formula(out) == "exists U . p(f(Z, Y), X, U)"


def test_apply_leaves_harmless_binder_alone():
    assert apply_to_formula(s("{X -> a}"), f("exists Z . p(X, Z)")) == f("exists Z . p(a, Z)")


@given(rngs())
def test_apply_agrees_with_replace_on_full_domain(rng):
    g = fuzz.random_formula(rng, fuzz.MEDIUM, rng.randint(1, 8))
    dom = sorted(all_vars(g))
    sigma = Substitution.of(
        {x: fuzz.random_term(rng, fuzz.MEDIUM, 1, fuzz.MEDIUM.free) for x in dom}
    )
    try:
        expected = replace(g, dom, [sigma[x] for x in dom])
    except NotSubstitutible:
        return
    assert apply_to_formula(sigma, g) == expected


@given(rngs())
def test_apply_is_stable_under_variants(rng):
    g = fuzz.random_formula(rng, fuzz.MEDIUM, rng.randint(1, 8))
    h = _rename_binders(g, rng)
    sigma = fuzz.random_substitution(rng, fuzz.MEDIUM)
    assert is_variant(g, h)
    assert is_variant(apply_to_formula(sigma, g), apply_to_formula(sigma, h))


@given(rngs())
def test_restriction_to_free_variables_is_irrelevant(rng):
    g = fuzz.random_formula(rng, fuzz.MEDIUM, rng.randint(1, 8))
    sigma = fuzz.random_substitution(rng, fuzz.MEDIUM)
    full = apply_to_formula(sigma, g)
    cut = apply_to_formula(restrict(sigma, free_var_set(g)), g)
    assert is_variant(full, cut)


def _rename_binders(g, rng):
    from conjq.terms import And, Exists, Forall, FreshVars, Iff, Implies, Not, Or

    fresh = FreshVars(all_vars(g), prefix="R")
    fresh.counter = rng.randint(0, 9)

    def go(h):
        kind = type(h)
        if kind in (Exists, Forall):
            y = fresh()
            return kind(y, go(replace(h.body, [h.var], [y])))
        if kind is Not:
            return Not(go(h.body))
        if kind in (And, Or):
            return kind(tuple(go(c) for c in h.items))
        if kind in (Implies, Iff):
            return kind(go(h.lhs), go(h.rhs))
        return h

    return go(g)


# kernel --------------------------------------------------------------------


def test_kernel_examples():
    assert kernel(EPSILON) == frozenset()
    assert kernel(s("{X -> a, Y -> V}")) == {X}
    assert kernel(s("{X -> V, Y -> V}")) == XY


@settings(max_examples=150)
@given(rngs())
def test_kernel_matches_exhaustive_search(rng):
    sigma = fuzz.random_substitution(rng, fuzz.MEDIUM, max_dom=4)
    assert kernel_by_search(sigma) == [kernel(sigma)]


@given(rngs(), rngs())
def test_kernel_laws(r1, r2):
    sigma = fuzz.random_substitution(r1, fuzz.MEDIUM)
    theta = fuzz.random_substitution(r2, fuzz.MEDIUM)
    if equivalent_subst(sigma, theta):
        assert kernel(sigma) == kernel(theta)
    if more_general_subst(sigma, theta):
        assert kernel(sigma) >= kernel(theta)


@given(rngs())
def test_kernel_laws_on_related_pairs(rng):
    theta = fuzz.random_substitution(rng, fuzz.MEDIUM)
    sigma = _instance_of(rng, theta)
    assert more_general_subst(sigma, theta)
    assert kernel(sigma) >= kernel(theta)


# order ---------------------------------------------------------------------


def test_order_examples():
    assert more_general_subst(s("{X -> f(a)}"), s("{X -> f(Y)}"))
    assert more_general_subst(s("{X -> U}"), s("{X -> V}"))
    assert more_general_subst(s("{X -> V}"), s("{X -> U}"))
    assert not more_general_subst(s("{X -> f(Y)}"), s("{X -> f(a)}"))
    assert matcher(s("{X -> f(a)}"), s("{X -> f(Y)}")) == s("{Y -> a}")


def test_equivalence_examples():
    assert equivalent_subst(s("{X -> f(Z, X)}"), s("{X -> f(Z, X), Y -> Y}"))
    assert not equivalent_subst(s("{X -> a}"), s("{X -> b}"))
    sigma = s("{X -> g(Y), Z -> Y}")
    assert equivalent_subst(sigma, sigma)


def test_bottom_is_least():
    sigma = s("{X -> a}")
    assert more_general_subst(BOTTOM, sigma)
    assert not more_general_subst(sigma, BOTTOM)


@given(rngs())
def test_instances_are_below(rng):
    theta = fuzz.random_substitution(rng, fuzz.MEDIUM)
    sigma = _instance_of(rng, theta)
    assert more_general_subst(sigma, theta)


@given(rngs())
def test_restriction_is_monotone(rng):
    theta = fuzz.random_substitution(rng, fuzz.MEDIUM)
    sigma = _instance_of(rng, theta)
    xs = set(rng.sample(list(fuzz.MEDIUM.free), rng.randint(0, 4)))
    assert more_general_subst(restrict(sigma, xs), restrict(theta, xs))


@given(rngs())
def test_same_domain_equivalence_is_renaming(rng):
    sigma = fuzz.random_substitution(rng, fuzz.MEDIUM)
    rng_vars = sorted(sigma.range)
    targets = [Var(f"P{i}") for i in range(len(rng_vars))]
    rng.shuffle(targets)
    pi = Substitution.of(dict(zip(rng_vars, targets)))
    theta = compose(sigma, pi)
    assert sigma.dom == theta.dom
    assert equivalent_subst(sigma, theta)
    tau = restrict(matcher(sigma, theta), theta.range)
    assert is_permutation(tau)
    assert compose(theta, regular_extension(tau, theta.range)) == sigma


@given(rngs(), rngs())
def test_same_domain_equivalence_yields_renaming(r1, r2):
    sigma = fuzz.random_substitution(r1, fuzz.MEDIUM)
    theta = fuzz.random_substitution(r2, fuzz.MEDIUM, variables=sorted(sigma.dom))
    if theta.dom != sigma.dom or not equivalent_subst(sigma, theta):
        return
    tau = restrict(matcher(sigma, theta), theta.range)
    assert is_permutation(tau)
    assert compose(theta, regular_extension(tau, theta.range)) == sigma


def _instance_of(rng, theta):
    """theta composed with a random substitution covering its range."""
    tau = {v: fuzz.random_term(rng, fuzz.MEDIUM, 1) for v in sorted(theta.range)}
    return compose(theta, Substitution.of(tau))


# order transport on small models -------------------------------------------

MODEL = herbrand_model(fuzz.SMALL.signature)
GROUND = [Atom("p", (c,)) for c in MODEL.universe] + [
    Atom("q", (c, d)) for c in MODEL.universe for d in MODEL.universe
]


def _interpretations(rng, count=128):
    yield frozenset()
    yield frozenset(GROUND)
    for _ in range(count):
        yield frozenset(g for g in GROUND if rng.random() < 0.5)


@settings(max_examples=40)
@given(rngs())
def test_general_substitution_transports_validity_to_instances(rng):
    theta = fuzz.random_substitution(rng, fuzz.SMALL, max_dom=3)
    sigma = _instance_of_small(rng, theta)
    g = fuzz.random_formula(rng, fuzz.SMALL, rng.randint(1, 6))
    f_theta = apply_to_formula(theta, g)
    f_sigma = apply_to_formula(sigma, g)
    for interp in _interpretations(rng):
        if valid_in(f_theta, interp, MODEL):
            assert valid_in(f_sigma, interp, MODEL)


def _instance_of_small(rng, theta):
    tau = {v: fuzz.random_term(rng, fuzz.SMALL, 0) for v in sorted(theta.range)}
    return compose(theta, Substitution.of(tau))
