import pytest
from hypothesis import given, settings

from conjq import fuzz
from conjq.errors import AlignmentError, NotAQuery, StepBudgetExceeded
from conjq.solver import (
    FALSE_FORM,
    TRUE_FORM,
    SolvedForm,
    canonical,
    canonicalize,
    equivalent,
    is_consistent,
    is_solved_form,
    isomorphic,
    more_general,
    query_diff,
    redirect,
    replay,
    solve,
    solved,
    strictly_more_general,
    trace_lines,
)
from conjq.lattice import join
from conjq.terms import App, Atom, Var, card

from .conftest import f, q, rngs, t

X, Y, Z, U = Var("X"), Var("Y"), Var("Z"), Var("U")
a = App("a")


def text(form):
    return form.to_text()


# solve ---------------------------------------------------------------------


def test_occurs_check_gives_false():
    assert solved(q("X = f(X)")) == FALSE_FORM


def test_trivial_equation_gives_true():
    assert solved(q("X = X")) == TRUE_FORM


def test_clash_inside_decomposition_gives_false():
    form, trace = solve(q("f(X, g(Z), Z) = f(Y, a, Z)"))
    assert form.is_false
    steps = [s.step for s in trace]
    assert steps[0] == 1 and 2 in steps and steps[-1] == 12


def test_decompose_then_eliminate_into_atom():
    form, trace = solve(q("f(X) = f(g(Y)) & p(X)"))
    assert form == SolvedForm((), ((X, t("g(Y)")),), (Atom("p", (t("g(Y)"),)),))
    assert [s.step for s in trace] == [1, 5]


def test_shared_bound_variable_collapses():
    form, trace = solve(q("exists Z . X = Z & Y = Z"))
    assert isomorphic(form, SolvedForm((), ((Y, X),)))
    assert [s.step for s in trace] == [7, 7, 6, 8, 11]


def test_trace_lines_format():
    _, trace = solve(q("exists Z . X = Z & Y = Z"))
    lines = trace_lines(trace)
    assert lines[0] == "step=7 at=/0/0 before=X = Z after=Z = X"
    assert lines[-1] == "step=11 at=/ before=true & X = Y after=X = Y"


def test_trace_replays_to_the_result():
    query = q("exists Z U . f(X, U) = f(g(Z), Y) & p(Z, U) & Y = a")
    form, trace = solve(query)
    assert SolvedForm.from_formula(replay(query, trace)) == form


def test_solve_rejects_non_queries():
    with pytest.raises(NotAQuery):
        solve(f("~p(X)"))


def test_step_budget():
    with pytest.raises(StepBudgetExceeded):
        solve(q("f(X, Y, Z) = f(Y, Z, a)"), max_steps=2)


def test_atoms_keep_their_order():
    form = solved(q("q(X) & X = a & p(X)"))
    assert [at.pred for at in form.atoms] == ["q", "p"]


# solved-form recognition ---------------------------------------------------


def test_is_solved_form_examples():
    assert is_solved_form(f("true"))
    assert is_solved_form(f("X = f(Y)"))
    assert not is_solved_form(f("X = f(X)"))
    assert not is_solved_form(f("exists Z . X = Z"))
    assert not is_solved_form(f("X = a & X = b"))
    assert not is_solved_form(f("exists Z . X = a"))


def test_is_consistent_examples():
    assert is_consistent(q("X = a"))
    assert not is_consistent(q("a = b"))
    assert not is_consistent(q("X = f(X)"))


# canonical forms -----------------------------------------------------------


def test_redirected_variable_pair_has_one_canonical_form():
    s1 = SolvedForm((), ((Y, X),))
    s2 = SolvedForm((), ((X, Y),))
    assert canonicalize(s1) == canonicalize(s2)
    assert text(canonicalize(s1)) == "X = Y"


def test_bound_renaming_and_permutation_share_canonical_form():
    e1 = q("exists Z V . X = f(Z, V)")
    e2 = q("exists V Z . X = f(V, Z)")
    assert canonical(e1) == canonical(e2)
    assert text(canonical(e1)) == "exists B1 B2 . X = f(B1, B2)"


def test_canonical_names_avoid_free_variables():
    assert text(canonical(q("exists Z . X = f(Z, B1)"))) == "exists B2 . X = f(B2, B1)"


@given(rngs())
def test_canonicalize_is_idempotent(rng):
    s = solved(fuzz.random_query(rng, fuzz.RICH, rng.randint(1, 15)))
    c = canonicalize(s)
    assert canonicalize(c) == c
    assert is_solved_form(c)


@given(rngs())
def test_isomorphic_variants_are_equivalent(rng):
    s = fuzz.random_solved_form(rng, fuzz.MEDIUM, rng.randint(2, 10))
    v = fuzz.isomorphic_variant(rng, s)
    assert is_solved_form(v)
    assert canonicalize(s) == canonicalize(v)
    assert equivalent(s.to_formula(), v.to_formula())


# equivalence and order -----------------------------------------------------


def test_equivalent_examples():
    assert equivalent(q("exists Z . X = Z & Y = Z"), q("X = Y"))
    assert not equivalent(q("X = f(a)"), q("exists V . X = f(V)"))
    query = q("exists Z . p(X, Z) & X = g(Z)")
    assert equivalent(query, query)


def test_strict_order_examples():
    assert more_general(q("X = f(a)"), q("exists V . X = f(V)"))
    assert not more_general(q("exists V . X = f(V)"), q("X = f(a)"))
    assert strictly_more_general(q("exists U . X = f(U, U)"), q("exists V0 V1 . X = f(V0, V1)"))


def test_more_general_needs_equal_atom_counts():
    assert not more_general(q("p(X)"), q("true"))


def test_false_is_below_and_true_above():
    e = q("X = f(Y)")
    assert more_general(q("false"), e) and more_general(e, q("true"))
    assert not more_general(q("true"), e)


def test_inconsistent_query_keeps_its_atom_count():
    bad = q("X = a & X = b & p(X)")
    assert more_general(bad, q("p(Y)"))
    assert not more_general(bad, q("X = a"))
    assert not more_general(q("false"), q("p(X)"))
    assert equivalent(bad, q("X = f(X) & q(Y)"))
    assert not equivalent(bad, q("false"))


@settings(max_examples=150)
@given(rngs(), rngs())
def test_equivalence_is_mutual_order_with_atoms(r1, r2):
    q1 = fuzz.random_query(r1, fuzz.SMALL, r1.randint(1, 8), atom_weight=0.2)
    q2 = fuzz.random_query(r2, fuzz.SMALL, r2.randint(1, 8), atom_weight=0.2)
    assert equivalent(q1, q2) == (more_general(q1, q2) and more_general(q2, q1))


def test_more_general_through_redirected_pair():
    assert more_general(q("X = a & Y = a"), q("X = Y"))
    assert more_general(q("Y = X & Z = X"), q("X = Z"))


@settings(max_examples=150)
@given(rngs(), rngs())
def test_equivalence_is_mutual_order(r1, r2):
    q1 = fuzz.random_query(r1, fuzz.SMALL, r1.randint(1, 8), allow_atoms=False)
    q2 = fuzz.random_query(r2, fuzz.SMALL, r2.randint(1, 8), allow_atoms=False)
    both = more_general(q1, q2) and more_general(q2, q1)
    assert equivalent(q1, q2) == both
    assert more_general(q1, q1) and equivalent(q1, q1)


@given(rngs())
def test_order_is_transitive_on_chains(rng):
    e0 = fuzz.random_consistent_eformula(rng, fuzz.MEDIUM, rng.randint(2, 8))
    e1 = join(e0, fuzz.random_eformula(rng, fuzz.MEDIUM, 4))
    e2 = join(e1, fuzz.random_eformula(rng, fuzz.MEDIUM, 4))
    assert more_general(e0, e1) and more_general(e1, e2) and more_general(e0, e2)


# difference sets of aligned forms ------------------------------------------


def test_query_diff_examples():
    s1 = solved(q("X = f(a)"))
    s2 = solved(q("exists V . X = f(V)"))
    assert query_diff(s1, s2) == {(a, Var("V"))}
    same = solved(q("X = f(Y)"))
    assert query_diff(same, same) == {(Y, Y)}
    s3 = solved(q("exists U . X = f(U, U)"))
    s4 = solved(q("exists V0 V1 . X = f(V0, V1)"))
    assert query_diff(s3, s4) == {(U, Var("V0")), (U, Var("V1"))}


def test_query_diff_needs_alignment():
    with pytest.raises(AlignmentError):
        query_diff(solved(q("X = a")), solved(q("Y = a")))


def test_redirect_swaps_variables():
    s = SolvedForm((), ((Y, X), (Z, t("f(X)"))))
    assert text(redirect(s, Y)) == "X = Y & Z = f(Y)"


@settings(max_examples=200)
@given(rngs())
def test_solver_output_shape(rng):
    query = fuzz.random_unifiable_query(rng, fuzz.RICH, rng.randint(1, 40))
    form = solved(query)
    assert is_solved_form(form)
    if not form.is_false:
        assert form.card == card(query)
