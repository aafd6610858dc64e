import io
import json
import subprocess
import sys

import pytest

from conjq.cli import Session, main, parse_signature, repl
from conjq.syntax import parse_formula, parse_substitution, parse_varset


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def test_occurs_check(capsys):
    assert run(capsys, "solve", "X = f(X)") == (0, "false", "")


def test_order_example(capsys):
    assert run(capsys, "leq", "X = f(a)", "exists V . X = f(V)")[:2] == (0, "true")


def test_apply_example(capsys):
    code, out, _ = run(capsys, "apply", "{X -> Z, Y -> X}", "exists Z . p(X,Y,Z)")
    assert (code, out) == (0, "exists U . p(Z, X, U)")


def test_meet_example(capsys):
    assert run(capsys, "meet", "X=f(Y)", "X=f(a)")[1] == "X = f(a) & Y = a"


@pytest.mark.parametrize(
    "argv, expected",
    [
        (("equiv", "exists Z . X = Z & Y = Z", "X = Y"), "true"),
        (("join", "X = f(a)", "X = f(b)"), "exists B1 . X = f(B1)"),
        (("project", "X = f(Y)", "{X}"), "exists Y . X = f(Y)"),
        (("kernel", "{X -> a, Y -> V}"), "{X}"),
        (("kernel", "exists Z . X = Z & Y = Z"), "{X, Y}"),
        (("gamma", "X = f(Y)"), "{X -> f(Y), Y -> Y}"),
        (("ungamma", "bottom"), "false"),
        (("compose", "{X -> f(Y)}", "{Y -> a}"), "{X -> f(a)}"),
        (("restrict", "{X -> a, Y -> b}", "{X}"), "{X -> a}"),
        (("regext", "{X -> f(Z, Y)}", "{X, Y}"), "{X -> f(Z, Y), Y -> X}"),
        (("diff", "f(X, g(Z), Z)", "f(Y, a, Z)"), "{(X, Y), (Z, Z), (g(Z), a)}"),
        (("diff", "X = f(a)", "exists V . X = f(V)"), "{(a, V)}"),
        (("oracle", "exists Z . X = Z & Y = Z", "X = Y"), "confirmed"),
    ],
)
def test_verbs(capsys, argv, expected):
    code, out, err = run(capsys, *argv)
    assert (code, out, err) == (0, expected, "")


def test_generalize_lists_one_form_per_line(capsys):
    code, out, _ = run(capsys, "generalize", "X = f(a)")
    assert out.splitlines() == ["X = f(a)", "exists B1 . X = f(B1)", "true"]


def test_trace_flag(capsys):
    code, out, _ = run(capsys, "--trace", "solve", "f(X) = f(a)")
    lines = out.splitlines()
    assert lines[0] == "step=1 at=/ before=f(X) = f(a) after=X = a"
    assert lines[-1] == "X = a"


def test_exit_codes(capsys):
    assert run(capsys, "solve", "X = f(X")[0] == 2
    assert run(capsys, "kernel", "X = a & X = b")[0] == 1
    assert run(capsys, "compose", "{X -> Z}", "{Y -> a}")[0] == 1
    assert run(capsys, "solve")[0] == 1
    assert run(capsys, "frobnicate", "X = a")[0] == 1
    code, _, err = run(capsys, "--sig", "a/0; p/1", "solve", "q(a)")
    assert code == 1 and err.startswith("error[signature]")


def test_infer_sig_extends_declared_signature(capsys):
    assert run(capsys, "--sig", "a/0; p/1", "--infer-sig", "solve", "q(a)")[:2] == (0, "q(a)")


def test_signature_syntax():
    sig = parse_signature("a/0, f/2; p/1")
    assert parse_signature(str(sig)) == sig


JSON_CASES = [
    ("solve", "exists Z . X = f(Z) & p(X)"),
    ("meet", "X = f(Y)", "X = f(a)"),
    ("join", "X = a & Y = a", "X = Y"),
    ("project", "X = f(Y)", "{X}"),
    ("kernel", "{X -> V, Y -> V}"),
    ("gamma", "exists U . X = f(U, Y)"),
    ("ungamma", "{X -> f(Z, Y), Y -> Z}"),
    ("apply", "{X -> Z, Y -> X}", "exists Z . p(X,Y,Z)"),
    ("compose", "{X -> f(Y)}", "{Y -> a}"),
    ("restrict", "{X -> a, Y -> b}", "{X}"),
    ("regext", "{X -> f(Z, X)}", "{X, Y}"),
    ("diff", "f(X, g(Z), Z)", "f(Y, a, Z)"),
    ("equiv", "X = a", "X = b"),
    ("leq", "X = a", "exists Z . X = Z"),
    ("oracle", "X = f(a)", "exists V . X = f(V)"),
    ("generalize", "X = f(a)"),
]


def _reparse(verb, result):
    if verb in ("solve", "meet", "join", "project", "ungamma", "apply"):
        parse_formula(result)
    elif verb == "kernel":
        parse_varset(result)
    elif verb in ("gamma", "compose", "restrict", "regext"):
        if result.get("bottom"):
            return
        text = ", ".join(f"{b['var']} -> {b['term']}" for b in result["bindings"])
        parse_substitution("{" + text + "}")
    elif verb == "diff":
        from conjq.syntax import parse_term

        for lhs, rhs in result:
            parse_term(lhs), parse_term(rhs)
    elif verb in ("equiv", "leq"):
        assert result in ("true", "false")
    elif verb == "oracle":
        assert result["verdict"] in ("confirmed", "confirmed-at-depth", "refuted", "inconclusive")
        for term in result.get("witness", {}).get("valuation", {}).values():
            from conjq.syntax import parse_term

            parse_term(term)
    elif verb == "generalize":
        for line in result:
            parse_formula(line)


@pytest.mark.parametrize("case", JSON_CASES, ids=[c[0] for c in JSON_CASES])
def test_json_output_round_trips(capsys, case):
    code, out, _ = run(capsys, "--json", *case)
    assert code == 0
    payload = json.loads(out)
    assert payload["verb"] == case[0] and payload["inputs"] == list(case[1:])
    _reparse(case[0], payload["result"])


def test_json_text_results_match_text_mode(capsys):
    _, text_out, _ = run(capsys, "solve", "exists Z . X = Z & Y = Z")
    _, json_out, _ = run(capsys, "--json", "solve", "exists Z . X = Z & Y = Z")
    assert json.loads(json_out)["result"] == text_out


def test_script_mode(tmp_path, capsys):
    script = tmp_path / "cmds.txt"
    script.write_text(
        '# comment\nsolve "X = f(X)"\n\nmeet "X=f(Y)" "X=f(a)"\nsolve "X = f("\n', encoding="utf-8"
    )
    code, out, err = run(capsys, "--script", str(script))
    assert out.splitlines() == ["false", "X = f(a) & Y = a"]
    assert code == 2 and "error[syntax]" in err


def test_repl_recovers_from_errors(capsys):
    session = Session()
    lines = ":trace on\nsolve \"f(X)=f(a)\"\nbogus 1\nsolve \"X = (\"\n:sig\n:quit\nsolve \"X=a\"\n"
    assert repl(session, io.StringIO(lines)) == 0
    out, err = capsys.readouterr()
    assert "step=1 at=/ before=f(X) = f(a) after=X = a" in out
    assert "X = a" in out.splitlines()
    assert "unknown verb" in err and "error[syntax]" in err
    assert "a/0, f/1" in out
    assert out.count("X = a") == 2


def test_repl_sig_extension(capsys):
    session = Session()
    repl(session, io.StringIO(":sig c/0; r/2\nsolve \"r(c, X)\"\n"))
    out, _ = capsys.readouterr()
    assert "c/0; r/2" in out and "r(c, X)" in out


def test_module_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "conjq", "--json", "oracle", "X = f(a)", "exists V . X = f(V)"]
    first = subprocess.run(cmd, capture_output=True, text=True)
    second = subprocess.run(cmd, capture_output=True, text=True)
    assert first.returncode == second.returncode == 0
    strip = lambda s: {k: v for k, v in json.loads(s)["result"].items() if k != "elapsed_ms"}
    assert strip(first.stdout) == strip(second.stdout)


def test_fuzz_verb_is_seeded(capsys):
    a = run(capsys, "--seed", "7", "fuzz", "query", "3")[1]
    b = run(capsys, "--seed", "7", "fuzz", "query", "3")[1]
    assert a == b and len(a.splitlines()) == 3
    for line in a.splitlines():
        parse_formula(line)
