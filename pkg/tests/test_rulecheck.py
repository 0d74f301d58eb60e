"""Well-typed and well-formed rules on the indexed-list example."""

from cac import corpus_file
from cac.parser import ParseFailure, parse, parse_file, parse_term
from cac.rulecheck import (
    check_S3, check_S4, check_S5, check_well_formed, default_env, derived_type, forced_equations,
)
from cac.terms import Var
from cac.verdict import Verdict

LISTN = parse_file(corpus_file("listn"))


def rule(prog, name):
    return next(r for r in prog.sig.rules if r.name == name)


def test_appn_second_rule_is_well_formed():
    r = rule(LISTN, "appn#2")
    wf = check_well_formed(LISTN.sig, LISTN.inductive, r)
    assert wf.verdict is Verdict.PASS
    # l' is an argument itself; l is reached through consn
    assert wf.paths[Var("l'")] == (4, [])
    i, path = wf.paths[Var("l")]
    assert i == 2 and path[-1].constructor == "consn"


def test_appn_second_rule_S4_positions():
    r = rule(LISTN, "appn#2")
    res = check_S4(LISTN.sig, r)
    assert res.verdict is Verdict.PASS
    got = {x.name: list(p) for x, p in res.positions.items()}
    assert got == {"x": [2, 1], "n": [2, 2], "l": [2, 3], "n'": [3], "l'": [4]}


def test_appn_second_rule_S3_and_S5():
    r = rule(LISTN, "appn#2")
    assert check_S3(LISTN.sig, r).verdict is Verdict.PASS
    assert check_S5(LISTN.sig, r).verdict is Verdict.PASS
    eqs = forced_equations(LISTN.sig, r.lhs)
    # the argument typed listn(p) is built as listn(s(n)), forcing p = s(n)
    assert [(pos, str(a), str(b)) for pos, a, b in eqs] == [((2,), "listn(p)", "listn(s(n))")]


def test_derived_type_of_an_argument():
    r = rule(LISTN, "appn#2")
    assert derived_type(LISTN.sig, r.lhs, (2, 3)) == parse_term("listn(n)", LISTN, r.env)
    assert derived_type(LISTN.sig, r.lhs, (4,)) == parse_term("listn(n')", LISTN, r.env)


def test_default_environment_types_every_variable():
    r = rule(LISTN, "appn#2")
    env = dict(default_env(LISTN.sig, r.lhs, r.rho))
    assert set(env) >= {Var("x"), Var("n"), Var("l"), Var("n'"), Var("l'")}


def test_every_corpus_rule_is_well_formed():
    for name in ("nat", "list", "listn", "ord", "int", "systemt"):
        prog = parse_file(corpus_file(name))
        for r in prog.sig.rules:
            if r.lhs.args or prog.sig[r.head].arity == 0:
                wf = check_well_formed(prog.sig, prog.inductive, r)
                assert wf.verdict is Verdict.PASS, (name, r.name, wf)


def test_S3_rejects_an_ill_typed_right_hand_side():
    prog = parse("""
symbol nat : * .
symbol 0 : nat .
symbol B : * .
symbol t : B .
symbol f : nat -> nat .
rule f(x) --> t .
""")
    res = check_S3(prog.sig, prog.sig.rules[0])
    assert res.verdict is Verdict.FAIL and res.witnesses


def test_unknown_variable_in_right_hand_side_is_a_parse_error():
    try:
        parse("symbol nat : * .\nsymbol f : nat -> nat .\nrule f(x) --> y .\n")
    except ParseFailure as e:
        assert e.diagnostics[0].line == 3
        return
    raise AssertionError("expected a parse failure")
