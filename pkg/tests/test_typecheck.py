"""Type inference, conversion modulo rules, and subject reduction on the corpus."""

import pytest

from cac import CORPUS, corpus_file
from cac.audit import Options, audit
from cac.parser import parse, parse_file, parse_term
from cac.rewrite import step
from cac.terms import BOX, STAR, SyntacticClass, Var, show
from cac.typecheck import check, check_signature, infer, typing_class
from cac.verdict import Verdict
from typedgen import TypedGen

# free variables available to generated terms, per corpus system
ENVS = {
    "nat": "x:nat",
    "int": "x:int",
    "list": "A:*, a:A, l:list(A)",
    "ord": "x:ord, f:nat -> ord",
    "form": "t:term, p:form, q:term -> form",
    "systemt": "x:nat",
}
TERMS_PER_SYSTEM = 1000
FUEL = 10_000


def environment(prog, spec: str):
    env = []
    for item in spec.split(", "):
        name, ty = item.split(":", 1)
        env.append((Var(name, ty == "*"), parse_term(ty, prog, tuple(env))))
    return tuple(env)


def passing_systems() -> list[str]:
    out = []
    for path in sorted(CORPUS.glob("*.cac")):
        prog = parse_file(path)
        if audit(prog, Options()).verdict is Verdict.PASS:
            out.append(path.stem)
    return out


def subject_reduction(name: str, count: int = TERMS_PER_SYSTEM, seed: int = 7) -> tuple[int, int, list[str]]:
    """Generate ``count`` typable terms and check every reduction step keeps the type."""
    prog = parse_file(corpus_file(name))
    env = environment(prog, ENVS[name])
    gen = TypedGen(prog.sig, list(env), seed)
    terms = steps = 0
    violations = []
    while terms < count:
        t = gen.term(gen.rng.choice(gen.targets()), 5)
        res = infer(prog.sig, env, t, FUEL)
        assert res.ok, f"generator produced an ill-typed term {show(t)}: {res.error.message}"
        terms += 1
        for _ in range(FUEL):
            nxt = step(t, prog.sig)
            if nxt is None:
                break
            t, info = nxt
            steps += 1
            v, _ = check(prog.sig, env, t, res.type, FUEL)
            if v is not Verdict.PASS:
                violations.append(f"{info.rule} at {info.position}: {show(t)} is not of type {show(res.type)}")
    return terms, steps, violations


def test_passing_systems_are_the_expected_ones():
    assert passing_systems() == sorted(ENVS)


@pytest.mark.parametrize("name", sorted(ENVS))
def test_subject_reduction(name):
    terms, steps, violations = subject_reduction(name)
    assert terms >= TERMS_PER_SYSTEM and steps > 0
    assert violations == []


# -- unit cases -----------------------------------------------------------------------


def test_polymorphic_application():
    prog = parse_file(corpus_file("list"))
    env = environment(prog, "A:*, a:A")
    t = parse_term("app(A, cons(A, a, nil(A)), nil(A))", prog, env)
    res = infer(prog.sig, env, t)
    assert res.ok and show(res.type) == "list(A)"


def test_conversion_uses_the_rules():
    prog = parse_file(corpus_file("listn"))
    env = environment(prog, "a:T")
    t = parse_term("appn(s(0), consn(a, 0, niln), s(0), consn(a, 0, niln))", prog, env)
    expected = parse_term("listn(s(s(0)))", prog, env)
    v, res = check(prog.sig, env, t, expected)
    assert v is Verdict.PASS
    assert show(res.type) == "listn(plus(s(0), s(0)))"


def test_ill_typed_argument_is_rejected():
    prog = parse("symbol nat : * .\nsymbol B : * .\nsymbol b : B .\nsymbol s : nat -> nat .\n")
    res = infer(prog.sig, (), parse_term("s(b)", prog))
    assert not res.ok and res.error.kind


def test_sorts_and_classes():
    prog = parse_file(corpus_file("list"))
    assert infer(prog.sig, (), STAR).type == BOX
    env = environment(prog, "A:*, a:A")
    assert typing_class(prog.sig, env, parse_term("list(A)", prog, env)) is SyntacticClass.PREDICATE
    assert typing_class(prog.sig, env, parse_term("nil(A)", prog, env)) is SyntacticClass.OBJECT
    assert typing_class(prog.sig, env, parse_term("* -> *", prog, env)) is SyntacticClass.KIND


def test_beta_in_types():
    prog = parse_file(corpus_file("systemt"))
    t = parse_term("natrec(nat, 0, \\m:nat. \\r:nat. s(r), s(0))", prog)
    assert show(infer(prog.sig, (), t).type) == "nat"


def test_every_corpus_signature_is_well_typed():
    for path in sorted(CORPUS.glob("*.cac")):
        prog = parse_file(path)
        assert check_signature(prog.sig) == [], path.stem
