"""Polarity against a literal recursion, admissibility, predicate classes."""

from hypothesis import given
from hypothesis import strategies as st

from cac import corpus_file
from cac.parser import parse, parse_file
from cac.positivity import PredicateClass, check_admissible, classify_predicate, polarity
from cac.terms import Abs, App, BOX, Bound, Prod, STAR, Sort, Sym, Term, Var, abstract
from cac.verdict import Verdict

SOURCE = """
symbol nat : * .
symbol 0 : nat .
symbol T : * .
symbol list : * -> * .
symbol pair : * -> * -> * .
symbol vec : * -> nat -> * .
symbol F : * -> * .
symbol g : nat -> nat .
inductive list ind { 1 } .
inductive pair ind { 1, 2 } .
inductive vec ind { 1 } .
rule (A:*) F(A) --> A .
"""
PROG = parse(SOURCE)
SIG, IND = PROG.sig, PROG.inductive


# -- the definition, transcribed clause by clause ---------------------------------


def every(t: Term, p=()) -> set:
    out = {p}
    match t:
        case Sym(_, args):
            for i, a in enumerate(args, 1):
                out |= every(a, p + (i,))
        case Prod(d, b) | Abs(d, b) | App(d, b):
            out |= every(d, p + (1,)) | every(b, p + (2,))
    return out


def is_object(t: Term) -> bool:
    match t:
        case Var(_, box) | Bound(_, box):
            return not box
        case Sym(f):
            return not SIG.is_box(f)
        case Abs(_, b):
            return is_object(b)
        case App(f, _):
            return is_object(f)
    return False


def pos(t: Term, sign: int) -> set:
    """Positive positions for ``sign = +1``, negative ones for ``-1``."""
    plus = sign > 0
    match t:
        case Sort() | Var() | Bound():
            return {()} if plus else set()
        case Sym(f, args):
            if not (SIG.is_box(f) and SIG.is_constant(f)):
                return {()} if plus else set()
            out = {()} if plus else set()
            for i in IND.ind_of(f):
                out |= {(i,) + q for q in pos(args[i - 1], sign)}
            return out
        case Prod(v, w):
            return {(1,) + q for q in pos(v, -sign)} | {(2,) + q for q in pos(w, sign)}
        case Abs(v, w):
            return {(1,) + q for q in every(v)} | {(2,) + q for q in pos(w, sign)}
        case App(v, u):
            out = {(1,) + q for q in pos(v, sign)}
            if is_object(u):
                out |= {(2,) + q for q in every(u)}
            return out
    raise TypeError(t)


# -- random predicates and predicate types of depth at most 6 -----------------------

X, Y = Var("X", True), Var("Y", True)
x = Var("x")
objects = st.sampled_from([Sym("0"), x, Sym("g", (Sym("0"),)), Sym("g", (x,))])


def bind(kind, v, dom, body):
    return kind(dom, abstract(body, v), v.box, v.name)


def preds(depth: int):
    leaf = st.sampled_from([X, Y, Sym("T"), Sym("nat")])
    if depth <= 1:
        return leaf
    sub = preds(depth - 1)
    return st.one_of(
        leaf,
        st.builds(lambda a: Sym("list", (a,)), sub),
        st.builds(lambda a, b: Sym("pair", (a, b)), sub, sub),
        st.builds(lambda a, o: Sym("vec", (a, o)), sub, objects),
        st.builds(lambda a: Sym("F", (a,)), sub),
        st.builds(bind, st.just(Prod), st.sampled_from([X, Y, x]), st.one_of(sub, st.just(STAR)), sub),
        st.builds(bind, st.just(Abs), st.sampled_from([X, x]), sub, sub),
        st.builds(App, sub, st.one_of(objects, sub)),
    )


def kinds(depth: int):
    if depth <= 1:
        return st.just(STAR)
    return st.one_of(st.just(STAR), st.builds(bind, st.just(Prod), st.sampled_from([X, x]),
                                              st.one_of(preds(depth - 1), st.just(STAR)), kinds(depth - 1)))


predicate_terms = st.one_of(preds(6), kinds(6))


def polarity_agrees(t):
    got = polarity(SIG, IND, t)
    assert got.pos == pos(t, +1)
    assert got.neg == pos(t, -1)
    assert got.neutral == got.pos & got.neg
    assert not (got.non_neutral & got.neutral)


def test_polarity_matches_the_definition():
    given(predicate_terms)(polarity_agrees)()


def test_domain_of_a_product_flips_sign():
    A = Sym("T")
    t = Prod(Prod(A, A), A)
    got = polarity(SIG, IND, t)
    assert (1, 1) in got.pos and (1, 2) in got.neg and (2,) in got.pos


def test_object_arguments_are_neutral():
    t = App(X, Sym("0"))
    got = polarity(SIG, IND, t)
    assert (2,) in got.neutral


def test_objects_have_no_polarity():
    try:
        polarity(SIG, IND, Sym("0"))
    except ValueError:
        return
    raise AssertionError("expected a ValueError")


# -- admissibility and classification ------------------------------------------------


def test_non_positive_constructor_fails_I3():
    prog = parse_file(corpus_file("nonpositive"))
    v, bad = check_admissible(prog.sig, prog.inductive)
    assert v is Verdict.FAIL
    assert bad[0].condition == "I3" and bad[0].constructor == "c" and bad[0].position == (1,)


def test_positive_structures_are_admissible():
    for name in ("nat", "list", "listn", "ord", "proc", "form", "int", "breadthfirst"):
        prog = parse_file(corpus_file(name))
        v, bad = check_admissible(prog.sig, prog.inductive)
        assert v is Verdict.PASS, (name, bad)


def test_defined_predicate_must_be_neutral():
    prog = parse(SOURCE + "symbol bad : F(T) -> T .\n")
    v, bad = check_admissible(prog.sig, prog.inductive)
    assert v is Verdict.FAIL
    # T also sits inside F(T), which is not a positive position
    assert {b.condition for b in bad} == {"I3", "I5"}


CLASSES = [
    ("listn", "listn", PredicateClass.PRIMITIVE),
    ("nat", "nat", PredicateClass.PRIMITIVE),
    ("int", "int", PredicateClass.PRIMITIVE),
    ("list", "list", PredicateClass.BASIC),
    ("ord", "ord", PredicateClass.STRICTLY_POSITIVE),
    ("proc", "proc", PredicateClass.STRICTLY_POSITIVE),
    ("form", "form", PredicateClass.STRICTLY_POSITIVE),
    ("breadthfirst", "cont", PredicateClass.NOT_STRICTLY_POSITIVE),
]


def test_classification_table():
    for file, pred, expected in CLASSES:
        prog = parse_file(corpus_file(file))
        assert classify_predicate(prog.sig, prog.inductive, pred) is expected, (file, pred)


def test_classes_are_nested():
    assert PredicateClass.PRIMITIVE.at_least(PredicateClass.BASIC)
    assert PredicateClass.BASIC.at_least(PredicateClass.STRICTLY_POSITIVE)
    assert not PredicateClass.NOT_STRICTLY_POSITIVE.at_least(PredicateClass.STRICTLY_POSITIVE)
    assert BOX != STAR
