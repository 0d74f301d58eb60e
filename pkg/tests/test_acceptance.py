"""One test per acceptance criterion, each printing a single pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also repeated in the terminal summary.
"""

from __future__ import annotations

import functools
import os
import subprocess
import sys
import time

from hypothesis import HealthCheck, given, settings

from cac import CORPUS, corpus_file
from cac.audit import Options, audit
from cac.parser import parse_file, parse_term
from cac.positivity import PredicateClass, classify_predicate
from cac.rewrite import normalize
from cac.rulecheck import check_S4, check_well_formed
from cac.schema import ArgumentOrder, closure_check
from cac.terms import App, Sym, Var, show
from cac.verdict import Verdict

import test_positivity
import test_rewrite
import test_schema
import test_terms
from test_typecheck import ENVS, TERMS_PER_SYSTEM, passing_systems, subject_reduction

RESULTS: list[str] = []


def record(n: int, title: str, problems: list[str], detail: str = "") -> None:
    status = "PASS" if not problems else "FAIL"
    text = "; ".join(problems) if problems else detail
    line = f"criterion {n} {title}: {status}" + (f" ({text})" if text else "")
    print(line)
    RESULTS.append(line)
    assert not problems, line


def hammer(prop, strategies, n: int) -> int:
    """Run ``prop`` on ``n`` generated examples and return how many ran."""
    count = [0]

    @functools.wraps(prop)
    def counted(*args, **kwargs):
        count[0] += 1
        prop(*args, **kwargs)

    run = settings(max_examples=n, deadline=None, database=None,
                   suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large,
                                          HealthCheck.filter_too_much])
    run(given(*strategies)(counted))()
    return count[0]


def failing_tags(rep) -> set[str]:
    return {tag for path, _ in rep.root.failures() for tag in path}


def rule(prog, name):
    return next(r for r in prog.sig.rules if r.name == name)


# -- 1 -------------------------------------------------------------------------------

CORPUS_VERDICTS = [
    ("cicr", Verdict.PASS, None),
    ("nonpositive", Verdict.FAIL, "I3"),
    ("division", Verdict.FAIL, "A4"),
    ("breadthfirst", Verdict.FAIL, "A4a"),
    ("nonlinear", Verdict.UNKNOWN, "A1"),
]


def test_criterion_1_corpus_verdicts():
    problems = []
    start = time.perf_counter()
    for name, verdict, tag in CORPUS_VERDICTS:
        rep = audit(parse_file(corpus_file(name)), Options())
        tags = failing_tags(rep)
        if rep.verdict is not verdict:
            where = ", ".join(sorted("/".join(p[1:]) for p, _ in rep.root.failures()))
            problems.append(f"{name}: expected {verdict.value}, got {rep.verdict.value} at {where}")
        elif tag and tag not in tags:
            problems.append(f"{name}: {verdict.value} but not tagged {tag}")
    elapsed = time.perf_counter() - start
    if elapsed > 5:
        problems.append(f"took {elapsed:.2f}s")
    record(1, "corpus verdicts", problems, f"{elapsed:.2f}s")


# -- 2 -------------------------------------------------------------------------------


def test_criterion_2_worked_examples():
    problems = []
    listn = parse_file(corpus_file("listn"))
    r = rule(listn, "appn#2")
    if check_well_formed(listn.sig, listn.inductive, r).verdict is not Verdict.PASS:
        problems.append("appn#2 is not well-formed")
    s4 = check_S4(listn.sig, r)
    got = {x.name: list(p) for x, p in s4.positions.items()}
    want = {"x": [2, 1], "n": [2, 2], "l": [2, 3], "n'": [3], "l'": [4]}
    if s4.verdict is not Verdict.PASS or got != want:
        problems.append(f"S4 map {got}")
    cl = closure_check(listn.sig, listn.inductive, listn.precedence, listn.status_of, r)
    if cl.verdict is not Verdict.PASS:
        problems.append("appn#2 is not in the computable closure")

    ord_ = parse_file(corpus_file("ord"))
    r = rule(ord_, "add#3")
    order = ArgumentOrder(ord_.sig, ord_.inductive, r, ord_.status_of("add"))
    lim_f, f_n = r.lhs.args[1], App(Var("f"), Var("n"))
    if not order.acc.gt2((lim_f, Sym("ord")), f_n, dict(r.env)):
        problems.append("lim(f):ord is not >2 above f n")
    if order.acc.gt1((lim_f, Sym("ord")), (f_n, Sym("ord"))):
        problems.append("f n is weakly accessible, so gt2 is not what decides")
    cl = closure_check(ord_.sig, ord_.inductive, ord_.precedence, ord_.status_of, r)
    if cl.verdict is not Verdict.PASS:
        problems.append("add#3 is not in the computable closure")
    record(2, "worked examples", problems)


# -- 3 -------------------------------------------------------------------------------


def test_criterion_3_computation():
    problems = []
    prog = parse_file(corpus_file("systemt"))
    tr = normalize(parse_term("plus (s(s(0))) (s(s(0)))", prog), prog.sig)
    four = parse_term("s(s(s(s(0))))", prog)
    if tr.result != four or len(tr.steps) > 10 or tr.replay() != four:
        problems.append(f"System T: {show(tr.result)} in {len(tr.steps)} steps")
    prog = parse_file(corpus_file("nat"))
    tr = normalize(parse_term("plus(s(0), s(0))", prog), prog.sig)
    if tr.result != parse_term("s(s(0))", prog) or len(tr.steps) != 2:
        problems.append(f"plus: {show(tr.result)} in {len(tr.steps)} steps")
    record(3, "computation", problems, "2+2 in System T and plus(s(0), s(0))")


# -- 4 -------------------------------------------------------------------------------


def test_criterion_4_subject_reduction():
    problems = []
    systems = passing_systems()
    missing = sorted(set(systems) - set(ENVS))
    if missing:
        problems.append(f"no generator environment for {missing}")
    total_steps = 0
    for name in sorted(set(systems) & set(ENVS)):
        terms, steps, violations = subject_reduction(name)
        total_steps += steps
        if terms < TERMS_PER_SYSTEM:
            problems.append(f"{name}: only {terms} terms")
        problems += [f"{name}: {v}" for v in violations[:3]]
    record(4, "subject reduction", problems,
           f"{len(systems)} systems x {TERMS_PER_SYSTEM} terms, {total_steps} steps checked")


# -- 5 -------------------------------------------------------------------------------


def test_criterion_5_oracles():
    runs = [
        ("critical pairs", test_rewrite.critical_pairs_agree, (test_rewrite.rule_lists(),), 1000),
        ("polarity", test_positivity.polarity_agrees, (test_positivity.predicate_terms,), 1000),
        ("multiset", test_schema.multiset_agrees, (test_schema.small, test_schema.small), 2000),
        ("lex of multisets", test_schema.lex_agrees, (test_schema.statuses_and_tuples(),), 2000),
    ]
    problems, counts = [], []
    for name, prop, strategies, n in runs:
        try:
            ran = hammer(prop, strategies, n)
        except Exception as e:  # a falsified example
            problems.append(f"{name}: {type(e).__name__}: {e}")
            continue
        counts.append(f"{name} {ran}")
        if ran < n:
            problems.append(f"{name}: only {ran} examples")
    record(5, "oracle equivalence", problems, ", ".join(counts))


# -- 6 -------------------------------------------------------------------------------

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


def test_criterion_6_classification():
    problems = []
    for file, pred, expected in CLASSES:
        prog = parse_file(corpus_file(file))
        got = classify_predicate(prog.sig, prog.inductive, pred)
        if got is not expected:
            problems.append(f"{pred}: {got.value}, expected {expected.value}")
    record(6, "classification", problems, f"{len(CLASSES)} predicates")


# -- 7 -------------------------------------------------------------------------------


def test_criterion_7_structural_invariants():
    problems, counts = [], []
    for name, (prop, strategies) in test_terms.PROPERTIES.items():
        try:
            ran = hammer(prop, strategies, 10_000)
        except Exception as e:
            problems.append(f"{name}: {type(e).__name__}: {e}")
            continue
        counts.append(f"{name} {ran}")
        if ran < 10_000:
            problems.append(f"{name}: only {ran} examples")
    record(7, "structural invariants", problems, ", ".join(counts))


# -- 8 -------------------------------------------------------------------------------


def test_criterion_8_determinism():
    problems = []
    files = sorted(CORPUS.glob("*.cac"))
    for path in files:
        outs = []
        for seed in ("1", "2"):
            env = {**os.environ, "PYTHONHASHSEED": seed}
            proc = subprocess.run([sys.executable, "-m", "cac", "audit", "--json", str(path)],
                                  capture_output=True, env=env, check=False)
            outs.append(proc.stdout)
        if outs[0] != outs[1] or not outs[0]:
            problems.append(f"{path.stem}: outputs differ")
    record(8, "determinism", problems, f"{len(files)} corpus files")
