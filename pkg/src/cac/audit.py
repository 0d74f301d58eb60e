"""Strong-normalization audit: conditions A0 to A4 with tagged verdicts."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .parser import Program
from .positivity import Classifier, Polarity, PredicateClass, check_admissible
from .rewrite import DEFAULT_FUEL, Reducer, local_confluence, rename_apart, unify
from .rpo import mpo_terminates
from .rulecheck import apply_constraints, check_S3, check_S4, check_S5, default_env, peak_constraints
from .schema import RuleSchema, check_recursive_system, status_compatible
from .signature import InductiveStructure, QuasiOrder, Rule, Signature, Status, codomain_head
from .terms import (
    STAR, Abs, Prod, Sym, Term, Var, free_box_vars, free_vars, is_algebraic, show, spine, subterms,
    symbol_positions, symbols, var_occurrences,
)
from .typecheck import check_signature, infer
from .verdict import Check, Verdict, Witness, combine, disjunction

EXHAUSTIVE_LIMIT = 16  # largest F₁ candidate set searched exhaustively


# -- properties of rewrite systems ----------------------------------------------


def duplicating(r: Rule) -> list[Witness]:
    left = var_occurrences(r.lhs)
    out = []
    for x, n in sorted(var_occurrences(r.rhs).items(), key=lambda kv: kv[0].name):
        if n > left.get(x, 0):
            out.append(Witness(f"{x.name} occurs {n} times on the right, {left.get(x, 0)} on the left",
                               r.name))
    return out


def left_linear(r: Rule) -> list[Witness]:
    return [Witness(f"{x.name} occurs {n} times in the left-hand side", r.name)
            for x, n in sorted(var_occurrences(r.lhs).items(), key=lambda kv: kv[0].name) if n > 1]


def first_order_symbol(sig: Signature, classifier: Classifier, g: str) -> list[Witness]:
    """``g`` is a predicate of maximal arity or a constructor of a primitive predicate."""
    d = sig[g]
    if d.box:
        t = d.type
        for _ in range(d.arity):
            if not isinstance(t, Prod):
                break
            t = t.body
        if t == STAR:
            return []
        return [Witness(f"{g} is a predicate symbol not of maximal arity")]
    c = codomain_head(d)
    if c is not None and c in sig.symbols and sig.is_box(c) and sig.is_constant(c):
        if classifier.classify(c) is PredicateClass.PRIMITIVE:
            return []
        return [Witness(f"{g} builds {c}, which is {classifier.classify(c).value}, not primitive")]
    return [Witness(f"{g} is neither a predicate symbol nor a constructor of a primitive predicate")]


def algebraic_rhs(r: Rule) -> list[Witness]:
    return [] if is_algebraic(r.rhs) else [Witness(f"right-hand side {show(r.rhs)} is not algebraic", r.name)]


def primitive_rhs(sig: Signature, classifier: Classifier, group: set[str], r: Rule) -> list[Witness]:
    """The right-hand side has the shape ``[x⃗:T⃗] g(u⃗) v⃗`` with ``g`` in the group or primitive."""
    t = r.rhs
    while isinstance(t, Abs):
        t = t.body
    head, _ = spine(t)
    if isinstance(head, Sym):
        g = head.name
        if g in group:
            return []
        if sig.is_box(g) and sig.is_constant(g) and classifier.classify(g) is PredicateClass.PRIMITIVE:
            return []
    return [Witness(f"right-hand side {show(r.rhs)} is not headed by the group or a primitive predicate",
                    r.name)]


def small(r: Rule) -> list[Witness]:
    out = []
    for X in sorted(free_box_vars(r.rhs), key=lambda x: x.name):
        if not any(a == X for a in r.lhs.args):
            out.append(Witness(f"predicate variable {X.name} of the right-hand side is not an argument "
                               f"of the left-hand side", r.name))
    return out


def positive(pol: Polarity, group: set[str], r: Rule) -> list[Witness]:
    out = []
    try:
        pos = pol(r.rhs).pos
    except ValueError as e:
        return [Witness(str(e), r.name)]
    for g in sorted(group):
        for p in sorted(symbol_positions(r.rhs, g) - pos):
            out.append(Witness(f"{g} occurs at a non-positive position", r.name, p))
    return out


def simple(sig: Signature, rules: Sequence[Rule], everything: Sequence[Rule]) -> list[Witness]:
    """No matching on defined symbols and no root overlap with another rule."""
    out = []
    for r in rules:
        for p, s in subterms(r.lhs):
            if p and isinstance(s, Sym) and sig.is_defined(s.name):
                out.append(Witness(f"left-hand side matches on defined symbol {s.name}", r.name, p))
        la, _ = rename_apart(r, "#a")
        for o in everything:
            if o.name == r.name:
                continue
            lb, _ = rename_apart(o, "#b")
            if unify(la, lb) is not None:
                out.append(Witness(f"left-hand side overlaps with {o.name} at the root", r.name))
    return out


def safe(sig: Signature, r: Rule) -> list[Witness]:
    """Predicate arguments of the type of the head are matched by distinct predicate variables."""
    ys, doms, cod = sig[r.head].scheme()
    later = set()
    for t in doms + [cod]:
        later |= free_vars(t)
    env = dict(r.env)
    rho = r.subst
    seen: dict[Var, Var] = {}
    out = []
    for i, y in enumerate(ys):
        if not y.box or y not in later:
            continue
        arg = r.lhs.args[i]
        img = rho.get(arg, arg) if isinstance(arg, Var) else arg
        name = y.name.rstrip("@")
        if not (isinstance(img, Var) and img.box and img in env):
            out.append(Witness(f"argument {i + 1} ({name}) is {show(img)}, not a predicate variable of Γ₀",
                               r.name, (i + 1,)))
        elif img in seen:
            out.append(Witness(f"arguments {name} and {seen[img].name.rstrip('@')} share {img.name}",
                               r.name, (i + 1,)))
        else:
            seen[img] = y
    return out


# -- the audit ------------------------------------------------------------------


@dataclass
class Options:
    fuel: int = DEFAULT_FUEL
    strict_s5: bool = False  # an unknown S5 becomes a failure
    warn_s5: bool = False    # an unknown S5 is reported but does not block
    relaxed: bool = False    # S4 and accessibility compare types up to joinability


@dataclass
class Partition:
    first_order: list[str]
    higher_order: list[str]
    searched: int


@dataclass
class Report:
    root: Check
    partition: Partition
    local_confluence: Verdict
    confluence: Verdict
    classes: dict[str, PredicateClass]
    precedence: list[list[str]] = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        return self.root.verdict

    def to_json(self) -> dict:
        return {
            "classes": {c: k.value for c, k in sorted(self.classes.items())},
            "conditions": [c.to_json() for c in self.root.children],
            "confluence": {"global": self.confluence.value, "local": self.local_confluence.value},
            "partition": {"F1": self.partition.first_order, "Fomega": self.partition.higher_order},
            "verdict": self.verdict.value,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def leaf(tag: str, witnesses: Iterable[Witness], bad: Verdict = Verdict.FAIL) -> Check:
    ws = list(witnesses)
    return Check(tag, bad if ws else Verdict.PASS, ws)


class Auditor:
    def __init__(self, program: Program, options: Options | None = None):
        self.p = program
        self.o = options or Options()
        self.sig = program.sig
        self.ind: InductiveStructure = program.inductive
        self.prec: QuasiOrder = program.precedence
        self.status: Callable[[str], Status] = program.status_of
        self.classifier = Classifier(self.sig, self.ind)
        self.polarity = Polarity(self.sig, self.ind)
        self._schemas: dict[str, RuleSchema] | None = None

    def rules_of(self, names: Iterable[str]) -> list[Rule]:
        names = set(names)
        return [r for r in self.sig.rules if r.head in names]

    def schemas(self) -> dict[str, RuleSchema]:
        """General Schema results for every rule, computed once."""
        if self._schemas is None:
            _, out = check_recursive_system(self.sig, self.ind, self.prec, self.status, self.sig.rules,
                                            self.o.fuel, self.o.relaxed)
            self._schemas = {s.rule: s for s in out if s.rule != "status"}
        return self._schemas

    def recursive(self, names: Iterable[str]) -> tuple[Verdict, list[Witness]]:
        names = sorted(set(names))
        vs, ws = [], []
        for r in self.rules_of(names):
            s = self.schemas()[r.name]
            vs.append(s.verdict)
            if s.verdict is not Verdict.PASS:
                ws += s.witnesses or [Witness("the rule is not in the computable closure", r.name)]
        compat = status_compatible(self.sig, self.ind, self.prec, self.status, names)
        ws += compat
        vs.append(Verdict.FAIL if compat else Verdict.PASS)
        return combine(vs), ws

    # A0
    def a0(self) -> Check:
        sig_errs = [Witness(f"type of {f} is ill-typed: {e.message}") for f, e in check_signature(self.sig, self.o.fuel)]
        s3, s4, s5 = [], [], []
        v3, v4, v5 = [], [], []
        for r in self.sig.rules:
            a = check_S3(self.sig, r, self.o.fuel)
            b = check_S4(self.sig, r, self.o.relaxed, self.o.fuel)
            c = check_S5(self.sig, r)
            v3.append(a.verdict), v4.append(b.verdict), v5.append(c.verdict)
            s3 += a.witnesses
            s4 += b.witnesses
            s5 += c.witnesses
        v5c = combine(v5)
        if v5c is Verdict.UNKNOWN and self.o.strict_s5:
            v5c = Verdict.FAIL
        elif v5c is Verdict.UNKNOWN and self.o.warn_s5:
            v5c = Verdict.PASS
        return Check.node("A0", [
            leaf("types", sig_errs),
            Check("S3", combine(v3), s3),
            Check("S4", combine(v4), s4),
            Check("S5", v5c, s5, semantic=True),
        ])

    # A2
    def a2(self) -> Check:
        _, violations = check_admissible(self.sig, self.ind)
        kids = []
        for cond in ("I2", "I3", "I4", "I5", "I6"):
            kids.append(leaf(cond, [v.witness() for v in violations if v.condition == cond]))
        return Check.node("A2", kids)

    # A3
    def a3(self) -> Check:
        preds = [f for f in self.sig.defined if self.sig.is_box(f)]
        kids = []
        done: set[str] = set()
        for f in preds:
            if f in done:
                continue
            group = [g for g in preds if self.prec.eq(f, g)]
            done.update(group)
            kids.append(self.a3_group(group))
        return Check.node("A3", kids)

    def a3_group(self, group: list[str]) -> Check:
        gs = set(group)
        rules = self.rules_of(gs)
        prim = [w for r in rules for w in primitive_rhs(self.sig, self.classifier, gs, r)]
        pos = [w for r in rules for w in positive(self.polarity, gs, r)]
        sm = [w for r in rules for w in small(r)]
        si = simple(self.sig, rules, self.sig.rules)
        rv, rws = self.recursive(gs)
        p = leaf("A3p", prim)
        q = Check.node("A3q", [leaf("positive", pos), leaf("small", sm), leaf("simple", si)])
        rr = Check.node("A3r", [Check("recursive", rv, rws), leaf("small", sm), leaf("simple", si)])
        options = [p, q, rr]
        return Check(f"A3[{','.join(group)}]", disjunction(c.verdict for c in options), [], options)

    # A4
    def a4(self) -> tuple[Check, Partition]:
        defined = list(self.sig.defined)
        fo = {f: first_order_symbol(self.sig, self.classifier, f)
              + [w for r in self.rules_of([f]) for w in algebraic_rhs(r)] for f in defined}
        uses = {f: {g for r in self.rules_of([f]) for g in symbols(r.lhs) | symbols(r.rhs)
                    if g != f and g in fo} for f in defined}
        dup = {f: [w for r in self.rules_of([f]) for w in duplicating(r)] for f in defined}
        sf = {f: [w for r in self.rules_of([f]) for w in safe(self.sig, r)] for f in defined}
        term = {}
        for f in defined:
            rs = [r for r in self.rules_of([f]) if is_algebraic(r.rhs)]
            v, ws, _ = mpo_terminates(rs, self.prec, self.status, self.p.assumed)
            term[f] = (v, ws)

        # greatest F₁ closed under (c) and (d)
        greatest = [f for f in defined if not fo[f]]
        changed = True
        while changed:
            changed = False
            for f in list(greatest):
                if uses[f] - set(greatest):
                    greatest.remove(f)
                    changed = True

        def evaluate(f1: list[str]) -> list[Check]:
            s1 = set(f1)
            fw = [f for f in defined if f not in s1]
            c = [Witness(f"{f} uses {g}, which is in the higher-order part")
                 for f in f1 for g in sorted(uses[f]) if g not in s1]
            d = [w for f in f1 for w in fo[f]]
            e = [w for f in f1 for w in dup[f]] if fw else []
            fv = combine(term[f][0] for f in f1)
            fws = [w for f in f1 for w in term[f][1]]
            av, aws = self.recursive(fw) if fw else (Verdict.PASS, [])
            b = [w for f in fw for w in sf[f]]
            return [Check("A4a", av, aws), leaf("A4b", b), leaf("A4c", c), leaf("A4d", d),
                    leaf("A4e", e), Check("A4f", fv, fws)]

        def valid(f1: tuple[str, ...]) -> bool:
            s1 = set(f1)
            return all(uses[f] <= s1 for f in f1)

        candidates: list[list[str]]
        if len(greatest) <= EXHAUSTIVE_LIMIT:
            candidates = []
            for k in range(len(greatest), -1, -1):
                for combo in itertools.combinations(greatest, k):
                    if valid(combo):
                        candidates.append(list(combo))
        else:
            drop = {f for f in greatest if dup[f]}
            reduced = [f for f in greatest if f not in drop]
            while True:
                bad = [f for f in reduced if uses[f] - set(reduced)]
                if not bad:
                    break
                reduced = [f for f in reduced if f not in bad]
            candidates = [greatest, reduced, []]

        chosen, kids = greatest, None
        for want in (Verdict.PASS, Verdict.UNKNOWN):
            for cand in candidates:
                ks = evaluate(cand)
                if combine(k.verdict for k in ks) is want:
                    chosen, kids = cand, ks
                    break
            if kids is not None:
                break
        if kids is None:
            kids = evaluate(greatest)
        part = Partition(sorted(chosen), sorted(f for f in defined if f not in chosen), len(candidates))
        return Check.node("A4", kids), part

    # A1
    def a1(self, a4: Verdict) -> tuple[Check, Verdict]:
        lin = [w for r in self.sig.rules for w in left_linear(r)]
        _, pairs = local_confluence(self.sig, self.o.fuel)
        red = Reducer(self.sig, self.o.fuel)
        vs, cp = [], []
        for pair in pairs:
            if pair.joinable is Verdict.PASS:
                continue
            feasible, theta = peak_constraints(self.sig, pair.peak)
            if not feasible:
                continue  # no instance of the peak is typable
            v = pair.joinable
            note = ""
            if v is Verdict.FAIL and theta:
                left = apply_constraints(pair.left, theta)
                right = apply_constraints(pair.right, theta)
                if red.joinable(left, right) is Verdict.PASS:
                    v, note = Verdict.UNKNOWN, " (joinable only under the equations typing forces)"
            if v is Verdict.FAIL and not self.typable(pair.peak):
                v, note = Verdict.UNKNOWN, " (the peak is not typable as it stands)"
            vs.append(v)
            cp.append(Witness(pair.describe() + note, pair.rule_a, pair.position))
        lv = combine(vs)
        sn = [] if a4 is Verdict.PASS else [Witness("termination of the rewrite relation is not established")]
        kids = [
            leaf("left-linear", lin, Verdict.UNKNOWN),
            Check("critical-pairs", lv, cp),
            leaf("termination", sn, Verdict.UNKNOWN),
        ]
        if lin:
            kids[0].witnesses.append(Witness("confluence of non-left-linear systems is not decided "
                                             "(rewriting modulo equational theories is unsupported)"))
        return Check.node("A1", kids), lv

    def typable(self, t: Term) -> bool:
        try:
            env = default_env(self.sig, t)
        except ValueError:
            return False
        return infer(self.sig, env, t, self.o.fuel).ok

    def run(self) -> Report:
        a0 = self.a0()
        a2 = self.a2()
        a3 = self.a3()
        a4, part = self.a4()
        a1, local = self.a1(a4.verdict)
        root = Check.node("audit", [a0, a1, a2, a3, a4])
        classes = {C: self.classifier.classify(C) for C in self.sig.constant_predicates()}
        return Report(root, part, local, a1.verdict, classes)


def audit(program: Program, options: Options | None = None) -> Report:
    return Auditor(program, options).run()
