"""Status orderings, the computable closure and the General Schema."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .access import Accessibility, Pair
from .positivity import Classifier, PredicateClass
from .rewrite import DEFAULT_FUEL, Reducer
from .rulecheck import canonical, check_well_formed, lhs_pairs
from .signature import InductiveStructure, QuasiOrder, Rule, Signature, Status, status_heads
from .terms import Prod, Sort, Sym, Term, Var, show, substitute
from .typecheck import Checker, Context, TypingError
from .verdict import Verdict, Witness, combine

Gt = Callable[[Pair, Pair], bool]
Eq = Callable[[Pair, Pair], bool]


def multiset_difference(m: Sequence, n: Sequence, eq: Callable) -> list:
    """``m - n`` as multisets under ``eq``."""
    rest = list(n)
    out = []
    for a in m:
        for k, b in enumerate(rest):
            if eq(a, b):
                del rest[k]
                break
        else:
            out.append(a)
    return out


def mul_greater(m: Sequence, n: Sequence, gt: Callable, eq: Callable) -> bool:
    """Multiset extension: ``m ≠ n`` and each element of ``n - m`` is below one of ``m - n``."""
    dm = multiset_difference(m, n, eq)
    dn = multiset_difference(n, m, eq)
    if not dm:
        return False
    return all(any(gt(a, b) for a in dm) for b in dn)


def mul_equal(m: Sequence, n: Sequence, eq: Callable) -> bool:
    return len(m) == len(n) and not multiset_difference(m, n, eq)


def lex_mul_greater(stat: Status, left: Sequence, right: Sequence,
                    gts: Sequence[Callable], eq: Callable) -> bool:
    """``left >_stat right`` with the ``i``-th group compared by ``gts[i]``."""
    for k, group in enumerate(stat):
        m = [left[i - 1] for i in group]
        n = [right[i - 1] for i in group]
        if mul_greater(m, n, gts[k], eq):
            return True
        if not mul_equal(m, n, eq):
            return False
    return False


def strictly_positive_groups(sig: Signature, ind: InductiveStructure, f: str, stat: Status,
                             classifier: Classifier | None = None) -> set[int]:
    """Group indices (0-based) compared by >₂: heads strictly positive but not basic."""
    classifier = classifier or Classifier(sig, ind)
    heads = status_heads(sig, f)
    out = set()
    for k, group in enumerate(stat):
        hs = [heads[i - 1] for i in group if 1 <= i <= len(heads)]
        if hs and all(h is not None for h in hs):
            if classifier.classify(hs[0]) is PredicateClass.STRICTLY_POSITIVE:
                out.add(k)
    return out


class ArgumentOrder:
    """The ordering ``>`` on the arguments of one rule's head symbol."""

    def __init__(self, sig: Signature, ind: InductiveStructure, r: Rule, stat: Status,
                 classifier: Classifier | None = None, equal: Callable[[Term, Term], bool] | None = None):
        self.sig = sig
        self.r = r
        self.stat = stat
        self.gamma0 = dict(r.env)
        self.acc = Accessibility(sig, ind, r.subst, equal or (lambda a, b: a == b))
        self.sp = strictly_positive_groups(sig, ind, r.head, stat, classifier)
        self.lhs = lhs_pairs(sig, r)

    def pair_eq(self, a: Pair, b: Pair) -> bool:
        return a[0] == b[0] and self.acc.equal(self.acc.mod_rho(a[1]), self.acc.mod_rho(b[1]))

    def gt1(self, a: Pair, b: Pair) -> bool:
        return self.acc.gt1(a, b)

    def gt2(self, a: Pair, b: Pair) -> bool:
        return self.acc.gt2(a, b[0], self.gamma0)

    def decreases(self, call: Sequence[Pair]) -> bool:
        gts = [self.gt2 if k in self.sp else self.gt1 for k in range(len(self.stat))]
        return lex_mul_greater(self.stat, self.lhs, call, gts, self.pair_eq)


def args_decrease(sig: Signature, ind: InductiveStructure, r: Rule, stat: Status,
                  call: Sequence[Pair]) -> bool:
    return ArgumentOrder(sig, ind, r, stat).decreases(call)


# -- computable closure -----------------------------------------------------------


@dataclass(frozen=True)
class ClosureJudgment:
    context: tuple[tuple[Var, Term], ...]  # extension of Γ₀
    subject: Term
    type: Term
    rule: str

    def render(self) -> str:
        ext = ", ".join(f"{x.name}:{show(t)}" for x, t in self.context)
        ctx = "Γ₀" + (", " + ext if ext else "")
        return f"{ctx} ⊢c {show(self.subject)} : {show(self.type)}  ({self.rule})"


class ClosureChecker(Checker):
    """Type inference restricted to the computable closure of one rule."""

    def __init__(self, sig: Signature, ind: InductiveStructure, prec: QuasiOrder,
                 statuses: Callable[[str], Status], r: Rule, fuel: int = DEFAULT_FUEL,
                 classifier: Classifier | None = None, relaxed: bool = False):
        super().__init__(sig, fuel)
        self.ind = ind
        self.prec = prec
        self.statuses = statuses
        self.r = r
        self.f = r.head
        self.classifier = classifier or Classifier(sig, ind)
        equal = None
        if relaxed:
            equal = lambda a, b: a == b or self.red.joinable(a, b) is Verdict.PASS  # noqa: E731
        self.order = ArgumentOrder(sig, ind, r, statuses(r.head), self.classifier, equal)
        self.gamma0 = dict(r.env)
        self.trace: list[ClosureJudgment] = []
        self._typed_symbols: set[str] = set()

    def admit_symbol(self, ctx: Context, t: Sym, doms: list[Term]) -> None:
        g = t.name
        if self.prec.gt(self.f, g):
            self._type_of_symbol(g)
            return
        if self.prec.eq(self.f, g):
            self._type_of_symbol(g)
            sf, sg = self.statuses(self.f), self.statuses(g)
            if sf != sg:
                raise TypingError("symbol", f"{g} =F {self.f} but their statuses differ", t)
            if not self.order.decreases(list(zip(t.args, doms))):
                raise TypingError("symbol", f"arguments of {show(t)} are not smaller than those of "
                                  f"{show(self.r.lhs)}", t)
            return
        raise TypingError("symbol", f"{g} is not below {self.f} in the precedence", t)

    def _type_of_symbol(self, g: str) -> None:
        # side condition Γ₀ ⊢c τ_g : s, checked once per symbol
        if g in self._typed_symbols:
            return
        self._typed_symbols.add(g)
        saved = self.trace
        self.trace = []
        try:
            self.sort_of(Context(self.r.env), self.sig[g].type)
        finally:
            self.trace = saved

    def rule_name(self, ctx: Context, t: Term) -> str:
        match t:
            case Sort():
                return "ax"
            case Var():
                return "acc" if t in self.gamma0 else "var"
            case Sym(g):
                return "symb<" if self.prec.gt(self.f, g) else "symb="
            case Prod():
                return "prod"
        return type(t).__name__.lower()

    def infer(self, ctx: Context, t: Term) -> Term:
        ty = super().infer(ctx, t)
        ext = ctx.entries[len(self.r.env):]
        self.trace.append(ClosureJudgment(ext, t, ty, self.rule_name(ctx, t)))
        return ty


@dataclass
class ClosureResult:
    verdict: Verdict
    trace: list[ClosureJudgment] = field(default_factory=list)
    witnesses: list[Witness] = field(default_factory=list)
    culprit: Term | None = None


def closure_check(sig: Signature, ind: InductiveStructure, prec: QuasiOrder,
                  statuses: Callable[[str], Status], r: Rule, fuel: int = DEFAULT_FUEL,
                  classifier: Classifier | None = None, relaxed: bool = False) -> ClosureResult:
    """``Γ₀ ⊢c r : Uγ₀ρ``."""
    c = ClosureChecker(sig, ind, prec, statuses, r, fuel, classifier, relaxed)
    try:
        ctx = c.check_env(r.env)
        expected = substitute(canonical(sig, r.lhs), r.subst)
        v = c.check(ctx, r.rhs, expected)
    except TypingError as e:
        verdict = Verdict.UNKNOWN if e.unknown else Verdict.FAIL
        where = f" at {show(e.term)}" if e.term is not None else ""
        return ClosureResult(verdict, c.trace, [Witness(e.message + where, r.name)], e.term)
    ws = [] if v is Verdict.PASS else [Witness(f"right-hand side is not of type {show(expected)}", r.name)]
    return ClosureResult(v, c.trace, ws)


@dataclass
class RuleSchema:
    rule: str
    well_formed: Verdict
    closure: ClosureResult
    witnesses: list[Witness]

    @property
    def verdict(self) -> Verdict:
        return combine([self.well_formed, self.closure.verdict])


def status_compatible(sig: Signature, ind: InductiveStructure, prec: QuasiOrder,
                      statuses: Callable[[str], Status], names: Sequence[str]) -> list[Witness]:
    """``f =F g`` implies equal statuses and equivalent status heads."""
    out = []
    names = list(names)
    for a in names:
        for b in names:
            if a < b and prec.eq(a, b):
                if statuses(a) != statuses(b):
                    out.append(Witness(f"{a} =F {b} but their statuses differ"))
                    continue
                ha, hb = status_heads(sig, a), status_heads(sig, b)
                for group in statuses(a):
                    for i in group:
                        x, y = ha[i - 1], hb[i - 1]
                        if x and y and not ind.order.eq(x, y):
                            out.append(Witness(f"{a} and {b} disagree on the type of argument {i}"))
    return out


def check_recursive_system(sig: Signature, ind: InductiveStructure, prec: QuasiOrder,
                           statuses: Callable[[str], Status], rules: Sequence[Rule],
                           fuel: int = DEFAULT_FUEL, relaxed: bool = False) -> tuple[Verdict, list[RuleSchema]]:
    classifier = Classifier(sig, ind)
    out = []
    for r in rules:
        wf = check_well_formed(sig, ind, r, fuel, relaxed)
        cl = closure_check(sig, ind, prec, statuses, r, fuel, classifier, relaxed)
        ws = wf.typed.witnesses + wf.accessible.witnesses + wf.disjoint.witnesses + cl.witnesses
        out.append(RuleSchema(r.name, wf.verdict, cl, ws))
    compat = status_compatible(sig, ind, prec, statuses, sorted({r.head for r in rules}))
    verdict = combine([s.verdict for s in out] + [Verdict.FAIL if compat else Verdict.PASS])
    if compat:
        out.append(RuleSchema("status", Verdict.FAIL, ClosureResult(Verdict.PASS), compat))
    return verdict, out
