"""Matching, beta and rule reduction, normalization, critical pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .signature import Rule, Signature
from .terms import (
    Abs, App, Position, Prod, Sym, Term, Var, children, instantiate, is_algebraic,
    replace_at, show, subterm_at, subterms, substitute,
)
from .verdict import Verdict

BETA = "beta"
DEFAULT_FUEL = 100_000


def match(pattern: Term, subject: Term, sigma: dict[Var, Term] | None = None) -> dict[Var, Term] | None:
    """First-order syntactic matching of an algebraic pattern."""
    sigma = {} if sigma is None else sigma
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        match p:
            case Var():
                bound = sigma.get(p)
                if bound is None:
                    sigma[p] = s
                elif bound != s:
                    return None
            case Sym(f, args):
                if not isinstance(s, Sym) or s.name != f or len(s.args) != len(args):
                    return None
                stack.extend(zip(args, s.args))
            case _:
                raise ValueError(f"pattern is not algebraic: {show(pattern)}")
    return sigma


@dataclass(frozen=True)
class Step:
    position: Position
    rule: str  # rule name or "beta"
    redex: Term
    contractum: Term

    def render(self) -> str:
        pos = ".".join(map(str, self.position)) or "e"
        return f"{pos}\t{self.rule}\t{show(self.redex)}"


@dataclass(frozen=True)
class Trace:
    start: Term
    steps: tuple[Step, ...]
    result: Term
    exhausted: bool

    def replay(self) -> Term:
        """Re-apply the recorded steps from ``start``; checks every redex."""
        t = self.start
        for s in self.steps:
            if subterm_at(t, s.position) != s.redex:
                raise ValueError(f"step at {s.position} does not match the trace")
            t = replace_at(t, s.position, s.contractum)
        return t


def contract_root(t: Term, sig: Signature) -> tuple[Term, str] | None:
    """Contract ``t`` at the root: rules in declaration order, then beta."""
    if isinstance(t, Sym):
        for r in sig.by_head.get(t.name, ()):
            sigma = match(r.lhs, t)
            if sigma is not None:
                return substitute(r.rhs, sigma), r.name
    elif isinstance(t, App) and isinstance(t.fun, Abs):
        return instantiate(t.fun.body, t.arg), BETA
    return None


def step(t: Term, sig: Signature) -> tuple[Term, Step] | None:
    """One leftmost-outermost step, or ``None`` on a normal form."""
    # iterative search for the first redex in pre-order
    for p, s in subterms(t):
        hit = contract_root(s, sig)
        if hit is not None:
            u, name = hit
            return replace_at(t, p, u), Step(p, name, s, u)
    return None


def normalize(t: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> Trace:
    start, steps = t, []
    while True:
        nxt = step(t, sig)
        if nxt is None:
            return Trace(start, tuple(steps), t, False)
        if len(steps) >= fuel:
            return Trace(start, tuple(steps), t, True)
        t, info = nxt
        steps.append(info)


class Reducer:
    """Memoized normal forms for one signature and fuel budget."""

    def __init__(self, sig: Signature, fuel: int = DEFAULT_FUEL):
        self.sig = sig
        self.fuel = fuel
        self._nf: dict[Term, Term | None] = {}

    def nf(self, t: Term) -> Term | None:
        """Normal form, or ``None`` when fuel ran out."""
        if t in self._nf:
            return self._nf[t]
        u = self._normal(t, [self.fuel])
        self._nf[t] = u
        return u

    def _normal(self, t: Term, fuel: list[int]) -> Term | None:
        # innermost-first with a shared budget; agrees with ``normalize`` on
        # confluent terminating systems and is much faster on large terms
        while True:
            kids = children(t)
            if kids:
                new = []
                for k in kids:
                    n = self._normal(k, fuel)
                    if n is None:
                        return None
                    new.append(n)
                t = _rebuild(t, new)
            hit = contract_root(t, self.sig)
            if hit is None:
                return t
            if fuel[0] <= 0:
                return None
            fuel[0] -= 1
            t = hit[0]

    def whnf(self, t: Term) -> Term | None:
        """Head reduction until neither a beta nor a root rule applies."""
        fuel = self.fuel
        while fuel > 0:
            head = t
            args: list[Term] = []
            while isinstance(head, App):
                args.append(head.arg)
                head = head.fun
            args.reverse()
            if isinstance(head, Abs) and args:
                t = instantiate(head.body, args[0])
                for a in args[1:]:
                    t = App(t, a)
            elif isinstance(head, Sym) and self.sig.is_defined(head.name):
                hit = contract_root(head, self.sig)
                if hit is None:
                    n = self.nf(head)
                    if n is None:
                        return None
                    if n == head:
                        return t
                    hit = (n, "")
                t = hit[0]
                for a in args:
                    t = App(t, a)
            else:
                return t
            fuel -= 1
        return None

    def joinable(self, t: Term, u: Term) -> Verdict:
        if t == u:
            return Verdict.PASS
        a, b = self.nf(t), self.nf(u)
        if a is None or b is None:
            return Verdict.UNKNOWN
        return Verdict.of(a == b)


def _rebuild(t: Term, kids: list[Term]) -> Term:
    match t:
        case Sym(f):
            return Sym(f, tuple(kids))
        case Prod(_, _, box, name):
            return Prod(kids[0], kids[1], box, name)
        case Abs(_, _, box, name):
            return Abs(kids[0], kids[1], box, name)
        case App():
            return App(kids[0], kids[1])
    return t


def joinable(t: Term, u: Term, sig: Signature, fuel: int = DEFAULT_FUEL) -> Verdict:
    """PASS if both sides reach the same normal form, FAIL if distinct, UNKNOWN on fuel."""
    if t == u:
        return Verdict.PASS
    a, b = normalize(t, sig, fuel), normalize(u, sig, fuel)
    if a.exhausted or b.exhausted:
        return Verdict.UNKNOWN
    return Verdict.of(a.result == b.result)


# -- unification and critical pairs -------------------------------------------


def unify(s: Term, t: Term) -> dict[Var, Term] | None:
    """Most general syntactic unifier of two algebraic terms."""
    sigma: dict[Var, Term] = {}

    def walk(u: Term) -> Term:
        while isinstance(u, Var) and u in sigma:
            u = sigma[u]
        return u

    def occurs(x: Var, u: Term) -> bool:
        u = walk(u)
        if u == x:
            return True
        return isinstance(u, Sym) and any(occurs(x, a) for a in u.args)

    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = walk(a), walk(b)
        if a == b:
            continue
        if isinstance(a, Var):
            if occurs(a, b):
                return None
            sigma[a] = b
        elif isinstance(b, Var):
            if occurs(b, a):
                return None
            sigma[b] = a
        elif isinstance(a, Sym) and isinstance(b, Sym):
            if a.name != b.name or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
        else:
            raise ValueError("unification is only defined on algebraic terms")

    def resolve(u: Term) -> Term:
        u = walk(u)
        if isinstance(u, Sym) and u.args:
            return Sym(u.name, tuple(resolve(a) for a in u.args))
        return u

    return {x: resolve(x) for x in sigma}


def rename_apart(r: Rule, suffix: str) -> tuple[Term, Term]:
    ren = {x: Var(x.name + suffix, x.box) for _, x in subterms(r.lhs) if isinstance(x, Var)}
    return substitute(r.lhs, ren), substitute(r.rhs, ren)


@dataclass(frozen=True)
class CriticalPair:
    rule_a: str
    rule_b: str
    position: Position
    peak: Term
    left: Term
    right: Term
    joinable: Verdict

    def describe(self) -> str:
        pos = ".".join(map(str, self.position)) or "e"
        return (f"{self.rule_a}/{self.rule_b} at {pos}: {show(self.left)} <- {show(self.peak)} "
                f"-> {show(self.right)} [{self.joinable.value}]")


def overlaps(rules: Iterable[Rule]) -> Iterator[tuple[Rule, Rule, Position, dict[Var, Term], Term, Term]]:
    """Rule A at the root, rule B at a non-variable position of A's left-hand side."""
    rules = list(rules)
    for i, a in enumerate(rules):
        for j, b in enumerate(rules):
            lb, rb = rename_apart(b, "#b")
            for p, sub in subterms(a.lhs):
                if not isinstance(sub, Sym):
                    continue
                if p == () and j <= i:
                    continue
                sigma = unify(sub, lb)
                if sigma is not None:
                    yield a, b, p, sigma, lb, rb


def critical_pairs(sig: Signature, rules: Iterable[Rule] | None = None,
                   fuel: int = DEFAULT_FUEL) -> list[CriticalPair]:
    rules = sig.rules if rules is None else tuple(rules)
    for r in rules:
        if not is_algebraic(r.lhs):
            raise ValueError(f"{r.name}: left-hand side is not algebraic")
    red = Reducer(sig, fuel)
    out = []
    for a, b, p, sigma, lb, rb in overlaps(rules):
        peak = substitute(a.lhs, sigma)
        left = substitute(a.rhs, sigma)
        right = replace_at(peak, p, substitute(rb, sigma))
        out.append(CriticalPair(a.name, b.name, p, peak, left, right, red.joinable(left, right)))
    return out


def local_confluence(sig: Signature, fuel: int = DEFAULT_FUEL) -> tuple[Verdict, list[CriticalPair]]:
    pairs = critical_pairs(sig, fuel=fuel)
    vs = [cp.joinable for cp in pairs]
    if Verdict.FAIL in vs:
        return Verdict.FAIL, pairs
    if Verdict.UNKNOWN in vs:
        return Verdict.UNKNOWN, pairs
    return Verdict.PASS, pairs
