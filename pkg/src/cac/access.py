"""Weak and strong accessibility modulo a substitution, and the orderings built on them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Mapping

from .signature import InductiveStructure, Signature
from .terms import Prod, Sym, Term, Var, show, spine, substitute

Pair = tuple[Term, Term]  # a term with a type: t:T


@dataclass(frozen=True)
class AccEdge:
    source: Pair
    target: Pair
    strong: bool
    constructor: str
    index: int

    def describe(self) -> str:
        rel = ">2" if self.strong else ">1"
        return (f"{show(self.source[0])}:{show(self.source[1])} {rel} "
                f"{show(self.target[0])}:{show(self.target[1])}")


Equal = Callable[[Term, Term], bool]


def _eq(a: Term, b: Term) -> bool:
    return a == b


def product_into_predicate(t: Term, sig: Signature) -> bool:
    """``t`` has the shape ``(x⃗:T⃗) D(w⃗)`` with ``D`` a predicate symbol."""
    while isinstance(t, Prod):
        t = t.body
    return isinstance(t, Sym) and t.name in sig.symbols and sig.is_box(t.name)


class Accessibility:
    """Edges of ⊳₁^ρ and ⊳₂^ρ for one substitution ρ."""

    def __init__(self, sig: Signature, ind: InductiveStructure, rho: Mapping[Var, Term],
                 equal: Equal = _eq):
        self.sig = sig
        self.ind = ind
        self.rho = dict(rho)
        self.equal = equal

    def mod_rho(self, t: Term) -> Term:
        return substitute(t, self.rho)

    def edges(self, t: Term, ty: Term) -> list[AccEdge]:
        """All one-step weak edges from ``t:ty``; strong ones are flagged."""
        if not isinstance(t, Sym) or t.name not in self.sig.symbols:
            return []
        c = t.name
        if self.sig.inductive_of(c) is None:
            return []
        d = self.sig[c]
        doms, cod = d.instantiate(t.args)
        if not self.equal(self.mod_rho(ty), self.mod_rho(cod)):
            return []
        _, raw, _ = d.scheme()
        out = []
        for j in sorted(self.ind.acc_of(self.sig, c)):
            strong = product_into_predicate(raw[j - 1], self.sig)
            out.append(AccEdge((t, ty), (t.args[j - 1], doms[j - 1]), strong, c, j))
        return out

    def reachable(self, start: Pair, strong: bool = False) -> dict[Pair, list[AccEdge]]:
        """Nodes reached by one or more steps, each with its path (breadth-first)."""
        seen: dict[Pair, list[AccEdge]] = {}
        queue = deque([(start, [])])
        while queue:
            node, path = queue.popleft()
            for e in self.edges(*node):
                if strong and not e.strong:
                    continue
                key = (e.target[0], self.mod_rho(e.target[1]))
                if key in seen:
                    continue
                seen[key] = path + [e]
                queue.append((e.target, path + [e]))
        return seen

    def path_to(self, start: Pair, goal: Pair, strong: bool = False) -> list[AccEdge] | None:
        """A (⊳^ρ)⁺ path from ``start`` to a node ``u:U`` with ``Uρ`` equal to ``goal``'s."""
        want = self.mod_rho(goal[1])
        for (u, uty), path in self.reachable(start, strong).items():
            if u == goal[0] and self.equal(uty, want):
                return path
        return None

    def gt1(self, left: Pair, right: Pair) -> bool:
        return self.path_to(left, right) is not None

    def gt2(self, left: Pair, cand: Term, gamma0: Mapping[Var, Term]) -> bool:
        t = left[0]
        if not isinstance(t, Sym) or t.name not in self.sig.symbols:
            return False
        c = self.sig.inductive_of(t.name)
        if c is None:
            return False
        x, _ = spine(cand)
        if not isinstance(x, Var) or x not in gamma0:
            return False
        xty = gamma0[x]
        body = xty
        while isinstance(body, Prod):
            body = body.body
        if not isinstance(body, Sym) or body.name not in self.sig.symbols:
            return False
        dname = body.name
        if not (self.sig.is_box(dname) and self.sig.is_constant(dname)):
            return False
        if not self.ind.order.eq(dname, c):
            return False
        return self.path_to(left, (x, xty), strong=True) is not None


def acc1(sig: Signature, ind: InductiveStructure, rho: Mapping[Var, Term], t: Term,
         ty: Term) -> list[AccEdge]:
    return Accessibility(sig, ind, rho).edges(t, ty)


def gt1(sig: Signature, ind: InductiveStructure, rho: Mapping[Var, Term], left: Pair,
        right: Pair) -> bool:
    return Accessibility(sig, ind, rho).gt1(left, right)


def gt2(sig: Signature, ind: InductiveStructure, gamma0: Mapping[Var, Term],
        rho: Mapping[Var, Term], left: Pair, cand: Term) -> bool:
    return Accessibility(sig, ind, rho).gt2(left, cand, gamma0)
