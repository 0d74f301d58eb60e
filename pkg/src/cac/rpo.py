"""Recursive path ordering with status, a sufficient termination check for first-order rules."""

from __future__ import annotations

from typing import Callable, Iterable

from .schema import lex_mul_greater
from .signature import QuasiOrder, Rule, Status
from .terms import Sym, Term, Var, free_vars, show
from .verdict import Verdict, Witness


def full_status(stat: Status, arity: int) -> Status:
    """Append the arguments a status ignores as a trailing multiset group (keeps monotonicity)."""
    used = {i for g in stat for i in g}
    rest = tuple(i for i in range(1, arity + 1) if i not in used)
    return tuple(stat) + ((rest,) if rest else ())


class RPO:
    def __init__(self, prec: QuasiOrder, status: Callable[[str], Status]):
        self.prec = prec
        self.status = status
        self._memo: dict[tuple[Term, Term], bool] = {}

    def stat(self, f: str, arity: int) -> Status:
        return full_status(self.status(f), arity)

    def greater(self, s: Term, t: Term) -> bool:
        key = (s, t)
        if key not in self._memo:
            self._memo[key] = self._greater(s, t)
        return self._memo[key]

    def geq(self, s: Term, t: Term) -> bool:
        return s == t or self.greater(s, t)

    def _greater(self, s: Term, t: Term) -> bool:
        if not isinstance(s, Sym):
            return False
        if isinstance(t, Var):
            return t in free_vars(s)
        if not isinstance(t, Sym):
            raise ValueError(f"path ordering needs algebraic terms, got {show(t)}")
        if any(self.geq(si, t) for si in s.args):
            return True
        f, g = s.name, t.name
        if self.prec.gt(f, g):
            return all(self.greater(s, tj) for tj in t.args)
        if self.prec.eq(f, g):
            sf, sg = self.stat(f, len(s.args)), self.stat(g, len(t.args))
            if sf != sg or not all(self.greater(s, tj) for tj in t.args):
                return False
            gts = [self.greater] * len(sf)
            return lex_mul_greater(sf, s.args, t.args, gts, lambda a, b: a == b)
        return False


def mpo_terminates(rules: Iterable[Rule], prec: QuasiOrder, status: Callable[[str], Status],
                   assumed: Iterable[str] = ()) -> tuple[Verdict, list[Witness], list[str]]:
    """PASS when every rule decreases (or its head is assumed terminating); UNKNOWN otherwise.

    Returns the verdict, witnesses for unoriented rules, and the rules taken on assumption.
    """
    order = RPO(prec, status)
    assumed = set(assumed)
    failed, taken = [], []
    for r in rules:
        if r.head in assumed:
            taken.append(r.name)
            continue
        if not order.greater(r.lhs, r.rhs):
            failed.append(Witness(f"path ordering does not orient {r}", r.name))
    return (Verdict.UNKNOWN if failed else Verdict.PASS), failed, taken
