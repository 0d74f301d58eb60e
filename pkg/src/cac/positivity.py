"""Positive, negative and neutral positions; admissible inductive structures; predicate classes."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .signature import InductiveStructure, Signature
from .terms import (
    Abs, App, Bound, Position, Prod, Sort, Sym, SyntacticClass, Term, Var, free_box_vars,
    positions, show, symbol_positions, symbols, var_positions,
)
from .verdict import Verdict, Witness


@dataclass(frozen=True)
class PolaritySets:
    pos: frozenset[Position]
    neg: frozenset[Position]

    @property
    def neutral(self) -> frozenset[Position]:
        return self.pos & self.neg

    @property
    def non_neutral(self) -> frozenset[Position]:
        return (self.pos | self.neg) - self.neutral


def _prefix(i: int, ps) -> set[Position]:
    return {(i,) + p for p in ps}


class Polarity:
    """Simultaneous computation of ``Pos⁺`` and ``Pos⁻`` for one signature."""

    def __init__(self, sig: Signature, ind: InductiveStructure):
        self.sig = sig
        self.ind = ind

    def is_object(self, t: Term) -> bool:
        return self.sig.klass(t) is SyntacticClass.OBJECT

    def constant_predicate(self, f: str) -> bool:
        return f in self.sig.symbols and self.sig.is_box(f) and self.sig.is_constant(f)

    def sets(self, t: Term) -> tuple[set[Position], set[Position]]:
        match t:
            case Sort() | Var() | Bound():
                return {()}, set()
            case Sym(f, args):
                if not self.constant_predicate(f):
                    return {()}, set()
                pos, neg = {()}, set()
                for i in sorted(self.ind.ind_of(f)):
                    p, n = self.sets(args[i - 1])
                    pos |= _prefix(i, p)
                    neg |= _prefix(i, n)
                return pos, neg
            case Prod(dom, body):
                dp, dn = self.sets(dom)
                bp, bn = self.sets(body)
                return _prefix(1, dn) | _prefix(2, bp), _prefix(1, dp) | _prefix(2, bn)
            case Abs(dom, body):
                every = _prefix(1, positions(dom))
                bp, bn = self.sets(body)
                return every | _prefix(2, bp), every | _prefix(2, bn)
            case App(fun, arg):
                fp, fn = self.sets(fun)
                if self.is_object(arg):
                    every = _prefix(2, positions(arg))
                    return _prefix(1, fp) | every, _prefix(1, fn) | every
                return _prefix(1, fp), _prefix(1, fn)
        raise TypeError(f"not a term: {t!r}")

    def __call__(self, t: Term) -> PolaritySets:
        if self.is_object(t):
            raise ValueError(f"polarity is undefined on objects: {show(t)}")
        p, n = self.sets(t)
        return PolaritySets(frozenset(p), frozenset(n))


def polarity(sig: Signature, ind: InductiveStructure, t: Term) -> PolaritySets:
    return Polarity(sig, ind)(t)


# -- admissibility ----------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    condition: str  # I2 .. I6
    inductive: str
    constructor: str
    index: int
    position: Position | None
    message: str

    def witness(self) -> Witness:
        return Witness(f"{self.constructor} argument {self.index}: {self.message}",
                       None, self.position)


def constructor_arguments(sig: Signature, c: str) -> tuple[list[Var], list[Term], Term]:
    return sig[c].scheme()


def check_admissible(sig: Signature, ind: InductiveStructure) -> tuple[Verdict, list[Violation]]:
    pol = Polarity(sig, ind)
    out: list[Violation] = []
    preds = sig.constant_predicates()
    for C in preds:
        for c in sig.constructors_of(C):
            ys, doms, cod = constructor_arguments(sig, c)
            v = cod.args if isinstance(cod, Sym) else ()
            for j in sorted(ind.acc_of(sig, c)):
                U = doms[j - 1]
                if pol.is_object(U):
                    continue
                ps = pol(U)

                def bad(cond: str, where: set[Position], allowed: frozenset[Position], what: str) -> None:
                    for p in sorted(where - allowed):
                        out.append(Violation(cond, C, c, j, p, f"{what} in {show(U)}"))

                for D in preds:
                    occ = symbol_positions(U, D)
                    if not occ:
                        continue
                    if ind.order.eq(D, C):
                        bad("I3", occ, ps.pos, f"{D} is not at a positive position")
                    elif ind.order.gt(D, C):
                        bad("I4", occ, ps.neutral, f"{D} is not at a neutral position")
                for F in sig.defined:
                    if sig.is_box(F):
                        bad("I5", symbol_positions(U, F), ps.neutral, f"defined {F} is not at a neutral position")
                for Y in sorted(free_box_vars(U), key=lambda y: y.name):
                    iotas = [i for i, vi in enumerate(v, 1) if vi == Y]
                    name = Y.name.rstrip("@")
                    if not iotas:
                        out.append(Violation("I6", C, c, j, None,
                                             f"predicate variable {name} is not a parameter of {C}"))
                    elif any(i in ind.ind_of(C) for i in iotas):
                        bad("I2", set(var_positions(U, Y)), ps.pos,
                            f"inductive parameter {name} is not at a positive position")
    order = {"I3": 0, "I4": 1, "I5": 2, "I6": 3, "I2": 4}
    out.sort(key=lambda x: (order[x.condition], x.inductive, x.constructor, x.index, x.position or ()))
    return Verdict.of(not out), out


# -- predicate classes ------------------------------------------------------------


class PredicateClass(enum.Enum):
    PRIMITIVE = "primitive"
    BASIC = "basic"
    STRICTLY_POSITIVE = "strictly positive"
    NOT_STRICTLY_POSITIVE = "not strictly positive"

    def at_least(self, other: "PredicateClass") -> bool:
        rank = list(PredicateClass)
        return rank.index(self) <= rank.index(other)


def _head(t: Term) -> str | None:
    return t.name if isinstance(t, Sym) else None


def _final(t: Term) -> tuple[list[Term], Term]:
    doms = []
    while isinstance(t, Prod):
        doms.append(t.dom)
        t = t.body
    return doms, t


class Classifier:
    def __init__(self, sig: Signature, ind: InductiveStructure):
        self.sig = sig
        self.ind = ind
        self.preds = set(sig.constant_predicates())
        self._memo: dict[str, PredicateClass] = {}

    def _arguments(self, C: str):
        """``(D, d, U_j)`` for every ``D =_C C``, constructor ``d`` of ``D``, ``j ∈ Acc(d)``."""
        for D in self.sig.constant_predicates():
            if not self.ind.order.eq(D, C):
                continue
            for d in self.sig.constructors_of(D):
                _, doms, _ = self.sig[d].scheme()
                for j in sorted(self.ind.acc_of(self.sig, d)):
                    yield D, d, doms[j - 1]

    def _equiv_occurring(self, U: Term, D: str) -> set[str]:
        return {E for E in symbols(U) if E in self.preds and self.ind.order.eq(E, D)}

    def primitive(self, C: str) -> bool:
        for D, _, U in self._arguments(C):
            E = _head(U)
            if E is None or E not in self.preds:
                return False
            if self.ind.order.eq(E, D):
                continue
            if not (self.ind.order.gt(D, E) and self.classify(E) is PredicateClass.PRIMITIVE):
                return False
        return True

    def basic(self, C: str) -> bool:
        for D, _, U in self._arguments(C):
            for E in self._equiv_occurring(U, D):
                if _head(U) != E:
                    return False
        return True

    def strictly_positive(self, C: str) -> bool:
        for D, _, U in self._arguments(C):
            for E in self._equiv_occurring(U, D):
                vs, last = _final(U)
                if _head(last) != E:
                    return False
                if any(self._equiv_occurring(V, D) for V in vs):
                    return False
        return True

    def classify(self, C: str) -> PredicateClass:
        if C in self._memo:
            return self._memo[C]
        # provisional answer guards against cycles through equivalent symbols
        self._memo[C] = PredicateClass.PRIMITIVE
        sp = self.strictly_positive(C)
        basic = sp and self.basic(C)
        prim = basic and self.primitive(C)
        if prim:
            cls = PredicateClass.PRIMITIVE
        elif basic:
            cls = PredicateClass.BASIC
        elif sp:
            cls = PredicateClass.STRICTLY_POSITIVE
        else:
            cls = PredicateClass.NOT_STRICTLY_POSITIVE
        self._memo[C] = cls
        return cls


def classify_predicate(sig: Signature, ind: InductiveStructure, C: str) -> PredicateClass:
    return Classifier(sig, ind).classify(C)
