"""Symbols, rules, environments, inductive structures, precedences, statuses."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx

from .terms import (
    Prod, STAR, Sym, Term, Var, free_vars, instantiate, is_algebraic, is_kind,
    show, substitute, symbols, syntactic_class, SyntacticClass,
)

Env = tuple[tuple[Var, Term], ...]
Status = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    arity: int
    box: bool
    type: Term
    line: int = 0

    def instantiate(self, args: tuple[Term, ...] | list[Term]) -> tuple[list[Term], Term]:
        """``([T1γ, .., Tnγ], Uγ)`` for ``γ = {x⃗ → args}``."""
        doms: list[Term] = []
        t = self.type
        for a in args:
            assert isinstance(t, Prod), f"{self.name}: type has fewer products than arity"
            doms.append(t.dom)
            t = instantiate(t.body, a)
        return doms, t

    def scheme(self) -> tuple[list[Var], list[Term], Term]:
        """Open the leading products with named variables ``y1..yn``."""
        ys: list[Var] = []
        doms: list[Term] = []
        t = self.type
        taken: set[str] = set()
        for _ in range(self.arity):
            assert isinstance(t, Prod)
            base = t.name if t.name not in ("_", "") else "y"
            name = base
            k = 1
            while name in taken:
                k += 1
                name = f"{base}{k}"
            taken.add(name)
            y = Var(name + "@", t.box)  # '@' keeps these apart from user names
            ys.append(y)
            doms.append(t.dom)
            t = instantiate(t.body, y)
        return ys, doms, t


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Sym
    rhs: Term
    env: Env = ()
    rho: tuple[tuple[Var, Term], ...] = ()
    line: int = 0

    @property
    def head(self) -> str:
        return self.lhs.name

    @property
    def gamma(self) -> dict[Var, Term]:
        return dict(self.env)

    @property
    def subst(self) -> dict[Var, Term]:
        return dict(self.rho)

    def __str__(self) -> str:
        return f"{show(self.lhs)} --> {show(self.rhs)}"


class Signature:
    """Symbol table plus rewrite rules; frozen once built."""

    def __init__(self, symbols: Iterable[SymbolDecl] = (), rules: Iterable[Rule] = ()):
        self.symbols: dict[str, SymbolDecl] = {s.name: s for s in symbols}
        self.rules: tuple[Rule, ...] = tuple(rules)
        self.by_head: dict[str, tuple[Rule, ...]] = {}
        for r in self.rules:
            self.by_head[r.head] = self.by_head.get(r.head, ()) + (r,)
        self._constructors: dict[str, list[str]] = {}

    def __getitem__(self, name: str) -> SymbolDecl:
        return self.symbols[name]

    def is_box(self, name: str) -> bool:
        return self.symbols[name].box

    def is_defined(self, name: str) -> bool:
        return name in self.by_head

    def is_constant(self, name: str) -> bool:
        return name not in self.by_head

    @property
    def defined(self) -> list[str]:
        return [f for f in self.symbols if f in self.by_head]

    @property
    def constant(self) -> list[str]:
        return [f for f in self.symbols if f not in self.by_head]

    def constant_predicates(self) -> list[str]:
        return [f for f in self.constant if self.symbols[f].box]

    def without(self, *names: str) -> "Signature":
        return Signature(self.symbols.values(), [r for r in self.rules if r.name not in names])

    def restricted(self, rules: Iterable[Rule]) -> "Signature":
        return Signature(self.symbols.values(), rules)

    def klass(self, t: Term) -> SyntacticClass:
        return syntactic_class(t, self.is_box)

    def constructors_of(self, c: str) -> list[str]:
        """Symbols whose type, after ``arity`` products, is ``C(v⃗)``."""
        if c not in self._constructors:
            self._constructors[c] = [f for f, d in self.symbols.items()
                                     if codomain_head(d) == c]
        return self._constructors[c]

    def inductive_of(self, f: str) -> str | None:
        """The constant predicate ``C`` that ``f`` constructs, if any."""
        c = codomain_head(self.symbols[f])
        if c is not None and c in self.symbols and self.is_box(c) and self.is_constant(c):
            return c
        return None


def codomain_head(d: SymbolDecl) -> str | None:
    t = d.type
    for _ in range(d.arity):
        if not isinstance(t, Prod):
            return None
        t = t.body
    return t.name if isinstance(t, Sym) else None


def leading_products(t: Term) -> int:
    n = 0
    while isinstance(t, Prod):
        n += 1
        t = t.body
    return n


def check_maximal_arity(sig: Signature, c: str) -> tuple[bool, str]:
    """τ_C = (x⃗:T⃗)★ with arity |x⃗| and only object-level constructors."""
    d = sig[c]
    t = d.type
    for _ in range(d.arity):
        if not isinstance(t, Prod):
            return False, f"{c}: type has fewer products than its arity"
        t = t.body
    if t != STAR:
        return False, f"{c}: type does not end in * after {d.arity} products"
    for k in sig.constructors_of(c):
        if sig.is_box(k):
            return False, f"{c}: constructor {k} is predicate-level"
    return True, ""


# -- quasi-orderings --------------------------------------------------------


class OrderError(ValueError):
    pass


class QuasiOrder:
    """Reflexive-transitive closure of declared ``≥`` edges.

    Strict part: ``a > b`` iff ``a ≥ b`` and not ``b ≥ a``.  Declared strict
    pairs that end up inside one equivalence class raise ``OrderError``.
    """

    def __init__(self, elements: Iterable[str], ge: Iterable[tuple[str, str]] = (),
                 strict: Iterable[tuple[str, str]] = ()):
        g = nx.DiGraph()
        g.add_nodes_from(elements)
        strict = list(strict)
        g.add_edges_from(ge)
        g.add_edges_from(strict)
        self._reach = {n: nx.descendants(g, n) | {n} for n in g.nodes}
        self.elements = list(g.nodes)
        for a, b in strict:
            if a == b or a in self._reach[b]:
                raise OrderError(f"declared {a} > {b} but {b} ≥ {a}")

    def ge(self, a: str, b: str) -> bool:
        return a == b or b in self._reach.get(a, ())

    def gt(self, a: str, b: str) -> bool:
        return self.ge(a, b) and not self.ge(b, a)

    def eq(self, a: str, b: str) -> bool:
        return self.ge(a, b) and self.ge(b, a)

    def classes(self) -> list[list[str]]:
        seen: set[str] = set()
        out = []
        for a in self.elements:
            if a in seen:
                continue
            cls = [b for b in self.elements if self.eq(a, b)]
            seen.update(cls)
            out.append(cls)
        return out


@dataclass
class InductiveStructure:
    order: QuasiOrder
    ind: dict[str, frozenset[int]] = field(default_factory=dict)
    acc: dict[str, frozenset[int]] = field(default_factory=dict)

    def ind_of(self, c: str) -> frozenset[int]:
        return self.ind.get(c, frozenset())

    def acc_of(self, sig: Signature, c: str) -> frozenset[int]:
        if c in self.acc:
            return self.acc[c]
        return frozenset(range(1, sig[c].arity + 1))


def dependency_order(sig: Signature, acc: Mapping[str, frozenset[int]] | None = None) -> QuasiOrder:
    """Default ``≥_C``: ``C ≥ D`` when ``D`` occurs in τ_C or in an accessible argument type
    of a constructor of ``C``."""
    acc = acc or {}
    preds = sig.constant_predicates()
    edges = []
    for c in preds:
        occ = symbols(sig[c].type)
        for k in sig.constructors_of(c):
            _, doms, _ = sig[k].scheme()
            for j in acc.get(k, range(1, len(doms) + 1)):
                occ |= symbols(doms[j - 1])
        edges += [(c, d) for d in sorted(occ) if d in preds and d != c]
    return QuasiOrder(preds, edges)


def call_graph_edges(sig: Signature) -> list[tuple[str, str]]:
    edges = []
    for f, d in sig.symbols.items():
        edges += [(f, g) for g in symbols(d.type) if g != f]
    for r in sig.rules:
        occ = symbols(r.lhs) | symbols(r.rhs)
        for _, t in r.env:
            occ |= symbols(t)
        for _, t in r.rho:
            occ |= symbols(t)
        edges += [(r.head, g) for g in occ if g != r.head]
    return edges


def default_precedence(sig: Signature, declared_ge: Iterable[tuple[str, str]] = (),
                       declared_gt: Iterable[tuple[str, str]] = ()) -> QuasiOrder:
    """Call-graph order united with the declared pairs."""
    return QuasiOrder(sig.symbols, itertools.chain(call_graph_edges(sig), declared_ge),
                      declared_gt)


def constant_predicate_head(sig: Signature, t: Term) -> str | None:
    if isinstance(t, Sym) and t.name in sig.symbols and sig.is_box(t.name) and sig.is_constant(t.name):
        return t.name
    return None


def default_status(sig: Signature, f: str) -> Status:
    """Lex of singleton multisets over the constant-predicate-typed arguments."""
    d = sig[f]
    _, doms, _ = d.scheme()
    return tuple((i + 1,) for i, t in enumerate(doms) if constant_predicate_head(sig, t))


def status_heads(sig: Signature, f: str) -> list[str | None]:
    """``C_f^i`` for each argument of ``f`` (``None`` if not a constant predicate)."""
    _, doms, _ = sig[f].scheme()
    return [constant_predicate_head(sig, t) for t in doms]


def validate_status(sig: Signature, order_c: QuasiOrder, f: str, stat: Status) -> list[str]:
    """Hard errors only: range, linearity, mixed heads in a multiset group."""
    errs = []
    n = sig[f].arity
    flat = [i for g in stat for i in g]
    if any(not 1 <= i <= n for i in flat):
        errs.append(f"status of {f} mentions an index outside 1..{n}")
    if len(flat) != len(set(flat)):
        errs.append(f"status of {f} is not linear")
    if any(not g for g in stat):
        errs.append(f"status of {f} has an empty multiset group")
    heads = status_heads(sig, f)
    for g in stat:
        hs = [heads[i - 1] for i in g if 1 <= i <= n and heads[i - 1]]
        if any(not order_c.eq(hs[0], h) for h in hs[1:]):
            errs.append(f"status of {f}: group {list(g)} mixes inequivalent types")
    return errs


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    message: str
    line: int = 0


def validate_declarations(sig: Signature) -> list[Violation]:
    """Structural well-formedness of the declarations, in file order."""
    out: list[Violation] = []
    for d in sig.symbols.values():
        if free_vars(d.type):
            out.append(Violation(f"type of {d.name} is not closed", d.line))
        if leading_products(d.type) < d.arity:
            out.append(Violation(f"type of {d.name} has fewer than {d.arity} products", d.line))
        if d.name in symbols(d.type):
            out.append(Violation(f"{d.name} occurs in its own type", d.line))
        if d.box != is_kind(d.type):
            out.append(Violation(f"sort tag of {d.name} disagrees with its type", d.line))
    for r in sig.rules:
        out.extend(validate_rule(sig, r))
    return out


def validate_rule(sig: Signature, r: Rule) -> list[Violation]:
    out = []
    if not isinstance(r.lhs, Sym) or not is_algebraic(r.lhs):
        out.append(Violation(f"{r.name}: left-hand side is not algebraic", r.line))
    lv = free_vars(r.lhs)
    extra = free_vars(r.rhs) - lv
    if extra:
        names = ", ".join(sorted(x.name for x in extra))
        out.append(Violation(f"{r.name}: right-hand side variables {names} not in the left-hand side", r.line))
    seen: set[Var] = set()
    for x, t in r.env:
        if x in seen:
            out.append(Violation(f"{r.name}: {x.name} declared twice in the environment", r.line))
        unbound = free_vars(t) - seen
        if unbound:
            out.append(Violation(f"{r.name}: type of {x.name} mentions a later or unknown variable", r.line))
        seen.add(x)
    both = {x for x, _ in r.rho} & seen
    if both:
        names = ", ".join(sorted(x.name for x in both))
        out.append(Violation(f"{r.name}: {names} in both the environment and the substitution", r.line))
    return out


def rule_signature_ok(sig: Signature, r: Rule) -> bool:
    return not validate_rule(sig, r)


def apply_rho(r: Rule, t: Term) -> Term:
    return substitute(t, r.subst)


def env_lookup(env: Mapping[Var, Term] | Env, x: Var) -> Term | None:
    if isinstance(env, tuple):
        env = dict(env)
    return env.get(x)
