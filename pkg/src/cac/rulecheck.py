"""Sufficient checks that a rule is well typed (S3, S4, S5) and well formed."""

from __future__ import annotations

from dataclasses import dataclass, field

from .access import AccEdge, Accessibility
from .rewrite import DEFAULT_FUEL, Reducer
from .signature import InductiveStructure, Rule, Signature
from .terms import Position, Sym, Term, Var, free_vars, is_algebraic, show, subterm_at, subterms, substitute
from .typecheck import Checker, TypingError
from .verdict import Verdict, Witness, combine


def canonical(sig: Signature, t: Term) -> Term:
    """``Uγ`` for ``t = f(t⃗)`` with ``τ_f = (x⃗:T⃗)U``."""
    if not isinstance(t, Sym):
        raise ValueError(f"canonical type needs a symbol application, got {show(t)}")
    return sig[t.name].instantiate(t.args)[1]


def derived_type(sig: Signature, l: Term, p: Position) -> Term:
    """Type of ``l|p`` derived from the symbol application just above it."""
    if not p:
        raise ValueError("the root has no derived type")
    parent = subterm_at(l, p[:-1])
    if not isinstance(parent, Sym):
        raise ValueError(f"position {list(p)} is not below a symbol application")
    i = p[-1]
    doms, _ = sig[parent.name].instantiate(parent.args)
    return doms[i - 1]


def default_env(sig: Signature, l: Term, rho: tuple[tuple[Var, Term], ...] = ()) -> tuple[tuple[Var, Term], ...]:
    """Γ₀ for a rule written without one: derived types at first occurrences."""
    skip = dict(rho)
    env: list[tuple[Var, Term]] = []
    seen: set[Var] = set()
    for p, s in subterms(l):
        if isinstance(s, Var) and p and s not in seen and s not in skip:
            seen.add(s)
            env.append((s, substitute(derived_type(sig, l, p), skip)))
    # a type may mention a variable that occurs later in l
    ordered: list[tuple[Var, Term]] = []
    while env:
        done = {x for x, _ in ordered}
        k = next((i for i, (_, t) in enumerate(env) if free_vars(t) <= done), 0)
        ordered.append(env.pop(k))
    return tuple(ordered)


def _typing_verdict(e: TypingError) -> Verdict:
    return Verdict.UNKNOWN if e.unknown else Verdict.FAIL


@dataclass
class Result:
    verdict: Verdict
    witnesses: list[Witness] = field(default_factory=list)


def check_S3(sig: Signature, r: Rule, fuel: int = DEFAULT_FUEL) -> Result:
    """``Γ₀ ⊢ r : Uγ₀ρ`` in the system without this rule."""
    c = Checker(sig.without(r.name), fuel)
    try:
        ctx = c.check_env(r.env)
        expected = substitute(canonical(sig, r.lhs), r.subst)
        v = c.check(ctx, r.rhs, expected)
    except TypingError as e:
        return Result(_typing_verdict(e), [Witness(e.message, r.name)])
    if v is Verdict.PASS:
        return Result(v)
    msg = "right-hand side does not have type " + show(expected)
    if v is Verdict.UNKNOWN:
        msg = "fuel ran out comparing the right-hand side type with " + show(expected)
    return Result(v, [Witness(msg, r.name)])


@dataclass
class S4Result(Result):
    positions: dict[Var, Position] = field(default_factory=dict)


def check_S4(sig: Signature, r: Rule, relaxed: bool = False, fuel: int = DEFAULT_FUEL) -> S4Result:
    """Each ``x ∈ dom(Γ₀)`` occurs in ``l`` at a position whose derived type is ``xΓ₀``.

    The derived type may also match after applying ρ, which S5 makes convertible.
    """
    red = Reducer(sig, fuel) if relaxed else None
    found: dict[Var, Position] = {}
    missing = []
    unknown = False
    for x, ty in r.env:
        for p, s in subterms(r.lhs):
            if s != x or not p:
                continue
            dt = derived_type(sig, r.lhs, p)
            if dt == ty or substitute(dt, r.subst) == ty:
                found[x] = p
                break
            if red is not None:
                v = red.joinable(dt, ty)
                if v is Verdict.PASS:
                    found[x] = p
                    break
                unknown = unknown or v is Verdict.UNKNOWN
        else:
            missing.append(x)
    if not missing:
        return S4Result(Verdict.PASS, [], found)
    ws = [Witness(f"{x.name} has no occurrence whose derived type is {show(dict(r.env)[x])}", r.name)
          for x in missing]
    return S4Result(Verdict.UNKNOWN if unknown else Verdict.FAIL, ws, found)


class _Classes:
    """Union-find over terms with decomposition through constant heads."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.parent: dict[Term, Term] = {}
        self.heads: dict[Term, dict[tuple[str, int], Sym]] = {}

    def find(self, t: Term) -> Term:
        if t not in self.parent:
            self.parent[t] = t
            self.heads[t] = {}
            if isinstance(t, Sym) and self._constant(t.name):
                self.heads[t][(t.name, len(t.args))] = t
        while self.parent[t] != t:
            self.parent[t] = self.parent[self.parent[t]]
            t = self.parent[t]
        return t

    def _constant(self, f: str) -> bool:
        return f in self.sig.symbols and self.sig.is_constant(f)

    def merge(self, a: Term, b: Term) -> None:
        work = [(a, b)]
        while work:
            a, b = work.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            self.parent[rb] = ra
            ha, hb = self.heads[ra], self.heads.pop(rb)
            for key, s in hb.items():
                if key in ha:
                    work.extend(zip(ha[key].args, s.args))
                else:
                    ha[key] = s

    def members(self, t: Term) -> list[Term]:
        r = self.find(t)
        return [u for u in self.parent if self.find(u) == r]

    def equivalent(self, a: Term, b: Term, depth: int = 0) -> bool:
        if a == b or self.find(a) == self.find(b):
            return True
        if depth > 50:
            return False
        for u in self.members(a) + [a]:
            for v in self.members(b) + [b]:
                if (isinstance(u, Sym) and isinstance(v, Sym) and u.name == v.name
                        and len(u.args) == len(v.args) and self._constant(u.name) and u.args
                        and all(self.equivalent(x, y, depth + 1) for x, y in zip(u.args, v.args))):
                    return True
        return False


def forced_equations(sig: Signature, l: Term) -> list[tuple[Position, Term, Term]]:
    """``τ(l,p) ≈ canonical(l|p)`` at every non-root symbol position."""
    out = []
    for p, s in subterms(l):
        if p and isinstance(s, Sym):
            out.append((p, derived_type(sig, l, p), canonical(sig, s)))
    return out


def forced_classes(sig: Signature, l: Term) -> _Classes:
    cls = _Classes(sig)
    for _, a, b in forced_equations(sig, l):
        cls.merge(a, b)
    return cls


def peak_constraints(sig: Signature, peak: Term) -> tuple[bool, dict[Var, Term]]:
    """Whether typing can hold for an instance of ``peak``, and the variable bindings it forces.

    Infeasible when two distinct constant heads are forced together.
    """
    cls = forced_classes(sig, peak)
    roots = {cls.find(t) for t in list(cls.parent)}
    if any(len(cls.heads[r]) > 1 for r in roots):
        return False, {}
    theta: dict[Var, Term] = {}
    for r in sorted(roots, key=show):
        members = sorted(cls.members(r), key=show)
        xs = [m for m in members if isinstance(m, Var)]
        if not xs:
            continue
        syms = [m for m in members if not isinstance(m, Var) and not (free_vars(m) & set(xs))]
        rep = syms[0] if syms else xs[0]
        for x in xs:
            if x != rep:
                theta[x] = rep
    return True, theta


def apply_constraints(t: Term, theta: dict[Var, Term], rounds: int = 16) -> Term:
    for _ in range(rounds):
        u = substitute(t, theta)
        if u == t:
            break
        t = u
    return t


def check_S5(sig: Signature, r: Rule) -> Result:
    """PASS when typing forces every ``x ∈ dom(ρ)`` to be convertible with ``xρ``."""
    if not r.rho:
        return Result(Verdict.PASS)
    cls = forced_classes(sig, r.lhs)
    ws = []
    unresolved = False
    for x, u in r.rho:
        if not is_algebraic(u):
            ws.append(Witness(f"{x.name} := {show(u)} is not algebraic", r.name))
        if not cls.equivalent(x, u):
            unresolved = True
            ws.append(Witness(f"typing does not force {x.name} to be convertible with {show(u)}", r.name))
    return Result(Verdict.UNKNOWN if unresolved else Verdict.PASS, ws)


@dataclass
class WellFormed:
    verdict: Verdict
    typed: Result
    accessible: Result
    disjoint: Result
    paths: dict[Var, tuple[int, list[AccEdge]]] = field(default_factory=dict)


def lhs_pairs(sig: Signature, r: Rule) -> list[tuple[Term, Term]]:
    """``l_i : T_iγ₀`` for the arguments of the left-hand side."""
    doms, _ = sig[r.head].instantiate(r.lhs.args)
    return list(zip(r.lhs.args, doms))


def check_well_formed(sig: Signature, ind: InductiveStructure, r: Rule,
                      fuel: int = DEFAULT_FUEL, relaxed: bool = False) -> WellFormed:
    # (i) Γ₀ ⊢ lρ : Uγ₀ρ
    c = Checker(sig, fuel)
    try:
        ctx = c.check_env(r.env)
        expected = substitute(canonical(sig, r.lhs), r.subst)
        v = c.check(ctx, substitute(r.lhs, r.subst), expected)
        typed = Result(v, [] if v is Verdict.PASS else
                       [Witness(f"lρ does not have type {show(expected)}", r.name)])
    except TypingError as e:
        typed = Result(_typing_verdict(e), [Witness("lρ is ill-typed: " + e.message, r.name)])

    # (ii) every Γ₀ variable is reachable by (⊳₁^ρ)* from an argument
    red = Reducer(sig, fuel)
    equal = (lambda a, b: a == b or red.joinable(a, b) is Verdict.PASS) if relaxed else (lambda a, b: a == b)
    acc = Accessibility(sig, ind, r.subst, equal)
    pairs = lhs_pairs(sig, r)
    paths: dict[Var, tuple[int, list[AccEdge]]] = {}
    missing = []
    for x, ty in r.env:
        for i, (li, ti) in enumerate(pairs, 1):
            if li == x and equal(acc.mod_rho(ti), acc.mod_rho(ty)):
                paths[x] = (i, [])
                break
            path = acc.path_to((li, ti), (x, ty))
            if path is not None:
                paths[x] = (i, path)
                break
        else:
            missing.append(x)
    accessible = Result(Verdict.of(not missing),
                        [Witness(f"{x.name} is not accessible in any argument", r.name) for x in missing])

    # (iii) dom(ρ) ∩ dom(Γ₀) = ∅
    both = sorted(x.name for x, _ in r.rho if x in dict(r.env))
    disjoint = Result(Verdict.of(not both),
                      [Witness(f"{', '.join(both)} in both Γ₀ and ρ", r.name)] if both else [])
    return WellFormed(combine([typed.verdict, accessible.verdict, disjoint.verdict]),
                      typed, accessible, disjoint, paths)

