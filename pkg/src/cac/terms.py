"""Term algebra: sorts, sorted variables, symbol applications, binders.

Bound variables are de Bruijn indices (``Bound``); free variables are named
(``Var``).  Every variable carries its sort family: ``box=True`` for
predicate variables, ``box=False`` for object variables.  Binder names are
kept only for printing and do not take part in equality, so structural
equality is alpha-equivalence.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

Position = tuple[int, ...]


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, repr=False)
class Sort(Term):
    box: bool

    def __repr__(self) -> str:
        return "BOX" if self.box else "STAR"


STAR = Sort(False)
BOX = Sort(True)


@dataclass(frozen=True)
class Var(Term):
    name: str
    box: bool = False


@dataclass(frozen=True)
class Bound(Term):
    index: int
    box: bool = False


@dataclass(frozen=True)
class Sym(Term):
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Prod(Term):
    dom: Term
    body: Term
    box: bool = False
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Abs(Term):
    dom: Term
    body: Term
    box: bool = False
    name: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


Binder = (Prod, Abs)


def arrow(dom: Term, cod: Term, box: bool = False) -> Prod:
    """Non-dependent product; ``cod`` must not mention the new binder."""
    return Prod(dom, shift(cod, 1), box, "_")


def apply(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``h a1 .. an`` into ``(h, [a1, .., an])``."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# -- de Bruijn plumbing -----------------------------------------------------


def loose(t: Term, depth: int = 0) -> bool:
    """True if ``t`` has a bound index escaping ``depth`` enclosing binders."""
    match t:
        case Bound(i):
            return i >= depth
        case Sym(_, args):
            return any(loose(a, depth) for a in args)
        case Prod(d, b) | Abs(d, b):
            return loose(d, depth) or loose(b, depth + 1)
        case App(f, a):
            return loose(f, depth) or loose(a, depth)
    return False


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if d == 0:
        return t
    match t:
        case Bound(i, box):
            return Bound(i + d, box) if i >= cutoff else t
        case Sym(f, args) if args:
            return Sym(f, tuple(shift(a, d, cutoff) for a in args))
        case Prod(dom, body, box, name):
            return Prod(shift(dom, d, cutoff), shift(body, d, cutoff + 1), box, name)
        case Abs(dom, body, box, name):
            return Abs(shift(dom, d, cutoff), shift(body, d, cutoff + 1), box, name)
        case App(f, a):
            return App(shift(f, d, cutoff), shift(a, d, cutoff))
    return t


def instantiate(body: Term, u: Term) -> Term:
    """Replace index 0 of a binder body by ``u`` (the beta contractum)."""
    has_loose = loose(u)

    def go(t: Term, depth: int) -> Term:
        match t:
            case Bound(i, box):
                if i == depth:
                    return shift(u, depth) if has_loose else u
                return Bound(i - 1, box) if i > depth else t
            case Sym(f, args) if args:
                return Sym(f, tuple(go(a, depth) for a in args))
            case Prod(dom, b, box, name):
                return Prod(go(dom, depth), go(b, depth + 1), box, name)
            case Abs(dom, b, box, name):
                return Abs(go(dom, depth), go(b, depth + 1), box, name)
            case App(f, a):
                return App(go(f, depth), go(a, depth))
        return t

    return go(body, 0)


def abstract(t: Term, x: Var) -> Term:
    """Inverse of ``instantiate(_, x)``: turn free ``x`` into index 0."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case Var():
                return Bound(depth, x.box) if t == x else t
            case Bound(i, box):
                return Bound(i + 1, box) if i >= depth else t
            case Sym(f, args) if args:
                return Sym(f, tuple(go(a, depth) for a in args))
            case Prod(dom, b, box, name):
                return Prod(go(dom, depth), go(b, depth + 1), box, name)
            case Abs(dom, b, box, name):
                return Abs(go(dom, depth), go(b, depth + 1), box, name)
            case App(f, a):
                return App(go(f, depth), go(a, depth))
        return t

    return go(t, 0)


def substitute(t: Term, theta: Mapping[Var, Term]) -> Term:
    """Simultaneous capture-avoiding substitution of free variables."""
    if not theta:
        return t
    shifted = {x: loose(u) for x, u in theta.items()}

    def go(t: Term, depth: int) -> Term:
        match t:
            case Var():
                u = theta.get(t)
                if u is None:
                    return t
                return shift(u, depth) if depth and shifted[t] else u
            case Sym(f, args) if args:
                return Sym(f, tuple(go(a, depth) for a in args))
            case Prod(dom, b, box, name):
                return Prod(go(dom, depth), go(b, depth + 1), box, name)
            case Abs(dom, b, box, name):
                return Abs(go(dom, depth), go(b, depth + 1), box, name)
            case App(f, a):
                return App(go(f, depth), go(a, depth))
        return t

    return go(t, 0)


def compose(theta: Mapping[Var, Term], phi: Mapping[Var, Term]) -> dict[Var, Term]:
    """``theta ∘ phi``: first apply ``theta``, then ``phi``."""
    out = {x: substitute(u, phi) for x, u in theta.items()}
    for x, u in phi.items():
        out.setdefault(x, u)
    return {x: u for x, u in out.items() if u != x}


# -- variables --------------------------------------------------------------


def free_vars(t: Term) -> set[Var]:
    out: set[Var] = set()
    stack = [t]
    while stack:
        t = stack.pop()
        match t:
            case Var():
                out.add(t)
            case Sym(_, args):
                stack.extend(args)
            case Prod(d, b) | Abs(d, b):
                stack.append(d)
                stack.append(b)
            case App(f, a):
                stack.append(f)
                stack.append(a)
    return out


def free_box_vars(t: Term) -> set[Var]:
    return {x for x in free_vars(t) if x.box}


def symbols(t: Term) -> set[str]:
    out: set[str] = set()
    for _, s in subterms(t):
        if isinstance(s, Sym):
            out.add(s.name)
    return out


def var_occurrences(t: Term) -> dict[Var, int]:
    counts: dict[Var, int] = {}
    for _, s in subterms(t):
        if isinstance(s, Var):
            counts[s] = counts.get(s, 0) + 1
    return counts


def fresh(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    for k in itertools.count(1):
        name = base + "'" * k if k < 4 else f"{base}{k}"
        if name not in avoid:
            return name
    raise AssertionError("unreachable")


# -- positions --------------------------------------------------------------


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Sym(_, args):
            return args
        case Prod(d, b) | Abs(d, b):
            return (d, b)
        case App(f, a):
            return (f, a)
    return ()


def subterms(t: Term, pos: Position = ()) -> Iterator[tuple[Position, Term]]:
    """All ``(p, t|p)`` in pre-order, left to right."""
    stack = [(pos, t)]
    while stack:
        p, s = stack.pop()
        yield p, s
        kids = children(s)
        for i in range(len(kids), 0, -1):
            stack.append((p + (i,), kids[i - 1]))


def positions(t: Term) -> list[Position]:
    return [p for p, _ in subterms(t)]


class PositionError(ValueError):
    pass


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        kids = children(t)
        if not 1 <= i <= len(kids):
            raise PositionError(f"position {list(p)} out of range")
        t = kids[i - 1]
    return t


def replace_at(t: Term, p: Position, u: Term) -> Term:
    if not p:
        return u
    i, rest = p[0], p[1:]
    kids = children(t)
    if not 1 <= i <= len(kids):
        raise PositionError(f"position {list(p)} out of range")
    new = replace_at(kids[i - 1], rest, u)
    match t:
        case Sym(f, args):
            return Sym(f, args[: i - 1] + (new,) + args[i:])
        case Prod(d, b, box, name):
            return Prod(new, b, box, name) if i == 1 else Prod(d, new, box, name)
        case Abs(d, b, box, name):
            return Abs(new, b, box, name) if i == 1 else Abs(d, new, box, name)
        case App(f, a):
            return App(new, a) if i == 1 else App(f, new)
    raise AssertionError("unreachable")


def symbol_positions(t: Term, name: str) -> set[Position]:
    return {p for p, s in subterms(t) if isinstance(s, Sym) and s.name == name}


def var_positions(t: Term, x: Var) -> list[Position]:
    return [p for p, s in subterms(t) if s == x]


# -- classes ----------------------------------------------------------------


def alpha_eq(t: Term, u: Term) -> bool:
    return t == u


def is_algebraic(t: Term) -> bool:
    match t:
        case Var():
            return True
        case Sym(_, args):
            return all(is_algebraic(a) for a in args)
    return False


class SyntacticClass(enum.Enum):
    KIND = "K"
    PREDICATE = "P"
    OBJECT = "O"
    NONE = "None"


def syntactic_class(t: Term, is_box_symbol: Callable[[str], bool]) -> SyntacticClass:
    """K (predicate types), P (predicates), O (objects) or none of them."""
    K, P, O, N = (SyntacticClass.KIND, SyntacticClass.PREDICATE,
                  SyntacticClass.OBJECT, SyntacticClass.NONE)
    match t:
        case Sort(box):
            return N if box else K
        case Var(_, box) | Bound(_, box):
            return P if box else O
        case Sym(f):
            return P if is_box_symbol(f) else O
        case Prod(_, body):
            c = syntactic_class(body, is_box_symbol)
            return c if c in (K, P) else N
        case Abs(_, body):
            c = syntactic_class(body, is_box_symbol)
            return c if c in (P, O) else N
        case App(f, _):
            c = syntactic_class(f, is_box_symbol)
            return c if c in (P, O) else N
    return N


def is_kind(t: Term) -> bool:
    """Syntactic membership in K; needs no signature."""
    while isinstance(t, Prod):
        t = t.body
    return t == STAR


# -- printing ---------------------------------------------------------------


def show(t: Term) -> str:
    taken = {x.name for x in free_vars(t)}
    return _show(t, [], taken, 0)


def _atomic(t: Term) -> bool:
    return isinstance(t, (Sort, Var, Bound, Sym))


def _show(t: Term, names: list[str], taken: set[str], prec: int) -> str:
    # prec: 0 = anywhere, 1 = left of an arrow / function head, 2 = argument
    match t:
        case Sort(box):
            return "[]" if box else "*"
        case Var(name):
            return name
        case Bound(i):
            return names[-1 - i] if i < len(names) else f"?{i}"
        case Sym(f, args):
            if not args:
                return f
            return f + "(" + ", ".join(_show(a, names, taken, 0) for a in args) + ")"
        case Prod(dom, body, _, name) if not _mentions_zero(body):
            s = _show(dom, names, taken, 1) + " -> " + _show(body, names + ["_"], taken, 0)
            return f"({s})" if prec else s
        case Prod(dom, body, _, name) | Abs(dom, body, _, name):
            x = fresh(name if name != "_" else "x", taken | set(names))
            mark = "!" if isinstance(t, Prod) else "\\"
            s = f"{mark}{x}:{_show(dom, names, taken, 0)}. {_show(body, names + [x], taken, 0)}"
            return f"({s})" if prec else s
        case App(f, a):
            s = _show(f, names, taken, 1) + " " + _show(a, names, taken, 2)
            return f"({s})" if prec == 2 else s
    raise TypeError(f"not a term: {t!r}")


def _mentions_zero(body: Term, depth: int = 0) -> bool:
    match body:
        case Bound(i):
            return i == depth
        case Sym(_, args):
            return any(_mentions_zero(a, depth) for a in args)
        case Prod(d, b) | Abs(d, b):
            return _mentions_zero(d, depth) or _mentions_zero(b, depth + 1)
        case App(f, a):
            return _mentions_zero(f, depth) or _mentions_zero(a, depth)
    return False
