"""Syntax-directed type inference for CAC with conversion modulo beta and rules."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .rewrite import DEFAULT_FUEL, Reducer
from .signature import Env, Signature
from .terms import (
    BOX, STAR, Abs, App, Bound, Prod, Sort, Sym, SyntacticClass, Term, Var, abstract,
    instantiate, show,
)
from .verdict import Verdict


class TypingError(Exception):
    """kind: unbound, sort, product, arity, conversion-failed, conversion-unknown, symbol."""

    def __init__(self, kind: str, message: str, term: Term | None = None):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.term = term

    @property
    def unknown(self) -> bool:
        return self.kind == "conversion-unknown"


class Context:
    """An ordered typing environment ``x1:T1, .., xn:Tn``."""

    def __init__(self, entries: Iterable[tuple[Var, Term]] = ()):
        self.entries: tuple[tuple[Var, Term], ...] = tuple(entries)
        self.types: dict[Var, Term] = dict(self.entries)

    def extend(self, x: Var, t: Term) -> "Context":
        return Context(self.entries + ((x, t),))

    def __contains__(self, x: Var) -> bool:
        return x in self.types

    def __getitem__(self, x: Var) -> Term:
        return self.types[x]


@dataclass(frozen=True)
class TypingResult:
    type: Term | None
    error: TypingError | None
    size: int

    @property
    def ok(self) -> bool:
        return self.error is None


_counter = itertools.count(1)


class Checker:
    """Type inference; subclasses restrict which symbols and variables are admitted."""

    def __init__(self, sig: Signature, fuel: int = DEFAULT_FUEL, reducer: Reducer | None = None):
        self.sig = sig
        self.red = reducer or Reducer(sig, fuel)
        self.size = 0

    # -- hooks

    def admit_symbol(self, ctx: Context, t: Sym, doms: list[Term]) -> None:
        pass

    def admit_var(self, ctx: Context, x: Var) -> None:
        pass

    def local(self, name: str, box: bool) -> Var:
        base = name if name not in ("_", "") else "x"
        return Var(f"{base}#{next(_counter)}", box)

    # -- judgments

    def infer(self, ctx: Context, t: Term) -> Term:
        self.size += 1
        match t:
            case Sort(box):
                if box:
                    raise TypingError("sort", "[] has no type", t)
                return BOX
            case Var():
                if t not in ctx:
                    raise TypingError("unbound", f"unbound variable {t.name}", t)
                self.admit_var(ctx, t)
                return ctx[t]
            case Bound():
                raise TypingError("unbound", "loose bound variable", t)
            case Sym(f, args):
                if f not in self.sig.symbols:
                    raise TypingError("unbound", f"unknown symbol {f}", t)
                d = self.sig[f]
                if len(args) != d.arity:
                    raise TypingError("arity", f"{f} expects {d.arity} arguments, got {len(args)}", t)
                doms, cod = d.instantiate(args)
                self.admit_symbol(ctx, t, doms)
                for a, ty in zip(args, doms):
                    self.check_conv(ctx, a, ty)
                return cod
            case Prod(dom, body, box, name):
                s1 = self.sort_of(ctx, dom)
                if s1.box != box:
                    raise TypingError("sort", f"binder {name} is tagged with the wrong sort family", t)
                x = self.local(name, box)
                return self.sort_of(ctx.extend(x, dom), instantiate(body, x))
            case Abs(dom, body, box, name):
                s1 = self.sort_of(ctx, dom)
                if s1.box != box:
                    raise TypingError("sort", f"binder {name} is tagged with the wrong sort family", t)
                x = self.local(name, box)
                inner = ctx.extend(x, dom)
                b = self.infer(inner, instantiate(body, x))
                if b == BOX:
                    raise TypingError("sort", "abstraction over a kind-valued body", t)
                self.sort_of(inner, b)
                return Prod(dom, abstract(b, x), box, name)
            case App(f, a):
                p = self.as_product(self.infer(ctx, f), f)
                self.check_conv(ctx, a, p.dom)
                return instantiate(p.body, a)
        raise TypingError("sort", f"not a term: {t!r}", t)

    def sort_of(self, ctx: Context, t: Term) -> Sort:
        s = self.infer(ctx, t)
        if isinstance(s, Sort):
            return s
        w = self.red.nf(s)
        if isinstance(w, Sort):
            return w
        raise TypingError("sort", f"{show(t)} is not a type (its type is {show(s)})", t)

    def as_product(self, ty: Term, fun: Term) -> Prod:
        if isinstance(ty, Prod):
            return ty
        w = self.red.whnf(ty)
        if w is None:
            raise TypingError("conversion-unknown", f"fuel ran out exposing a product in {show(ty)}", fun)
        if isinstance(w, Prod):
            return w
        n = self.red.nf(ty)
        if isinstance(n, Prod):
            return n
        raise TypingError("product", f"{show(fun)} has type {show(ty)}, not a product", fun)

    def convertible(self, a: Term, b: Term) -> Verdict:
        return self.red.joinable(a, b)

    def check_conv(self, ctx: Context, t: Term, expected: Term) -> None:
        actual = self.infer(ctx, t)
        v = self.convertible(actual, expected)
        if v is Verdict.FAIL:
            raise TypingError("conversion-failed",
                              f"{show(t)} has type {show(actual)}, expected {show(expected)}", t)
        if v is Verdict.UNKNOWN:
            raise TypingError("conversion-unknown",
                              f"fuel ran out comparing {show(actual)} with {show(expected)}", t)

    def check(self, ctx: Context, t: Term, expected: Term) -> Verdict:
        actual = self.infer(ctx, t)
        if expected == BOX or actual == BOX:
            return Verdict.of(actual == expected)
        return self.convertible(actual, expected)

    def check_env(self, env: Env) -> Context:
        """Each entry's type has the sort of its variable under the preceding prefix."""
        ctx = Context()
        for x, ty in env:
            if x in ctx:
                raise TypingError("unbound", f"{x.name} declared twice", x)
            s = self.sort_of(ctx, ty)
            if s.box != x.box:
                fam = "predicate" if x.box else "object"
                raise TypingError("sort", f"{x.name} is a {fam} variable but {show(ty)} : {show(s)}", ty)
            ctx = ctx.extend(x, ty)
        return ctx


# -- functional entry points ----------------------------------------------------


def _run(fn, checker: Checker) -> TypingResult:
    try:
        ty = fn()
        return TypingResult(ty, None, checker.size)
    except TypingError as e:
        return TypingResult(None, e, checker.size)


def infer(sig: Signature, env: Env, t: Term, fuel: int = DEFAULT_FUEL) -> TypingResult:
    c = Checker(sig, fuel)
    return _run(lambda: c.infer(c.check_env(env), t), c)


def check(sig: Signature, env: Env, t: Term, expected: Term,
          fuel: int = DEFAULT_FUEL) -> tuple[Verdict, TypingResult]:
    c = Checker(sig, fuel)
    res = _run(lambda: c.infer(c.check_env(env), t), c)
    if res.error is not None:
        v = Verdict.UNKNOWN if res.error.unknown else Verdict.FAIL
        return v, res
    if expected != BOX:
        try:
            c.sort_of(c.check_env(env), expected)
        except TypingError as e:
            return (Verdict.UNKNOWN if e.unknown else Verdict.FAIL), TypingResult(res.type, e, c.size)
    if expected == BOX or res.type == BOX:
        return Verdict.of(res.type == expected), res
    return c.convertible(res.type, expected), res


def well_typed_env(sig: Signature, env: Env, fuel: int = DEFAULT_FUEL) -> tuple[Verdict, str]:
    c = Checker(sig, fuel)
    try:
        c.check_env(env)
    except TypingError as e:
        return (Verdict.UNKNOWN if e.unknown else Verdict.FAIL), e.message
    return Verdict.PASS, ""


def typing_class(sig: Signature, env: Env, t: Term, fuel: int = DEFAULT_FUEL) -> SyntacticClass:
    """Class from the typing judgment, asserted equal to the syntactic class."""
    c = Checker(sig, fuel)
    ctx = c.check_env(env)
    ty = c.infer(ctx, t)
    if ty == BOX:
        cls = SyntacticClass.KIND
    else:
        s = c.sort_of(ctx, ty)
        cls = SyntacticClass.PREDICATE if s.box else SyntacticClass.OBJECT
    syn = sig.klass(t)
    assert syn == cls, f"typing class {cls} disagrees with syntactic class {syn} for {show(t)}"
    return cls


def check_signature(sig: Signature, fuel: int = DEFAULT_FUEL) -> list[tuple[str, TypingError]]:
    """Every declared type ``τ_f`` is typable by the sort of ``f``."""
    out = []
    for f, d in sig.symbols.items():
        prefix = sig.restricted(r for r in sig.rules if r.head != f)
        c = Checker(prefix, fuel)
        try:
            s = c.sort_of(Context(), d.type)
            if s.box != d.box:
                out.append((f, TypingError("sort", f"type of {f} has sort {show(s)}", d.type)))
        except TypingError as e:
            out.append((f, e))
    return out
