"""A type-directed random generator of well-typed terms for one signature."""

from __future__ import annotations

import random

from cac.rewrite import Reducer, match
from cac.signature import Signature
from cac.terms import (
    Abs, App, Prod, STAR, Sym, Term, Var, abstract, arrow, instantiate, loose, substitute,
)


class Stuck(Exception):
    pass


class TypedGen:
    def __init__(self, sig: Signature, env: list[tuple[Var, Term]], seed: int = 0):
        self.sig = sig
        self.env = list(env)
        self.rng = random.Random(seed)
        self.red = Reducer(sig, 1000)
        self.counter = 0
        self.base = [Sym(f) for f, d in sig.symbols.items()
                     if d.box and d.arity == 0 and d.type == STAR]
        self.base += [ty for x, ty in env if not x.box and isinstance(ty, (Sym, Var))]

    def targets(self) -> list[Term]:
        out = list(dict.fromkeys(self.base))
        out += [arrow(a, b) for a in out[:2] for b in out[:2]]
        return out

    def fresh(self, box: bool = False) -> Var:
        self.counter += 1
        return Var(f"v{self.counter}", box)

    def norm(self, ty: Term) -> Term:
        return self.red.nf(ty) or ty

    def term(self, ty: Term, depth: int = 4) -> Term:
        for _ in range(20):
            try:
                return self.gen(self.norm(ty), depth, list(self.env))
            except Stuck:
                continue
        raise Stuck(str(ty))

    def gen(self, ty: Term, depth: int, ctx: list[tuple[Var, Term]]) -> Term:
        if depth < -3:
            raise Stuck()
        options = []
        if isinstance(ty, Prod):
            options.append((2, lambda: self.intro(ty, depth, ctx)))
        for x, xt in ctx:
            k = self.arrivals(xt, ty)
            if k is not None:
                options.append((3 if k == 0 else 2, lambda x=x, xt=xt, k=k: self.spine(x, xt, k, depth, ctx)))
        for f, d in self.sig.symbols.items():
            if d.box != (ty == STAR):
                continue
            ys, doms, cod = d.scheme()
            if isinstance(cod, Prod) and d.arity == 0:
                k = self.arrivals(cod, ty)
                if k is not None and k > 0:
                    options.append((1, lambda f=f, cod=cod, k=k: self.spine(Sym(f), cod, k, depth, ctx)))
                continue
            sigma = self.unify_cod(cod, ty)
            if sigma is None:
                continue
            weight = 3 if d.arity == 0 else (1 if depth <= 0 else 4)
            if f in self.sig.by_head:
                weight = 1 if depth <= 0 else 3
            options.append((weight, lambda f=f, ys=ys, doms=doms, sigma=sigma: self.symbol(f, ys, doms, sigma, depth, ctx)))
        if depth > 1 and ty != STAR and self.base:
            options.append((1, lambda: self.redex(ty, depth, ctx)))
        if not options:
            raise Stuck()
        weights = [w for w, _ in options]
        _, build = self.rng.choices(options, weights)[0]
        return build()

    def unify_cod(self, cod: Term, ty: Term) -> dict | None:
        try:
            return match(cod, ty)
        except ValueError:
            return {} if cod == ty else None

    def arrivals(self, xt: Term, ty: Term) -> int | None:
        """How many arguments ``x : xt`` needs to reach ``ty`` (non-dependent spines only)."""
        k = 0
        while True:
            if xt == ty:
                return k
            if not isinstance(xt, Prod) or loose(xt.body):
                return None
            xt, k = xt.body, k + 1

    def spine(self, head: Term, ht: Term, k: int, depth: int, ctx) -> Term:
        t = head
        for _ in range(k):
            t = App(t, self.gen(self.norm(ht.dom), depth - 1, ctx))
            ht = instantiate(ht.body, STAR)
        return t

    def intro(self, ty: Prod, depth: int, ctx) -> Term:
        x = self.fresh(ty.box)
        body = self.gen(self.norm(instantiate(ty.body, x)), depth - 1, ctx + [(x, ty.dom)])
        return Abs(ty.dom, abstract(body, x), ty.box, x.name)

    def symbol(self, f: str, ys, doms, sigma, depth: int, ctx) -> Term:
        args: list[Term] = []
        for k, y in enumerate(ys):
            if y in sigma:
                args.append(sigma[y])
                continue
            dom = substitute(doms[k], dict(zip(ys[:k], args)))
            args.append(self.gen(self.norm(dom), depth - 1, ctx))
        return Sym(f, tuple(args))

    def redex(self, ty: Term, depth: int, ctx) -> Term:
        dom = self.rng.choice(self.base)
        x = self.fresh()
        body = self.gen(ty, depth - 1, ctx + [(x, dom)])
        arg = self.gen(dom, depth - 1, ctx)
        return App(Abs(dom, abstract(body, x), False, x.name), arg)
