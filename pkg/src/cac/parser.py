"""Concrete syntax for signatures, rules and directives.

Grammar (one declaration per ``.``-terminated item, ``--`` line comments)::

    symbol NAME [ARITY] : TERM .
    rule [(x : T, ...)] LHS --> RHS [with { x := T, ... }] .
    inductive C ind { i, ... } .
    accessible c { j, ... } .
    prec f > g, h ; f = k .
    status f lex( mul(x2), mul(x1, x3) ) .
    assume terminating { f, g } .
    check [(env)] TERM : TERM .     type [(env)] TERM .     eval [(env)] TERM .

Terms: ``*``, ``\\x:T. t``, ``!x:T. U``, ``T -> U``, juxtaposition for
application, ``f(t1, .., tn)`` for symbols.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable

from .signature import (
    Env, InductiveStructure, OrderError, QuasiOrder, Rule, Signature, Status, SymbolDecl,
    default_precedence, default_status, dependency_order, leading_products,
    validate_declarations, validate_status,
)
from .rulecheck import default_env
from .terms import STAR, App, Abs, Bound, Prod, Sym, Term, Var, is_kind

KEYWORDS = {"with"}
PUNCT = ["-->", "->", ":=", "[]", "\\", "!", "*", ":", ".", ",", "(", ")", "{", "}", ">", "=", ";"]
_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>--(?!>)[^\n]*)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<num>[0-9]+)"
    r"|(?P<punct>" + "|".join(re.escape(p) for p in PUNCT) + ")"
)


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int = 0
    col: int = 0
    tag: str = "parse"
    severity: str = "error"

    def render(self, path: str = "<input>") -> str:
        return f"{path}:{self.line}:{self.col}: {self.severity}[{self.tag}]: {self.message}"


class ParseFailure(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__(diagnostics[0].message if diagnostics else "parse error")
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class Token:
    kind: str  # name, num, punct, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseFailure([Diagnostic(f"unexpected character {text[pos]!r}", line, pos - start + 1)])
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


@dataclass(frozen=True)
class Directive:
    kind: str  # check | type | eval
    env: Env
    term: Term
    type: Term | None
    line: int


@dataclass
class Program:
    sig: Signature
    inductive: InductiveStructure
    precedence: QuasiOrder
    statuses: dict[str, Status] = field(default_factory=dict)
    assumed: frozenset[str] = frozenset()
    directives: list[Directive] = field(default_factory=list)

    def status_of(self, f: str) -> Status:
        if f in self.statuses:
            return self.statuses[f]
        return default_status(self.sig, f)


class _Scope:
    """Names visible while parsing one term."""

    def __init__(self, free: dict[str, Var], bound: list[tuple[str, bool]] | None = None):
        self.free = free
        self.bound = bound or []

    def push(self, name: str, box: bool) -> "_Scope":
        return _Scope(self.free, self.bound + [(name, box)])

    def lookup(self, name: str) -> Term | None:
        for k, (n, box) in enumerate(reversed(self.bound)):
            if n == name:
                return Bound(k, box)
        return self.free.get(name)

    def binds(self, name: str) -> bool:
        return any(n == name for n, _ in self.bound) or name in self.free


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.symbols: dict[str, SymbolDecl] = {}
        self.rules: list[Rule] = []
        self.rule_count: dict[str, int] = {}
        self.ind: dict[str, frozenset[int]] = {}
        self.acc: dict[str, frozenset[int]] = {}
        self.prec_ge: list[tuple[str, str]] = []
        self.prec_gt: list[tuple[str, str]] = []
        self.statuses: dict[str, Status] = {}
        self.status_lines: dict[str, int] = {}
        self.assumed: set[str] = set()
        self.directives: list[Directive] = []
        self.lhs_vars: dict[str, Var] | None = None
        self.implicit_env: list[bool] = []

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None) -> ParseFailure:
        tok = tok or self.tok
        return ParseFailure([Diagnostic(msg, tok.line, tok.col)])

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "name") and self.tok.text == text

    def eat(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of file"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self) -> Token:
        if self.tok.kind not in ("name", "num") or self.tok.text in KEYWORDS:
            raise self.error(f"expected a name, found {self.tok.text or 'end of file'!r}")
        t = self.tok
        self.i += 1
        return t

    def number(self) -> int:
        if self.tok.kind != "num":
            raise self.error(f"expected a number, found {self.tok.text!r}")
        t = self.tok
        self.i += 1
        return int(t.text)

    def peek(self, k: int) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    # -- declarations

    def parse(self) -> None:
        while self.tok.kind != "eof":
            kw = self.name()
            handler = getattr(self, "decl_" + kw.text, None)
            if handler is None:
                raise self.error(f"unknown declaration {kw.text!r}", kw)
            handler(kw)
            self.eat(".")

    def decl_symbol(self, kw: Token) -> None:
        nt = self.name()
        name = nt.text
        if name in self.symbols:
            raise self.error(f"symbol {name} declared twice", nt)
        arity = self.number() if self.tok.kind == "num" and self.peek(1).text == ":" else None
        self.eat(":")
        self._declaring = name
        ty = self.term(_Scope({}))
        self._declaring = None
        if arity is None:
            arity = leading_products(ty)
        self.symbols[name] = SymbolDecl(name, arity, is_kind(ty), ty, nt.line)

    def env(self) -> tuple[Env, dict[str, Var]]:
        free: dict[str, Var] = {}
        entries = []
        if not (self.at("(") and self.peek(1).kind in ("name", "num") and self.peek(2).text == ":"):
            return (), free
        self.eat("(")
        while True:
            nt = self.name()
            self.eat(":")
            ty = self.term(_Scope(dict(free)))
            if nt.text in free:
                raise self.error(f"{nt.text} declared twice in the environment", nt)
            x = Var(nt.text, is_kind(ty))
            free[nt.text] = x
            entries.append((x, ty))
            if not self.at(","):
                break
            self.eat(",")
        self.eat(")")
        return tuple(entries), free

    def decl_rule(self, kw: Token) -> None:
        env, free = self.env()
        self.lhs_vars = {}
        self.lhs_free = free
        lhs_tok = self.tok
        lhs = self.term(_Scope(free))
        lhs_vars, self.lhs_vars = self.lhs_vars, None
        if not isinstance(lhs, Sym):
            raise self.error("left-hand side must be a symbol application", lhs_tok)
        self.eat("-->")
        scope = _Scope({**lhs_vars, **free})
        rhs = self.term(scope)
        rho = []
        if self.at("with"):
            self.eat("with")
            self.eat("{")
            while not self.at("}"):
                nt = self.name()
                x = scope.lookup(nt.text)
                if not isinstance(x, Var):
                    raise self.error(f"{nt.text} is not a variable of the rule", nt)
                self.eat(":=")
                rho.append((x, self.term(scope)))
                if not self.at(","):
                    break
                self.eat(",")
            self.eat("}")
        k = self.rule_count.get(lhs.name, 0) + 1
        self.rule_count[lhs.name] = k
        self.rules.append(Rule(f"{lhs.name}#{k}", lhs, rhs, env, tuple(rho), kw.line))
        self.implicit_env.append(not env)

    def index_set(self) -> frozenset[int]:
        self.eat("{")
        out = []
        while not self.at("}"):
            out.append(self.number())
            if not self.at(","):
                break
            self.eat(",")
        self.eat("}")
        return frozenset(out)

    def known_symbol(self) -> Token:
        nt = self.name()
        if nt.text not in self.symbols:
            raise self.error(f"unknown symbol {nt.text}", nt)
        return nt

    def decl_inductive(self, kw: Token) -> None:
        nt = self.known_symbol()
        self.eat("ind")
        idx = self.index_set()
        d = self.symbols[nt.text]
        _, doms, _ = d.scheme()
        bad = [i for i in idx if not (1 <= i <= d.arity and is_kind(doms[i - 1]))]
        if bad:
            raise self.error(f"Ind({nt.text}) may only list predicate-sorted argument positions", nt)
        self.ind[nt.text] = idx

    def decl_accessible(self, kw: Token) -> None:
        nt = self.known_symbol()
        idx = self.index_set()
        if any(not 1 <= i <= self.symbols[nt.text].arity for i in idx):
            raise self.error(f"Acc({nt.text}) lists a position outside 1..arity", nt)
        self.acc[nt.text] = idx

    def decl_prec(self, kw: Token) -> None:
        while True:
            prev = [self.known_symbol().text]
            while self.at(">") or self.at("="):
                op = self.eat(self.tok.text).text
                nxt = [self.known_symbol().text]
                while self.at(","):
                    self.eat(",")
                    nxt.append(self.known_symbol().text)
                for a in prev:
                    for b in nxt:
                        if op == ">":
                            self.prec_gt.append((a, b))
                        else:
                            self.prec_ge += [(a, b), (b, a)]
                prev = nxt
            if not self.at(";"):
                break
            self.eat(";")

    def decl_status(self, kw: Token) -> None:
        nt = self.known_symbol()
        self.eat("lex")
        self.eat("(")
        groups = []
        while True:
            self.eat("mul")
            self.eat("(")
            g = []
            while True:
                xt = self.name()
                if not re.fullmatch(r"x[0-9]+", xt.text):
                    raise self.error("status variables are written x1, x2, ...", xt)
                g.append(int(xt.text[1:]))
                if not self.at(","):
                    break
                self.eat(",")
            self.eat(")")
            groups.append(tuple(g))
            if not self.at(","):
                break
            self.eat(",")
        self.eat(")")
        self.statuses[nt.text] = tuple(groups)
        self.status_lines[nt.text] = nt.line

    def decl_assume(self, kw: Token) -> None:
        self.eat("terminating")
        self.eat("{")
        while not self.at("}"):
            self.assumed.add(self.known_symbol().text)
            if not self.at(","):
                break
            self.eat(",")
        self.eat("}")

    def _directive(self, kind: str, kw: Token, typed: bool) -> None:
        env, free = self.env()
        t = self.term(_Scope(free))
        ty = None
        if typed:
            self.eat(":")
            ty = self.term(_Scope(free))
        self.directives.append(Directive(kind, env, t, ty, kw.line))

    def decl_check(self, kw: Token) -> None:
        self._directive("check", kw, True)

    def decl_type(self, kw: Token) -> None:
        self._directive("type", kw, False)

    def decl_eval(self, kw: Token) -> None:
        self._directive("eval", kw, False)

    # -- terms

    def term(self, scope: _Scope, expect_box: bool | None = None) -> Term:
        if self.at("\\") or self.at("!"):
            return self.binder(scope)
        left = self.application(scope, expect_box)
        if self.at("->"):
            self.eat("->")
            box = is_kind(left)
            right = self.term(scope.push("_", box))
            return Prod(left, right, box, "_")
        return left

    def binder(self, scope: _Scope) -> Term:
        mark = self.eat(self.tok.text).text
        nt = self.name()
        if scope.binds(nt.text):
            raise self.error(f"{nt.text} is already bound in this scope", nt)
        self.eat(":")
        dom = self.term(scope)
        self.eat(".")
        box = is_kind(dom)
        body = self.term(scope.push(nt.text, box))
        cls = Prod if mark == "!" else Abs
        return cls(dom, body, box, nt.text)

    def _starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("name", "num"):
            return t.text not in KEYWORDS
        return t.kind == "punct" and t.text in ("*", "(", "[]", "\\", "!")

    def application(self, scope: _Scope, expect_box: bool | None) -> Term:
        head = self.atom(scope, expect_box)
        while self._starts_atom():
            if self.at("\\") or self.at("!"):
                head = App(head, self.binder(scope))
                break
            head = App(head, self.atom(scope, None))
        return head

    def atom(self, scope: _Scope, expect_box: bool | None) -> Term:
        t = self.tok
        if self.at("*"):
            self.i += 1
            return STAR
        if self.at("[]"):
            raise self.error("the sort [] cannot be written in input")
        if self.at("("):
            self.eat("(")
            inner = self.term(scope, expect_box)
            self.eat(")")
            return inner
        nt = self.name()
        name = nt.text
        found = scope.lookup(name) if name != "_" else None
        if found is not None:
            return found
        if name in self.symbols:
            return self.symbol_app(scope, nt)
        if self.lhs_vars is not None:
            if name in self.lhs_vars:
                return self.lhs_vars[name]
            if expect_box is None:
                raise self.error(f"cannot tell the sort of pattern variable {name}", nt)
            x = Var(name, expect_box)
            self.lhs_vars[name] = x
            scope.free[name] = x
            return x
        if getattr(self, "_declaring", None) == name:
            raise self.error(f"{name} occurs in its own type", nt)
        raise self.error(f"unknown name {name}", nt)

    def symbol_app(self, scope: _Scope, nt: Token) -> Term:
        d = self.symbols[nt.text]
        if d.arity == 0:
            return Sym(d.name)
        self.eat("(")
        _, doms, _ = d.scheme()
        args = []
        for k in range(d.arity):
            if k:
                self.eat(",")
            args.append(self.term(scope, is_kind(doms[k])))
        if self.at(","):
            raise self.error(f"{d.name} takes {d.arity} arguments", nt)
        self.eat(")")
        return Sym(d.name, tuple(args))


def parse(text: str) -> Program:
    """Parse and validate a source file; raises ``ParseFailure``."""
    p = Parser(text)
    p.parse()
    sig = Signature(p.symbols.values(), p.rules)
    if any(p.implicit_env):
        rules = []
        for r, implicit in zip(p.rules, p.implicit_env):
            if implicit:
                try:
                    r = replace(r, env=default_env(sig, r.lhs, r.rho))
                except ValueError:
                    pass
            rules.append(r)
        sig = Signature(p.symbols.values(), rules)
    diags = [Diagnostic(v.message, v.line, 1, "validate") for v in validate_declarations(sig)]
    try:
        order_c = dependency_order(sig, p.acc)
        prec = default_precedence(sig, p.prec_ge, p.prec_gt)
    except OrderError as e:
        raise ParseFailure(diags + [Diagnostic(str(e), 0, 0, "validate")])
    for f, stat in p.statuses.items():
        for msg in validate_status(sig, order_c, f, stat):
            diags.append(Diagnostic(msg, p.status_lines[f], 1, "validate"))
    for c in p.ind:
        if not sig.is_box(c) or not sig.is_constant(c):
            diags.append(Diagnostic(f"Ind is only declared for constant predicate symbols, not {c}", 0, 0, "validate"))
    if diags:
        raise ParseFailure(diags)
    ind = InductiveStructure(order_c, dict(p.ind), dict(p.acc))
    return Program(sig, ind, prec, dict(p.statuses), frozenset(p.assumed), p.directives)


def parse_term(text: str, program: Program | None = None, env: Env = (),
               lhs: bool = False) -> Term:
    """Parse a single term against an existing program's symbols."""
    p = Parser(text)
    if program is not None:
        p.symbols = dict(program.sig.symbols)
    free = {x.name: x for x, _ in env}
    if lhs:
        p.lhs_vars = {}
    t = p.term(_Scope(free))
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return t


def parse_file(path: str) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def program_from(symbols: Iterable[SymbolDecl], rules: Iterable[Rule] = ()) -> Program:
    sig = Signature(symbols, rules)
    return Program(sig, InductiveStructure(dependency_order(sig)), default_precedence(sig))
