"""Command-line front end: check, type, eval and audit a source file."""

from __future__ import annotations

import argparse
import sys

from .audit import Options, audit
from .parser import ParseFailure, Program, parse
from .rewrite import DEFAULT_FUEL, normalize
from .terms import show
from .typecheck import check, check_signature, infer
from .verdict import Verdict, combine

EXIT = {Verdict.PASS: 0, Verdict.FAIL: 1, Verdict.UNKNOWN: 2}
EXIT_INVALID = 3


def err(msg: str) -> None:
    print(msg, file=sys.stderr)


def load(path: str, fuel: int) -> Program | None:
    try:
        with open(path, encoding="utf-8") as fh:
            program = parse(fh.read())
    except OSError as e:
        err(f"{path}: {e.strerror}")
        return None
    except ParseFailure as e:
        for d in e.diagnostics:
            err(d.render(path))
        return None
    bad = check_signature(program.sig, fuel)
    for f, e in bad:
        err(f"{path}: error[typing]: type of {f}: {e.message}")
    return None if bad else program


def cmd_check(program: Program, args: argparse.Namespace) -> Verdict:
    vs = []
    for d in program.directives:
        if d.kind != "check":
            continue
        v, res = check(program.sig, d.env, d.term, d.type, args.fuel)
        vs.append(v)
        print(f"{v.value.upper()}\t{show(d.term)} : {show(d.type)}")
        if v is not Verdict.PASS:
            why = res.error.message if res.error else f"inferred {show(res.type)}"
            err(f"{args.file}:{d.line}: error[typing]: {why}")
    return combine(vs)


def cmd_type(program: Program, args: argparse.Namespace) -> Verdict:
    vs = []
    for d in program.directives:
        if d.kind != "type":
            continue
        res = infer(program.sig, d.env, d.term, args.fuel)
        if res.ok:
            vs.append(Verdict.PASS)
            print(f"{show(d.term)} : {show(res.type)}")
        else:
            v = Verdict.UNKNOWN if res.error.unknown else Verdict.FAIL
            vs.append(v)
            print(f"{v.value.upper()}\t{show(d.term)}")
            err(f"{args.file}:{d.line}: error[typing]: {res.error.message}")
    return combine(vs)


def cmd_eval(program: Program, args: argparse.Namespace) -> Verdict:
    vs = []
    for d in program.directives:
        if d.kind != "eval":
            continue
        tr = normalize(d.term, program.sig, args.fuel)
        if args.trace:
            print(f"start\t{show(tr.start)}")
            for k, s in enumerate(tr.steps, 1):
                print(f"{k}\t{s.render()}")
        print(f"{show(d.term)} ~> {show(tr.result)}  [{len(tr.steps)} steps]")
        if tr.exhausted:
            err(f"{args.file}:{d.line}: warning[fuel]: stopped after {args.fuel} steps")
            vs.append(Verdict.UNKNOWN)
        else:
            vs.append(Verdict.PASS)
    return combine(vs)


def cmd_audit(program: Program, args: argparse.Namespace) -> Verdict:
    report = audit(program, Options(args.fuel, args.strict_s5, args.warn_s5, args.relaxed_types))
    if args.json:
        sys.stdout.write(report.dumps())
    else:
        for c in report.root.children:
            print(f"{c.tag}\t{c.verdict.value.upper()}")
        p = report.partition
        print(f"partition\tF1 = {{{', '.join(p.first_order)}}}  Fw = {{{', '.join(p.higher_order)}}}")
        print(f"confluence\tlocal {report.local_confluence.value}, global {report.confluence.value}")
        print(f"overall\t{report.verdict.value.upper()}")
    for path, leaf in report.root.failures():
        tag = "/".join(path[1:])
        for w in leaf.witnesses or []:
            where = f"{w.rule}: " if w.rule else ""
            at = f" (at {'.'.join(map(str, w.position)) or 'e'})" if w.position is not None else ""
            err(f"{args.file}: {leaf.verdict.value}[{tag}]: {where}{w.message}{at}")
        if not leaf.witnesses:
            err(f"{args.file}: {leaf.verdict.value}[{tag}]")
    return report.verdict


COMMANDS = {"check": cmd_check, "type": cmd_type, "eval": cmd_eval, "audit": cmd_audit}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="reduction step budget")
    common.add_argument("--strict-s5", action="store_true", help="treat an undecided S5 as a failure")
    common.add_argument("--warn-s5", action="store_true", help="report an undecided S5 without blocking")
    common.add_argument("--relaxed-types", action="store_true",
                        help="compare derived types up to joinability instead of syntactically")
    ap = argparse.ArgumentParser(prog="cac", description="Type checker, evaluator and termination "
                                 "auditor for the calculus of algebraic constructions.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("check", "type"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("file")
    s = sub.add_parser("eval", parents=[common])
    s.add_argument("file")
    s.add_argument("--trace", action="store_true", help="print every reduction step")
    s = sub.add_parser("audit", parents=[common])
    s.add_argument("file")
    s.add_argument("--json", action="store_true", help="machine-readable report")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.fuel < 1:
        err("--fuel must be positive")
        return EXIT_INVALID
    program = load(args.file, args.fuel)
    if program is None:
        return EXIT_INVALID
    return EXIT[COMMANDS[args.command](program, args)]


if __name__ == "__main__":
    sys.exit(main())
