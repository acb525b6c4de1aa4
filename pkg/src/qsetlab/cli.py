"""Command-line front end.

Exit codes: 0 everything holds, 1 some verdict is violated, 2 bad input
(unreadable file, validation, lexical, syntax or sort error), 3 a resource
bound was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import do_model as D
from . import rational_model as R
from . import universe as U
from .errors import (FormulaError, InterpretationError, QsetError, ResourceError,
                     ValidationError)
from .formula import CORPUS, check_corpus, check_sorts, evaluate, free_vars, parse

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class _Report:
    def __init__(self, command: str, as_json: bool, out):
        self.command = command
        self.as_json = as_json
        self.out = out
        self.doc = {"format": 1, "command": command}

    def line(self, text: str):
        if not self.as_json:
            print(text, file=self.out)

    def finish(self, code: int) -> int:
        if self.as_json:
            self.doc["exit"] = code
            json.dump(self.doc, self.out, indent=1, sort_keys=True, default=str)
            self.out.write("\n")
        return code


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


# -- subcommands ------------------------------------------------------------

def cmd_check_do(args, rep: _Report) -> int:
    s = D.load_system(args.input)
    axioms = D.AXIOMS if args.axiom == "all" else (args.axiom,)
    verdicts = D.check_all(s, axioms)
    rep.doc["file"] = args.input
    rep.doc["verdicts"] = [v.to_json() for v in verdicts]
    for v in verdicts:
        if v.holds:
            rep.line(f"{v.axiom}: holds" + (f"  ({v.detail})" if v.detail else ""))
        else:
            rep.line(f"{v.axiom}: VIOLATED  witness {list(v.witness)}  ({v.detail})")
    return EXIT_OK if all(v.holds for v in verdicts) else EXIT_VIOLATED


def cmd_gen_do(args, rep: _Report) -> int:
    s = D.gen_do(args.n, args.species, args.micro_fraction, args.seed)
    D.dump_system(s, args.out)
    micro = sum(p.micro for p in s.P)
    rep.doc.update(out=args.out, n=s.n, micro=micro, macro=s.n - micro)
    rep.line(f"wrote {args.out}: {s.n} particles ({micro} micro, {s.n - micro} macro)")
    return EXIT_OK


def cmd_interpret(args, rep: _Report) -> int:
    s = D.load_system(args.input)
    try:
        u = D.interpret(s, args.bound)
    except InterpretationError as exc:
        rep.doc["verdicts"] = [v.to_json() for v in exc.verdicts]
        rep.line(f"{args.input}: refusing to interpret, system violates the D-axioms")
        for v in exc.verdicts:
            rep.line(f"{v.axiom}: VIOLATED  witness {list(v.witness)}  ({v.detail})")
        return EXIT_VIOLATED
    U.dump_universe(u, args.out)
    rep.doc.update(out=args.out, atoms=len(u.atoms), qsets=len(u.qsets))
    rep.line(f"wrote {args.out}: {len(u.atoms)} atoms, {len(u.qsets)} qsets")
    return EXIT_OK


def cmd_build_rational(args, rep: _Report) -> int:
    spec = R.demo_spec() if args.input is None else R.load_spec(args.input)
    try:
        u = R.build_universe(spec)
    except ValidationError as exc:
        raise ValidationError(f"{args.input or '<demo>'}: {exc}") from None
    U.dump_universe(u, args.out)
    rep.doc.update(out=args.out, atoms=len(u.atoms), qsets=len(u.qsets))
    rep.line(f"wrote {args.out}: {len(u.atoms)} atoms, {len(u.qsets)} qsets")
    return EXIT_OK


def cmd_close(args, rep: _Report) -> int:
    u = U.load_universe(args.input)
    ops = tuple(o.strip() for o in args.ops.split(",") if o.strip())
    before = len(u)
    u = U.close(u, ops, args.max_card, args.rounds)
    U.dump_universe(u, args.out)
    rep.doc.update(out=args.out, added=len(u) - before, entities=len(u))
    rep.line(f"wrote {args.out}: {len(u) - before} qsets added, {len(u)} entities")
    return EXIT_OK


def _formula_lines(path: str):
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, 1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield no, raw.rstrip("\n"), text


def cmd_eval(args, rep: _Report) -> int:
    u = U.load_universe(args.universe)
    sorts = {h: u.kind(h) for h in u.handles}
    results = []
    rep.doc["results"] = results
    code = EXIT_OK
    for no, raw, text in _formula_lines(args.formulas):
        col = raw.index(text)
        where = f"{args.formulas}:{no}"
        try:
            f = parse(text, free=set(u.handles))
            check_sorts(f, sorts)
            value = evaluate(u, f, {v: v for v in free_vars(f)})
        except FormulaError as exc:
            if exc.span is not None:
                where = f"{where}:{exc.span[0] + col + 1}"
            raise ValidationError(f"{where}: {type(exc).__name__}: {exc}") from None
        except ResourceError as exc:
            raise ResourceError(f"{where}: {exc}") from None
        results.append({"line": no, "formula": text, "value": value})
        rep.line(f"{no}: {'true ' if value else 'false'}  {text}")
        if not value:
            code = EXIT_VIOLATED
    return code


def cmd_axioms(args, rep: _Report) -> int:
    u = U.load_universe(args.universe)
    names = [n.strip() for n in args.corpus.split(",")]
    for n in names:
        if n != "all" and n not in CORPUS:
            raise ValidationError(f"unknown axiom {n!r}; expected one of {', '.join(CORPUS)}, all")
    if "all" in names:
        names = list(CORPUS)
    verdicts = []
    for n in names:
        try:
            verdicts.extend(check_corpus(u, n))
        except ResourceError as exc:
            raise ResourceError(f"{args.universe}: {n}: {exc}") from None
    rep.doc["universe"] = args.universe
    rep.doc["verdicts"] = [v.to_json() for v in verdicts]
    for v in verdicts:
        if v.holds:
            extra = f", {v.detail}" if v.detail else ""
            rep.line(f"{v.axiom}: holds  ({v.instances} instances{extra})")
        else:
            rep.line(f"{v.axiom}: VIOLATED  counterexample {json.dumps(v.counterexample, sort_keys=True)}")
    return EXIT_OK if all(v.holds for v in verdicts) else EXIT_VIOLATED


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsetlab", description="Finite quasi-set models and checkers.")
    p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable report on stdout")
        sp.set_defaults(func=func)
        return sp

    sp = command("check-do", cmd_check_do, "check axioms D1-D6 on a system file")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--axiom", default="all", choices=list(D.AXIOMS) + ["all"])

    sp = command("gen-do", cmd_gen_do, "generate a valid random system")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--species", type=int, required=True)
    sp.add_argument("--micro-fraction", type=_fraction, default=Fraction(1), help="fraction of micro particles, e.g. 1/2 or 0.5")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = command("interpret", cmd_interpret, "compile a system into a universe")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--bound", type=int, default=U.POWER_BOUND, help="largest class given a power qset")

    sp = command("build-rational", cmd_build_rational, "build the rational/Cauchy-sequence model")
    sp.add_argument("--in", dest="input", default=None, help="spec file (default: bundled demo)")
    sp.add_argument("--out", required=True)

    sp = command("close", cmd_close, "add witness qsets (weak pairs, power qsets)")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--ops", default="weakpair")
    sp.add_argument("--max-card", type=int, default=4)
    sp.add_argument("--rounds", type=int, default=1)

    sp = command("eval", cmd_eval, "evaluate one formula per line; free variables name entities")
    sp.add_argument("--universe", required=True)
    sp.add_argument("--formulas", required=True)

    sp = command("axioms", cmd_axioms, "check the quasi-set axiom corpus")
    sp.add_argument("--universe", required=True)
    sp.add_argument("--corpus", default="all", help=f"comma list of {', '.join(CORPUS)} or all")
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    rep = _Report(args.command, args.json, out)
    try:
        code = args.func(args, rep)
    except ResourceError as exc:
        print(f"error: {exc}", file=err)
        rep.doc["error"] = str(exc)
        return rep.finish(EXIT_RESOURCE)
    except (QsetError, OSError) as exc:
        print(f"error: {exc}", file=err)
        rep.doc["error"] = str(exc)
        return rep.finish(EXIT_INPUT)
    return rep.finish(code)


def main():
    sys.exit(run())
