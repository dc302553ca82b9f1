"""Command-line interface.

Exit codes: 0 success, 1 ``nf`` input not normal, 2 validation failure,
3 budget exhausted, 4 parse error.  Failures print a human line on stdout and
one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from autostack.automata.dfa import AutomatonError
from autostack.catalog import entries as catalog
from autostack.catalog import formats
from autostack.catalog.formats import ParseError
from autostack.catalog.oracles import NormalFormOracle
from autostack.core import AlphabetError
from autostack.rewriting import BudgetExhausted, PrefixRewritingSystem, RewritingError, lift_srs, process

EXIT_OK = 0
EXIT_NOT_NORMAL = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_PARSE = 4


class CliFailure(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


# -- loading ------------------------------------------------------------------


class Source:
    """What a subcommand rewrites with: a catalog entry or a file."""

    def __init__(self, alphabet, reducer, stacking=None, entry=None, prs=None):
        self.alphabet = alphabet
        self.reducer = reducer  # has reduce(word, step_limit) -> RewriteTrace
        self.stacking = stacking
        self.entry = entry
        self.prs = prs

    @property
    def oracle(self):
        return self.entry.oracle if self.entry is not None else None


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliFailure(EXIT_PARSE, "io", f"cannot read {path}: {e.strerror}") from None


def load_source(name: str, use_async: bool = False) -> Source:
    if os.path.isfile(name):
        text = _read(name)
        kind = formats.document_kind(text)
        if kind == "rules":
            rf = formats.read_rules(text)
            prs = rf.prefix_system() if rf.kind == "prefix" else lift_srs(rf.string_system())
            return Source(rf.alphabet, prs, prs=prs)
        if kind == "prefix":
            prs = formats.read_prs(text)
            return Source(prs.alphabet, prs, prs=prs)
        if kind in ("stacking", "stacking-async"):
            s = formats.read_stacking(text)
            return Source(s.alphabet, s, stacking=s)
        if kind == "async":
            from autostack.stacking import stacking_from_async

            s = stacking_from_async(formats.read_async_structure(text))
            return Source(s.alphabet, s, stacking=s)
        raise CliFailure(EXIT_PARSE, "parse", f"{name}: a {kind} document cannot be used here")
    if name not in catalog.entry_names():
        raise CliFailure(EXIT_INVALID, "unknown-entry", f"no catalog entry or file named {name!r}")
    entry = catalog.load_entry(name)
    s = entry.async_stacking if use_async else entry.stacking
    if s is None:
        raise CliFailure(EXIT_INVALID, "no-async", f"{name} has no asynchronously automatic structure")
    return Source(entry.alphabet, s, stacking=s, entry=entry, prs=entry.processed)


def parse_word(src: Source, text: str):
    try:
        return src.alphabet.parse(text)
    except AlphabetError as e:
        raise CliFailure(EXIT_PARSE, "parse", f"cannot read word {text!r}: {e}") from None


def _need_stacking(src: Source, what: str):
    if src.stacking is None:
        from autostack.stacking import cprs_to_stacking

        try:
            src.stacking = cprs_to_stacking(process(src.prs, oracle=NormalFormOracle(src.prs)))
        except (RewritingError, ValueError) as e:
            raise CliFailure(EXIT_INVALID, "validation", f"{what} needs a stacking structure: {e}") from None
    return src.stacking


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


# -- subcommands ------------------------------------------------------------------


def cmd_reduce(args, out) -> int:
    src = load_source(args.source, args.use_async)
    w = parse_word(src, args.word)
    trace = src.reducer.reduce(w, args.max_steps)
    fmt = src.alphabet.format
    if args.trace:
        for i, step in enumerate(trace.steps, 1):
            out.append(f"{i}: {fmt(step.before)} -> {fmt(step.after)}  [{fmt(step.lhs)} -> {fmt(step.rhs)}]")
    out.append(fmt(trace.final))
    return EXIT_OK


def cmd_nf(args, out) -> int:
    src = load_source(args.source, args.use_async)
    w = parse_word(src, args.word)
    final = src.reducer.reduce(w, args.max_steps).final
    out.append(src.alphabet.format(final))
    return EXIT_OK if final == w else EXIT_NOT_NORMAL


def cmd_wp(args, out) -> int:
    src = load_source(args.source, args.use_async)
    w = parse_word(src, args.word)
    final = src.reducer.reduce(w, args.max_steps).final
    out.append("identity" if final == () else "non-identity")
    return EXIT_OK


def cmd_irr(args, out) -> int:
    src = load_source(args.source, args.use_async)
    d = src.stacking.normal_forms if src.stacking is not None else src.prs.irreducible
    out.append(formats.write_dfa(d).rstrip("\n"))
    return EXIT_OK


def cmd_ball(args, out) -> int:
    from autostack.cayley import build_ball, flow_from_stacking

    src = load_source(args.source, args.use_async)
    s = _need_stacking(src, "ball")
    ball = build_ball(s, args.radius, args.max_steps)
    stats = ball.stats()
    for k in sorted(stats):
        out.append(f"{k} {stats[k]}")
    if args.dot:
        _write(args.dot, ball.to_dot(flow_from_stacking(s, ball)))
    return EXIT_OK


def cmd_diagram(args, out) -> int:
    from autostack.stacking import stacking_presentation
    from autostack.vankampen import DiagramError, build_diagram, diagram_size, validate_diagram

    src = load_source(args.source)
    s = _need_stacking(src, "diagram")
    w = parse_word(src, args.word)
    try:
        d = build_diagram(s, w, args.max_steps, args.max_depth)
    except DiagramError as e:
        raise CliFailure(EXIT_INVALID, "validation", str(e)) from None
    report = validate_diagram(d, stacking_presentation(s), w)
    size = diagram_size(d)
    for k in sorted(size):
        out.append(f"{k} {size[k]}")
    for i in range(len(d.faces)):
        out.append(f"face {i} {src.alphabet.format(d.face_label(i))}")
    out += report.lines()
    if args.json:
        _write(args.json, d.to_json())
    if args.dot:
        _write(args.dot, d.to_dot())
    if not report.ok:
        raise CliFailure(EXIT_INVALID, "validation", "diagram fails validation")
    return EXIT_OK


def _processed_from_rules(text: str) -> PrefixRewritingSystem:
    rf = formats.read_rules(text)
    if rf.kind == "prefix":
        prs = rf.prefix_system()
        oracle = NormalFormOracle(prs)
    else:
        srs = rf.string_system()
        prs = lift_srs(srs)
        oracle = NormalFormOracle(srs)
    return process(prs, oracle=oracle)


def cmd_process(args, out) -> int:
    text = _read(args.rules)
    kind = formats.document_kind(text)
    if kind == "rules":
        q = _processed_from_rules(text)
    elif kind == "prefix":
        prs = formats.read_prs(text)
        q = process(prs, oracle=NormalFormOracle(prs))
    else:
        raise CliFailure(EXIT_PARSE, "parse", f"process expects a rules file, got a {kind} document")
    out.append(formats.write_prs(q).rstrip("\n"))
    return EXIT_OK


def cmd_convert(args, out) -> int:
    from autostack import stacking as st

    text = _read(args.input)
    kind = formats.document_kind(text)
    expected = {"srs2cprs": ("rules",), "cprs2stack": ("prefix",), "stack2cprs": ("stacking",), "async2stack": ("async",)}
    if kind not in expected[args.mode]:
        raise CliFailure(EXIT_PARSE, "parse", f"{args.mode} cannot read a {kind} document")
    if args.mode == "srs2cprs":
        result = formats.write_prs(_processed_from_rules(text))
    elif args.mode == "cprs2stack":
        result = formats.write_stacking(st.cprs_to_stacking(formats.read_prs(text)))
    elif args.mode == "stack2cprs":
        result = formats.write_prs(st.stacking_to_cprs(formats.read_stacking(text)))
    else:
        result = formats.write_stacking(st.stacking_from_async(formats.read_async_structure(text)))
    _write(args.output, result)
    out.append(f"wrote {args.output}")
    return EXIT_OK


def cmd_check(args, out) -> int:
    from autostack.cayley import verify_stacking

    src = load_source(args.bundle, args.use_async)
    s = _need_stacking(src, "check")
    report = verify_stacking(s, args.radius, src.oracle, args.max_steps)
    out += report.lines(s.alphabet)
    if not report.ok:
        raise CliFailure(EXIT_INVALID, "validation", f"{report.failures} check failures")
    return EXIT_OK


def cmd_fellow(args, out) -> int:
    from autostack.cayley import build_ball, fellow_traveler

    src = load_source(args.source, args.use_async)
    s = _need_stacking(src, "fellow")
    ball = build_ball(s, args.radius, args.max_steps)
    rep = fellow_traveler(s.normal_forms, ball, cap=args.cap)
    fmt = s.alphabet.format
    out.append(f"constant {rep.constant}")
    out.append(f"pairs {rep.pairs}")
    out.append(f"indeterminate {rep.indeterminate}")
    if rep.worst is not None:
        y, z, i = rep.worst
        out.append(f"worst {fmt(y)} {fmt(z)} prefix {i}")
    if rep.capped:
        raise CliFailure(EXIT_INVALID, "validation", f"fellow-traveller constant exceeds {args.cap}")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="autostack", description="Stacking structures, rewriting and diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    def budgets(q, depth=False):
        q.add_argument("--max-steps", type=int, default=10**6, help="rewriting step budget")
        if depth:
            q.add_argument("--max-depth", type=int, default=10**4, help="descent depth budget")

    def source(q, name="source"):
        q.add_argument(name, help="catalog entry or file")
        q.add_argument("--async", dest="use_async", action="store_true", help="use the asynchronously automatic structure")

    q = sub.add_parser("reduce", help="reduce a word, optionally printing each step")
    source(q)
    q.add_argument("word")
    q.add_argument("--trace", action="store_true")
    budgets(q)
    q.set_defaults(func=cmd_reduce)

    q = sub.add_parser("nf", help="normal form; exit 0 iff the word is already normal")
    source(q)
    q.add_argument("word")
    budgets(q)
    q.set_defaults(func=cmd_nf)

    q = sub.add_parser("wp", help="word problem")
    source(q)
    q.add_argument("word")
    budgets(q)
    q.set_defaults(func=cmd_wp)

    q = sub.add_parser("irr", help="print the automaton of irreducible words")
    source(q)
    q.set_defaults(func=cmd_irr)

    q = sub.add_parser("ball", help="Cayley-graph ball statistics")
    source(q)
    q.add_argument("-r", "--radius", type=int, required=True)
    q.add_argument("--dot")
    budgets(q)
    q.set_defaults(func=cmd_ball)

    q = sub.add_parser("diagram", help="build and validate a van Kampen diagram")
    q.add_argument("source")
    q.add_argument("word")
    q.add_argument("--json")
    q.add_argument("--dot")
    budgets(q, depth=True)
    q.set_defaults(func=cmd_diagram)

    q = sub.add_parser("process", help="processed prefix-rewriting system of a rules file")
    q.add_argument("rules")
    q.set_defaults(func=cmd_process)

    q = sub.add_parser("convert", help="convert between structures")
    q.add_argument("mode", choices=["srs2cprs", "cprs2stack", "stack2cprs", "async2stack"])
    q.add_argument("input")
    q.add_argument("output")
    q.set_defaults(func=cmd_convert)

    q = sub.add_parser("check", help="verify a stacking structure on a ball")
    source(q, "bundle")
    q.add_argument("-r", "--radius", type=int, required=True)
    budgets(q)
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("fellow", help="observed fellow-traveller constant")
    source(q)
    q.add_argument("-r", "--radius", type=int, required=True)
    q.add_argument("--cap", type=int, default=None)
    budgets(q)
    q.set_defaults(func=cmd_fellow)
    return p


def run(argv: list | None = None) -> tuple:
    """Run a command; returns ``(exit code, stdout text, stderr text)``."""
    args = build_parser().parse_args(argv)
    out: list = []
    try:
        code = args.func(args, out)
        err = ""
    except CliFailure as e:
        code, kind, msg = e.code, e.kind, str(e)
    except BudgetExhausted as e:
        code, kind, msg = EXIT_BUDGET, "budget", str(e)
    except ParseError as e:
        code, kind, msg = EXIT_PARSE, "parse", str(e)
    except (RewritingError, AutomatonError, AlphabetError, ValueError) as e:
        code, kind, msg = EXIT_INVALID, "validation", str(e)
    else:
        return code, "".join(line + "\n" for line in out), err
    out.append(f"error: {msg}")
    err = json.dumps({"code": code, "error": kind, "message": msg}, sort_keys=True) + "\n"
    return code, "".join(line + "\n" for line in out), err


def main(argv: list | None = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
