"""Command-line front end: ``autostruct <command> ...``.

Exit codes: 0 success, 1 the checked property is false, 2 usage or input
error, 3 an internal limit was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import automata as fa
from .analysis import column_census, gap_check, product_length_check
from .boolean_algebra import ba_invariant
from .builtins import NAMES, builtin, builtin_text
from .errors import AutostructError, LimitExceeded
from .logic import eval_sentence, solutions
from .presentation import parse_presentation, serialize_presentation, validate
from .turing import build_ar, config_graph, graph_dot, parse_tm, probe_invariants

OK, FALSE, USAGE, LIMIT = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None


def _presentation(path: str):
    """A path, ``-`` for stdin, or the name of a shipped builtin when no such file exists."""
    if path != "-" and not Path(path).exists():
        stem = Path(path).name.removesuffix(".pres")
        if stem in NAMES:
            return builtin(stem)
    return parse_presentation(_read_text(path))


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, text_lines, obj):
        if self.as_json:
            print(json.dumps(obj, sort_keys=True, default=str))
        else:
            for line in text_lines:
                print(line)


def _cmd_check(a, out):
    report = validate(_presentation(a.file))
    out.emit(report.lines(), report.to_dict())
    return OK if report.ok else FALSE


def _cmd_eval(a, out):
    value = eval_sentence(a.query, _presentation(a.file))
    out.emit(["true" if value else "false"], {"formula": a.query, "value": value})
    return OK if value else FALSE


def _cmd_solve(a, out):
    from .logic import compile_query
    p = _presentation(a.file)
    variables = compile_query(a.query, p).variables
    for row in solutions(a.query, p, a.max_len):
        pairs = dict(zip(variables, row))
        out.emit([" ".join(f"{v}={w if w else 'λ'}" for v, w in pairs.items())], pairs)
    return OK


def _cmd_count(a, out):
    p = _presentation(a.file)
    table = fa.count_words_upto(p.domain, a.max_n)
    for n, (c, total) in enumerate(zip(table.counts, table.cumulative)):
        out.emit([f"n={n} count={c} cumulative={total}"], {"n": n, "count": c, "cumulative": total})
    return OK


def _cmd_ba(a, out):
    result = ba_invariant(_presentation(a.file), a.cap)
    out.emit([str(result)], result.to_dict())
    return {"not_ba": FALSE, "cap_exceeded": LIMIT}.get(result.kind, OK)


def _split(text):
    try:
        k, l = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected k,l") from None
    return k, l


def _cmd_gap(a, out):
    report = gap_check(_presentation(a.file), a.relation, a.split, a.depth)
    out.emit(report.lines(), report.to_dict())
    return OK if report.holds else FALSE


def _cmd_prodlen(a, out):
    report = product_length_check(_presentation(a.file), a.relation, a.m, a.factor_len)
    out.emit(report.lines(), report.to_dict())
    return OK if report.holds else FALSE


def _cmd_census(a, out):
    report = column_census(_presentation(a.file), a.query, a.n, a.slack)
    out.emit(report.lines(), report.to_dict())
    return OK


def _cmd_builtin(a, out):
    if a.name not in NAMES:
        raise _Usage(f"unknown builtin {a.name!r}; choose from {', '.join(NAMES)}")
    if a.emit:
        sys.stdout.write(builtin_text(a.name))
        return OK
    p = builtin(a.name)
    sig = dict(p.signature)
    out.emit([f"{a.name}: " + ", ".join(f"{n}/{k}" for n, k in sig.items())], {"name": a.name, "signature": sig})
    return OK


def _cmd_tm_config(a, out):
    _write(a.output, serialize_presentation(config_graph(parse_tm(_read_text(a.tmfile)))))
    return OK


def _cmd_build_ar(a, out):
    _write(a.output, serialize_presentation(build_ar(parse_tm(_read_text(a.tmfile))).presentation))
    return OK


def _cmd_probe_ar(a, out):
    p = _presentation(a.file)
    tm = parse_tm(_read_text(a.tm)) if a.tm else None
    report = probe_invariants(p, a.depth, a.max_base_len, tm)
    if out.as_json:
        for entry in report.entries:
            print(json.dumps(entry.to_dict(), sort_keys=True))
        print(json.dumps({"depth": report.depth, "ok": report.ok}, sort_keys=True))
    else:
        out.emit(report.lines(), None)
    return OK if report.ok else FALSE


def _cmd_dot(a, out):
    sys.stdout.write(graph_dot(_presentation(a.file), a.max_len, a.relation))
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="autostruct", description="Automatic structures toolkit")
    parser.add_argument("--json", action="store_true", help="one JSON object per output line")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, fn, help_text, file_arg="file"):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        if file_arg:
            p.add_argument(file_arg, help="input path, or - for stdin")
        p.set_defaults(fn=fn)
        return p

    command("check", _cmd_check, "validate a presentation")
    p = command("eval", _cmd_eval, "truth value of a sentence")
    p.add_argument("-q", "--query", required=True)
    p = command("solve", _cmd_solve, "list solutions of a formula")
    p.add_argument("-q", "--query", required=True)
    p.add_argument("--max-len", type=int, default=4)
    p = command("count", _cmd_count, "domain words per length")
    p.add_argument("--max-n", type=int, required=True)
    p = command("ba-invariant", _cmd_ba, "Boolean algebra isomorphism invariant")
    p.add_argument("--cap", type=int, default=8)
    p = command("gap", _cmd_gap, "length gap of a functional relation")
    p.add_argument("-r", "--relation", required=True)
    p.add_argument("--split", type=_split, required=True)
    p.add_argument("--depth", type=int, default=6)
    p = command("prodlen", _cmd_prodlen, "length growth of iterated products")
    p.add_argument("-r", "--relation", required=True)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--factor-len", type=int, default=4)
    p = command("census", _cmd_census, "count distinct columns of a binary formula")
    p.add_argument("-q", "--query", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--slack", type=int, default=None)
    p = command("builtin", _cmd_builtin, "shipped presentations", file_arg=None)
    p.add_argument("name")
    p.add_argument("--emit", action="store_true", help="print the presentation file")
    p = command("tm-config", _cmd_tm_config, "configuration graph of a Turing machine", file_arg="tmfile")
    p.add_argument("-o", "--output", default="-")
    p = command("build-ar", _cmd_build_ar, "reduction graph of a reversible machine", file_arg="tmfile")
    p.add_argument("-o", "--output", default="-")
    p = command("probe-ar", _cmd_probe_ar, "chain census of a reduction graph")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--max-base-len", type=int, default=4)
    p.add_argument("--tm", default=None, help="machine file for cross-checking against simulation")
    p = command("dot", _cmd_dot, "DOT export of a small fragment")
    p.add_argument("-r", "--relation", default="E")
    p.add_argument("--max-len", type=int, default=3)
    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args, _Out(args.json))
    except _Usage as exc:
        print(f"autostruct: error: {exc}", file=sys.stderr)
        return USAGE
    except LimitExceeded as exc:
        print(f"autostruct: limit exceeded: {exc}", file=sys.stderr)
        return LIMIT
    except AutostructError as exc:
        print(f"autostruct: error: {exc}", file=sys.stderr)
        return USAGE


def main(argv=None) -> int:
    sys.exit(run(sys.argv[1:] if argv is None else argv))
