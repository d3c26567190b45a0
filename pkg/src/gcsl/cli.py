"""Command-line entry point: ``gcsl <command> ...``.

Exit codes: 0 success / property holds, 1 violated, 2 usage or input error,
3 statistically undecided.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import yaml

from . import bltl as B
from .errors import GcslError
from .model import dump_trace, load_model, load_trace
from .monitor import STANDARD, TABLE, check as check_formula
from .ocl import evaluate, format_value
from .report import format_records, format_text
from .simulate import SimConfig, simulate
from .smc import UNDECIDED, VIOLATED, parse_mode, verify_contract
from .syntax import parse_contracts
from .syntax.parser import parse_expr
from .syntax.printer import dump_tree, print_contract
from .translate import EXISTS_SPLIT, TABLE_SPLIT, translate_contract
from .units import DEFAULT_UNIT, parse_time

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3
SEED_ENV = "GCSL_SEED"


class UsageError(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"missing required option --{name.replace('_', '-')}")


def _seed(args) -> int:
    if args.seed is None:
        env = os.environ.get(SEED_ENV)
        if env is None:
            return 0
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return int(args.seed)


def _model(args):
    return load_model(_read(args.model)) if getattr(args, "model", None) else None


def _unit(model) -> str:
    return model.time_unit if model is not None else DEFAULT_UNIT


def _time(text, model, flag) -> float:
    try:
        return parse_time(str(text), _unit(model))
    except GcslError as exc:
        raise UsageError(f"--{flag}: {exc}") from None


# -- commands -----------------------------------------------------------------


def cmd_parse(args):
    _need(args, "file")
    contracts = parse_contracts(_read(args.file))
    if args.pretty:
        out = "\n".join(print_contract(c) for c in contracts)
    else:
        out = "\n".join(dump_tree(c) for c in contracts) + "\n"
    _write(out, args.output)
    return EXIT_OK


def cmd_translate(args):
    _need(args, "contract", "model", "time_bound")
    model = _model(args)
    k = _time(args.time_bound, model, "time-bound")
    blocks = []
    for c in parse_contracts(_read(args.contract), _unit(model)):
        phi = translate_contract(c, k, model, split=args.split, simplify=args.simplify)
        blocks.append(f"-- contract {c.name}\n{B.format_formula(phi, top_level_lines=True)}\n")
    _write("".join(blocks), args.output)
    return EXIT_OK


def cmd_simulate(args):
    _need(args, "model", "horizon")
    model = _model(args)
    horizon = _time(args.horizon, model, "horizon")
    config = SimConfig(_seed(args), horizon, int(args.max_samples or 100_000))
    _write(dump_trace(simulate(model, config)), args.output)
    return EXIT_OK


def cmd_monitor(args):
    _need(args, "formula", "trace")
    model = _model(args)
    phi = B.parse_formula(_read(args.formula), _unit(model))
    verdict = check_formula(phi, load_trace(_read(args.trace)), model, args.weak_until or TABLE)
    if verdict.holds:
        _write("holds\n", None)
        return EXIT_OK
    _write(f"violated at t={verdict.time} in {verdict.path}\n", None)
    return EXIT_VIOLATED


def cmd_eval(args):
    _need(args, "expr", "trace")
    model = _model(args)
    trace = load_trace(_read(args.trace))
    index = int(args.index or 0)
    if not -len(trace) <= index < len(trace):
        raise UsageError(f"--index {index} outside the trace (0..{len(trace) - 1})")
    value = evaluate(parse_expr(args.expr, _unit(model)), trace[index], None, model)
    _write(format_value(value) + "\n", None)
    return EXIT_OK


def cmd_check(args):
    _need(args, "model", "contract", "time_bound", "mode")
    model = _model(args)
    k = _time(args.time_bound, model, "time-bound")
    try:
        mode = parse_mode(str(args.mode))
    except GcslError as exc:
        raise UsageError(f"--mode: {exc}") from None
    seed = _seed(args)
    contracts = parse_contracts(_read(args.contract), _unit(model))
    if args.name:
        contracts = [c for c in contracts if c.name == args.name]
        if not contracts:
            raise UsageError(f"no contract named {args.name!r}")
    fmt = args.format or "text"
    verdicts, chunks = [], []
    for c in contracts:
        est = verify_contract(model, c, k, mode, seed, int(args.jobs or 1), args.relation or ">=",
                              split=args.split, weak_until=args.weak_until or TABLE)
        verdicts.append(est.verdict)
        chunks.append(format_records(est, c.name) if fmt == "records" else format_text(est, c.name))
    _write(("" if fmt == "records" else "\n").join(chunks), args.output)
    if VIOLATED in verdicts:
        return EXIT_VIOLATED
    if UNDECIDED in verdicts:
        return EXIT_UNDECIDED
    return EXIT_OK


# -- argument handling ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gcsl", description="GCSL contract toolkit")
    p.add_argument("--config", help="YAML file whose keys fill options not given on the command line")
    sub = p.add_subparsers(dest="command", metavar="command")

    def add(name, help_, fn):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("-o", "--output", help="write the result here instead of stdout")
        sp.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        return sp

    sp = add("parse", "parse a contract document and dump its syntax tree", cmd_parse)
    sp.add_argument("file", nargs="?", help="contract document (.gcsl)")
    sp.add_argument("--pretty", action="store_true", default=None,
                    help="pretty-print the contracts instead of dumping the tree")

    sp = add("translate", "compile contracts to bounded LTL", cmd_translate)
    sp.add_argument("--contract", help="contract document (.gcsl)")
    sp.add_argument("--model", help="model document (.sosm)")
    sp.add_argument("--time-bound", help="horizon k, e.g. 7months or 210")
    sp.add_argument("--split", choices=(TABLE_SPLIT, EXISTS_SPLIT),
                    help="reading of the during/implies/then pattern (default: table)")
    sp.add_argument("--simplify", action="store_true", default=None, help="drop X<=0 operators")

    sp = add("simulate", "simulate a model and write a trace", cmd_simulate)
    sp.add_argument("--model", help="model document (.sosm)")
    sp.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV}, else 0)")
    sp.add_argument("--horizon", help="simulated time span, e.g. 4months")
    sp.add_argument("--max-samples", type=int, help="livelock guard (default 100000)")

    sp = add("monitor", "check a bounded LTL formula on a trace", cmd_monitor)
    sp.add_argument("--formula", help="formula file (.bltl)")
    sp.add_argument("--trace", help="trace file (.trace)")
    sp.add_argument("--model", help="model document, needed for SoS.* paths and links")
    sp.add_argument("--weak-until", choices=(TABLE, STANDARD), help="reading of W (default: table)")

    sp = add("eval", "evaluate an OCL expression on one trace sample", cmd_eval)
    sp.add_argument("--expr", help="OCL expression")
    sp.add_argument("--trace", help="trace file (.trace)")
    sp.add_argument("--index", type=int, help="sample index (default 0)")
    sp.add_argument("--model", help="model document")

    sp = add("check", "estimate contract satisfaction by statistical model checking", cmd_check)
    sp.add_argument("--model", help="model document (.sosm)")
    sp.add_argument("--contract", help="contract document (.gcsl)")
    sp.add_argument("--name", help="check only the contract with this name")
    sp.add_argument("--time-bound", help="horizon k, e.g. 4months")
    sp.add_argument("--mode", help="fixed:N or chernoff:EPS,DELTA")
    sp.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV}, else 0)")
    sp.add_argument("--jobs", type=int, help="worker processes (default 1)")
    sp.add_argument("--relation", choices=("<", "<=", "=", ">=", ">"),
                    help="relation to the confidence threshold (default >=)")
    sp.add_argument("--format", choices=("text", "records"), help="report format (default text)")
    sp.add_argument("--split", choices=(TABLE_SPLIT, EXISTS_SPLIT), help="see translate")
    sp.add_argument("--weak-until", choices=(TABLE, STANDARD), help="see monitor")
    return p


def _apply_config(args, parser):
    if not args.config:
        return
    try:
        doc = yaml.safe_load(_read(args.config)) or {}
    except yaml.YAMLError as exc:
        raise UsageError(f"malformed config file {args.config}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError(f"config file {args.config} must be a mapping")
    for key, value in doc.items():
        attr = str(key).replace("-", "_")
        if attr in ("command", "func", "config") or not hasattr(args, attr):
            continue
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        _apply_config(args, parser)
        if hasattr(args, "split") and args.split is None:
            args.split = TABLE_SPLIT
        return args.func(args)
    except UsageError as exc:
        print(f"gcsl {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GcslError as exc:
        print(f"gcsl {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
