"""Command-line front end.

Exit status: 0 on success, 1 for unreadable input or a contract
violation, 2 when a timeout or resource cap stops the computation.
Automata and verdicts go to stdout (or ``--output``); diagnostics go to
stderr only.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .bench import BENCH_MODES, BenchConfig, bench_corpus, write_csv
from .boolean import complement, difference, included, intersect_product, universal
from .core import Fta
from .determinize import DetOptions, determinize, ensure_any
from .errors import ResourceLimitExceeded, TreeDetError
from .product import ProductFta, defactor, explicit
from .synth import synth_family
from .textbook import determinize_textbook
from .timbuk import parse_timbuk, serialize_product, serialize_timbuk, stats_record

EXIT_OK, EXIT_ERROR, EXIT_LIMIT = 0, 1, 2


def render(automaton, fmt: str, name: str = "A") -> str:
    """Text of ``automaton`` in ``fmt`` (``timbuk`` or ``product``)."""
    if isinstance(automaton, Fta):
        automaton = ProductFta.from_fta(automaton)
    if fmt == "timbuk":
        return serialize_timbuk(defactor(automaton), name)
    return serialize_product(automaton, name)


def _read(path: str) -> Fta:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise _Failure(f"{path}: file not found") from None
    except OSError as exc:
        raise _Failure(f"{path}: {exc.strerror or exc}") from None
    try:
        return parse_timbuk(text)
    except TreeDetError as exc:
        raise _Failure(f"{path}:{exc}") from None


class _Failure(Exception):
    """An operational error already phrased for the user."""


def _options(args, **over) -> DetOptions:
    kw = dict(
        complete=getattr(args, "complete", False),
        dontcare=getattr(args, "dontcare", False),
        states_only=getattr(args, "states_only", False),
        timeout=args.timeout,
    )
    kw.update(over)
    return DetOptions(**kw)


def _mode(args) -> str:
    if getattr(args, "textbook", False):
        return "textbook"
    mode = "det+compl" if args.complete else "det"
    return mode + "+dc" if args.dontcare else mode


def _emit(args, automaton, name: str):
    if getattr(args, "expand", False) and isinstance(automaton, ProductFta):
        automaton = explicit(automaton)
    fmt = "product" if args.format == "json" else args.format
    text = render(automaton, fmt, name)
    if args.output:
        Path(args.output).write_text(text)
    elif args.format != "json":
        sys.stdout.write(text)


def _record(args, name, mode, fta, result, seconds):
    rec = stats_record(name, mode, fta, result, seconds=seconds)
    if args.format == "json":
        print(rec.to_json())
    if args.stats:
        with open(args.stats, "a", encoding="utf-8") as fh:
            fh.write(rec.to_json() + "\n")
    return rec


def cmd_determinize(args) -> int:
    fta = _read(args.file)
    start = time.perf_counter()
    if args.textbook:
        if args.dontcare or args.states_only:
            raise _Failure("--textbook cannot be combined with --dontcare or --states-only")
        base = ensure_any(fta) if args.complete else fta
        result = determinize_textbook(base, timeout=args.timeout)
    else:
        result = determinize(fta, _options(args))
    seconds = time.perf_counter() - start
    _record(args, Path(args.file).name, _mode(args), fta, result, seconds)
    _emit(args, result, Path(args.file).stem)
    return EXIT_OK


def cmd_stats(args) -> int:
    for path in args.files:
        fta = _read(path)
        start = time.perf_counter()
        if args.textbook:
            base = ensure_any(fta) if args.complete else fta
            result = determinize_textbook(base, timeout=args.timeout)
        else:
            result = determinize(fta, _options(args, states_only=False))
        rec = stats_record(Path(path).name, _mode(args), fta, result, seconds=time.perf_counter() - start)
        print(rec.to_json())
        if args.stats:
            with open(args.stats, "a", encoding="utf-8") as fh:
                fh.write(rec.to_json() + "\n")
    return EXIT_OK


def cmd_complement(args) -> int:
    fta = _read(args.file)
    result = complement(fta, _options(args, complete=True))
    _emit(args, result, Path(args.file).stem + "_complement")
    return EXIT_OK


def cmd_intersect(args) -> int:
    a, b = _read(args.first), _read(args.second)
    _emit(args, intersect_product(a, b), "intersection")
    return EXIT_OK


def cmd_difference(args) -> int:
    a, b = _read(args.first), _read(args.second)
    result = difference(a, b, _options(args), finals_from_union=args.finals == "union")
    _emit(args, result, "difference")
    return EXIT_OK


def cmd_include(args) -> int:
    a, b = _read(args.first), _read(args.second)
    verdict = included(a, b, _options(args, states_only=True))
    if verdict:
        print("included")
    else:
        print("not included")
        print(f"counterexample state: {verdict.describe()}")
    return EXIT_OK


def cmd_universal(args) -> int:
    fta = _read(args.file)
    verdict = universal(fta, _options(args, states_only=True))
    if verdict:
        print("universal")
    else:
        print("not universal")
        print(f"counterexample state: {verdict.describe()}")
    return EXIT_OK


def cmd_bench(args) -> int:
    modes = args.mode or ["opt+compl"]
    records = []
    for mode in modes:
        cfg = BenchConfig(
            args.paths,
            mode=mode,
            timeout_seconds=args.timeout if args.timeout is not None else 120.0,
            output_format=args.format,
            jobs=args.jobs,
            output_dir=args.output_dir,
        )
        records.extend(bench_corpus(cfg))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)
    if args.stats:
        with open(args.stats, "a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.k < 1:
        raise _Failure("k must be at least 1")
    text = serialize_timbuk(synth_family(args.k), f"synth{args.k}")
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treedet", description="Determinise and combine finite tree automata.")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timeout", type=_positive, default=None, help="seconds before giving up")
    common.add_argument("--format", choices=("timbuk", "product", "json"), default="product")
    common.add_argument("--output", "-o", help="write the automaton here instead of stdout")
    common.add_argument("--stats", metavar="PATH", help="append a JSON stats record to PATH")

    det = argparse.ArgumentParser(add_help=False)
    det.add_argument("--complete", action="store_true", help="also complete the result")
    det.add_argument("--dontcare", action="store_true", help="use '_' argument positions where possible")
    det.add_argument("--expand", action="store_true", help="emit explicit transitions instead of product form")

    s = sub.add_parser("determinize", parents=[common, det], help="determinise an automaton")
    s.add_argument("file")
    s.add_argument("--states-only", action="store_true")
    s.add_argument("--textbook", action="store_true", help="use the unoptimised construction")
    s.set_defaults(run=cmd_determinize)

    s = sub.add_parser("stats", parents=[common, det], help="print JSON stats records")
    s.add_argument("files", nargs="+")
    s.add_argument("--textbook", action="store_true")
    s.set_defaults(run=cmd_stats)

    s = sub.add_parser("complement", parents=[common, det], help="complement an automaton")
    s.add_argument("file")
    s.set_defaults(run=cmd_complement)

    s = sub.add_parser("intersect", parents=[common], help="intersect two automata")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(run=cmd_intersect)

    s = sub.add_parser("difference", parents=[common, det], help="L(first) minus L(second)")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--finals", choices=("union", "first"), default="union",
                   help="accepting states measured against both automata's finals or the first's")
    s.set_defaults(run=cmd_difference)

    s = sub.add_parser("include", parents=[common], help="check L(first) <= L(second)")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(run=cmd_include)

    s = sub.add_parser("universal", parents=[common], help="check that every term is accepted")
    s.add_argument("file")
    s.set_defaults(run=cmd_universal)

    s = sub.add_parser("bench", parents=[common], help="run a corpus and write CSV")
    s.add_argument("paths", nargs="+", help="files or directories of Timbuk automata")
    s.add_argument("--mode", action="append", choices=tuple(BENCH_MODES), help="repeatable; default opt+compl")
    s.add_argument("--csv", metavar="PATH")
    s.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    s.add_argument("--output-dir", help="write each result automaton here")
    s.set_defaults(run=cmd_bench)

    s = sub.add_parser("synth", help="print the typed-lists automaton for k element types")
    s.add_argument("k", type=int)
    s.add_argument("--output", "-o")
    s.set_defaults(run=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except _Failure as exc:
        print(f"treedet: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ResourceLimitExceeded as exc:
        print(f"treedet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (TreeDetError, ValueError, OSError) as exc:
        print(f"treedet: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
