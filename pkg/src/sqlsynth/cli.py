"""Command-line entry points.

``sqlsynth synth`` solves one problem file and prints the program,
``sqlsynth bench scale`` measures solving time across table sizes, and
``sqlsynth serve`` starts the HTTP API.

Exit codes for ``synth``: 0 solved, 2 timed out, 3 search space exhausted,
4 unreadable or invalid problem input.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .bench import QUERIES, run_scale_bench, write_csv
from .engine import Status, synthesize
from .problemio import ProblemFormatError, load_problem
from .sqlgen import DIALECTS, to_sql

_EXIT = {Status.SOLVED: 0, Status.TIMEOUT: 2, Status.EXHAUSTED: 3}
EXIT_INPUT_ERROR = 4


def _parse_int_list(text: str) -> list[int]:
    """Accept '10,100,1000' and '1..5' (inclusive range) spellings."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, _, hi = part.partition("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("expected a non-empty list of integers")
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqlsynth",
        description="Synthesize SQL queries from input/output table examples.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="solve one problem file")
    synth.add_argument("problem", help="path to a problem JSON document")
    synth.add_argument("--timeout", type=int, metavar="MS",
                       help="search budget in milliseconds (overrides the file)")
    synth.add_argument("--max-size", type=int, metavar="N",
                       help="largest sketch size to explore (overrides the file)")
    synth.add_argument("--projection", choices=["fast", "baseline"],
                       help="projection completion strategy (overrides the file)")
    synth.add_argument("--emit", choices=["sql", "dsl", "both"], default="sql",
                       help="what to print for a solved problem (default: sql)")
    synth.add_argument("--dialect", choices=sorted(DIALECTS), default="postgresql",
                       help="SQL dialect for the emitted query")
    synth.add_argument("--trace", action="store_true",
                       help="log each explored sketch to stderr")

    bench = commands.add_parser("bench", help="performance measurements")
    bench_kind = bench.add_subparsers(dest="bench_command", required=True)
    scale = bench_kind.add_parser("scale", help="time synthesis across table sizes")
    scale.add_argument("--query", type=lambda s: s.split(","), default=list(QUERIES),
                       metavar="Q1[,Q2..]", help=f"queries to run, from {', '.join(QUERIES)}")
    scale.add_argument("--rows", type=_parse_int_list, default=[10, 100, 1000],
                       metavar="LIST", help="row counts, e.g. 10,100,1000 or 10..50")
    scale.add_argument("--cols", type=_parse_int_list, default=[1, 10, 50, 100],
                       metavar="LIST", help="column counts, e.g. 1,10,50,100")
    scale.add_argument("--modes", type=lambda s: s.split(","), default=["fast"],
                       metavar="M1[,M2]", help="projection strategies: fast, baseline")
    scale.add_argument("--timeout", type=int, default=10_000, metavar="MS",
                       help="per-problem budget in milliseconds (default: 10000)")
    scale.add_argument("--seed", type=int, default=0, help="data generator seed")
    scale.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")

    serve = commands.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--timeout-cap", type=int, default=5000, metavar="MS",
                       help="upper bound on per-request search time")
    return parser


def _cmd_synth(args: argparse.Namespace) -> int:
    try:
        problem, config = load_problem(args.problem)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.timeout is not None:
        config.timeout_ms = args.timeout
    if args.max_size is not None:
        config.max_sketch_size = args.max_size
    if args.projection is not None:
        config.projection_mode = args.projection

    on_sketch = None
    if args.trace:
        def on_sketch(key: str, candidates: int, millis: float) -> None:
            print(f"sketch {key}: {candidates} candidates, {millis:.1f} ms",
                  file=sys.stderr)

    result = synthesize(problem, config, on_sketch=on_sketch)
    print(f"status: {result.status.value} "
          f"({result.elapsed_ms:.0f} ms, {result.stats.sketches_tried} sketches, "
          f"{result.stats.candidates_checked} candidates)", file=sys.stderr)
    if result.program is not None:
        sql = to_sql(result.program, problem.inputs, DIALECTS[args.dialect])
        if args.emit in ("dsl", "both"):
            print(result.dsl)
        if args.emit == "both":
            print()
        if args.emit in ("sql", "both"):
            print(sql)
    return _EXIT[result.status]


def _cmd_bench_scale(args: argparse.Namespace) -> int:
    for query in args.query:
        if query not in QUERIES:
            print(f"error: unknown query {query!r}", file=sys.stderr)
            return EXIT_INPUT_ERROR
    for mode in args.modes:
        if mode not in ("fast", "baseline"):
            print(f"error: unknown mode {mode!r}", file=sys.stderr)
            return EXIT_INPUT_ERROR

    def progress(record) -> None:
        print(f"{record.query} rows={record.rows} cols={record.cols} "
              f"mode={record.mode}: {record.status} in {record.elapsed_ms} ms",
              file=sys.stderr)

    results = run_scale_bench(queries=args.query, rows_list=args.rows,
                              cols_list=args.cols, modes=args.modes,
                              timeout_ms=args.timeout, seed=args.seed,
                              on_result=progress)
    if args.out:
        write_csv(results, args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        write_csv(results, sys.stdout)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(timeout_cap_ms=args.timeout_cap),
                host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "synth":
        return _cmd_synth(args)
    if args.command == "bench":
        return _cmd_bench_scale(args)
    return _cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
