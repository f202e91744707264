"""Scaling benchmarks over synthetic tables.

Three query families, each parameterized by row and column count:

* ``q1`` — reproduce the input with its columns in reverse order.  The
  column-match projection strategy solves this with one fingerprint pass;
  strategies that enumerate projections blindly drown in permutations.
* ``q2`` — keep the rows whose first column equals the constant ``T``.
* ``q3`` — count all rows into a one-cell table.

Every cell value is unique across the table (except the ``T`` markers), so
no accidental smaller program exists, and rows are shuffled until the
output shows no sort order, keeping ordering inference out of the picture.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .config import SearchConfig
from .engine import Problem, Status, synthesize
from .tablecore import ColType, Column, Constant, Table, detect_sorted

QUERIES = ("q1", "q2", "q3")


def _shuffle_until_unsorted(rows: list[list], out_cols: Sequence[int],
                            rng: random.Random) -> list[list]:
    """Shuffle rows until no output column reads as sorted evidence."""
    for _ in range(100):
        rng.shuffle(rows)
        probe = Table(
            tuple(Column(f"c{j}", ColType.STR) for j in out_cols),
            tuple(tuple(row[j] for j in out_cols) for row in rows))
        if not detect_sorted(probe).is_sorted:
            return rows
    raise RuntimeError("could not shuffle the table into an unsorted state")


def make_scale_problem(query: str, rows: int, cols: int, seed: int = 0) -> Problem:
    if query not in QUERIES:
        raise ValueError(f"unknown benchmark query {query!r}; choose from {QUERIES}")
    if rows < 2 or cols < 1:
        raise ValueError("benchmarks need at least 2 rows and 1 column")
    rng = random.Random((seed, query, rows, cols).__repr__())
    schema = tuple(Column(f"c{j}", ColType.STR) for j in range(cols))

    if query == "q2":
        data = [["T" if i % 2 == 0 else f"v{i}"] +
                [f"r{i}c{j}" for j in range(1, cols)] for i in range(rows)]
    else:
        data = [[f"r{i}c{j}" for j in range(cols)] for i in range(rows)]

    if query == "q1":
        data = _shuffle_until_unsorted(data, range(cols - 1, -1, -1), rng)
        table = Table(schema, tuple(tuple(r) for r in data))
        output = Table(tuple(reversed(schema)),
                       tuple(tuple(reversed(r)) for r in data))
        return Problem({"t": table}, output)

    if query == "q2":
        for _ in range(100):
            rng.shuffle(data)
            output = Table(schema, tuple(tuple(r) for r in data if r[0] == "T"))
            if not detect_sorted(output).is_sorted:
                break
        else:
            raise RuntimeError("could not shuffle the table into an unsorted state")
        table = Table(schema, tuple(tuple(r) for r in data))
        return Problem({"t": table}, output, (Constant(ColType.STR, "T"),))

    rng.shuffle(data)
    table = Table(schema, tuple(tuple(r) for r in data))
    output = Table((Column("n", ColType.INT),), ((rows,),))
    return Problem({"t": table}, output)


@dataclass
class BenchResult:
    query: str
    rows: int
    cols: int
    mode: str
    status: str
    elapsed_ms: float


def run_scale_bench(queries: Iterable[str] = QUERIES,
                    rows_list: Iterable[int] = (10, 100, 1000),
                    cols_list: Iterable[int] = (1, 10, 50, 100),
                    modes: Iterable[str] = ("fast",),
                    timeout_ms: int = 10_000,
                    seed: int = 0,
                    on_result: Callable[[BenchResult], None] | None = None,
                    ) -> list[BenchResult]:
    results = []
    for query in queries:
        for rows in rows_list:
            for cols in cols_list:
                problem = make_scale_problem(query, rows, cols, seed)
                for mode in modes:
                    config = SearchConfig(timeout_ms=timeout_ms, projection_mode=mode)
                    outcome = synthesize(problem, config)
                    record = BenchResult(query, rows, cols, mode,
                                         outcome.status.value,
                                         round(outcome.elapsed_ms, 1))
                    results.append(record)
                    if on_result:
                        on_result(record)
    return results


def write_csv(results: Iterable[BenchResult], destination) -> None:
    rows = [[r.query, r.rows, r.cols, r.mode, r.status, r.elapsed_ms] for r in results]
    header = ["query", "rows", "cols", "mode", "status", "elapsed_ms"]
    if hasattr(destination, "write"):
        writer = csv.writer(destination)
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(Path(destination), "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def median_elapsed_ms(query: str, rows: int, cols: int, mode: str = "fast",
                      timeout_ms: int = 10_000, seed: int = 0,
                      samples: int = 3) -> float:
    """Median wall time over repeated runs; used by the scaling checks."""
    times = []
    for k in range(samples):
        problem = make_scale_problem(query, rows, cols, seed + k)
        config = SearchConfig(timeout_ms=timeout_ms, projection_mode=mode)
        start = time.monotonic()
        outcome = synthesize(problem, config)
        times.append((time.monotonic() - start) * 1000.0)
        if outcome.status is not Status.SOLVED:
            raise RuntimeError(
                f"{query} at {rows}x{cols} in {mode} mode finished "
                f"{outcome.status.value}, not solved")
    times.sort()
    return times[len(times) // 2]
