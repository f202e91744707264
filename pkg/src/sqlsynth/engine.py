"""Top-level synthesis loop: sketches out, programs back.

The search keeps a min-size-first frontier of sketches.  Each popped sketch
has input-table names assigned to its holes in every onto fashion, gets
completed under the root constraint (positional, bag-equal), and every
completion is verified against the expected output exactly — as an ordered
list when the output shows sort evidence, as a multiset otherwise.  The
first verified program is minimal in sketch size by construction; its
unused grouping and window columns are dropped before SQL is emitted.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable

from .completer import (CompletionContext, SynthesisTimeout, TraceCounters,
                        stream)
from .config import SearchConfig
from .relalg import (EvalError, Program, eval_program, minimize_columns,
                     render_program)
from .sketcher import (HOLE, SOrder, Sketch, Worklist, assign_tables,
                       canonical_key, contains_select, expand, sketch_size)
from .sqlgen import to_sql
from .tablecore import Constant, PHI0, Table, detect_sorted, tables_equal


class Status(enum.Enum):
    SOLVED = "solved"
    TIMEOUT = "timeout"
    EXHAUSTED = "exhausted"


@dataclass
class Problem:
    inputs: dict[str, Table]
    output: Table
    constants: tuple[Constant, ...] = ()

    def __post_init__(self) -> None:
        if not self.inputs:
            raise ValueError("a problem needs at least one input table")
        if self.output.width == 0:
            raise ValueError("the output table needs at least one column")


@dataclass
class SearchStats:
    sketches_tried: int = 0
    candidates_checked: int = 0
    elapsed_ms: float = 0.0


@dataclass
class SynthesisResult:
    status: Status
    program: Program | None
    sql: str | None
    dsl: str | None
    elapsed_ms: float
    stats: SearchStats


def verify(p: Program, problem: Problem, as_list: bool | None = None) -> bool:
    """Does the program map the inputs exactly onto the expected output?"""
    if as_list is None:
        as_list = detect_sorted(problem.output).is_sorted
    try:
        actual = eval_program(p, problem.inputs)
    except EvalError:
        return False
    return tables_equal(problem.output, actual, as_list)


def synthesize(problem: Problem, config: SearchConfig | None = None,
               on_sketch: Callable[[str, int, float], None] | None = None) -> SynthesisResult:
    """Search for the smallest program consistent with the example.

    `on_sketch` is an optional trace hook, called once per sketch after its
    completion pass with (sketch key, candidates checked, millis spent).
    """
    config = config or SearchConfig()
    start = time.monotonic()
    deadline = start + config.timeout_ms / 1000.0
    stats = SearchStats()
    as_list = detect_sorted(problem.output).is_sorted
    names = list(problem.inputs)
    ctx = CompletionContext(
        env=problem.inputs,
        tout=problem.output,
        constants=problem.constants,
        config=config,
        deadline=deadline,
        trace=TraceCounters() if on_sketch else None,
    )

    # A sorted output means the program must end in an explicit ordering, so
    # the search starts from Order over a hole instead of the bare hole.
    seed: Sketch = SOrder(HOLE) if as_list else HOLE
    frontier = Worklist()
    frontier.push(seed)
    seen = {canonical_key(seed)}
    require_select = bool(problem.constants)

    def finish(status: Status, program: Program | None = None) -> SynthesisResult:
        elapsed = (time.monotonic() - start) * 1000.0
        stats.elapsed_ms = elapsed
        sql = dsl = None
        if program is not None:
            sql = to_sql(program, problem.inputs)
            dsl = render_program(program)
        return SynthesisResult(status, program, sql, dsl, elapsed, stats)

    while frontier:
        if time.monotonic() > deadline:
            return finish(Status.TIMEOUT)
        sketch = frontier.pop()
        if sketch_size(sketch) > config.max_sketch_size:
            return finish(Status.EXHAUSTED)
        stats.sketches_tried += 1
        sketch_start = time.monotonic()
        candidates_before = stats.candidates_checked
        # A problem that supplies constants wants them used; sketches that
        # cannot mention a constant anywhere are expanded but not completed.
        solution: Program | None = None
        if not (require_select and not contains_select(sketch)):
            try:
                for assigned in assign_tables(sketch, names):
                    for program, table in stream(assigned, ctx, PHI0):
                        stats.candidates_checked += 1
                        if tables_equal(problem.output, table, as_list):
                            solution = program
                            break
                    if solution is not None:
                        break
            except SynthesisTimeout:
                return finish(Status.TIMEOUT)
        if on_sketch:
            on_sketch(canonical_key(sketch),
                      stats.candidates_checked - candidates_before,
                      (time.monotonic() - sketch_start) * 1000.0)
        if solution is not None:
            trimmed = minimize_columns(
                solution, problem.inputs, problem.output, as_list)
            if not verify(trimmed, problem, as_list):
                trimmed = solution  # never trade away correctness
            return finish(Status.SOLVED, trimmed)
        for grown in expand(sketch):
            if sketch_size(grown) > config.max_sketch_size:
                continue
            key = canonical_key(grown)
            if key not in seen:
                seen.add(key)
                frontier.push(grown)
    return finish(Status.EXHAUSTED)
