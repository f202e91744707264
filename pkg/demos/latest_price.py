"""Walkthrough: synthesize a grouped-join query from one example table.

The task: given a table of price quotes (several quotes per product id,
plus noise columns), produce each product's price on its *latest* date,
keeping only rows of type 'T', ordered by id.  Nobody writes the query;
we only show the tool the input table and the answer we want.

Run:  python3 demos/latest_price.py
"""

from __future__ import annotations

import datetime

from sqlsynth.config import SearchConfig
from sqlsynth.engine import Problem, synthesize
from sqlsynth.sqlgen import MYSQL, SQLITE, to_sql
from sqlsynth.tablecore import ColType, Column, Constant, Table

D = datetime.date
INT, STR, DATE = ColType.INT, ColType.STR, ColType.DATE


def column(name: str, ctype: ColType) -> Column:
    return Column(name, ctype)


quotes = Table(
    (column("id", INT), column("price", INT), column("date", DATE),
     column("type", STR), column("c1", STR), column("c2", STR),
     column("c3", STR)),
    (
        (1, 100, D(2020, 1, 5), "T", "x", "p", "m"),
        (1, 120, D(2020, 1, 10), "T", "x", "q", "m"),
        (1, 110, D(2020, 1, 15), "T", "x", "p", "m"),
        (2, 200, D(2020, 1, 10), "T", "x", "q", "n"),
        (2, 999, D(2020, 1, 15), "X", "x", "p", "n"),
        (3, 300, D(2020, 3, 1), "T", "x", "q", "m"),
        (3, 290, D(2020, 3, 10), "T", "x", "p", "m"),
    ))

wanted = Table(
    (column("id", INT), column("price", INT)),
    ((1, 110), (2, 200), (3, 290)))

problem = Problem(
    inputs={"tableIn": quotes},
    output=wanted,
    constants=(Constant(STR, "T"),))  # literals the query may mention

print("input rows:")
for row in quotes.rows:
    print("   ", row)
print("wanted rows:")
for row in wanted.rows:
    print("   ", row)

result = synthesize(problem, SearchConfig(timeout_ms=10_000))
print(f"\nstatus: {result.status.value}  "
      f"({result.elapsed_ms:.0f} ms, {result.stats.sketches_tried} sketches, "
      f"{result.stats.candidates_checked} candidates)")
print("\nprogram:", result.dsl)
print("\npostgresql:\n" + result.sql)
print("\nmysql:\n" + to_sql(result.program, problem.inputs, MYSQL))
print("\nsqlite:\n" + to_sql(result.program, problem.inputs, SQLITE))

# Live-programming moment: the user typos one output cell — id 2's price
# becomes 999, which is actually the type-X row's price.  Synthesis still
# reacts, but the only queries consistent with the bad example are
# contorted ones (here: the join degrades to matching on date alone and
# the filter moves to max(type)).  A strange query on screen is the cue
# that the example itself is wrong.
typo = Table(wanted.columns, ((1, 110), (2, 999), (3, 290)))
retry = synthesize(Problem({"tableIn": quotes}, typo,
                           (Constant(STR, "T"),)),
                   SearchConfig(timeout_ms=10_000))
print(f"\nafter mistyping one output cell -> status: {retry.status.value}")
if retry.program is not None:
    print(retry.sql)
else:
    print("(no query reproduces the edited table)")
