"""Shared table builders, reference oracles, and hypothesis strategies."""

from __future__ import annotations

import datetime
from collections import Counter

from hypothesis import strategies as st

from sqlsynth.config import SearchConfig
from sqlsynth.engine import Problem
from sqlsynth.tablecore import (ColRel, ColType, Column, Constant, Phi,
                                PhiMode, Table, table_of)

D = datetime.date
INT, DBL, STR, DATE = ColType.INT, ColType.DBL, ColType.STR, ColType.DATE


def T(schema, rows) -> Table:
    """Shorthand table builder: T([("a", INT)], [[1], [2]])."""
    return table_of(schema, rows)


# ---------------------------------------------------------------------------
# reference oracles, deliberately naive
# ---------------------------------------------------------------------------


def naive_column_relation(a, b, rel: ColRel) -> bool:
    """Set/multiset relations spelled out directly over the value sequences.

    EQ_* compares `a` and `b` for equality; SUB_* asks whether `a` is
    contained in `b`.
    """
    if rel is ColRel.EQ_BAG:
        return Counter(a) == Counter(b)
    if rel is ColRel.SUB_BAG:
        ca, cb = Counter(a), Counter(b)
        return all(ca[v] <= cb[v] for v in ca)
    if rel is ColRel.EQ_SET:
        return set(a) == set(b)
    return set(a) <= set(b)


def naive_phi_holds(phi: Phi, tout: Table, t: Table) -> bool:
    """Inclusion-constraint check via per-column scans, no fingerprints.

    Each output column must relate to a candidate column — the aligned one
    in positional mode, any one in existential mode.
    """
    if phi.is_top:
        return True
    outcols = [tout.column_values(i) for i in range(tout.width)]
    tcols = [t.column_values(j) for j in range(t.width)]
    if phi.mode is PhiMode.POSITIONAL:
        return t.width == tout.width and all(
            naive_column_relation(oc, tc, phi.rel)
            for oc, tc in zip(outcols, tcols))
    return all(
        any(naive_column_relation(oc, tc, phi.rel) for tc in tcols)
        for oc in outcols)


# ---------------------------------------------------------------------------
# hypothesis strategies
# ---------------------------------------------------------------------------

_VALUE_POOLS = {
    ColType.INT: st.integers(-3, 5),
    ColType.DBL: st.sampled_from([-1.5, 0.0, 0.5, 1.0, 2.25]),
    ColType.STR: st.sampled_from(["a", "b", "c", "xy", ""]),
    ColType.DATE: st.sampled_from(
        [D(2020, 1, 1), D(2020, 6, 15), D(2021, 3, 3)]),
}


def cells(ctype: ColType, allow_null: bool = True):
    base = _VALUE_POOLS[ctype]
    if allow_null:
        return st.one_of(st.none(), base)
    return base


@st.composite
def tables(draw, max_cols: int = 4, max_rows: int = 5, min_cols: int = 1,
           min_rows: int = 0, allow_null: bool = True,
           types: tuple[ColType, ...] = tuple(ColType)) -> Table:
    """Small tables with repeated values, so relations actually fire."""
    width = draw(st.integers(min_cols, max_cols))
    ctypes = [draw(st.sampled_from(types)) for _ in range(width)]
    height = draw(st.integers(min_rows, max_rows))
    rows = [
        tuple(draw(cells(ct, allow_null)) for ct in ctypes)
        for _ in range(height)
    ]
    columns = tuple(Column(f"c{i}", ct) for i, ct in enumerate(ctypes))
    return Table(columns, tuple(rows))


# ---------------------------------------------------------------------------
# the end-to-end example problem
# ---------------------------------------------------------------------------


def latest_price_problem() -> Problem:
    """Per id, the price on its latest date among type-T rows, ordered by id.

    The three filler columns carry no information that identifies rows or
    orders them (one is constant, one alternates, one follows id parity), so
    the only way to reproduce the output is the intended idiom: group for
    the latest date per (id, type), join back to recover the price, filter
    to type T, project, and order.
    """
    t_in = T(
        [("id", INT), ("price", INT), ("date", DATE), ("type", STR),
         ("c1", STR), ("c2", STR), ("c3", STR)],
        [
            (1, 100, D(2020, 1, 5), "T", "x", "p", "m"),
            (1, 120, D(2020, 1, 10), "T", "x", "q", "m"),
            (1, 110, D(2020, 1, 15), "T", "x", "p", "m"),
            (2, 200, D(2020, 1, 10), "T", "x", "q", "n"),
            (2, 999, D(2020, 1, 15), "X", "x", "p", "n"),
            (3, 300, D(2020, 3, 1), "T", "x", "q", "m"),
            (3, 290, D(2020, 3, 10), "T", "x", "p", "m"),
        ])
    t_out = T([("id", INT), ("price", INT)], [(1, 110), (2, 200), (3, 290)])
    return Problem(inputs={"tableIn": t_in}, output=t_out,
                   constants=(Constant(ColType.STR, "T"),))


def fast_config(**overrides) -> SearchConfig:
    return SearchConfig(timeout_ms=overrides.pop("timeout_ms", 20_000),
                        **overrides)
