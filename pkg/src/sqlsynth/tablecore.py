"""Typed in-memory tables and the column-inclusion relations used to prune search.

Tables are immutable: a tuple of (name, type) columns plus a tuple of row
tuples.  Column identity is positional everywhere in the engine; names are
display metadata only.  Cells are plain Python values (str, int, float,
datetime.date) with None standing for SQL NULL, so multiset comparisons can
lean on Counter/set directly.  One consequence we embrace: 1 == 1.0, i.e. an
Int cell equals a Dbl cell exactly when the float is the same number, which
matches how example tables tend to mix 1 and 1.0.

The inclusion constraint ("phi") attached to a partial program during search
is either Top (no constraint) or a (mode, rel) pair: mode says whether output
columns must line up positionally or merely exist somewhere, rel is one of
the four bag/set relations below.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from datetime import date
from functools import cached_property
from typing import Iterable, Sequence

Cell = None | str | int | float | date

# Int cells are meant to be 64-bit signed; enforced at ingestion time.
INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class TableError(ValueError):
    """A table or cell violates the schema rules."""


class ColType(enum.Enum):
    STR = "Str"
    INT = "Int"
    DBL = "Dbl"
    DATE = "Date"


class SortDir(enum.Enum):
    ASC = "asc"
    DESC = "desc"


def check_cell(value: Cell, ctype: ColType) -> Cell:
    """Validate one cell against a column type, returning it unchanged.

    None is allowed in any column.  bool is rejected for Int columns (it is a
    subclass of int but never a table value), and non-finite floats are
    rejected for Dbl columns.
    """
    if value is None:
        return value
    if ctype is ColType.STR:
        if not isinstance(value, str):
            raise TableError(f"expected Str cell, got {value!r}")
    elif ctype is ColType.INT:
        if not isinstance(value, int) or isinstance(value, bool):
            raise TableError(f"expected Int cell, got {value!r}")
        if not INT64_MIN <= value <= INT64_MAX:
            raise TableError(f"Int cell out of 64-bit range: {value!r}")
    elif ctype is ColType.DBL:
        if not isinstance(value, float):
            raise TableError(f"expected Dbl cell, got {value!r}")
        if value != value or value in (float("inf"), float("-inf")):
            raise TableError(f"Dbl cell must be finite, got {value!r}")
    elif ctype is ColType.DATE:
        if not isinstance(value, date):
            raise TableError(f"expected Date cell, got {value!r}")
    return value


@dataclass(frozen=True)
class Column:
    name: str
    ctype: ColType


@dataclass(frozen=True)
class Table:
    columns: tuple[Column, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def __post_init__(self) -> None:
        width = len(self.columns)
        for r, row in enumerate(self.rows):
            if len(row) != width:
                raise TableError(f"row {r} has {len(row)} cells, expected {width}")
            for c, cell in enumerate(row):
                try:
                    check_cell(cell, self.columns[c].ctype)
                except TableError as exc:
                    raise TableError(f"row {r}, column {c}: {exc}") from exc

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def height(self) -> int:
        return len(self.rows)

    def column_values(self, i: int) -> tuple[Cell, ...]:
        return tuple([row[i] for row in self.rows])

    # The per-column fingerprints below make repeated phi checks cheap: a
    # frozenset of Counter items is equal exactly when the multisets are.
    # cached_property writes to __dict__ directly, which a frozen dataclass
    # permits, so immutability is preserved for the declared fields.

    @cached_property
    def _counters(self) -> tuple[Counter, ...]:
        rows = self.rows
        return tuple(Counter([row[i] for row in rows])
                     for i in range(self.width))

    @cached_property
    def _sets(self) -> tuple[frozenset, ...]:
        rows = self.rows
        return tuple(frozenset([row[i] for row in rows])
                     for i in range(self.width))

    @cached_property
    def _bag_fps(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(c.items()) for c in self._counters)

    @cached_property
    def _bag_index(self) -> dict[frozenset, tuple[int, ...]]:
        index: dict[frozenset, list[int]] = {}
        for i, fp in enumerate(self._bag_fps):
            index.setdefault(fp, []).append(i)
        return {fp: tuple(ix) for fp, ix in index.items()}

    @cached_property
    def _set_index(self) -> dict[frozenset, tuple[int, ...]]:
        index: dict[frozenset, list[int]] = {}
        for i, fp in enumerate(self._sets):
            index.setdefault(fp, []).append(i)
        return {fp: tuple(ix) for fp, ix in index.items()}

    @cached_property
    def _all_null(self) -> tuple[bool, ...]:
        return tuple(
            all(row[i] is None for row in self.rows) for i in range(self.width)
        )


def _trusted_table(columns: tuple[Column, ...], rows: tuple[tuple[Cell, ...], ...]) -> Table:
    """Build a Table without per-cell validation.

    Only for rows derived from an already-validated table by operations
    that preserve cell typing; arbitrary input must go through Table().
    """
    t = object.__new__(Table)
    object.__setattr__(t, "columns", columns)
    object.__setattr__(t, "rows", rows)
    return t


def table_of(schema: Sequence[tuple[str, ColType]], rows: Iterable[Sequence[Cell]]) -> Table:
    """Convenience constructor from (name, type) pairs and row iterables."""
    cols = tuple(Column(n, t) for n, t in schema)
    return Table(cols, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------
# column relations and the phi constraint
# ---------------------------------------------------------------------------


class ColRel(enum.Enum):
    EQ_BAG = "=bag"
    SUB_BAG = "<=bag"
    EQ_SET = "=set"
    SUB_SET = "<=set"


class PhiMode(enum.Enum):
    POSITIONAL = "<=>"   # output column i must relate to candidate column i
    EXISTENTIAL = "|->"  # each output column must relate to some candidate column


@dataclass(frozen=True)
class Phi:
    """Top (both fields None) or a (mode, rel) inclusion constraint."""

    mode: PhiMode | None
    rel: ColRel | None

    def __post_init__(self) -> None:
        if (self.mode is None) != (self.rel is None):
            raise ValueError("phi must be Top or carry both mode and rel")

    @property
    def is_top(self) -> bool:
        return self.mode is None


TOP = Phi(None, None)
PHI0 = Phi(PhiMode.POSITIONAL, ColRel.EQ_BAG)
ALL_PHIS = (TOP,) + tuple(
    Phi(mode, rel) for mode in PhiMode for rel in ColRel
)


def column_relation(a: Sequence[Cell], b: Sequence[Cell], rel: ColRel) -> bool:
    """Does value sequence `a` relate to `b` under `rel`?

    =bag is multiset equality, <=bag multiset inclusion of a in b, and the
    set variants ignore multiplicity.
    """
    if rel is ColRel.EQ_BAG:
        return Counter(a) == Counter(b)
    if rel is ColRel.SUB_BAG:
        return Counter(a) <= Counter(b)
    if rel is ColRel.EQ_SET:
        return set(a) == set(b)
    return set(a) <= set(b)


def _related(tout: Table, i: int, t: Table, j: int, rel: ColRel) -> bool:
    if rel is ColRel.EQ_BAG:
        return tout._bag_fps[i] == t._bag_fps[j]
    if rel is ColRel.SUB_BAG:
        return tout._counters[i] <= t._counters[j]
    if rel is ColRel.EQ_SET:
        return tout._sets[i] == t._sets[j]
    return tout._sets[i] <= t._sets[j]


def phi_holds(phi: Phi, tout: Table, t: Table) -> bool:
    """Check the inclusion constraint of the search against a candidate table.

    Positional mode compares column i of `tout` with column i of `t` (widths
    must agree); existential mode asks for any matching candidate column per
    output column.
    """
    if phi.is_top:
        return True
    rel = phi.rel
    assert rel is not None
    # Bag relations constrain multiset sizes, hence table heights; rejecting
    # on height first skips the per-column fingerprint work entirely.
    if rel is ColRel.EQ_BAG and t.height != tout.height:
        return False
    if rel is ColRel.SUB_BAG and t.height < tout.height:
        return False
    if phi.mode is PhiMode.POSITIONAL:
        if t.width != tout.width:
            return False
        return all(_related(tout, i, t, i, rel) for i in range(tout.width))
    if rel is ColRel.EQ_BAG:
        index = t._bag_index
        return all(fp in index for fp in tout._bag_fps)
    if rel is ColRel.EQ_SET:
        index = t._set_index
        return all(fp in index for fp in tout._sets)
    # Cross-type values never compare equal (Int/Dbl excepted), so a type
    # mismatch rules a column pair out — unless the output column is all
    # NULL, which any column could include.
    return all(
        any(
            _related(tout, i, t, j, rel)
            for j in range(t.width)
            if _types_compatible(tout.columns[i].ctype, t.columns[j].ctype)
            or tout._all_null[i]
        )
        for i in range(tout.width)
    )


def column_matches(t: Table, tout: Table, rel: ColRel) -> list[tuple[int, ...]]:
    """For each output column, the candidate columns of `t` that relate to it.

    result[i] lists every i' with column_relation(tout[i], t[i'], rel) in
    ascending order — the same orientation phi checks use, with the output
    column on the included side.  For the equality relations this is a
    fingerprint-index lookup rather than a pairwise scan.
    """
    if rel is ColRel.EQ_BAG:
        index = t._bag_index
        return [index.get(fp, ()) for fp in tout._bag_fps]
    if rel is ColRel.EQ_SET:
        index = t._set_index
        return [index.get(fp, ()) for fp in tout._sets]
    out: list[tuple[int, ...]] = []
    for i in range(tout.width):
        out.append(tuple(
            j for j in range(t.width)
            if (_types_compatible(tout.columns[i].ctype, t.columns[j].ctype)
                or tout._all_null[i])
            and column_relation(tout.column_values(i), t.column_values(j), rel)
        ))
    return out


def _types_compatible(a: ColType, b: ColType) -> bool:
    # Int and Dbl are interchangeable at the schema level; cells still have
    # to agree numerically, so this only widens what can verify, not what is
    # considered equal.
    if a is b:
        return True
    numeric = (ColType.INT, ColType.DBL)
    return a in numeric and b in numeric


def tables_equal(expected: Table, actual: Table, as_list: bool) -> bool:
    """Compare two tables positionally by type and by rows.

    Column names are ignored.  Rows are compared as a sequence when the
    output is order-significant (`as_list`), as a multiset otherwise.
    """
    if actual.width != expected.width:
        return False
    for ca, cb in zip(expected.columns, actual.columns):
        if not _types_compatible(ca.ctype, cb.ctype):
            return False
    if as_list:
        return expected.rows == actual.rows
    return Counter(expected.rows) == Counter(actual.rows)


# ---------------------------------------------------------------------------
# sortedness detection
# ---------------------------------------------------------------------------


def sort_cell_key(value: Cell) -> tuple:
    """Total-order key for one cell: NULL sorts before every value."""
    if value is None:
        return (0,)
    return (1, value)


@dataclass(frozen=True)
class SortEvidence:
    """Monotone, non-constant columns of a table with their directions."""

    keys: tuple[tuple[int, SortDir], ...]

    @property
    def is_sorted(self) -> bool:
        return bool(self.keys)


def detect_sorted(t: Table) -> SortEvidence:
    """Report which columns the whole table appears ordered by.

    A column counts as evidence when it is monotone over all rows and not
    constant; single-row tables provide no evidence.  NULL takes the low end
    of the order, mirroring how Order evaluates.
    """
    if t.height < 2:
        return SortEvidence(())
    keys: list[tuple[int, SortDir]] = []
    for i in range(t.width):
        values = [sort_cell_key(v) for v in t.column_values(i)]
        asc = all(a <= b for a, b in zip(values, values[1:]))
        desc = all(a >= b for a, b in zip(values, values[1:]))
        if asc and desc:
            continue  # constant column, not evidence
        if asc:
            keys.append((i, SortDir.ASC))
        elif desc:
            keys.append((i, SortDir.DESC))
    return SortEvidence(tuple(keys))


@dataclass(frozen=True)
class Constant:
    """A literal hint supplied with a synthesis problem."""

    ctype: ColType
    value: Cell

    def __post_init__(self) -> None:
        if self.value is None:
            raise TableError("constants must not be NULL")
        check_cell(self.value, self.ctype)
