"""Relational-algebra programs and their reference evaluator.

A program is an immutable tree over nine operators: a named table leaf plus
Order, Distinct, Project, Select, Group, Window, Join and LeftJoin.  All
column references are positional indices into the child's output schema.
Predicates are in conjunctive normal form: an AND of clauses, each clause an
OR of primitive tests.

NULL behaves as in SQL: comparisons against NULL are false (IsNull /
IsNotNull test it explicitly), NULLs group together as a single key, NULL
join keys never match, aggregates skip NULL inputs except COUNT(*), and NULL
sorts before every value under ascending order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date
from typing import Union

from .tablecore import (Cell, ColType, Column, SortDir, Table, sort_cell_key,
                        tables_equal)


class EvalError(ValueError):
    """Raised when a program is structurally or type-wise ill-formed."""

    def __init__(self, node: str, message: str) -> None:
        super().__init__(f"{node}: {message}")
        self.node = node


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------


class CmpOp(enum.Enum):
    EQ = "="
    NE = "<>"
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="


ORDERED_TYPES = (ColType.INT, ColType.DBL, ColType.DATE)


@dataclass(frozen=True)
class Comparison:
    col: int
    op: CmpOp
    value: Cell  # literal; never None


@dataclass(frozen=True)
class IsNull:
    col: int


@dataclass(frozen=True)
class IsNotNull:
    col: int


Prim = Union[Comparison, IsNull, IsNotNull]


@dataclass(frozen=True)
class Predicate:
    """AND of clauses; each clause is an OR of prims."""

    clauses: tuple[tuple[Prim, ...], ...]


def pred_and(a: Predicate, b: Predicate) -> Predicate:
    return Predicate(a.clauses + b.clauses)


# ---------------------------------------------------------------------------
# aggregate and window vocabulary
# ---------------------------------------------------------------------------


class AggFunc(enum.Enum):
    COUNT_STAR = "count(*)"
    MAX = "max"
    MIN = "min"
    COUNT = "count"
    SUM = "sum"
    AVG = "avg"
    COUNT_DISTINCT = "count_distinct"
    CONCAT_COMMA = "concat_comma"
    CONCAT_SPACE = "concat_space"
    CONCAT_SLASH = "concat_slash"


CONCAT_SEPARATORS = {
    AggFunc.CONCAT_COMMA: ",",
    AggFunc.CONCAT_SPACE: " ",
    AggFunc.CONCAT_SLASH: "/",
}


class WinFunc(enum.Enum):
    MAX = "max"
    MIN = "min"
    COUNT = "count"
    SUM = "sum"
    RANK = "rank"


@dataclass(frozen=True)
class Agg:
    func: AggFunc
    col: int | None  # None only for COUNT_STAR

    def __post_init__(self) -> None:
        if (self.col is None) != (self.func is AggFunc.COUNT_STAR):
            raise EvalError("Agg", f"{self.func.value} target must be "
                            f"{'absent' if self.func is AggFunc.COUNT_STAR else 'present'}")


@dataclass(frozen=True)
class Win:
    func: WinFunc
    col: int | None  # None only for RANK
    partition: tuple[int, ...]  # at most two columns
    order_col: int
    order_dir: SortDir

    def __post_init__(self) -> None:
        if (self.col is None) != (self.func is WinFunc.RANK):
            raise EvalError("Win", "rank takes no target; other functions need one")
        if len(self.partition) > 2:
            raise EvalError("Win", "at most two partition columns")


# ---------------------------------------------------------------------------
# program nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRef:
    name: str


@dataclass(frozen=True)
class Order:
    child: "Program"
    keys: tuple[tuple[int, SortDir], ...]


@dataclass(frozen=True)
class Distinct:
    child: "Program"


@dataclass(frozen=True)
class Project:
    child: "Program"
    cols: tuple[int, ...]


@dataclass(frozen=True)
class Select:
    child: "Program"
    pred: Predicate


@dataclass(frozen=True)
class Group:
    child: "Program"
    keys: tuple[int, ...]  # zero to two grouping columns
    aggs: tuple[Agg, ...]

    def __post_init__(self) -> None:
        if len(self.keys) > 2:
            raise EvalError("Group", "at most two grouping columns")
        if not self.keys and not self.aggs:
            raise EvalError("Group", "keyless grouping needs at least one aggregate")


@dataclass(frozen=True)
class Window:
    child: "Program"
    wins: tuple[Win, ...]

    def __post_init__(self) -> None:
        if not self.wins:
            raise EvalError("Window", "needs at least one window column")


@dataclass(frozen=True)
class Join:
    left: "Program"
    right: "Program"
    pairs: tuple[tuple[int, int], ...]  # (left col, right col) equalities

    def __post_init__(self) -> None:
        if not self.pairs:
            raise EvalError("Join", "needs at least one column pair")


@dataclass(frozen=True)
class LeftJoin:
    left: "Program"
    right: "Program"
    pair: tuple[int, int]


Program = Union[TableRef, Order, Distinct, Project, Select, Group, Window,
                Join, LeftJoin]


def program_size(p: Program) -> int:
    """Node-count cost: table leaves are free, Window costs 2, the rest 1."""
    if isinstance(p, TableRef):
        return 0
    if isinstance(p, Window):
        return 2 + program_size(p.child)
    if isinstance(p, (Join, LeftJoin)):
        return 1 + program_size(p.left) + program_size(p.right)
    return 1 + program_size(p.child)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _check_col(t: Table, i: int, node: str) -> None:
    if not 0 <= i < t.width:
        raise EvalError(node, f"column {i} out of range for width {t.width}")


def _comparable(col: ColType, value: Cell, node: str) -> None:
    kinds = {ColType.STR: str, ColType.DATE: date}
    if col in (ColType.INT, ColType.DBL):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise EvalError(node, f"cannot compare {col.value} column with {value!r}")
        return
    if not isinstance(value, kinds[col]):
        raise EvalError(node, f"cannot compare {col.value} column with {value!r}")


def eval_prim(prim: Prim, row: tuple[Cell, ...], t: Table) -> bool:
    if isinstance(prim, IsNull):
        _check_col(t, prim.col, "IsNull")
        return row[prim.col] is None
    if isinstance(prim, IsNotNull):
        _check_col(t, prim.col, "IsNotNull")
        return row[prim.col] is not None
    _check_col(t, prim.col, "Comparison")
    ctype = t.columns[prim.col].ctype
    _comparable(ctype, prim.value, "Comparison")
    if prim.op not in (CmpOp.EQ, CmpOp.NE) and ctype not in ORDERED_TYPES:
        raise EvalError("Comparison", f"{prim.op.value} not defined on {ctype.value}")
    v = row[prim.col]
    if v is None:
        return False  # NULL compares false under every operator
    w = prim.value
    if prim.op is CmpOp.EQ:
        return v == w
    if prim.op is CmpOp.NE:
        return v != w
    if prim.op is CmpOp.LT:
        return v < w
    if prim.op is CmpOp.LE:
        return v <= w
    if prim.op is CmpOp.GT:
        return v > w
    return v >= w


def eval_predicate(pred: Predicate, row: tuple[Cell, ...], t: Table) -> bool:
    return all(any(eval_prim(p, row, t) for p in clause) for clause in pred.clauses)


def apply_order(t: Table, keys: tuple[tuple[int, SortDir], ...]) -> Table:
    for i, _ in keys:
        _check_col(t, i, "Order")
    rows = list(t.rows)
    # Stable sorts applied from the last key to the first give the composite
    # ordering; reverse=True keeps stability for the descending keys.
    for i, direction in reversed(keys):
        rows.sort(key=lambda row: sort_cell_key(row[i]),
                  reverse=direction is SortDir.DESC)
    return Table(t.columns, tuple(rows))


def apply_distinct(t: Table) -> Table:
    return Table(t.columns, tuple(dict.fromkeys(t.rows)))


def apply_project(t: Table, cols: tuple[int, ...]) -> Table:
    for i in cols:
        _check_col(t, i, "Project")
    schema = tuple(t.columns[i] for i in cols)
    rows = tuple(tuple(row[i] for i in cols) for row in t.rows)
    return Table(schema, rows)


def apply_select(t: Table, pred: Predicate) -> Table:
    rows = tuple(row for row in t.rows if eval_predicate(pred, row, t))
    return Table(t.columns, rows)


AGG_INPUT_TYPES = {
    AggFunc.MAX: (ColType.STR, ColType.INT, ColType.DBL, ColType.DATE),
    AggFunc.MIN: (ColType.STR, ColType.INT, ColType.DBL, ColType.DATE),
    AggFunc.COUNT: tuple(ColType),
    AggFunc.COUNT_DISTINCT: tuple(ColType),
    AggFunc.SUM: (ColType.INT, ColType.DBL),
    AggFunc.AVG: (ColType.INT, ColType.DBL),
    AggFunc.CONCAT_COMMA: (ColType.STR,),
    AggFunc.CONCAT_SPACE: (ColType.STR,),
    AggFunc.CONCAT_SLASH: (ColType.STR,),
}


def _agg_output_type(func: AggFunc, input_type: ColType | None) -> ColType:
    if func in (AggFunc.COUNT, AggFunc.COUNT_DISTINCT, AggFunc.COUNT_STAR):
        return ColType.INT
    if func is AggFunc.AVG:
        return ColType.DBL
    if func in CONCAT_SEPARATORS:
        return ColType.STR
    assert input_type is not None
    return input_type  # MAX, MIN, SUM keep the input type


def _check_agg(t: Table, agg: Agg) -> None:
    if agg.func is AggFunc.COUNT_STAR:
        return
    assert agg.col is not None
    _check_col(t, agg.col, "Group")
    ctype = t.columns[agg.col].ctype
    if ctype not in AGG_INPUT_TYPES[agg.func]:
        raise EvalError("Group", f"{agg.func.value} not defined on {ctype.value}")


def _agg_value(func: AggFunc, values: list[Cell]) -> Cell:
    """Aggregate over the rows of one group, in input-row order."""
    if func is AggFunc.COUNT_STAR:
        return len(values)
    present = [v for v in values if v is not None]
    if func is AggFunc.COUNT:
        return len(present)
    if func is AggFunc.COUNT_DISTINCT:
        return len(set(present))
    if not present:
        return None  # SQL: aggregates over no non-NULL input yield NULL
    if func is AggFunc.MAX:
        return max(present)
    if func is AggFunc.MIN:
        return min(present)
    if func is AggFunc.SUM:
        return sum(present)
    if func is AggFunc.AVG:
        return sum(present) / len(present)
    return CONCAT_SEPARATORS[func].join(present)


def _agg_name(agg: Agg, t: Table) -> str:
    if agg.func is AggFunc.COUNT_STAR:
        return "count(*)"
    assert agg.col is not None
    return f"{agg.func.value}({t.columns[agg.col].name})"


def apply_group(t: Table, keys: tuple[int, ...], aggs: tuple[Agg, ...]) -> Table:
    for i in keys:
        _check_col(t, i, "Group")
    for agg in aggs:
        _check_agg(t, agg)
    schema = tuple(t.columns[i] for i in keys) + tuple(
        Column(_agg_name(a, t),
               _agg_output_type(a.func, None if a.col is None else t.columns[a.col].ctype))
        for a in aggs
    )
    groups: dict[tuple, list[tuple[Cell, ...]]] = {}
    for row in t.rows:  # first-occurrence order of each key tuple
        groups.setdefault(tuple(row[i] for i in keys), []).append(row)
    if not keys and not groups:
        groups[()] = []  # a keyless aggregate always produces one row
    out = []
    for key, rows in groups.items():
        cells = list(key)
        for agg in aggs:
            values = [] if agg.col is None else [r[agg.col] for r in rows]
            if agg.func is AggFunc.COUNT_STAR:
                values = [None] * len(rows)
            cells.append(_agg_value(agg.func, values))
        out.append(tuple(cells))
    return Table(schema, tuple(out))


WIN_INPUT_TYPES = {
    WinFunc.MAX: (ColType.STR, ColType.INT, ColType.DBL, ColType.DATE),
    WinFunc.MIN: (ColType.STR, ColType.INT, ColType.DBL, ColType.DATE),
    WinFunc.COUNT: tuple(ColType),
    WinFunc.SUM: (ColType.INT, ColType.DBL),
}


def _win_column(t: Table, win: Win) -> list[Cell]:
    """Values of one window column, aligned with the input row order.

    The frame is the SQL default: partition start through the current row
    and its order-key peers, cumulatively.  RANK is competition ranking.
    """
    for i in win.partition:
        _check_col(t, i, "Window")
    _check_col(t, win.order_col, "Window")
    if win.func is not WinFunc.RANK:
        assert win.col is not None
        _check_col(t, win.col, "Window")
        ctype = t.columns[win.col].ctype
        if ctype not in WIN_INPUT_TYPES[win.func]:
            raise EvalError("Window", f"{win.func.value} not defined on {ctype.value}")
    partitions: dict[tuple, list[int]] = {}
    for r, row in enumerate(t.rows):
        partitions.setdefault(tuple(row[i] for i in win.partition), []).append(r)
    result: list[Cell] = [None] * t.height
    for indices in partitions.values():
        ordered = sorted(indices,
                         key=lambda r: sort_cell_key(t.rows[r][win.order_col]),
                         reverse=win.order_dir is SortDir.DESC)
        # peer groups: runs of equal order-key values
        start = 0
        while start < len(ordered):
            end = start
            key = sort_cell_key(t.rows[ordered[start]][win.order_col])
            while (end + 1 < len(ordered)
                   and sort_cell_key(t.rows[ordered[end + 1]][win.order_col]) == key):
                end += 1
            for r in ordered[start:end + 1]:
                if win.func is WinFunc.RANK:
                    result[r] = start + 1
                else:
                    assert win.col is not None
                    frame = [t.rows[i][win.col] for i in ordered[:end + 1]]
                    present = [v for v in frame if v is not None]
                    if win.func is WinFunc.COUNT:
                        result[r] = len(present)
                    elif not present:
                        result[r] = None
                    elif win.func is WinFunc.MAX:
                        result[r] = max(present)
                    elif win.func is WinFunc.MIN:
                        result[r] = min(present)
                    else:
                        result[r] = sum(present)
            start = end + 1
    return result


def _win_name(win: Win, t: Table) -> str:
    if win.func is WinFunc.RANK:
        return "rank()"
    assert win.col is not None
    return f"{win.func.value}({t.columns[win.col].name}) over"


def apply_window(t: Table, wins: tuple[Win, ...]) -> Table:
    columns = [_win_column(t, w) for w in wins]
    schema = t.columns + tuple(
        Column(_win_name(w, t),
               ColType.INT if w.func in (WinFunc.RANK, WinFunc.COUNT)
               else t.columns[w.col].ctype)  # type: ignore[index]
        for w in wins
    )
    rows = tuple(
        row + tuple(col[r] for col in columns)
        for r, row in enumerate(t.rows)
    )
    return Table(schema, rows)


def _check_join_pair(lt: Table, rt: Table, pair: tuple[int, int], node: str) -> None:
    li, ri = pair
    _check_col(lt, li, node)
    _check_col(rt, ri, node)
    a, b = lt.columns[li].ctype, rt.columns[ri].ctype
    numeric = (ColType.INT, ColType.DBL)
    if a is not b and not (a in numeric and b in numeric):
        raise EvalError(node, f"cannot join {a.value} with {b.value}")


def apply_join(lt: Table, rt: Table, pairs: tuple[tuple[int, int], ...]) -> Table:
    for pair in pairs:
        _check_join_pair(lt, rt, pair, "Join")
    index: dict[tuple, list[int]] = {}
    for r, row in enumerate(rt.rows):
        key = tuple(row[ri] for _, ri in pairs)
        if any(v is None for v in key):
            continue  # NULL keys never match
        index.setdefault(key, []).append(r)
    out = []
    for lrow in lt.rows:  # left-major, right order preserved within a match
        key = tuple(lrow[li] for li, _ in pairs)
        if any(v is None for v in key):
            continue
        for r in index.get(key, ()):
            out.append(lrow + rt.rows[r])
    return Table(lt.columns + rt.columns, tuple(out))


def apply_leftjoin(lt: Table, rt: Table, pair: tuple[int, int]) -> Table:
    _check_join_pair(lt, rt, pair, "LeftJoin")
    li, ri = pair
    index: dict[Cell, list[int]] = {}
    for r, row in enumerate(rt.rows):
        if row[ri] is None:
            continue
        index.setdefault(row[ri], []).append(r)
    padding = (None,) * rt.width
    out = []
    for lrow in lt.rows:
        matches = index.get(lrow[li], ()) if lrow[li] is not None else ()
        if matches:
            out.extend(lrow + rt.rows[r] for r in matches)
        else:
            out.append(lrow + padding)
    return Table(lt.columns + rt.columns, tuple(out))


def eval_program(p: Program, env: dict[str, Table]) -> Table:
    """Evaluate a program against named input tables."""
    if isinstance(p, TableRef):
        if p.name not in env:
            raise EvalError("Table", f"unknown table {p.name!r}")
        return env[p.name]
    if isinstance(p, Order):
        return apply_order(eval_program(p.child, env), p.keys)
    if isinstance(p, Distinct):
        return apply_distinct(eval_program(p.child, env))
    if isinstance(p, Project):
        return apply_project(eval_program(p.child, env), p.cols)
    if isinstance(p, Select):
        return apply_select(eval_program(p.child, env), p.pred)
    if isinstance(p, Group):
        return apply_group(eval_program(p.child, env), p.keys, p.aggs)
    if isinstance(p, Window):
        return apply_window(eval_program(p.child, env), p.wins)
    if isinstance(p, Join):
        return apply_join(eval_program(p.left, env), eval_program(p.right, env), p.pairs)
    if isinstance(p, LeftJoin):
        return apply_leftjoin(eval_program(p.left, env), eval_program(p.right, env), p.pair)
    raise EvalError("Program", f"unknown node {type(p).__name__}")


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _literal(value: Cell) -> str:
    if isinstance(value, str):
        escaped = value.replace("'", "''")
        return f"'{escaped}'"
    if isinstance(value, date):
        return f"date '{value.isoformat()}'"
    return repr(value)


def _render_prim(prim: Prim) -> str:
    if isinstance(prim, IsNull):
        return f"#{prim.col} is null"
    if isinstance(prim, IsNotNull):
        return f"#{prim.col} is not null"
    return f"#{prim.col} {prim.op.value} {_literal(prim.value)}"


def render_predicate(pred: Predicate) -> str:
    parts = []
    for clause in pred.clauses:
        text = " or ".join(_render_prim(p) for p in clause)
        parts.append(f"({text})" if len(clause) > 1 else text)
    return " and ".join(parts)


def _render_agg(agg: Agg) -> str:
    if agg.func is AggFunc.COUNT_STAR:
        return "count(*)"
    return f"{agg.func.value}(#{agg.col})"


def _render_win(win: Win) -> str:
    head = "rank()" if win.func is WinFunc.RANK else f"{win.func.value}(#{win.col})"
    partition = ", ".join(f"#{i}" for i in win.partition)
    return (f"{head} over (partition [{partition}] "
            f"order #{win.order_col} {win.order_dir.value})")


def render_program(p: Program) -> str:
    """Stable one-line text form of a program, with positional column refs."""
    if isinstance(p, TableRef):
        return f"Table({p.name})"
    if isinstance(p, Order):
        keys = ", ".join(f"#{i} {d.value}" for i, d in p.keys)
        return f"Order({render_program(p.child)}, [{keys}])"
    if isinstance(p, Distinct):
        return f"Distinct({render_program(p.child)})"
    if isinstance(p, Project):
        cols = ", ".join(f"#{i}" for i in p.cols)
        return f"Project({render_program(p.child)}, [{cols}])"
    if isinstance(p, Select):
        return f"Select({render_program(p.child)}, {render_predicate(p.pred)})"
    if isinstance(p, Group):
        keys = ", ".join(f"#{i}" for i in p.keys)
        aggs = ", ".join(_render_agg(a) for a in p.aggs)
        return f"Group({render_program(p.child)}, [{keys}], [{aggs}])"
    if isinstance(p, Window):
        wins = ", ".join(_render_win(w) for w in p.wins)
        return f"Window({render_program(p.child)}, [{wins}])"
    if isinstance(p, Join):
        pairs = ", ".join(f"l#{a} = r#{b}" for a, b in p.pairs)
        return f"Join({render_program(p.left)}, {render_program(p.right)}, [{pairs}])"
    pairs = f"l#{p.pair[0]} = r#{p.pair[1]}"
    return f"LeftJoin({render_program(p.left)}, {render_program(p.right)}, [{pairs}])"


# ---------------------------------------------------------------------------
# column minimization
# ---------------------------------------------------------------------------


class _Referenced(Exception):
    """A dropped column is still referenced above the target node."""


def _output_width(p: Program, env: dict[str, Table]) -> int:
    if isinstance(p, TableRef):
        return env[p.name].width
    if isinstance(p, Project):
        return len(p.cols)
    if isinstance(p, Group):
        return len(p.keys) + len(p.aggs)
    if isinstance(p, Window):
        return _output_width(p.child, env) + len(p.wins)
    if isinstance(p, (Join, LeftJoin)):
        return _output_width(p.left, env) + _output_width(p.right, env)
    return _output_width(p.child, env)


def _droppable_sites(p: Program, env: dict[str, Table],
                     ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """(path, positions) of Group aggregates and Window columns to drop.

    A top-down demand pass marks the output columns each node's ancestors
    can observe: the root needs all of its columns, Distinct reads whole
    rows, Project needs exactly what it selects, predicates and keys and
    join pairs pin theirs.  Aggregate and window columns outside the
    demanded set never influence the result and are safe to remove, except
    that a keyless Group keeps one aggregate and a Window keeps one
    function so the node stays well formed.  Path steps are child slots:
    0 for an only child or a join's left side, 1 for the right side.
    """
    sites: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    def walk(node: Program, demanded: set[int], path: tuple[int, ...]) -> None:
        if isinstance(node, TableRef):
            return
        if isinstance(node, Order):
            walk(node.child, demanded | {i for i, _ in node.keys}, path + (0,))
        elif isinstance(node, Distinct):
            walk(node.child, set(range(_output_width(node.child, env))), path + (0,))
        elif isinstance(node, Project):
            walk(node.child, {node.cols[i] for i in demanded}, path + (0,))
        elif isinstance(node, Select):
            used = {prim.col for clause in node.pred.clauses for prim in clause}
            walk(node.child, demanded | used, path + (0,))
        elif isinstance(node, Group):
            spare = [j for j in range(len(node.aggs))
                     if len(node.keys) + j not in demanded]
            short = (0 if node.keys else 1) - (len(node.aggs) - len(spare))
            if short > 0:
                spare = spare[short:]
            if spare:
                sites.append((path, tuple(spare)))
            used = set(node.keys) | {a.col for a in node.aggs if a.col is not None}
            walk(node.child, used, path + (0,))
        elif isinstance(node, Window):
            width = _output_width(node.child, env)
            spare = [j for j in range(len(node.wins)) if width + j not in demanded]
            short = 1 - (len(node.wins) - len(spare))
            if short > 0:
                spare = spare[short:]
            if spare:
                sites.append((path, tuple(spare)))
            used = set()
            for w in node.wins:
                used.update(w.partition)
                used.add(w.order_col)
                if w.col is not None:
                    used.add(w.col)
            walk(node.child, (demanded & set(range(width))) | used, path + (0,))
        else:
            assert isinstance(node, (Join, LeftJoin))
            width = _output_width(node.left, env)
            pairs = node.pairs if isinstance(node, Join) else (node.pair,)
            walk(node.left,
                 {i for i in demanded if i < width} | {a for a, _ in pairs},
                 path + (0,))
            walk(node.right,
                 {i - width for i in demanded if i >= width} | {b for _, b in pairs},
                 path + (1,))

    walk(p, set(range(_output_width(p, env))), ())
    return sites


def _map_index(mapping: dict[int, int | None], i: int, node: str) -> int:
    j = mapping.get(i, i)
    if j is None:
        raise _Referenced(node)
    return j


def _remap_pred(pred: Predicate, mapping: dict[int, int | None]) -> Predicate:
    clauses = []
    for clause in pred.clauses:
        prims: list[Prim] = []
        for prim in clause:
            j = _map_index(mapping, prim.col, "Select")
            if isinstance(prim, Comparison):
                prims.append(Comparison(j, prim.op, prim.value))
            elif isinstance(prim, IsNull):
                prims.append(IsNull(j))
            else:
                prims.append(IsNotNull(j))
        clauses.append(tuple(prims))
    return Predicate(tuple(clauses))


def _drop_columns(p: Program, path: tuple[int, ...], positions: tuple[int, ...],
                  env: dict[str, Table]) -> tuple[Program, dict[int, int | None]]:
    """Rebuild `p` with Group aggregates / Window columns removed at `path`.

    Returns the new node and a mapping from this node's old output indices
    to new ones (None for removed columns; identity entries are omitted,
    and an empty mapping means the output is unchanged).  Raises
    _Referenced when an ancestor still uses a removed column.
    """
    if not path:
        gone = set(positions)
        if isinstance(p, Group):
            removed = {len(p.keys) + pos for pos in gone}
            aggs = tuple(a for j, a in enumerate(p.aggs) if j not in gone)
            node: Program = Group(p.child, p.keys, aggs)
        else:
            assert isinstance(p, Window)
            base = _output_width(p.child, env)
            removed = {base + pos for pos in gone}
            wins = tuple(w for j, w in enumerate(p.wins) if j not in gone)
            node = Window(p.child, wins)
        mapping: dict[int, int | None] = {}
        shift = 0
        for i in range(_output_width(p, env)):
            if i in removed:
                mapping[i] = None
                shift += 1
            elif shift:
                mapping[i] = i - shift
        return node, mapping

    step, rest = path[0], path[1:]
    if isinstance(p, (Join, LeftJoin)):
        left_width = _output_width(p.left, env)
        if step == 0:
            child, sub = _drop_columns(p.left, rest, positions, env)
            lost = sum(1 for j in sub.values() if j is None)
            mapping = dict(sub)
            if lost:  # right-side columns shift down past the removals
                total = left_width + _output_width(p.right, env)
                mapping.update({i: i - lost for i in range(left_width, total)})
            remap_left, remap_right = sub, {}
            new_left, new_right = child, p.right
        else:
            child, sub = _drop_columns(p.right, rest, positions, env)
            mapping = {left_width + i: (None if j is None else left_width + j)
                       for i, j in sub.items()}
            remap_left, remap_right = {}, sub
            new_left, new_right = p.left, child
        if isinstance(p, Join):
            pairs = tuple(
                (_map_index(remap_left, a, "Join"), _map_index(remap_right, b, "Join"))
                for a, b in p.pairs
            )
            return Join(new_left, new_right, pairs), mapping
        a, b = p.pair
        pair = (_map_index(remap_left, a, "LeftJoin"), _map_index(remap_right, b, "LeftJoin"))
        return LeftJoin(new_left, new_right, pair), mapping

    child, sub = _drop_columns(p.child, rest, positions, env)  # type: ignore[union-attr]
    if isinstance(p, Order):
        keys = tuple((_map_index(sub, i, "Order"), d) for i, d in p.keys)
        return Order(child, keys), sub
    if isinstance(p, Distinct):
        return Distinct(child), sub
    if isinstance(p, Project):
        cols = tuple(_map_index(sub, i, "Project") for i in p.cols)
        return Project(child, cols), {}  # output positions unchanged
    if isinstance(p, Select):
        return Select(child, _remap_pred(p.pred, sub)), sub
    if isinstance(p, Group):
        keys = tuple(_map_index(sub, i, "Group") for i in p.keys)
        aggs = tuple(
            Agg(a.func, a.col if a.col is None else _map_index(sub, a.col, "Group"))
            for a in p.aggs
        )
        return Group(child, keys, aggs), {}
    if isinstance(p, Window):
        old_child_width = _output_width(p.child, env)  # type: ignore[union-attr]
        wins = tuple(
            Win(w.func,
                w.col if w.col is None else _map_index(sub, w.col, "Window"),
                tuple(_map_index(sub, i, "Window") for i in w.partition),
                _map_index(sub, w.order_col, "Window"),
                w.order_dir)
            for w in p.wins
        )
        lost = sum(1 for j in sub.values() if j is None)
        mapping = dict(sub)
        if lost:  # the appended window columns shift down past the removals
            mapping.update({old_child_width + k: old_child_width - lost + k
                            for k in range(len(p.wins))})
        return Window(child, wins), mapping
    raise AssertionError(f"unexpected node {type(p).__name__}")


def minimize_columns(p: Program, env: dict[str, Table], expected: Table,
                     as_list: bool) -> Program:
    """Drop every Group aggregate and Window column nothing refers to.

    Repeats the demand analysis until no undemanded column remains — a
    removal can expose further removals below it — then re-checks the
    slimmed program against `expected` once and falls back to the original
    on any disagreement.
    """
    current = p
    for _ in range(64):  # plenty for any finite program; guards a cycle bug
        sites = _droppable_sites(current, env)
        if not sites:
            break
        try:
            # Sites name disjoint nodes, so removals compose without
            # invalidating paths or positions recorded for other nodes.
            for path, positions in sites:
                current, _ = _drop_columns(current, path, positions, env)
        except _Referenced:  # demand analysis should rule this out
            return p
    if current is not p:
        try:
            if not tables_equal(expected, eval_program(current, env), as_list):
                return p
        except EvalError:
            return p
    return current
