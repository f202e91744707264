"""Rendering synthesized programs as executable SQL.

Programs address columns positionally, so each node is translated into a
`_Block` — one SELECT statement under construction — that carries the SQL
expression and output alias for every column of the node's result.  Parent
operators fold onto the child's block when a single SELECT can express the
combination (filters become WHERE or HAVING, grouping fills GROUP BY,
window functions join the select list) and wrap the block into a derived
table only when SQL's evaluation order forces it, e.g. filtering on a
window function's result.

One deliberate approximation: the string-concatenation aggregates collect
values in input row order, which plain SQL string aggregation leaves
unspecified.  Everything else matches the evaluator, including NULL
placement in ORDER BY when the dialect can spell it.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field

from .relalg import (Agg, AggFunc, CONCAT_SEPARATORS, CmpOp, Comparison,
                     Distinct, Group, IsNotNull, IsNull, Join, LeftJoin,
                     Order, Predicate, Prim, Program, Project, Select,
                     TableRef, Win, WinFunc, Window)
from .tablecore import Cell, SortDir, Table


@dataclass(frozen=True)
class Dialect:
    """Knobs for the few constructs that differ across SQL engines."""

    name: str = "postgresql"
    # Function used for string-concatenation aggregates.
    string_agg: str = "string_agg"
    # MySQL spells the separator as `group_concat(x SEPARATOR ',')`;
    # string_agg and SQLite's group_concat take it as a second argument.
    separator_keyword: bool = False
    # Emit NULLS FIRST / NULLS LAST so sort results match the evaluator,
    # which places NULL before every value on an ascending key.  MySQL
    # lacks the clause but already sorts NULL first ascending.
    nulls_ordering: bool = True


POSTGRESQL = Dialect()
MYSQL = Dialect(name="mysql", string_agg="group_concat",
                separator_keyword=True, nulls_ordering=False)
SQLITE = Dialect(name="sqlite", string_agg="group_concat", nulls_ordering=True)

DIALECTS = {d.name: d for d in (POSTGRESQL, MYSQL, SQLITE)}

_CLEAN_IDENT = re.compile(r"^[a-z_][a-z0-9_]*$")

# Quoting every keyword-collision candidate keeps the output portable; the
# list leans conservative and includes type names like "date".
_RESERVED = frozenset("""
    all and any as asc between by case cast check column create cross current
    date day default delete desc distinct drop else end except exists false
    for foreign from full group having hour in inner insert int integer
    intersect interval into is join key left like limit minute month natural
    not null offset on or order outer primary right select set some table
    then time timestamp to true union unique update user using values when
    where with year
""".split())

_CMP_SQL = {
    CmpOp.EQ: "=",
    CmpOp.NE: "<>",
    CmpOp.LT: "<",
    CmpOp.LE: "<=",
    CmpOp.GT: ">",
    CmpOp.GE: ">=",
}


def _ident(name: str) -> str:
    if _CLEAN_IDENT.match(name) and name not in _RESERVED:
        return name
    return '"' + name.replace('"', '""') + '"'


def _literal(value: Cell) -> str:
    if isinstance(value, str):
        return "'" + value.replace("'", "''") + "'"
    if isinstance(value, bool):  # defensive: bools never reach storage
        raise ValueError("boolean literals are not part of the language")
    if isinstance(value, datetime.date):
        return f"DATE '{value.isoformat()}'"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    raise ValueError(f"cannot render literal {value!r}")


def _sanitize(name: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_]", "_", name).strip("_").lower()
    return cleaned or "col"


def _dedupe(names: list[str]) -> list[str]:
    taken: set[str] = set()
    out: list[str] = []
    for name in names:
        candidate, k = name, 1
        while candidate in taken:
            k += 1
            candidate = f"{name}_{k}"
        taken.add(candidate)
        out.append(candidate)
    return out


@dataclass
class _Block:
    """One SELECT statement in the making.

    `select` holds (expression, output name) pairs, one per column of the
    node's result, in result order.  `base_name` survives only on a block
    that is still a verbatim scan of one input table.
    """

    source: str
    select: list[tuple[str, str]]
    base_name: str | None = None
    distinct: bool = False
    where: list[str] = field(default_factory=list)
    grouped: bool = False
    group_by: list[str] = field(default_factory=list)
    having: list[str] = field(default_factory=list)
    windowed: bool = False
    order_by: list[str] = field(default_factory=list)


def _indent(text: str, pad: str = "  ") -> str:
    return "\n".join(pad + line for line in text.splitlines())


def _render(block: _Block) -> str:
    if block.base_name is not None:
        return f"SELECT *\nFROM {_ident(block.base_name)}"
    items = []
    for expr, name in block.select:
        items.append(expr if expr == _ident(name) else f"{expr} AS {_ident(name)}")
    head = "SELECT DISTINCT " if block.distinct else "SELECT "
    lines = [head + ", ".join(items), f"FROM {block.source}"]
    if block.where:
        lines.append("WHERE " + " AND ".join(block.where))
    if block.grouped and block.group_by:
        lines.append("GROUP BY " + ", ".join(block.group_by))
    if block.having:
        lines.append("HAVING " + " AND ".join(block.having))
    if block.order_by:
        lines.append("ORDER BY " + ", ".join(block.order_by))
    return "\n".join(lines)


def _subquery(block: _Block, alias: str) -> tuple[str, list[str]]:
    """Render a block as an aliased derived table; returns (sql, column names)."""
    block.base_name = None  # force an explicit select list inside the parens
    names = _dedupe([_sanitize(name) for _, name in block.select])
    block.select = [(expr, name) for (expr, _), name in zip(block.select, names)]
    body = _render(block)
    return f"(\n{_indent(body)}\n) AS {alias}", names


def _wrap(block: _Block) -> _Block:
    """Push a finished block down into FROM so new clauses start fresh."""
    source, names = _subquery(block, "s")
    return _Block(source=source, select=[(_ident(n), n) for n in names])


class _Emitter:
    def __init__(self, inputs: dict[str, Table], dialect: Dialect):
        self.inputs = inputs
        self.dialect = dialect

    # -- leaf -------------------------------------------------------------

    def _scan(self, node: TableRef) -> _Block:
        if node.name not in self.inputs:
            raise ValueError(f"program references unknown table {node.name!r}")
        table = self.inputs[node.name]
        select = [(_ident(c.name), c.name) for c in table.columns]
        return _Block(source=_ident(node.name), select=select, base_name=node.name)

    # -- predicate rendering ----------------------------------------------

    def _prim(self, prim: Prim, select: list[tuple[str, str]]) -> str:
        if isinstance(prim, Comparison):
            return f"{select[prim.col][0]} {_CMP_SQL[prim.op]} {_literal(prim.value)}"
        if isinstance(prim, IsNull):
            return f"{select[prim.col][0]} IS NULL"
        assert isinstance(prim, IsNotNull)
        return f"{select[prim.col][0]} IS NOT NULL"

    def _clauses(self, pred: Predicate, select: list[tuple[str, str]]) -> list[str]:
        out = []
        for clause in pred.clauses:
            parts = [self._prim(p, select) for p in clause]
            out.append(parts[0] if len(parts) == 1 else "(" + " OR ".join(parts) + ")")
        return out

    # -- aggregate / window expressions -------------------------------------

    def _agg_sql(self, agg: Agg, select: list[tuple[str, str]]) -> tuple[str, str]:
        if agg.func is AggFunc.COUNT_STAR:
            return "count(*)", "count_star"
        expr, name = select[agg.col]
        base = _sanitize(name)
        if agg.func is AggFunc.COUNT_DISTINCT:
            return f"count(DISTINCT {expr})", f"count_distinct_{base}"
        if agg.func in CONCAT_SEPARATORS:
            sep = _literal(CONCAT_SEPARATORS[agg.func])
            fn = self.dialect.string_agg
            if self.dialect.separator_keyword:
                inner = f"{fn}({expr} SEPARATOR {sep})"
            else:
                inner = f"{fn}({expr}, {sep})"
            return inner, f"concat_{base}"
        fn = agg.func.value
        return f"{fn}({expr})", f"{fn}_{base}"

    def _order_item(self, expr: str, direction: SortDir) -> str:
        asc = direction is SortDir.ASC
        item = f"{expr} {'ASC' if asc else 'DESC'}"
        if self.dialect.nulls_ordering:
            item += " NULLS FIRST" if asc else " NULLS LAST"
        return item

    def _win_sql(self, win: Win, select: list[tuple[str, str]]) -> tuple[str, str]:
        over = []
        if win.partition:
            over.append("PARTITION BY " + ", ".join(select[i][0] for i in win.partition))
        over.append("ORDER BY " + self._order_item(select[win.order_col][0], win.order_dir))
        spec = " OVER (" + " ".join(over) + ")"
        if win.func is WinFunc.RANK:
            return "rank()" + spec, "rnk"
        expr, name = select[win.col]
        fn = win.func.value
        return f"{fn}({expr})" + spec, f"{fn}_{_sanitize(name)}"

    # -- operators ----------------------------------------------------------

    def build(self, node: Program) -> _Block:
        if isinstance(node, TableRef):
            return self._scan(node)
        if isinstance(node, Order):
            return self._order(node)
        if isinstance(node, Distinct):
            block = self.build(node.child)
            block.distinct = True
            block.base_name = None
            return block
        if isinstance(node, Project):
            block = self.build(node.child)
            block.select = [block.select[i] for i in node.cols]
            block.base_name = None
            return block
        if isinstance(node, Select):
            return self._select(node)
        if isinstance(node, Group):
            return self._group(node)
        if isinstance(node, Window):
            return self._window(node)
        if isinstance(node, (Join, LeftJoin)):
            return self._join(node)
        raise ValueError(f"cannot render node {node!r}")

    def _order(self, node: Order) -> _Block:
        block = self.build(node.child)
        aliases = [name for _, name in block.select]
        unique = len(set(aliases)) == len(aliases)
        for col, direction in node.keys:
            ref = _ident(aliases[col]) if unique else str(col + 1)
            block.order_by.append(self._order_item(ref, direction))
        block.base_name = None
        return block

    def _select(self, node: Select) -> _Block:
        block = self.build(node.child)
        if block.windowed:
            block = _wrap(block)
        conds = self._clauses(node.pred, block.select)
        if block.grouped:
            block.having.extend(conds)
        else:
            block.where.extend(conds)
        block.base_name = None
        return block

    def _group(self, node: Group) -> _Block:
        block = self.build(node.child)
        if block.grouped or block.windowed or block.distinct:
            block = _wrap(block)
        keys = [block.select[i] for i in node.keys]
        aggs = [self._agg_sql(a, block.select) for a in node.aggs]
        names = _dedupe([name for _, name in keys] + [name for _, name in aggs])
        exprs = [expr for expr, _ in keys] + [expr for expr, _ in aggs]
        block.group_by = [expr for expr, _ in keys]
        block.select = list(zip(exprs, names))
        block.grouped = True
        block.base_name = None
        return block

    def _window(self, node: Window) -> _Block:
        block = self.build(node.child)
        if block.windowed or block.distinct:
            block = _wrap(block)
        added = [self._win_sql(w, block.select) for w in node.wins]
        names = _dedupe([name for _, name in block.select] + [name for _, name in added])
        exprs = [expr for expr, _ in block.select] + [expr for expr, _ in added]
        block.select = list(zip(exprs, names))
        block.windowed = True
        block.base_name = None
        return block

    def _join(self, node: Join | LeftJoin) -> _Block:
        sides = []
        for alias, child in (("t1", node.left), ("t2", node.right)):
            block = self.build(child)
            if block.base_name is not None:
                source = f"{_ident(block.base_name)} AS {alias}"
                names = [name for _, name in block.select]
            else:
                source, names = _subquery(block, alias)
            refs = [f"{alias}.{_ident(n)}" for n in names]
            sides.append((source, refs, names))
        (lsrc, lrefs, lnames), (rsrc, rrefs, rnames) = sides
        pairs = node.pairs if isinstance(node, Join) else (node.pair,)
        keyword = "JOIN" if isinstance(node, Join) else "LEFT JOIN"
        on = " AND ".join(f"{lrefs[a]} = {rrefs[b]}" for a, b in pairs)
        source = f"{lsrc}\n{keyword} {rsrc}\n  ON {on}"
        names = _dedupe(lnames + rnames)
        return _Block(source=source, select=list(zip(lrefs + rrefs, names)))


def to_sql(program: Program, inputs: dict[str, Table],
           dialect: Dialect = POSTGRESQL) -> str:
    """Translate a synthesized program into a SQL query string."""
    return _render(_Emitter(inputs, dialect).build(program))
