"""Reading and writing synthesis problems as JSON (with optional CSV data).

A problem document looks like::

    {
      "inputs": {
        "emp": {
          "columns": [{"name": "id", "type": "Int"},
                      {"name": "dept", "type": "Str"}],
          "rows": [[1, "sales"], [2, null]]
        }
      },
      "output": { ... same shape ... },
      "constants": [{"type": "Str", "value": "sales"}],
      "config": {"timeout_ms": 5000}
    }

A table may carry ``"csv": "path.csv"`` instead of ``"rows"``; the file is
read relative to the document, its header must repeat the declared column
names, and empty cells become NULL.  Dates are ISO ``YYYY-MM-DD`` strings
in both encodings.  All validation errors raise :class:`ProblemFormatError`
with a JSON-path-style location.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
from pathlib import Path
from typing import Any

from .config import SearchConfig
from .engine import Problem
from .tablecore import (Cell, ColType, Column, Constant, Table, TableError)


class ProblemFormatError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


_TYPE_NAMES = {t.value: t for t in ColType}


def _expect_object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ProblemFormatError(path, f"expected an object, got {type(value).__name__}")
    return value


def _expect_array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ProblemFormatError(path, f"expected an array, got {type(value).__name__}")
    return value


def _parse_type(value: Any, path: str) -> ColType:
    if not isinstance(value, str) or value not in _TYPE_NAMES:
        options = ", ".join(sorted(_TYPE_NAMES))
        raise ProblemFormatError(path, f"column type must be one of {options}")
    return _TYPE_NAMES[value]


def parse_cell(raw: Any, ctype: ColType, path: str) -> Cell:
    if raw is None:
        return None
    if ctype is ColType.STR:
        if not isinstance(raw, str):
            raise ProblemFormatError(path, f"expected a string, got {raw!r}")
        return raw
    if ctype is ColType.INT:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ProblemFormatError(path, f"expected an integer, got {raw!r}")
        return raw
    if ctype is ColType.DBL:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ProblemFormatError(path, f"expected a number, got {raw!r}")
        if not math.isfinite(raw):
            raise ProblemFormatError(path, "numbers must be finite")
        return float(raw)
    if not isinstance(raw, str):
        raise ProblemFormatError(path, f"expected a 'YYYY-MM-DD' string, got {raw!r}")
    try:
        return datetime.date.fromisoformat(raw)
    except ValueError:
        raise ProblemFormatError(path, f"invalid date {raw!r}") from None


def _csv_cell(text: str, ctype: ColType, path: str) -> Cell:
    if text == "":
        return None
    if ctype is ColType.STR:
        return text
    try:
        if ctype is ColType.INT:
            return int(text)
        if ctype is ColType.DBL:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return value
        return datetime.date.fromisoformat(text)
    except ValueError:
        raise ProblemFormatError(path, f"cannot read {text!r} as {ctype.value}") from None


def _rows_from_csv(filename: str, columns: tuple[Column, ...], base: Path | None,
                   path: str) -> list[list[Cell]]:
    target = Path(filename)
    if not target.is_absolute() and base is not None:
        target = base / target
    try:
        with open(target, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise ProblemFormatError(path, f"{target} is empty; a header row is required") from None
            expected = [c.name for c in columns]
            if header != expected:
                raise ProblemFormatError(
                    path, f"{target} header {header!r} does not match columns {expected!r}")
            rows = []
            for i, record in enumerate(reader):
                if len(record) != len(columns):
                    raise ProblemFormatError(
                        f"{path}.rows[{i}]", f"expected {len(columns)} cells, got {len(record)}")
                rows.append([_csv_cell(cell, col.ctype, f"{path}.rows[{i}][{j}]")
                             for j, (cell, col) in enumerate(zip(record, columns))])
            return rows
    except OSError as exc:
        raise ProblemFormatError(path, f"cannot read {target}: {exc}") from None


def parse_table(doc: Any, path: str, base: Path | None = None) -> Table:
    obj = _expect_object(doc, path)
    raw_cols = _expect_array(obj.get("columns"), f"{path}.columns")
    if not raw_cols:
        raise ProblemFormatError(f"{path}.columns", "a table needs at least one column")
    columns = []
    for i, raw in enumerate(raw_cols):
        col = _expect_object(raw, f"{path}.columns[{i}]")
        name = col.get("name")
        if not isinstance(name, str) or not name:
            raise ProblemFormatError(f"{path}.columns[{i}].name", "expected a non-empty string")
        columns.append(Column(name, _parse_type(col.get("type"), f"{path}.columns[{i}].type")))
    cols = tuple(columns)

    if "csv" in obj:
        if "rows" in obj:
            raise ProblemFormatError(path, "give either 'rows' or 'csv', not both")
        if not isinstance(obj["csv"], str):
            raise ProblemFormatError(f"{path}.csv", "expected a file name")
        data = _rows_from_csv(obj["csv"], cols, base, path)
    else:
        raw_rows = _expect_array(obj.get("rows"), f"{path}.rows")
        data = []
        for i, raw in enumerate(raw_rows):
            row = _expect_array(raw, f"{path}.rows[{i}]")
            if len(row) != len(cols):
                raise ProblemFormatError(
                    f"{path}.rows[{i}]", f"expected {len(cols)} cells, got {len(row)}")
            data.append([parse_cell(cell, col.ctype, f"{path}.rows[{i}][{j}]")
                         for j, (cell, col) in enumerate(zip(row, cols))])
    try:
        return Table(cols, tuple(tuple(row) for row in data))
    except TableError as exc:
        raise ProblemFormatError(path, str(exc)) from None


def parse_constant(doc: Any, path: str) -> Constant:
    obj = _expect_object(doc, path)
    ctype = _parse_type(obj.get("type"), f"{path}.type")
    if "value" not in obj:
        raise ProblemFormatError(f"{path}.value", "missing constant value")
    value = parse_cell(obj["value"], ctype, f"{path}.value")
    if value is None:
        raise ProblemFormatError(f"{path}.value", "constants cannot be null; "
                                 "null tests need no constant")
    return Constant(ctype, value)


def parse_config(doc: Any, path: str) -> SearchConfig:
    obj = _expect_object(doc, path)
    allowed = {f for f in SearchConfig.__dataclass_fields__}
    unknown = set(obj) - allowed
    if unknown:
        raise ProblemFormatError(path, f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        return SearchConfig(**obj)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(path, str(exc)) from None


def parse_problem(doc: Any, base: Path | None = None) -> tuple[Problem, SearchConfig]:
    obj = _expect_object(doc, "$")
    unknown = set(obj) - {"inputs", "output", "constants", "config"}
    if unknown:
        raise ProblemFormatError("$", f"unknown keys: {', '.join(sorted(unknown))}")

    raw_inputs = _expect_object(obj.get("inputs"), "$.inputs")
    if not raw_inputs:
        raise ProblemFormatError("$.inputs", "at least one input table is required")
    inputs = {}
    for name, raw in raw_inputs.items():
        if not name:
            raise ProblemFormatError("$.inputs", "table names cannot be empty")
        inputs[name] = parse_table(raw, f"$.inputs.{name}", base)

    output = parse_table(obj.get("output"), "$.output", base)

    constants = tuple(
        parse_constant(raw, f"$.constants[{i}]")
        for i, raw in enumerate(_expect_array(obj.get("constants", []), "$.constants")))

    config = parse_config(obj.get("config", {}), "$.config")
    try:
        return Problem(inputs=inputs, output=output, constants=constants), config
    except ValueError as exc:
        raise ProblemFormatError("$", str(exc)) from None


def load_problem(source: str | Path) -> tuple[Problem, SearchConfig]:
    source = Path(source)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFormatError("$", f"cannot read {source}: {exc}") from None
    return loads_problem(text, base=source.parent)


def loads_problem(text: str, base: Path | None = None) -> tuple[Problem, SearchConfig]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError("$", f"invalid JSON: {exc}") from None
    return parse_problem(doc, base)


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def cell_to_json(value: Cell) -> Any:
    if isinstance(value, datetime.date):
        return value.isoformat()
    return value


def table_to_json(table: Table) -> dict:
    return {
        "columns": [{"name": c.name, "type": c.ctype.value} for c in table.columns],
        "rows": [[cell_to_json(cell) for cell in row] for row in table.rows],
    }


def problem_to_json(problem: Problem, config: SearchConfig | None = None) -> dict:
    doc: dict[str, Any] = {
        "inputs": {name: table_to_json(t) for name, t in problem.inputs.items()},
        "output": table_to_json(problem.output),
    }
    if problem.constants:
        doc["constants"] = [{"type": c.ctype.value, "value": cell_to_json(c.value)}
                            for c in problem.constants]
    if config is not None:
        doc["config"] = {key: getattr(config, key)
                         for key in SearchConfig.__dataclass_fields__}
    return doc


def save_problem(problem: Problem, destination: str | Path,
                 config: SearchConfig | None = None) -> None:
    text = json.dumps(problem_to_json(problem, config), indent=2)
    Path(destination).write_text(text + "\n", encoding="utf-8")
