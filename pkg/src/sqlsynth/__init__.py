"""Example-driven SQL query synthesis.

Give the library input tables and the output table you want, and it
searches for the smallest relational program — projections, filters,
grouping, window functions, joins, ordering — that maps one to the other
exactly, then renders that program as executable SQL.

>>> import sqlsynth as ss
>>> t = ss.table_of([("name", ss.ColType.STR), ("dept", ss.ColType.STR)],
...                 [("ann", "sales"), ("bob", "dev"), ("cal", "sales")])
>>> out = ss.table_of([("dept", ss.ColType.STR), ("n", ss.ColType.INT)],
...                   [("sales", 2), ("dev", 1)])
>>> result = ss.synthesize(ss.Problem({"emp": t}, out))
>>> result.status
<Status.SOLVED: 'solved'>
"""

from .config import SearchConfig
from .engine import Problem, SearchStats, Status, SynthesisResult, synthesize, verify
from .problemio import (ProblemFormatError, load_problem, loads_problem,
                        problem_to_json, save_problem)
from .relalg import (Agg, AggFunc, CmpOp, Comparison, Distinct, EvalError,
                     Group, IsNotNull, IsNull, Join, LeftJoin, Order,
                     Predicate, Program, Project, Select, TableRef, Win,
                     WinFunc, Window, eval_program, render_program)
from .sqlgen import DIALECTS, Dialect, MYSQL, POSTGRESQL, SQLITE, to_sql
from .tablecore import (Cell, ColType, Column, Constant, SortDir, Table,
                        TableError, table_of)

__version__ = "0.1.0"

__all__ = [
    "Agg", "AggFunc", "Cell", "CmpOp", "ColType", "Column", "Comparison",
    "Constant", "DIALECTS", "Dialect", "Distinct", "EvalError", "Group",
    "IsNotNull", "IsNull", "Join", "LeftJoin", "MYSQL", "Order",
    "POSTGRESQL", "Predicate", "Problem", "ProblemFormatError", "Program",
    "Project", "SQLITE", "SearchConfig", "SearchStats", "Select", "SortDir",
    "Status", "SynthesisResult", "Table", "TableError", "TableRef", "Win",
    "WinFunc", "Window", "eval_program", "load_problem", "loads_problem",
    "problem_to_json", "render_program", "save_problem", "synthesize",
    "table_of", "to_sql", "verify", "__version__",
]
