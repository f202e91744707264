"""Program sketches: operator trees with unfilled table leaves.

A sketch fixes the operator shape of a candidate program and nothing else.
Table leaves start as holes; the search assigns input-table names to them
and a completion pass fills in the remaining arguments (sort keys,
predicates, column lists and so on).

Expansion grows a sketch by one constructor at one hole, filtered by the
normal-form parent/child legality matrix so that, e.g., Order only ever
appears at the root and nothing redundant like Select-under-Select is
enumerated.  Join is symmetric in its children, so mirrored sketches are
collapsed to one representative.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence, Union


@dataclass(frozen=True)
class Hole:
    pass


@dataclass(frozen=True)
class SRef:
    name: str


@dataclass(frozen=True)
class SOrder:
    child: "Sketch"


@dataclass(frozen=True)
class SDistinct:
    child: "Sketch"


@dataclass(frozen=True)
class SProject:
    child: "Sketch"


@dataclass(frozen=True)
class SSelect:
    child: "Sketch"


@dataclass(frozen=True)
class SGroup:
    child: "Sketch"


@dataclass(frozen=True)
class SWindow:
    child: "Sketch"


@dataclass(frozen=True)
class SJoin:
    left: "Sketch"
    right: "Sketch"


@dataclass(frozen=True)
class SLeftJoin:
    left: "Sketch"
    right: "Sketch"


Sketch = Union[Hole, SRef, SOrder, SDistinct, SProject, SSelect, SGroup,
               SWindow, SJoin, SLeftJoin]

HOLE = Hole()

_UNARY = {SOrder: "Order", SDistinct: "Distinct", SProject: "Project",
          SSelect: "Select", SGroup: "Group", SWindow: "Window"}
_BINARY = {SJoin: "Join", SLeftJoin: "LeftJoin"}

# Constructors in the fixed order expansion tries them.
OPERATORS: tuple[type, ...] = (SOrder, SDistinct, SProject, SSelect, SGroup,
                               SWindow, SJoin, SLeftJoin)

_TABLE = "Table"
_ALL_KINDS = frozenset(list(_UNARY.values()) + list(_BINARY.values()) + [_TABLE])

# Parent kind -> kinds its children may have.  Order never sits below
# anything; order-destroying parents refuse order-producing children; the
# projection-like operators stay above everything that fixes columns.
ALLOWED_CHILDREN: dict[str, frozenset[str]] = {
    "Order": _ALL_KINDS - {"Order"},
    "Distinct": _ALL_KINDS - {"Order", "Distinct"},
    "Project": _ALL_KINDS - {"Order", "Distinct", "Project"},
    "Select": _ALL_KINDS - {"Order", "Distinct", "Project", "Select"},
    "Group": _ALL_KINDS - {"Order", "Distinct", "Project"},
    "Window": _ALL_KINDS - {"Order", "Distinct", "Project"},
    "Join": _ALL_KINDS - {"Order", "Distinct", "Project", "Select"},
    "LeftJoin": _ALL_KINDS - {"Order", "Distinct", "Project"},
}


def kind_of(s: Sketch) -> str:
    t = type(s)
    if t in _UNARY:
        return _UNARY[t]
    if t in _BINARY:
        return _BINARY[t]
    return _TABLE


def sketch_size(s: Sketch) -> int:
    """Window costs 2, table leaves 0, every other operator 1."""
    if isinstance(s, (Hole, SRef)):
        return 0
    if isinstance(s, (SJoin, SLeftJoin)):
        return 1 + sketch_size(s.left) + sketch_size(s.right)
    base = 2 if isinstance(s, SWindow) else 1
    return base + sketch_size(s.child)


def matrix_respected(s: Sketch) -> bool:
    """True when every parent/child pair in the sketch is legal."""
    if isinstance(s, (Hole, SRef)):
        return True
    children = (s.left, s.right) if isinstance(s, (SJoin, SLeftJoin)) else (s.child,)
    allowed = ALLOWED_CHILDREN[kind_of(s)]
    return all(kind_of(c) in allowed and matrix_respected(c) for c in children)


def canonical_key(s: Sketch) -> str:
    """Structural identity string; Join children are unordered."""
    if isinstance(s, Hole):
        return "?"
    if isinstance(s, SRef):
        return f"T:{s.name}"
    if isinstance(s, SJoin):
        a, b = sorted((canonical_key(s.left), canonical_key(s.right)))
        return f"Join({a},{b})"
    if isinstance(s, SLeftJoin):
        return f"LeftJoin({canonical_key(s.left)},{canonical_key(s.right)})"
    return f"{kind_of(s)}({canonical_key(s.child)})"


def count_holes(s: Sketch) -> int:
    if isinstance(s, Hole):
        return 1
    if isinstance(s, SRef):
        return 0
    if isinstance(s, (SJoin, SLeftJoin)):
        return count_holes(s.left) + count_holes(s.right)
    return count_holes(s.child)


def contains_select(s: Sketch) -> bool:
    if isinstance(s, (Hole, SRef)):
        return False
    if isinstance(s, SSelect):
        return True
    if isinstance(s, (SJoin, SLeftJoin)):
        return contains_select(s.left) or contains_select(s.right)
    return contains_select(s.child)


def count_windows(s: Sketch) -> int:
    if isinstance(s, (Hole, SRef)):
        return 0
    if isinstance(s, (SJoin, SLeftJoin)):
        return count_windows(s.left) + count_windows(s.right)
    return (1 if isinstance(s, SWindow) else 0) + count_windows(s.child)


def count_groups(s: Sketch) -> int:
    if isinstance(s, (Hole, SRef)):
        return 0
    if isinstance(s, (SJoin, SLeftJoin)):
        return count_groups(s.left) + count_groups(s.right)
    return (1 if isinstance(s, SGroup) else 0) + count_groups(s.child)


def _replace_nth_hole(s: Sketch, n: int, replacement: Sketch) -> tuple[Sketch, int]:
    """Replace hole number `n` (left-to-right), counting holes seen."""
    if isinstance(s, Hole):
        return (replacement, 1) if n == 0 else (s, 1)
    if isinstance(s, SRef):
        return s, 0
    if isinstance(s, (SJoin, SLeftJoin)):
        left, seen = _replace_nth_hole(s.left, n, replacement)
        right, seen2 = _replace_nth_hole(s.right, n - seen, replacement)
        return type(s)(left, right), seen + seen2
    child, seen = _replace_nth_hole(s.child, n, replacement)
    return type(s)(child), seen


def _hole_parents(s: Sketch, parent: str | None = None) -> list[str | None]:
    """Parent kind of each hole, left-to-right; None for a root hole."""
    if isinstance(s, Hole):
        return [parent]
    if isinstance(s, SRef):
        return []
    kind = kind_of(s)
    if isinstance(s, (SJoin, SLeftJoin)):
        return _hole_parents(s.left, kind) + _hole_parents(s.right, kind)
    return _hole_parents(s.child, kind)


def _fresh(op: type) -> Sketch:
    return op(HOLE, HOLE) if op in (SJoin, SLeftJoin) else op(HOLE)


def expand(s: Sketch) -> list[Sketch]:
    """All one-constructor extensions of `s`, legality-filtered and deduped.

    Each hole is replaced in turn by each operator whose children are fresh
    holes; the parent/child matrix filters illegal placements and mirrored
    Join children collapse to one representative.
    """
    results: list[Sketch] = []
    seen: set[str] = set()
    parents = _hole_parents(s)
    for n, parent in enumerate(parents):
        allowed = _ALL_KINDS if parent is None else ALLOWED_CHILDREN[parent]
        for op in OPERATORS:
            if (_UNARY.get(op) or _BINARY[op]) not in allowed:
                continue
            grown, _ = _replace_nth_hole(s, n, _fresh(op))
            key = canonical_key(grown)
            if key not in seen:
                seen.add(key)
                results.append(grown)
    return results


def assign_tables(s: Sketch, names: Sequence[str]) -> Iterator[Sketch]:
    """Every assignment of input names onto the holes that uses each name.

    Yields nothing when the sketch has fewer holes than there are inputs,
    since such a program could not read every input table.
    """
    k = count_holes(s)
    if k < len(names):
        return
    required = set(names)
    for combo in itertools.product(names, repeat=k):
        if set(combo) != required:
            continue
        assigned = s
        for name in combo:  # holes are consumed left-to-right
            assigned, _ = _replace_nth_hole(assigned, 0, SRef(name))
        yield assigned


class Worklist:
    """Min-size-first sketch frontier.

    Ties within a size class are broken by window count, then group count
    (the two operators whose completion bundles every function over every
    column, making them far more expensive than the rest), then insertion
    order.  This is pure deferral — every pushed sketch is still popped —
    so the search stays complete.
    """

    def __init__(self) -> None:
        self._heap: list[tuple[int, int, int, int, Sketch]] = []
        self._counter = itertools.count()

    def push(self, s: Sketch) -> None:
        heapq.heappush(
            self._heap,
            (sketch_size(s), count_windows(s), count_groups(s),
             next(self._counter), s),
        )

    def pop(self) -> Sketch:
        if not self._heap:
            raise IndexError("pop from an empty worklist")
        return heapq.heappop(self._heap)[4]

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)
