"""Filling in the arguments of a sketch, guided by inclusion constraints.

Given a sketch whose table leaves are bound to input names, `complete`
streams every concrete program the sketch can denote, lazily and in a fixed
deterministic order.  Each operator completes its children first under a
constraint weakened by `propagate`, then enumerates its own arguments and
keeps only candidates whose result still relates to the expected output.

Selections and joins are enumerated over bit arrays: one bit per row (or per
cross-product cell) so that combining primitive tests is integer bitwise
arithmetic, duplicate-semantics candidates collapse by comparing bits, and
selections that keep every row or no row are discarded outright.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .config import SearchConfig
from .relalg import (Agg, AGG_INPUT_TYPES, AggFunc, CmpOp, Comparison, Group,
                     IsNotNull, IsNull, Join, LeftJoin, Order, Predicate,
                     Prim, Program, Project, Select, TableRef, Win, WinFunc,
                     WIN_INPUT_TYPES, Window, apply_distinct, apply_order,
                     apply_project, CONCAT_SEPARATORS, _agg_name,
                     _agg_output_type)
from .relalg import Distinct as RDistinct
from .sketcher import (Hole, Sketch, SDistinct, SGroup, SJoin, SLeftJoin,
                       SOrder, SProject, SRef, SSelect, SWindow)
from .tablecore import (ColRel, ColType, Column, Constant, Phi, PhiMode,
                        SortDir, TOP, Table, _trusted_table, column_matches,
                        phi_holds, sort_cell_key)


class SynthesisTimeout(Exception):
    """The search deadline passed while enumerating candidates."""


@dataclass(frozen=True)
class BitArray:
    """A fixed-width row mask backed by a Python int."""

    bits: int
    size: int

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_full(self) -> bool:
        return self.bits == (1 << self.size) - 1

    def indices(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low


@dataclass(frozen=True)
class PredicateCandidate:
    pred: Predicate
    rows: BitArray


@dataclass
class TraceCounters:
    candidates: int = 0
    leaf_rejections: int = 0
    projection_combos: int = 0


@dataclass
class CompletionContext:
    """Shared state for one synthesis run.

    The caches live exactly as long as the run: `memo` replays subtree
    completions across the many sketches that share a subtree, and the
    per-table caches (keyed by object identity, which is stable because the
    memo keeps every streamed table alive) avoid recomputing predicate and
    window vocabularies for a table seen again under a different parent.
    """

    env: dict[str, Table]
    tout: Table
    constants: tuple[Constant, ...]
    config: SearchConfig = field(default_factory=SearchConfig)
    deadline: float | None = None  # time.monotonic() value
    trace: TraceCounters | None = None
    memo: dict = field(default_factory=dict)
    conds_cache: dict = field(default_factory=dict)
    window_cache: dict = field(default_factory=dict)
    group_cache: dict = field(default_factory=dict)
    agg_cache: dict = field(default_factory=dict)
    join_cache: dict = field(default_factory=dict)

    def check_deadline(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SynthesisTimeout()


# ---------------------------------------------------------------------------
# constraint propagation
# ---------------------------------------------------------------------------

_DISTINCT_REL = {ColRel.EQ_BAG: ColRel.EQ_SET, ColRel.SUB_BAG: ColRel.SUB_SET,
                 ColRel.EQ_SET: ColRel.EQ_SET, ColRel.SUB_SET: ColRel.SUB_SET}
_SELECT_REL = {ColRel.EQ_BAG: ColRel.SUB_BAG, ColRel.EQ_SET: ColRel.SUB_SET,
               ColRel.SUB_BAG: ColRel.SUB_BAG, ColRel.SUB_SET: ColRel.SUB_SET}


def propagate(phi: Phi, kind: str) -> Phi:
    """Weaken a constraint for the child of an operator of the given kind.

    Order preserves it, Distinct forgets multiplicity, Project forgets
    positions, Select weakens equality to inclusion, and the grouping and
    joining operators tell their children nothing.
    """
    if phi.is_top:
        return TOP
    if kind == "Order":
        return phi
    if kind == "Distinct":
        return Phi(phi.mode, _DISTINCT_REL[phi.rel])
    if kind == "Project":
        return Phi(PhiMode.EXISTENTIAL, phi.rel)
    if kind == "Select":
        return Phi(phi.mode, _SELECT_REL[phi.rel])
    return TOP  # Group, Window, Join, LeftJoin


# ---------------------------------------------------------------------------
# sort-key inference
# ---------------------------------------------------------------------------


def sort_keys(tout: Table) -> tuple[tuple[int, SortDir], ...]:
    """Greedily infer a composite ordering the output table obeys.

    The first key must be monotone over all rows; each further key must be
    monotone within every run of equal earlier keys.  Candidates that fail
    to distinguish any rows are skipped, ties go to the lowest column index
    with ascending preferred, and the empty tuple means no ordering evidence.
    """
    groups = [list(range(tout.height))]
    keys: list[tuple[int, SortDir]] = []
    used: set[int] = set()
    while any(len(g) > 1 for g in groups):
        choice = None
        for i in range(tout.width):
            if i in used:
                continue
            cells = [sort_cell_key(tout.rows[r][i]) for r in range(tout.height)]
            for direction in (SortDir.ASC, SortDir.DESC):
                ok = True
                refines = False
                for g in groups:
                    for a, b in zip(g, g[1:]):
                        ka, kb = cells[a], cells[b]
                        if ka != kb:
                            refines = True
                        if (ka > kb) if direction is SortDir.ASC else (ka < kb):
                            ok = False
                            break
                    if not ok:
                        break
                if ok and refines:
                    choice = (i, direction)
                    break
            if choice:
                break
        if choice is None:
            break
        i, _ = choice
        keys.append(choice)
        used.add(i)
        regrouped = []
        for g in groups:  # split each group into runs of equal key values
            run = [g[0]]
            for r in g[1:]:
                if sort_cell_key(tout.rows[r][i]) == sort_cell_key(tout.rows[run[-1]][i]):
                    run.append(r)
                else:
                    regrouped.append(run)
                    run = [r]
            regrouped.append(run)
        groups = regrouped
    return tuple(keys)


# ---------------------------------------------------------------------------
# predicate enumeration
# ---------------------------------------------------------------------------

_ORDERED = (ColType.INT, ColType.DBL, ColType.DATE)
_NUMERIC = (ColType.INT, ColType.DBL)


def _const_applies(const: Constant, ctype: ColType) -> bool:
    if const.ctype is ctype:
        return True
    return const.ctype in _NUMERIC and ctype in _NUMERIC


def _ops_for(ctype: ColType) -> tuple[CmpOp, ...]:
    if ctype in _ORDERED:
        return (CmpOp.EQ, CmpOp.NE, CmpOp.LT, CmpOp.LE, CmpOp.GT, CmpOp.GE)
    return (CmpOp.EQ, CmpOp.NE)


def _prim_bits(t: Table, prim: Prim) -> int:
    """Row mask of a single primitive, one scan per call.

    Reference evaluator: `conds` batches these scans per column and derives
    complement masks by XOR, and the tests check it against this function.
    """
    bits = 0
    if isinstance(prim, IsNull):
        for r, row in enumerate(t.rows):
            if row[prim.col] is None:
                bits |= 1 << r
        return bits
    if isinstance(prim, IsNotNull):
        for r, row in enumerate(t.rows):
            if row[prim.col] is not None:
                bits |= 1 << r
        return bits
    op, w = prim.op, prim.value
    for r, row in enumerate(t.rows):
        v = row[prim.col]
        if v is None:
            continue
        if op is CmpOp.EQ:
            hit = v == w
        elif op is CmpOp.NE:
            hit = v != w
        elif op is CmpOp.LT:
            hit = v < w
        elif op is CmpOp.LE:
            hit = v <= w
        elif op is CmpOp.GT:
            hit = v > w
        else:
            hit = v >= w
        if hit:
            bits |= 1 << r
    return bits


def conds(t: Table, constants: tuple[Constant, ...], config: SearchConfig,
          check: Callable[[], None] | None = None) -> Iterator[PredicateCandidate]:
    """Stream predicate candidates over `t` with their row masks.

    Primitive tests compare a column against a supplied constant of a
    compatible type, or test for NULL.  Prims that keep all rows or none are
    useless building blocks and are dropped immediately; larger clauses and
    conjunctions are deduplicated by row mask, so no two yielded candidates
    select the same rows.
    """
    height = t.height
    full = (1 << height) - 1
    prims: list[tuple[Prim, int]] = []
    for i, col in enumerate(t.columns):
        if check:
            check()
        # One pass per column extracts the values and the NULL mask; the
        # complementary operators (NE, GE, GT, NOT NULL) are derived from the
        # scanned masks by XOR instead of rescanned.
        vals = [row[i] for row in t.rows]
        null_bits = 0
        for r, v in enumerate(vals):
            if v is None:
                null_bits |= 1 << r
        notnull_bits = full ^ null_bits
        col_prims: list[tuple[Prim, int]] = []
        for const in constants:
            if not _const_applies(const, col.ctype):
                continue
            w = const.value
            eq_bits = 0
            for r, v in enumerate(vals):
                if v is not None and v == w:
                    eq_bits |= 1 << r
            col_prims.append((Comparison(i, CmpOp.EQ, w), eq_bits))
            col_prims.append((Comparison(i, CmpOp.NE, w),
                              notnull_bits ^ eq_bits))
            if col.ctype in _ORDERED:
                lt_bits = 0
                for r, v in enumerate(vals):
                    if v is not None and v < w:
                        lt_bits |= 1 << r
                col_prims.append((Comparison(i, CmpOp.LT, w), lt_bits))
                col_prims.append((Comparison(i, CmpOp.LE, w),
                                  lt_bits | eq_bits))
                col_prims.append((Comparison(i, CmpOp.GT, w),
                                  notnull_bits ^ (lt_bits | eq_bits)))
                col_prims.append((Comparison(i, CmpOp.GE, w),
                                  notnull_bits ^ lt_bits))
        col_prims.append((IsNull(i), null_bits))
        col_prims.append((IsNotNull(i), notnull_bits))
        for prim, bits in col_prims:
            if bits != 0 and bits != full:
                prims.append((prim, bits))

    clauses: list[tuple[tuple[Prim, ...], int]] = []
    clause_seen: set[int] = set()
    for prim, bits in prims:
        if bits not in clause_seen:
            clause_seen.add(bits)
            clauses.append(((prim,), bits))
    for size in range(2, config.max_prims_per_clause + 1):
        for combo in itertools.combinations(prims, size):
            if check:
                check()
            bits = 0
            for _, b in combo:
                bits |= b
            if bits == full or bits in clause_seen:
                continue
            clause_seen.add(bits)
            clauses.append((tuple(p for p, _ in combo), bits))

    pred_seen: set[int] = set()
    for size in range(1, config.max_clauses + 1):
        for combo in itertools.combinations(clauses, size):
            if check:
                check()
            bits = full
            for _, b in combo:
                bits &= b
            if bits == 0 or bits == full or bits in pred_seen:
                continue
            pred_seen.add(bits)
            pred = Predicate(tuple(cl for cl, _ in combo))
            yield PredicateCandidate(pred, BitArray(bits, height))


def _mask_rows(t: Table, mask: BitArray) -> Table:
    return _trusted_table(t.columns, tuple(t.rows[r] for r in mask.indices()))


def _conds_cached(ctx: CompletionContext, t: Table) -> list[PredicateCandidate]:
    """Predicate candidates for a table, computed once per table object."""
    hit = ctx.conds_cache.get(id(t))
    if hit is not None and hit[0] is t:
        return hit[1]
    cands = list(conds(t, ctx.constants, ctx.config, ctx.check_deadline))
    ctx.conds_cache[id(t)] = (t, cands)
    return cands


# ---------------------------------------------------------------------------
# grouping and window vocabularies
# ---------------------------------------------------------------------------

_AGG_ORDER = (AggFunc.MAX, AggFunc.MIN, AggFunc.COUNT, AggFunc.SUM,
              AggFunc.AVG, AggFunc.COUNT_DISTINCT, AggFunc.CONCAT_COMMA,
              AggFunc.CONCAT_SPACE, AggFunc.CONCAT_SLASH)


def agg_candidates(t: Table) -> tuple[Agg, ...]:
    """Every typed aggregate over the table's columns, COUNT(*) first."""
    out = [Agg(AggFunc.COUNT_STAR, None)]
    for i, col in enumerate(t.columns):
        for func in _AGG_ORDER:
            if col.ctype in AGG_INPUT_TYPES[func]:
                out.append(Agg(func, i))
    return tuple(out)


_WIN_ORDER = (WinFunc.MAX, WinFunc.MIN, WinFunc.COUNT, WinFunc.SUM)


def _win_targets(t: Table) -> tuple[tuple[WinFunc, int], ...]:
    out = []
    for i, col in enumerate(t.columns):
        for func in _WIN_ORDER:
            if col.ctype in WIN_INPUT_TYPES[func]:
                out.append((func, i))
    return tuple(out)


def _key_subsets(width: int) -> Iterator[tuple[int, ...]]:
    yield ()
    for i in range(width):
        yield (i,)
    for pair in itertools.combinations(range(width), 2):
        yield pair


# ---------------------------------------------------------------------------
# join pair enumeration
# ---------------------------------------------------------------------------


def _joinable(a: ColType, b: ColType) -> bool:
    return a is b or (a in _NUMERIC and b in _NUMERIC)


def _join_value_index(ctx: CompletionContext, t: Table) -> dict:
    """value -> set of columns containing it, cached per table.

    Intersecting two tables' indexes tells which column pairs share any
    value at all, so the per-pair row scans run only for pairs that can
    produce a non-empty join.
    """
    hit = ctx.join_cache.get(id(t))
    if hit is not None and hit[0] is t:
        return hit[1]
    index: dict[object, set[int]] = {}
    for row in t.rows:
        for j, v in enumerate(row):
            if v is not None:
                index.setdefault(v, set()).add(j)
    ctx.join_cache[id(t)] = (t, index)
    return index


def _viable_pairs(ctx: CompletionContext, lt: Table, rt: Table) -> set[tuple[int, int]]:
    lidx = _join_value_index(ctx, lt)
    ridx = _join_value_index(ctx, rt)
    viable: set[tuple[int, int]] = set()
    for v in lidx.keys() & ridx.keys():
        for li in lidx[v]:
            for ri in ridx[v]:
                viable.add((li, ri))
    return viable


def _pair_bits(lt: Table, rt: Table, li: int, ri: int) -> int:
    """Cross-product mask (left-major) of rows agreeing on one column pair.

    Bits are staged in a bytearray because OR-ing single bits into a Python
    int copies the whole integer each time, which is quadratic for big
    cross products.
    """
    index: dict = {}
    for r, row in enumerate(rt.rows):
        v = row[ri]
        if v is None:
            continue
        index.setdefault(v, []).append(r)
    n_right = rt.height
    buf = bytearray((lt.height * n_right + 7) // 8)
    hit = False
    for l, row in enumerate(lt.rows):
        v = row[li]
        if v is None:
            continue
        rows = index.get(v)
        if not rows:
            continue
        hit = True
        base = l * n_right
        for r in rows:
            k = base + r
            buf[k >> 3] |= 1 << (k & 7)
    return int.from_bytes(buf, "little") if hit else 0


def _join_rows(lt: Table, rt: Table, bits: int) -> tuple[tuple, ...]:
    rows = []
    n_right = rt.height
    while bits:
        low = bits & -bits
        idx = low.bit_length() - 1
        l, r = divmod(idx, n_right)
        rows.append(lt.rows[l] + rt.rows[r])
        bits ^= low
    return tuple(rows)


def _leftjoin_rows(lt: Table, rt: Table, bits: int) -> tuple[tuple, ...]:
    rows = []
    n_right = rt.height
    segment_mask = (1 << n_right) - 1
    padding = (None,) * rt.width
    for l, lrow in enumerate(lt.rows):
        segment = (bits >> (l * n_right)) & segment_mask
        if segment == 0:
            rows.append(lrow + padding)
            continue
        while segment:
            low = segment & -segment
            rows.append(lrow + rt.rows[low.bit_length() - 1])
            segment ^= low
    return tuple(rows)


# ---------------------------------------------------------------------------
# completion proper
# ---------------------------------------------------------------------------


def _height_bounds(phi: Phi, tout: Table) -> tuple[int | None, int | None]:
    """Row-count bounds a candidate must satisfy before materializing.

    Bag equality between any candidate column and an output column forces
    the candidate to have exactly the output's height; bag inclusion of an
    output column gives a lower bound.  The set relations allow duplicate
    rows, so they bound nothing.  Returns (minimum, maximum) with None for
    an open side.
    """
    if phi.is_top:
        return None, None
    if phi.rel is ColRel.EQ_BAG:
        return tout.height, tout.height
    if phi.rel is ColRel.SUB_BAG:
        return tout.height, None
    return None, None


def _sketch_ident(s: Sketch) -> str:
    """Verbatim structural identity of an assigned sketch.

    Unlike `canonical_key`, join children are NOT sorted here: under a
    positional constraint Join(a, b) and Join(b, a) produce different column
    orders, so the two orientations must never share a memo entry.
    """
    if isinstance(s, Hole):
        raise ValueError("cannot identify a sketch with unassigned tables")
    if isinstance(s, SRef):
        return f"Ref({s.name})"
    name = type(s).__name__[1:]
    if isinstance(s, (SJoin, SLeftJoin)):
        return f"{name}({_sketch_ident(s.left)},{_sketch_ident(s.right)})"
    return f"{name}({_sketch_ident(s.child)})"


class _MemoStream:
    """Record-and-replay wrapper letting many consumers share one enumeration.

    Each consumer gets its own cursor over the shared item list; the
    underlying source is advanced only when a cursor steps past everything
    recorded so far.  A consumer abandoning iteration leaves the source
    suspended where it was, and the next consumer picks it up from there.
    The source generator is never re-entered: it only runs inside next(),
    and while it runs it consumes streams of strictly smaller subtrees,
    which are necessarily different memo entries.
    """

    __slots__ = ("_source", "_items", "_done")

    def __init__(self, source: Iterator[tuple[Program, Table]]) -> None:
        self._source = source
        self._items: list[tuple[Program, Table]] = []
        self._done = False

    def __iter__(self) -> Iterator[tuple[Program, Table]]:
        i = 0
        while True:
            if i < len(self._items):
                yield self._items[i]
                i += 1
                continue
            if self._done:
                return
            try:
                item = next(self._source)
            except StopIteration:
                self._done = True
                return
            self._items.append(item)
            yield item
            i += 1


def stream(s: Sketch, ctx: CompletionContext, phi: Phi,
           max_width: int | None = None) -> Iterator[tuple[Program, Table]]:
    """Stream (program, result table) pairs completing the sketch under phi.

    Every yielded result satisfies phi against the expected output table and
    is at most `max_width` columns wide (None means unbounded; a positional
    constraint pins the width to the output's, so the bound is derived).
    Completions are memoized per (subtree, constraint, bound) for the
    lifetime of the context, so a subtree shared by many sketches is
    enumerated once.
    """
    ctx.check_deadline()
    if isinstance(s, Hole):
        raise ValueError("cannot complete a sketch with unassigned tables")
    if not phi.is_top and phi.mode is PhiMode.POSITIONAL:
        max_width = ctx.tout.width
    key = (_sketch_ident(s), phi, max_width)
    entry = ctx.memo.get(key)
    if entry is None:
        entry = _MemoStream(_stream_uncached(s, ctx, phi, max_width))
        ctx.memo[key] = entry
    for item in entry:
        ctx.check_deadline()  # replayed items skip the source's own checks
        yield item


def _child_bound(max_width: int | None) -> int | None:
    """Width bound for a child whose parent adds at least one column.

    Group always bundles COUNT(*) plus at least one aggregate per child
    column, Window appends RANK plus at least one function per column, and
    a join partner contributes at least one column — so in each case the
    child must be strictly narrower than the parent's bound.
    """
    return None if max_width is None else max_width - 1


def _stream_uncached(s: Sketch, ctx: CompletionContext, phi: Phi,
                     max_width: int | None) -> Iterator[tuple[Program, Table]]:
    if isinstance(s, Hole):
        raise ValueError("cannot complete a sketch with unassigned tables")
    if isinstance(s, SRef):
        t = ctx.env[s.name]
        if (max_width is None or t.width <= max_width) and phi_holds(phi, ctx.tout, t):
            yield TableRef(s.name), t
        elif ctx.trace:
            ctx.trace.leaf_rejections += 1
        return
    if isinstance(s, SOrder):
        keys = sort_keys(ctx.tout)
        if not keys:
            return
        for p, t in stream(s.child, ctx, propagate(phi, "Order"), max_width):
            yield Order(p, keys), apply_order(t, keys)
        return
    if isinstance(s, SDistinct):
        for p, t in stream(s.child, ctx, propagate(phi, "Distinct"), max_width):
            out = apply_distinct(t)
            if phi_holds(phi, ctx.tout, out):
                yield RDistinct(p), out
        return
    if isinstance(s, SProject):
        yield from _stream_project(s, ctx, phi)
        return
    if isinstance(s, SSelect):
        lo, hi = _height_bounds(phi, ctx.tout)
        for p, t in stream(s.child, ctx, propagate(phi, "Select"), max_width):
            for cand in _conds_cached(ctx, t):
                kept = cand.rows.bits.bit_count()
                if (lo is not None and kept < lo) or (hi is not None and kept > hi):
                    continue
                out = _mask_rows(t, cand.rows)
                if phi_holds(phi, ctx.tout, out):
                    yield Select(p, cand.pred), out
        return
    if isinstance(s, SGroup):
        yield from _stream_group(s, ctx, phi, max_width)
        return
    if isinstance(s, SWindow):
        yield from _stream_window(s, ctx, phi, max_width)
        return
    if isinstance(s, SJoin):
        yield from _stream_join(s, ctx, phi, False, max_width)
        return
    if isinstance(s, SLeftJoin):
        yield from _stream_join(s, ctx, phi, True, max_width)
        return
    raise ValueError(f"unknown sketch node {type(s).__name__}")


def complete(s: Sketch, ctx: CompletionContext, phi: Phi) -> Iterator[Program]:
    for p, _ in stream(s, ctx, phi):
        yield p


def _stream_project(s: SProject, ctx: CompletionContext, phi: Phi) -> Iterator[tuple[Program, Table]]:
    # The legality matrix keeps Project at the order-preserving top of a
    # program, so the constraint here is always positional.
    assert phi.mode is PhiMode.POSITIONAL, "Project completed under non-positional phi"
    rel = phi.rel
    assert rel is not None
    child_phi = propagate(phi, "Project")
    equality = rel in (ColRel.EQ_BAG, ColRel.EQ_SET)
    for p, t in stream(s.child, ctx, child_phi):
        if ctx.config.projection_mode == "baseline":
            yield from _project_baseline(p, t, ctx, phi)
            continue
        matches = column_matches(t, ctx.tout, rel)
        if any(not m for m in matches):
            continue
        budget = ctx.config.max_projection_combos
        for combo in itertools.product(*matches):
            ctx.check_deadline()
            budget -= 1
            if budget < 0:
                break
            if ctx.trace:
                ctx.trace.projection_combos += 1
            out = apply_project(t, combo)
            # With an equality relation the per-column matches already
            # guarantee phi positionally; inclusion relations re-check.
            if equality or phi_holds(phi, ctx.tout, out):
                yield Project(p, combo), out


def _project_baseline(p: Program, t: Table, ctx: CompletionContext,
                      phi: Phi) -> Iterator[tuple[Program, Table]]:
    """Brute-force projection completion kept as an oracle and benchmark.

    Tries every assignment of a child column to every output position — the
    full |child columns| ** |output columns| space, the same candidate space
    the fast path draws from — and keeps the assignments whose materialized
    result satisfies phi.  Deliberately naive; the deadline is the only
    thing bounding it.
    """
    width = t.width
    for cols in itertools.product(range(width), repeat=ctx.tout.width):
        ctx.check_deadline()
        if ctx.trace:
            ctx.trace.projection_combos += 1
        out = apply_project(t, cols)
        if phi_holds(phi, ctx.tout, out):
            yield Project(p, cols), out


def _agg_vocab(ctx: CompletionContext, t: Table) -> tuple[
        tuple[Agg, ...], tuple[Column, ...], tuple[tuple[int, tuple[AggFunc, ...]], ...]]:
    """The aggregate bundle of a table with its schema, cached per table.

    Returns (aggs, agg columns, per-column function lists); neither depends
    on the grouping keys, so one computation serves every keyset.
    """
    hit = ctx.agg_cache.get(id(t))
    if hit is not None and hit[0] is t:
        return hit[1], hit[2], hit[3]
    per_col = tuple(
        (i, funcs)
        for i, col in enumerate(t.columns)
        if (funcs := tuple(f for f in _AGG_ORDER if col.ctype in AGG_INPUT_TYPES[f]))
    )
    aggs = agg_candidates(t)
    schema = tuple(
        Column(_agg_name(a, t),
               _agg_output_type(a.func, None if a.col is None else t.columns[a.col].ctype))
        for a in aggs
    )
    ctx.agg_cache[id(t)] = (t, aggs, schema, per_col)
    return aggs, schema, per_col


def _group_bundle(ctx: CompletionContext, t: Table, keys: tuple[int, ...]) -> Table:
    """Evaluate the full aggregate bundle for one grouping in a single pass.

    Produces exactly what evaluating each aggregate separately would; one
    value scan per (group, column) feeds every function on that column.
    Results are cached per (table, keys) for the run, so re-enumerations of
    the same subtree under a different constraint pay nothing.
    """
    cache_key = (id(t), keys)
    hit = ctx.group_cache.get(cache_key)
    if hit is not None and hit[0] is t:
        return hit[1]
    _aggs, agg_schema, per_col = _agg_vocab(ctx, t)
    groups: dict[tuple, list[tuple]] = {}
    for row in t.rows:  # first-occurrence order of each key tuple
        groups.setdefault(tuple(row[k] for k in keys), []).append(row)
    if not keys and not groups:
        groups[()] = []  # a keyless aggregate always produces one row
    out_rows = []
    for gkey, rows in groups.items():
        cells = list(gkey)
        cells.append(len(rows))  # COUNT(*)
        for i, funcs in per_col:
            present = [v for r in rows if (v := r[i]) is not None]
            n = len(present)
            for f in funcs:
                if f is AggFunc.COUNT:
                    cells.append(n)
                elif f is AggFunc.COUNT_DISTINCT:
                    cells.append(len(set(present)))
                elif n == 0:
                    cells.append(None)
                elif f is AggFunc.MAX:
                    cells.append(max(present))
                elif f is AggFunc.MIN:
                    cells.append(min(present))
                elif f is AggFunc.SUM:
                    cells.append(sum(present))
                elif f is AggFunc.AVG:
                    cells.append(sum(present) / n)
                else:
                    cells.append(CONCAT_SEPARATORS[f].join(present))
        out_rows.append(tuple(cells))
    schema = tuple(t.columns[k] for k in keys) + agg_schema
    out = _trusted_table(schema, tuple(out_rows))
    ctx.group_cache[cache_key] = (t, out)
    return out


def _stream_group(s: SGroup, ctx: CompletionContext, phi: Phi,
                  max_width: int | None) -> Iterator[tuple[Program, Table]]:
    positional = not phi.is_top and phi.mode is PhiMode.POSITIONAL
    lo, hi = _height_bounds(phi, ctx.tout)
    for p, t in stream(s.child, ctx, TOP, _child_bound(max_width)):
        aggs, _, _ = _agg_vocab(ctx, t)
        width = len(aggs)  # plus the keys, added per keyset below
        for keys in _key_subsets(t.width):
            # a positional constraint fixes the output width in advance
            if positional and len(keys) + width != ctx.tout.width:
                continue
            if max_width is not None and len(keys) + width > max_width:
                continue
            ctx.check_deadline()
            # counting groups is far cheaper than evaluating the aggregates
            groups = len({tuple(r[k] for k in keys) for r in t.rows}) if keys else 1
            if (lo is not None and groups < lo) or (hi is not None and groups > hi):
                continue
            out = _group_bundle(ctx, t, keys)
            if phi_holds(phi, ctx.tout, out):
                yield Group(p, keys, aggs), out


def _window_bundle(ctx: CompletionContext, t: Table,
                   targets: tuple[tuple[WinFunc, int], ...],
                   partition: tuple[int, ...], order_col: int,
                   direction: SortDir) -> Table:
    """Evaluate every window target plus RANK in one partition-and-sort pass.

    Produces exactly what evaluating the bundle one window column at a time
    would: the frame is the SQL default (partition start through the current
    row's order-key peers), so a cumulative accumulator per target, advanced
    one peer run at a time, replaces a fresh sort and frame scan per
    function.  Results are cached per (table, specification) for the run.
    """
    key = (id(t), partition, order_col, direction)
    hit = ctx.window_cache.get(key)
    if hit is not None and hit[0] is t:
        return hit[1]
    n_targets = len(targets)
    results: list[list] = [[None] * t.height for _ in range(n_targets + 1)]
    partitions: dict[tuple, list[int]] = {}
    for r, row in enumerate(t.rows):
        partitions.setdefault(tuple(row[i] for i in partition), []).append(r)
    order_keys = [sort_cell_key(row[order_col]) for row in t.rows]
    for indices in partitions.values():
        ordered = sorted(indices, key=order_keys.__getitem__,
                         reverse=direction is SortDir.DESC)
        counts = [0] * n_targets           # non-null values absorbed so far
        states: list = [None] * n_targets  # running max / min / sum
        start = 0
        while start < len(ordered):
            end = start
            key_val = order_keys[ordered[start]]
            while end + 1 < len(ordered) and order_keys[ordered[end + 1]] == key_val:
                end += 1
            for r in ordered[start:end + 1]:  # absorb the whole peer run
                row = t.rows[r]
                for j, (func, col) in enumerate(targets):
                    v = row[col]
                    if v is None:
                        continue
                    counts[j] += 1
                    st = states[j]
                    if st is None:
                        states[j] = v
                    elif func is WinFunc.MAX:
                        if v > st:
                            states[j] = v
                    elif func is WinFunc.MIN:
                        if v < st:
                            states[j] = v
                    elif func is WinFunc.SUM:
                        states[j] = st + v
            rank = start + 1
            for r in ordered[start:end + 1]:
                for j, (func, _) in enumerate(targets):
                    results[j][r] = counts[j] if func is WinFunc.COUNT else states[j]
                results[n_targets][r] = rank
            start = end + 1
    schema = t.columns + tuple(
        Column(f"{func.value}({t.columns[col].name}) over",
               ColType.INT if func is WinFunc.COUNT else t.columns[col].ctype)
        for func, col in targets
    ) + (Column("rank()", ColType.INT),)
    rows = tuple(
        row + tuple(res[r] for res in results)
        for r, row in enumerate(t.rows)
    )
    out = _trusted_table(schema, rows)
    ctx.window_cache[key] = (t, out)
    return out


def _stream_window(s: SWindow, ctx: CompletionContext, phi: Phi,
                   max_width: int | None) -> Iterator[tuple[Program, Table]]:
    positional = not phi.is_top and phi.mode is PhiMode.POSITIONAL
    lo, hi = _height_bounds(phi, ctx.tout)
    for p, t in stream(s.child, ctx, TOP, _child_bound(max_width)):
        # window functions never change the row count
        if (lo is not None and t.height < lo) or (hi is not None and t.height > hi):
            continue
        targets = _win_targets(t)
        bundle_width = t.width + len(targets) + 1  # all functions plus rank
        if positional and bundle_width != ctx.tout.width:
            continue
        if max_width is not None and bundle_width > max_width:
            continue
        for partition in _key_subsets(t.width):
            for order_col in range(t.width):
                for direction in (SortDir.ASC, SortDir.DESC):
                    ctx.check_deadline()
                    out = _window_bundle(ctx, t, targets, partition,
                                         order_col, direction)
                    if phi_holds(phi, ctx.tout, out):
                        wins = tuple(
                            Win(func, col, partition, order_col, direction)
                            for func, col in targets
                        ) + (Win(WinFunc.RANK, None, partition,
                                 order_col, direction),)
                        yield Window(p, wins), out


def _stream_join(s, ctx: CompletionContext, phi: Phi, left_outer: bool,
                 max_width: int | None) -> Iterator[tuple[Program, Table]]:
    positional = not phi.is_top and phi.mode is PhiMode.POSITIONAL
    max_pairs = 1 if left_outer else ctx.config.max_join_pairs
    # The row count of an inner join is the number of set condition bits,
    # so phi's height bounds prune before any rows are materialized.  An
    # outer join also revives unmatched left rows, which the bit count
    # alone does not reveal, so it is exempt.
    lo, hi = (None, None) if left_outer else _height_bounds(phi, ctx.tout)
    child_bound = _child_bound(max_width)
    for p1, t1 in stream(s.left, ctx, TOP, child_bound):
        for p2, t2 in stream(s.right, ctx, TOP, child_bound):
            if positional and t1.width + t2.width != ctx.tout.width:
                continue
            if max_width is not None and t1.width + t2.width > max_width:
                continue
            viable = _viable_pairs(ctx, t1, t2)
            singles: list[tuple[tuple[int, int], int]] = []
            for li in range(t1.width):
                for ri in range(t2.width):
                    if not _joinable(t1.columns[li].ctype, t2.columns[ri].ctype):
                        continue
                    ctx.check_deadline()
                    # pairs sharing no value join empty: skip the row scan
                    bits = _pair_bits(t1, t2, li, ri) if (li, ri) in viable else 0
                    if bits == 0 and not left_outer:
                        continue  # an empty inner join never helps
                    singles.append(((li, ri), bits))
            seen: set[int] = set()
            for size in range(1, max_pairs + 1):
                for combo in itertools.combinations(singles, size):
                    ctx.check_deadline()
                    bits = combo[0][1]
                    for _, b in combo[1:]:
                        bits &= b
                    if (bits == 0 and not left_outer) or bits in seen:
                        continue
                    seen.add(bits)
                    matches = bits.bit_count()
                    if (lo is not None and matches < lo) or (hi is not None and matches > hi):
                        continue
                    pairs = tuple(pair for pair, _ in combo)
                    if left_outer:
                        rows = _leftjoin_rows(t1, t2, bits)
                        out = _trusted_table(t1.columns + t2.columns, rows)
                        if phi_holds(phi, ctx.tout, out):
                            yield LeftJoin(p1, p2, pairs[0]), out
                    else:
                        rows = _join_rows(t1, t2, bits)
                        out = _trusted_table(t1.columns + t2.columns, rows)
                        if phi_holds(phi, ctx.tout, out):
                            yield Join(p1, p2, pairs), out
