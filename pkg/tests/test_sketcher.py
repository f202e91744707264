"""Sketch shapes, legality-filtered expansion, assignment, and ordering."""

from __future__ import annotations

import itertools

import pytest

from sqlsynth.sketcher import (ALLOWED_CHILDREN, HOLE, SDistinct, SGroup,
                               SJoin, SLeftJoin, SOrder, SProject, SRef,
                               SSelect, SWindow, Worklist, assign_tables,
                               canonical_key, contains_select, count_groups,
                               count_holes, count_windows, expand, kind_of,
                               matrix_respected, sketch_size)

ALL_KINDS = frozenset({"Order", "Distinct", "Project", "Select", "Group",
                       "Window", "Join", "LeftJoin", "Table"})

# Independent transcription of the parent/child legality rules: an order is
# only meaningful at the very top, order-insensitive operators refuse
# order-producing children, and column-shaping operators stack in one spot.
FORBIDDEN_CHILDREN = {
    "Order": {"Order"},
    "Distinct": {"Order", "Distinct"},
    "Project": {"Order", "Distinct", "Project"},
    "Select": {"Order", "Distinct", "Project", "Select"},
    "Group": {"Order", "Distinct", "Project"},
    "Window": {"Order", "Distinct", "Project"},
    "Join": {"Order", "Distinct", "Project", "Select"},
    "LeftJoin": {"Order", "Distinct", "Project"},
}


def test_legality_table_matches_transcription():
    assert set(ALLOWED_CHILDREN) == set(FORBIDDEN_CHILDREN)
    for parent, forbidden in FORBIDDEN_CHILDREN.items():
        assert ALLOWED_CHILDREN[parent] == ALL_KINDS - forbidden


def test_group_under_group_is_legal():
    assert matrix_respected(SGroup(SGroup(HOLE)))


def test_order_never_nested():
    assert not matrix_respected(SOrder(SOrder(HOLE)))
    assert not matrix_respected(SDistinct(SOrder(HOLE)))
    assert not matrix_respected(SJoin(SSelect(HOLE), HOLE))


# ---------------------------------------------------------------------------
# sizes and structural helpers
# ---------------------------------------------------------------------------


def _fixture_sketch():
    # Order(Project(Select(Join(Group(?), ?)))) with two leaf holes
    return SOrder(SProject(SSelect(SJoin(SGroup(HOLE), HOLE))))


def test_sketch_size_window_costs_two():
    assert sketch_size(HOLE) == 0
    assert sketch_size(SRef("t")) == 0
    assert sketch_size(SOrder(HOLE)) == 1
    assert sketch_size(SWindow(HOLE)) == 2
    assert sketch_size(_fixture_sketch()) == 5
    assert sketch_size(SJoin(SWindow(HOLE), SGroup(HOLE))) == 4


def test_counting_helpers():
    s = SJoin(SWindow(SGroup(HOLE)), SSelect(SGroup(HOLE)))
    assert count_holes(s) == 2
    assert count_windows(s) == 1
    assert count_groups(s) == 2
    assert contains_select(s)
    assert not contains_select(SOrder(HOLE))


def test_kind_of():
    assert kind_of(SOrder(HOLE)) == "Order"
    assert kind_of(SLeftJoin(HOLE, HOLE)) == "LeftJoin"
    assert kind_of(HOLE) == "Table"
    assert kind_of(SRef("t")) == "Table"


def test_canonical_key_join_symmetric():
    a, b = SGroup(HOLE), SSelect(HOLE)
    assert canonical_key(SJoin(a, b)) == canonical_key(SJoin(b, a))
    assert canonical_key(SLeftJoin(a, b)) != canonical_key(SLeftJoin(b, a))
    assert canonical_key(SOrder(HOLE)) != canonical_key(SDistinct(HOLE))


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------


def test_expand_root_offers_every_operator():
    kinds = {kind_of(s) for s in expand(HOLE)}
    assert kinds == ALL_KINDS - {"Table"}


def test_expand_respects_legality_everywhere():
    frontier = [HOLE]
    seen = set()
    for _ in range(3):  # BFS three levels deep
        nxt = []
        for s in frontier:
            for grown in expand(s):
                key = canonical_key(grown)
                if key in seen:
                    continue
                seen.add(key)
                assert matrix_respected(grown), key
                nxt.append(grown)
        frontier = nxt
    assert len(seen) > 100  # the space actually branches


def test_expand_grows_size_by_one_or_two():
    for s in (HOLE, SOrder(HOLE), SJoin(SGroup(HOLE), HOLE)):
        base = sketch_size(s)
        for grown in expand(s):
            delta = sketch_size(grown) - base
            assert delta in (1, 2)
            assert delta == (2 if count_windows(grown) > count_windows(s)
                             else 1)
            assert count_holes(grown) >= count_holes(s)


def test_expand_under_each_parent_matches_table():
    parents = {
        "Order": SOrder(HOLE), "Distinct": SDistinct(HOLE),
        "Project": SProject(HOLE), "Select": SSelect(HOLE),
        "Group": SGroup(HOLE), "Window": SWindow(HOLE),
        "Join": SJoin(HOLE, SRef("t")), "LeftJoin": SLeftJoin(HOLE, SRef("t")),
    }
    for parent_kind, sketch in parents.items():
        offered = set()
        for grown in expand(sketch):
            child = (grown.left if isinstance(grown, (SJoin, SLeftJoin))
                     else grown.child)
            offered.add(kind_of(child))
        assert offered == ALL_KINDS - FORBIDDEN_CHILDREN[parent_kind] - {"Table"}, \
            parent_kind


def test_expand_dedupes_mirrored_join_children():
    grown = expand(SJoin(HOLE, HOLE))
    keys = [canonical_key(s) for s in grown]
    assert len(keys) == len(set(keys))
    # replacing the left or the right hole with Group is the same sketch
    group_joins = [s for s in grown
                   if isinstance(s, SJoin)
                   and {kind_of(s.left), kind_of(s.right)} == {"Group", "Table"}]
    assert len(group_joins) == 1


# ---------------------------------------------------------------------------
# table assignment
# ---------------------------------------------------------------------------


def test_assign_single_hole_single_name():
    out = list(assign_tables(HOLE, ["t"]))
    assert out == [SRef("t")]


def test_assign_two_holes_one_name_reuses_it():
    out = list(assign_tables(SJoin(HOLE, HOLE), ["t"]))
    assert out == [SJoin(SRef("t"), SRef("t"))]


def test_assign_requires_every_name():
    # one hole cannot read two inputs: no assignment at all
    assert list(assign_tables(SOrder(HOLE), ["a", "b"])) == []
    out = list(assign_tables(SJoin(HOLE, HOLE), ["a", "b"]))
    assert out == [SJoin(SRef("a"), SRef("b")), SJoin(SRef("b"), SRef("a"))]


def test_assign_three_holes_two_names_is_onto():
    s = SJoin(SJoin(HOLE, HOLE), HOLE)
    out = list(assign_tables(s, ["a", "b"]))
    assert len(out) == 6  # 2^3 total maps minus the two constant ones
    for assigned in out:
        names = set()

        def collect(node):
            if isinstance(node, SRef):
                names.add(node.name)
            elif isinstance(node, SJoin):
                collect(node.left)
                collect(node.right)

        collect(assigned)
        assert names == {"a", "b"}


def test_assign_leaves_no_holes():
    for assigned in assign_tables(SJoin(SGroup(HOLE), HOLE), ["x"]):
        assert count_holes(assigned) == 0


# ---------------------------------------------------------------------------
# worklist ordering
# ---------------------------------------------------------------------------


def test_worklist_orders_by_size_then_cost_then_fifo():
    wl = Worklist()
    small_a = SOrder(HOLE)            # size 1, no windows/groups
    small_b = SSelect(HOLE)           # size 1, pushed after small_a
    grouped = SGroup(HOLE)            # size 1, one group: after both
    windowed = SWindow(HOLE)          # size 2: last despite early push
    wl.push(windowed)
    wl.push(grouped)
    wl.push(small_a)
    wl.push(small_b)
    assert [wl.pop() for _ in range(4)] == [small_a, small_b, grouped,
                                            windowed]
    assert not wl


def test_worklist_defers_windows_before_groups_within_a_size():
    wl = Worklist()
    two_plain = SSelect(SGroup(HOLE))   # size 2, 1 group
    two_window = SWindow(HOLE)          # size 2, 1 window
    plain = SDistinct(SSelect(HOLE))    # size 2, neither
    wl.push(two_window)
    wl.push(two_plain)
    wl.push(plain)
    assert [wl.pop() for _ in range(3)] == [plain, two_plain, two_window]


def test_worklist_sizes_never_decrease():
    wl = Worklist()
    sketches = list(itertools.islice(
        (g for s in expand(HOLE) for g in [s] + expand(s)), 40))
    for s in sketches:
        wl.push(s)
    popped = [wl.pop() for _ in range(len(wl))]
    sizes = [sketch_size(s) for s in popped]
    assert sizes == sorted(sizes)


def test_worklist_pop_empty_raises():
    with pytest.raises(IndexError):
        Worklist().pop()
