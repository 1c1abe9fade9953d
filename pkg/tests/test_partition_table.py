import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lai.core import InvariantViolation, PreconditionError, make_column
from lai.partition_table import Gap, PartitionEntry, PartitionTable


def table_of(column_len, *entries):
    t = PartitionTable(column_len)
    for lo_key, hi_key, lo_pos, hi_pos in entries:
        t.insert(PartitionEntry(lo_key, hi_key, lo_pos, hi_pos))
    return t


def small_table():
    # 14 positions: [6..8] at 3..5, [9..13] at 6..10, [14..19] at 11..12
    return table_of(14, (9, 13, 6, 10), (6, 8, 3, 5), (14, 19, 11, 12))


def test_search_sorted_partitions():
    t = table_of(14, (9, 13, 4, 8))
    assert t.search_sorted_partitions(10, 12) == (0, 0)
    assert PartitionTable(14).search_sorted_partitions(1, 5) == (None, None)
    assert small_table().search_sorted_partitions(7, 16) == (0, 2)
    assert small_table().search_sorted_partitions(2, 20) == (None, None)
    with pytest.raises(PreconditionError):
        t.search_sorted_partitions(5, 4)


def test_search_gap():
    assert PartitionTable(14).search_gap(3) == Gap(0, 13)
    t = table_of(14, (9, 13, 4, 9))
    assert t.search_gap(2) == Gap(0, 3)
    assert t.search_gap(20) == Gap(10, 13)
    with pytest.raises(PreconditionError):
        t.search_gap(10)


def test_search_gap_empty_between_adjacent_entries():
    t = table_of(10, (0, 4, 0, 4), (6, 9, 5, 9))
    gap = t.search_gap(5)
    assert gap.empty and gap.size == 0


def test_get_all_gaps():
    assert table_of(10, (0, 2, 0, 4), (3, 9, 5, 9)).get_all_gaps(0, 9) == []
    t = table_of(10, (10, 12, 0, 2), (20, 22, 5, 7))
    assert t.get_all_gaps(0, 9) == [Gap(3, 4), Gap(8, 9)]
    assert t.get_all_gaps(4, 8) == [Gap(4, 4), Gap(8, 8)]
    assert t.get_all_gaps(5, 4) == []


def test_two_gaps_between_three_entries():
    t = table_of(30, (0, 5, 0, 5), (10, 15, 10, 15), (20, 25, 20, 25))
    assert t.get_all_gaps(6, 19) == [Gap(6, 9), Gap(16, 19)]


def test_insert_keeps_key_order():
    t = small_table()
    assert [(e.lo_key, e.hi_key) for e in t] == [(6, 8), (9, 13), (14, 19)]
    assert len(table_of(5, (1, 2, 0, 1))) == 1


def test_insert_rejects_overlap():
    t = table_of(20, (5, 9, 5, 9))
    for bad in [(7, 12, 10, 12), (0, 5, 0, 4), (0, 3, 4, 6), (10, 12, 8, 12)]:
        with pytest.raises(InvariantViolation):
            t.insert(PartitionEntry(*bad))
    with pytest.raises(InvariantViolation):
        t.insert(PartitionEntry(3, 2, 0, 1))
    with pytest.raises(InvariantViolation):
        t.insert(PartitionEntry(30, 31, 19, 20))


def test_random_disjoint_inserts_come_out_sorted():
    rng = random.Random(4)
    cuts = sorted(rng.sample(range(1, 10_000), 199))
    bounds = list(zip([0] + cuts, cuts + [10_000]))[::2]
    intervals = [(lo, hi - 1) for lo, hi in bounds]
    order = intervals[:]
    rng.shuffle(order)
    t = PartitionTable(10_000)
    for lo, hi in order:
        t.insert(PartitionEntry(lo * 3, hi * 3, lo, hi))
    assert [(e.lo_pos, e.hi_pos) for e in t] == intervals
    t.check_invariants()


def test_accessors():
    t = small_table()
    assert t.get_boundaries(1) == (6, 10)
    assert t.get_learned_index(0) is None
    for bad in (-1, 3):
        with pytest.raises(PreconditionError):
            t.get_boundaries(bad)
        with pytest.raises(PreconditionError):
            t.get_learned_index(bad)
    assert [e.model_id for e in t] == [1, 0, 2]


def test_fully_indexed():
    assert not PartitionTable(5).is_fully_indexed()
    assert table_of(5, (0, 4, 0, 4)).is_fully_indexed()
    assert not table_of(5, (0, 1, 0, 1), (3, 4, 3, 4)).is_fully_indexed()


def test_overlap_query():
    t = table_of(30, (10, 15, 10, 15))
    assert t.is_overlap_query(5, 20)
    assert not t.is_overlap_query(16, 20)
    assert not t.is_overlap_query(7, 7)
    # touching an endpoint is not strictly inside
    assert not t.is_overlap_query(3, 10)
    assert not t.is_overlap_query(15, 25)


def test_dump_format():
    assert small_table().dump().splitlines() == ["6,8,3,5,1", "9,13,6,10,0", "14,19,11,12,2"]


def test_check_invariants_against_column():
    col = make_column([1, 0, 2, 3, 4, 9, 7])
    t = table_of(7, (2, 4, 2, 4))
    t.check_invariants(col)
    col[5] = 3  # a gap key now falls inside the entry's key range
    with pytest.raises(InvariantViolation):
        t.check_invariants(col)


@st.composite
def disjoint_entries(draw):
    n = draw(st.integers(1, 60))
    cuts = sorted(draw(st.sets(st.integers(0, n), max_size=12)) | {0, n})
    spans = [(a, b - 1) for a, b in zip(cuts, cuts[1:]) if b > a]
    chosen = [s for s in spans if draw(st.booleans())]
    return n, chosen


@given(disjoint_entries(), st.data())
def test_gaps_are_the_interval_complement(case, data):
    n, spans = case
    t = PartitionTable(n)
    for lo, hi in data.draw(st.permutations(spans)):
        t.insert(PartitionEntry(lo, hi, lo, hi))
    p1 = data.draw(st.integers(0, n - 1))
    p2 = data.draw(st.integers(p1, n - 1))
    covered = np.zeros(n, dtype=bool)
    for lo, hi in spans:
        covered[lo : hi + 1] = True
    expected, start = [], None
    for p in range(p1, p2 + 2):
        free = p <= p2 and not covered[p]
        if free and start is None:
            start = p
        elif not free and start is not None:
            expected.append(Gap(start, p - 1))
            start = None
    assert t.get_all_gaps(p1, p2) == expected
    assert t.covered == int(covered.sum())
    assert t.is_fully_indexed() == bool(covered.all())
    t.check_invariants()
