"""Learned adaptive index: cracking driven by queries, one learned model per sorted partition."""

from __future__ import annotations

import time
from bisect import bisect_right

import numpy as np

from lai.core import CaseKind, QueryStats, check_query, make_column
from lai.crack import crack, crack_three
from lai.learned_model import DEFAULT_EPSILON, build
from lai.learned_sort import DEFAULT_TAU, SortCounters, adaptive_sort
from lai.partition_table import Gap, PartitionEntry, PartitionTable


class LaiEngine:
    """Answers inclusive range queries while sorting and indexing the column piece by piece.

    Every query returns a position range ``(lo, hi)`` such that
    ``column[lo..=hi]`` is exactly the set of keys in ``[l, h]``; an empty
    result is ``(p, p - 1)``.
    """

    name = "lai"

    def __init__(self, column, epsilon: int = DEFAULT_EPSILON, tau: int = DEFAULT_TAU, copy: bool = True):
        self.column = make_column(column) if copy else column
        self._keys = memoryview(self.column)
        self.table = PartitionTable(len(self.column))
        self.epsilon = epsilon
        self.tau = tau
        self.stats_log: list[QueryStats] = []
        self.sort_counters = SortCounters()
        self.writes = 0  # elements reordered by cracks and sorts

    def __len__(self) -> int:
        return len(self.column)

    # -- public query surface -------------------------------------------------

    def query(self, l: int, h: int) -> tuple[int, int]:
        check_query(l, h)
        t0 = time.perf_counter_ns()
        case, (lo, hi) = self._execute(l, h)
        latency = time.perf_counter_ns() - t0
        self.stats_log.append(QueryStats(len(self.stats_log), case, latency, lo, hi))
        return lo, hi

    def fetch(self, lo: int, hi: int) -> np.ndarray:
        return self.column[lo : hi + 1].copy()

    def results(self, l: int, h: int) -> np.ndarray:
        return self.fetch(*self.query(l, h))

    def prebuild(self, l: int, h: int) -> bool:
        """Run the index-building path for ``[l, h]`` without logging; True if anything changed."""
        check_query(l, h)
        before = (self.writes, len(self.table))
        self._execute(l, h)
        return (self.writes, len(self.table)) != before

    def classify(self, l: int, h: int) -> CaseKind:
        check_query(l, h)
        t_l, t_h = self.table.search_sorted_partitions(l, h)
        if t_l is None and t_h is None:
            return CaseKind.CASE1I if self.table.is_overlap_query(l, h) else CaseKind.CASE1II
        if t_l == t_h:
            return CaseKind.CASE2
        if t_l is not None and t_h is not None:
            return CaseKind.CASE3
        if t_l is not None:
            return CaseKind.CASE4
        return CaseKind.CASE5

    def _execute(self, l: int, h: int) -> tuple[CaseKind, tuple[int, int]]:
        table = self.table
        # fast path for case 2: one bisect finds the only entry that could hold both ends
        i = bisect_right(table._lo_keys, h) - 1
        if i >= 0 and table._lo_keys[i] <= l and h <= table._hi_keys[i]:
            # get_results_from_same_bound, inlined: this is the converged hot path
            e = table[i]
            keys = self._keys
            lo = e.lo_pos if l <= e.lo_key else e.model.find_unchecked(l, keys)
            hi = e.hi_pos if h >= e.hi_key else e.model.find_unchecked(h + 1, keys) - 1
            return CaseKind.CASE2, (lo, hi)
        t_l, t_h = self.table.search_sorted_partitions(l, h)
        if t_l is None and t_h is None:
            if self.table.is_overlap_query(l, h):
                return CaseKind.CASE1I, self.execute_overlap_query(l, h)
            return CaseKind.CASE1II, self.build_index(l, h)
        if t_l == t_h:
            return CaseKind.CASE2, self.get_results_from_same_bound(l, h, t_l)
        if t_l is not None and t_h is not None:
            return CaseKind.CASE3, self.get_results_from_different_bound(l, h, t_l, t_h)
        if t_l is not None:
            return CaseKind.CASE4, self.crack_for_high_value(l, h, t_l)
        return CaseKind.CASE5, self.crack_for_low_value(l, h, t_h)

    # -- per-case algorithms ----------------------------------------------------

    def build_index(self, l: int, h: int) -> tuple[int, int]:
        """Case 1(ii): crack the gap holding ``l`` and ``h`` into an indexed middle."""
        gap = self.table.search_gap(l)
        if gap.empty:
            return gap.lo_pos, gap.lo_pos - 1
        s_l, s_h = crack_three(self.column, gap.lo_pos, gap.hi_pos, l, h)
        self.writes += gap.size
        self._index_region(s_l, s_h)
        return s_l, s_h

    def execute_overlap_query(self, l: int, h: int) -> tuple[int, int]:
        """Case 1(i): both ends in gaps with sorted partitions in between."""
        gap_l = self.table.search_gap(l)
        gap_h = self.table.search_gap(h)
        l_pos = self._crack_low_end(gap_l, l)
        h_pos = self._crack_high_end(gap_h, h)
        self.build_index_for_all_gaps(gap_l.hi_pos + 1, gap_h.lo_pos - 1)
        return l_pos, h_pos

    def build_index_for_all_gaps(self, p1: int, p2: int) -> None:
        for gap in self.table.get_all_gaps(p1, p2):
            region = self.column[gap.lo_pos : gap.hi_pos + 1]
            # cracking a whole gap on its own min and max moves nothing
            self.build_index(int(region.min()), int(region.max()))

    def get_results_from_same_bound(self, l: int, h: int, idx: int) -> tuple[int, int]:
        """Case 2: both ends inside one sorted partition; no mutation."""
        entry = self.table[idx]
        return self._lower_end(entry, l), self._upper_end(entry, h)

    def get_results_from_different_bound(self, l: int, h: int, idx_l: int, idx_h: int) -> tuple[int, int]:
        """Case 3: ends in two sorted partitions; index every gap between them."""
        entry_l, entry_h = self.table[idx_l], self.table[idx_h]
        l_pos = self._lower_end(entry_l, l)
        h_pos = self._upper_end(entry_h, h)
        self.build_index_for_all_gaps(entry_l.hi_pos + 1, entry_h.lo_pos - 1)
        return l_pos, h_pos

    def crack_for_high_value(self, l: int, h: int, idx_l: int) -> tuple[int, int]:
        """Case 4: ``l`` sorted, ``h`` in a gap that gets cracked."""
        entry_l = self.table[idx_l]
        l_pos = self._lower_end(entry_l, l)
        gap_h = self.table.search_gap(h)
        self.build_index_for_all_gaps(entry_l.hi_pos + 1, gap_h.lo_pos - 1)
        h_pos = self._crack_high_end(gap_h, h)
        return l_pos, h_pos

    def crack_for_low_value(self, l: int, h: int, idx_h: int) -> tuple[int, int]:
        """Case 5: mirror of case 4 with ``l`` in a gap."""
        entry_h = self.table[idx_h]
        h_pos = self._upper_end(entry_h, h)
        gap_l = self.table.search_gap(l)
        self.build_index_for_all_gaps(gap_l.hi_pos + 1, entry_h.lo_pos - 1)
        l_pos = self._crack_low_end(gap_l, l)
        return l_pos, h_pos

    # -- helpers ------------------------------------------------------------------

    def _crack_low_end(self, gap: Gap, l: int) -> int:
        """Index the keys ``>= l`` at the top of ``gap``; returns the first such position."""
        if gap.empty:
            return gap.lo_pos
        s = crack(self.column, gap.lo_pos, gap.hi_pos, l)
        self.writes += gap.size
        self._index_region(s, gap.hi_pos)
        return s

    def _crack_high_end(self, gap: Gap, h: int) -> int:
        """Index the keys ``<= h`` at the bottom of ``gap``; returns the last such position."""
        if gap.empty:
            return gap.hi_pos
        s = crack(self.column, gap.lo_pos, gap.hi_pos, h + 1)
        self.writes += gap.size
        self._index_region(gap.lo_pos, s - 1)
        return s - 1

    def _index_region(self, lo: int, hi: int) -> None:
        if hi < lo:
            return
        adaptive_sort(self.column, lo, hi, self.tau, self.sort_counters)
        self.writes += hi - lo + 1
        model = build(self.column, lo, hi, self.epsilon)
        self.table.insert(PartitionEntry(model.lo_key, model.hi_key, lo, hi, model))

    def _lower_end(self, entry: PartitionEntry, l: int) -> int:
        if l <= entry.lo_key:
            return entry.lo_pos
        return entry.model.find_unchecked(l, self._keys)

    def _upper_end(self, entry: PartitionEntry, h: int) -> int:
        if h >= entry.hi_key:
            return entry.hi_pos
        return entry.model.find_unchecked(h + 1, self._keys) - 1

    def check_invariants(self) -> None:
        self.table.check_invariants(self.column)

