"""Ordered table of sorted partitions and the unsorted gaps between them."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from lai.core import InvariantViolation, PreconditionError
from lai.learned_model import LearnedModel


@dataclass(frozen=True)
class PartitionEntry:
    lo_key: int
    hi_key: int
    lo_pos: int
    hi_pos: int
    model: LearnedModel | None = None
    model_id: int = -1

    @property
    def size(self) -> int:
        return self.hi_pos - self.lo_pos + 1


class Gap(NamedTuple):
    """Inclusive position range of an unsorted region; empty when ``hi_pos < lo_pos``."""

    lo_pos: int
    hi_pos: int

    @property
    def empty(self) -> bool:
        return self.hi_pos < self.lo_pos

    @property
    def size(self) -> int:
        return max(0, self.hi_pos - self.lo_pos + 1)


class PartitionTable:
    """Entries kept sorted by key interval; key order and position order agree.

    Four parallel lists back the entries so that lookups are plain
    ``bisect`` calls on Python ints.
    """

    def __init__(self, column_len: int):
        self.column_len = column_len
        self._entries: list[PartitionEntry] = []
        self._lo_keys: list[int] = []
        self._hi_keys: list[int] = []
        self._lo_pos: list[int] = []
        self._hi_pos: list[int] = []
        self._covered = 0
        self._next_model_id = 0
        # non-empty gaps in position order, kept alongside the entries
        self._gap_lo: list[int] = [0] if column_len > 0 else []
        self._gap_hi: list[int] = [column_len - 1] if column_len > 0 else []

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[PartitionEntry]:
        return iter(self._entries)

    def __getitem__(self, idx: int) -> PartitionEntry:
        return self._entries[idx]

    @property
    def covered(self) -> int:
        """Number of column positions inside some entry."""
        return self._covered

    def find_entry(self, k: int) -> int | None:
        """Index of the entry whose key interval contains ``k``."""
        i = bisect_right(self._lo_keys, k) - 1
        if i >= 0 and k <= self._hi_keys[i]:
            return i
        return None

    def search_sorted_partitions(self, l: int, h: int) -> tuple[int | None, int | None]:
        if l > h:
            raise PreconditionError(f"l={l} exceeds h={h}")
        return self.find_entry(l), self.find_entry(h)

    def gap_index(self, k: int) -> int:
        """Number of entries lying wholly below ``k``; identifies the gap holding ``k``."""
        return bisect_right(self._lo_keys, k)

    def search_gap(self, k: int) -> Gap:
        if self.find_entry(k) is not None:
            raise PreconditionError(f"key {k} lies inside a sorted partition")
        return self._gap_at(self.gap_index(k))

    def _gap_at(self, i: int) -> Gap:
        lo = self._hi_pos[i - 1] + 1 if i > 0 else 0
        hi = self._lo_pos[i] - 1 if i < len(self._entries) else self.column_len - 1
        return Gap(lo, hi)

    def is_overlap_query(self, l: int, h: int) -> bool:
        """True iff some entry's key interval meets the open interval ``(l, h)``."""
        if l >= h:
            return False
        # the last entry starting below h has the largest hi_key among candidates
        j = bisect_left(self._lo_keys, h) - 1
        return j >= 0 and self._hi_keys[j] > l

    def get_all_gaps(self, p1: int, p2: int) -> list[Gap]:
        """Non-empty gaps meeting ``[p1, p2]``, clipped to it, in position order."""
        if p1 > p2:
            return []
        i = max(0, bisect_right(self._gap_lo, p1) - 1)
        j = bisect_right(self._gap_lo, p2)
        gaps = []
        for g in range(i, j):
            lo = max(self._gap_lo[g], p1)
            hi = min(self._gap_hi[g], p2)
            if lo <= hi:
                gaps.append(Gap(lo, hi))
        return gaps

    def insert(self, entry: PartitionEntry) -> int:
        """Insert ``entry`` keeping key order; returns its index."""
        if entry.lo_key > entry.hi_key or entry.lo_pos > entry.hi_pos:
            raise InvariantViolation(f"malformed entry {entry}")
        if entry.lo_pos < 0 or entry.hi_pos >= self.column_len:
            raise InvariantViolation(f"entry {entry} outside the column")
        i = bisect_left(self._lo_keys, entry.lo_key)
        if i > 0 and (self._hi_keys[i - 1] >= entry.lo_key or self._hi_pos[i - 1] >= entry.lo_pos):
            raise InvariantViolation(f"entry {entry} overlaps its predecessor {self._entries[i - 1]}")
        if i < len(self._entries) and (
            self._lo_keys[i] <= entry.hi_key or self._lo_pos[i] <= entry.hi_pos
        ):
            raise InvariantViolation(f"entry {entry} overlaps its successor {self._entries[i]}")
        g = bisect_right(self._gap_lo, entry.lo_pos) - 1
        if g < 0 or self._gap_hi[g] < entry.hi_pos:
            raise InvariantViolation(f"entry {entry} does not lie inside a single gap")
        if entry.model_id < 0:
            entry = PartitionEntry(
                entry.lo_key, entry.hi_key, entry.lo_pos, entry.hi_pos, entry.model, self._next_model_id
            )
        self._next_model_id = max(self._next_model_id, entry.model_id) + 1
        self._entries.insert(i, entry)
        self._lo_keys.insert(i, entry.lo_key)
        self._hi_keys.insert(i, entry.hi_key)
        self._lo_pos.insert(i, entry.lo_pos)
        self._hi_pos.insert(i, entry.hi_pos)
        self._covered += entry.size
        self._split_gap(g, entry.lo_pos, entry.hi_pos)
        return i

    def _split_gap(self, g: int, lo: int, hi: int) -> None:
        g_lo, g_hi = self._gap_lo[g], self._gap_hi[g]
        pieces = [(a, b) for a, b in ((g_lo, lo - 1), (hi + 1, g_hi)) if a <= b]
        self._gap_lo[g : g + 1] = [a for a, _ in pieces]
        self._gap_hi[g : g + 1] = [b for _, b in pieces]

    def _check_idx(self, idx: int) -> None:
        if not (0 <= idx < len(self._entries)):
            raise PreconditionError(f"entry index {idx} out of range for {len(self._entries)} entries")

    def get_learned_index(self, idx: int) -> LearnedModel | None:
        self._check_idx(idx)
        return self._entries[idx].model

    def get_boundaries(self, idx: int) -> tuple[int, int]:
        self._check_idx(idx)
        return self._lo_pos[idx], self._hi_pos[idx]

    def is_fully_indexed(self) -> bool:
        # entries are disjoint, so full coverage is a count
        return self.column_len > 0 and self._covered == self.column_len

    def dump(self) -> str:
        """One ``lo_key,hi_key,lo_pos,hi_pos,model_id`` line per entry."""
        return "".join(f"{e.lo_key},{e.hi_key},{e.lo_pos},{e.hi_pos},{e.model_id}\n" for e in self._entries)

    def check_invariants(self, column: np.ndarray | None = None) -> None:
        """Raise ``InvariantViolation`` on any broken table (or table/column) invariant."""
        prev = None
        for e in self._entries:
            if e.lo_key > e.hi_key or e.lo_pos > e.hi_pos:
                raise InvariantViolation(f"malformed entry {e}")
            if prev is not None and not (prev.hi_key < e.lo_key and prev.hi_pos < e.lo_pos):
                raise InvariantViolation(f"entries {prev} and {e} out of order")
            prev = e
        if sum(e.size for e in self._entries) != self._covered:
            raise InvariantViolation("coverage counter out of sync")
        expected = [g for g in (self._gap_at(i) for i in range(len(self._entries) + 1)) if not g.empty]
        if expected != [Gap(a, b) for a, b in zip(self._gap_lo, self._gap_hi)]:
            raise InvariantViolation("gap list out of sync with the entries")
        if column is None:
            return
        for i, e in enumerate(self._entries):
            region = column[e.lo_pos : e.hi_pos + 1]
            if int(region[0]) != e.lo_key or int(region[-1]) != e.hi_key:
                raise InvariantViolation(f"entry {e} endpoints disagree with the column")
            if len(region) > 1 and bool(np.any(region[1:] < region[:-1])):
                raise InvariantViolation(f"entry {e} region is not sorted")
            gap = self._gap_at(i)
            if not gap.empty:
                vals = column[gap.lo_pos : gap.hi_pos + 1]
                if int(vals.max()) >= e.lo_key or (i > 0 and int(vals.min()) <= self._hi_keys[i - 1]):
                    raise InvariantViolation(f"gap {gap} holds keys outside its key range")
        tail = self._gap_at(len(self._entries))
        if self._entries and not tail.empty:
            if int(column[tail.lo_pos : tail.hi_pos + 1].min()) <= self._hi_keys[-1]:
                raise InvariantViolation(f"trailing gap {tail} holds keys below the last entry")
