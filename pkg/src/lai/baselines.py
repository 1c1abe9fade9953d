"""Comparison engines sharing the ``query`` / ``fetch`` surface of ``LaiEngine``."""

from __future__ import annotations

import time
from bisect import bisect_left, bisect_right

import numpy as np

from lai.core import KEY_DTYPE, KEY_MAX, QueryStats, check_query, make_column
from lai.crack import crack


class _Timed:
    name = "base"

    def __init__(self, column, copy: bool = True):
        self.column = make_column(column) if copy else column
        self.stats_log: list[QueryStats] = []
        self.touched = 0  # elements scanned by partitioning steps

    def __len__(self) -> int:
        return len(self.column)

    def query(self, l: int, h: int) -> tuple[int, int]:
        check_query(l, h)
        t0 = time.perf_counter_ns()
        lo, hi = self._execute(l, h)
        self.stats_log.append(QueryStats(len(self.stats_log), None, time.perf_counter_ns() - t0, lo, hi))
        return lo, hi

    def _execute(self, l: int, h: int) -> tuple[int, int]:
        raise NotImplementedError

    def fetch(self, lo: int, hi: int) -> np.ndarray:
        return self.column[lo : hi + 1].copy()

    def results(self, l: int, h: int) -> np.ndarray:
        return self.fetch(*self.query(l, h))


class CrackEngine(_Timed):
    """Classic database cracking: crack the pieces holding ``l`` and ``h + 1``, nothing else.

    The cracker index maps each pivot ``k`` to the first position holding a
    key ``>= k``.
    """

    name = "crack"

    def __init__(self, column, copy: bool = True):
        super().__init__(column, copy)
        self.pivots: list[int] = []
        self.positions: list[int] = []

    def piece(self, k: int) -> tuple[int, int]:
        """Inclusive position range of the piece whose keys bracket ``k``."""
        i = bisect_right(self.pivots, k)
        lo = self.positions[i - 1] if i > 0 else 0
        hi = self.positions[i] - 1 if i < len(self.pivots) else len(self.column) - 1
        return lo, hi

    def _add_pivot(self, k: int, pos: int) -> None:
        i = bisect_left(self.pivots, k)
        self.pivots.insert(i, k)
        self.positions.insert(i, pos)

    def crack_on(self, k: int) -> int:
        """Position of the first key ``>= k``, cracking its piece if ``k`` is new."""
        if k <= 0:
            return 0
        if k > KEY_MAX:
            return len(self.column)
        i = bisect_left(self.pivots, k)
        if i < len(self.pivots) and self.pivots[i] == k:
            return self.positions[i]
        lo, hi = self.piece(k)
        if lo > hi:
            pos = lo
        else:
            self._before_crack(lo, hi)
            lo, hi = self.piece(k)
            pos = crack(self.column, lo, hi, k) if lo <= hi else lo
            self.touched += hi - lo + 1
        self._add_pivot(k, pos)
        return pos

    def _before_crack(self, lo: int, hi: int) -> None:
        pass

    def _execute(self, l, h):
        lo = self.crack_on(l)
        hi = self.crack_on(h + 1) - 1
        return lo, hi

    def check_invariants(self) -> None:
        for k, pos in zip(self.pivots, self.positions):
            if pos > 0 and int(self.column[:pos].max()) >= k:
                raise AssertionError(f"keys >= pivot {k} left of position {pos}")
            if pos < len(self.column) and int(self.column[pos:].min()) < k:
                raise AssertionError(f"keys < pivot {k} right of position {pos}")


class DD1REngine(CrackEngine):
    """Stochastic cracking, one random crack per large piece touched.

    Before a bound cracks a piece longer than ``len(column) / 64``, the
    piece is first cracked on the key of a uniformly random element.
    """

    name = "dd1r"

    def __init__(self, column, copy: bool = True, seed: int = 0, threshold: int | None = None):
        super().__init__(column, copy)
        self.rng = np.random.default_rng(seed)
        self.threshold = threshold if threshold is not None else max(1, len(self.column) // 64)
        self.random_cracks = 0

    def _before_crack(self, lo: int, hi: int) -> None:
        if hi - lo + 1 <= self.threshold:
            return
        pivot = int(self.column[int(self.rng.integers(lo, hi + 1))])
        i = bisect_left(self.pivots, pivot)
        if pivot == 0 or (i < len(self.pivots) and self.pivots[i] == pivot):
            return
        pos = crack(self.column, lo, hi, pivot)
        self.touched += hi - lo + 1
        self.random_cracks += 1
        self._add_pivot(pivot, pos)


class SortedEngine(_Timed):
    """Sorts the whole column on the first query, then binary-searches both bounds."""

    name = "sorted"

    def __init__(self, column, copy: bool = True):
        super().__init__(column, copy)
        self.ready = False

    def _execute(self, l, h):
        if not self.ready:
            self.column.sort()
            self.touched += len(self.column)
            self.ready = True
        lo = int(np.searchsorted(self.column, KEY_DTYPE(l), side="left"))
        hi = int(np.searchsorted(self.column, KEY_DTYPE(h), side="right")) - 1
        return lo, hi


class ScanEngine(_Timed):
    """Full scan per query; matches are copied into a result buffer that ``fetch`` reads."""

    name = "scan"

    def __init__(self, column, copy: bool = True):
        super().__init__(column, copy)
        self.buffer = np.empty(0, dtype=KEY_DTYPE)

    def _execute(self, l, h):
        col = self.column
        self.buffer = col[(col >= KEY_DTYPE(l)) & (col <= KEY_DTYPE(h))]
        self.touched += len(col)
        return 0, len(self.buffer) - 1

    def fetch(self, lo: int, hi: int) -> np.ndarray:
        return self.buffer[lo : hi + 1].copy()


ENGINES = {
    "crack": CrackEngine,
    "dd1r": DD1REngine,
    "sorted": SortedEngine,
    "scan": ScanEngine,
}
