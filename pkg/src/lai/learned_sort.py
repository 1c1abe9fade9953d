"""Sorting a cracked region with a two-anchor linear CDF model and a spill bucket."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from lai.core import KEY_DTYPE, PreconditionError

DEFAULT_TAU = 6000


@dataclass(frozen=True)
class TwoPointRegression:
    """Line through the anchors ``(lo_key, lo_pos)`` and ``(hi_key, hi_pos)``."""

    slope: float
    intercept: float
    lo_key: int

    @classmethod
    def through(cls, lo_key: int, lo_pos: int, hi_key: int, hi_pos: int) -> TwoPointRegression:
        if hi_key == lo_key:
            return cls(0.0, float(lo_pos), lo_key)
        return cls((hi_pos - lo_pos) / (hi_key - lo_key), float(lo_pos), lo_key)

    def predict(self, key: int) -> float:
        return self.intercept + self.slope * (key - self.lo_key)


@dataclass
class SortCounters:
    learned_path_count: int = 0
    comparison_path_count: int = 0
    spilled: int = 0
    placed: int = 0

    @property
    def spill_fraction(self) -> float:
        total = self.spilled + self.placed
        return self.spilled / total if total else 0.0


@njit(cache=True, nogil=True)
def _learned_sort_kernel(a, lo, hi, lo_key, slope, intercept):
    first = lo + 1
    last = hi - 1
    n = last - first + 1
    temp = a[first : last + 1].copy()
    occupied = np.zeros(n, dtype=np.bool_)
    spill = np.empty(n, dtype=a.dtype)
    n_spill = 0
    for t in range(n):
        key = temp[t]
        pred = int(intercept + slope * float(key - lo_key))
        if pred < first:
            pred = first
        elif pred > last:
            pred = last
        slot = pred - first
        if occupied[slot]:
            spill[n_spill] = key
            n_spill += 1
        else:
            occupied[slot] = True
            a[pred] = key
    # compact the placed keys to the left; anything breaking the ascending run spills
    m = 0
    for slot in range(n):
        if occupied[slot]:
            key = a[first + slot]
            if m > 0 and key < a[first + m - 1]:
                spill[n_spill] = key
                n_spill += 1
            else:
                a[first + m] = key
                m += 1
    placed = m
    s = spill[:n_spill]
    s.sort()
    # backward merge of run a[first, first+m) with s into a[first..last]; ties put spill last
    i = m - 1
    j = n_spill - 1
    k = last
    while j >= 0:
        if i >= 0 and a[first + i] > s[j]:
            a[k] = a[first + i]
            i -= 1
        else:
            a[k] = s[j]
            j -= 1
        k -= 1
    return placed, n_spill


def learned_sort(
    column: np.ndarray,
    lo_pos: int,
    hi_pos: int,
    model: TwoPointRegression | None = None,
    counters: SortCounters | None = None,
) -> None:
    """Sort ``column[lo_pos..=hi_pos]`` whose endpoints already hold its min and max."""
    if not (0 <= lo_pos < hi_pos < len(column)):
        raise PreconditionError(f"learned_sort needs a region of length >= 2, got [{lo_pos}, {hi_pos}]")
    lo_key, hi_key = int(column[lo_pos]), int(column[hi_pos])
    if __debug__:
        region = column[lo_pos : hi_pos + 1]
        if int(region.min()) != lo_key or int(region.max()) != hi_key:
            raise AssertionError("learned_sort anchors are not the region's extremes")
    if model is None:
        model = TwoPointRegression.through(lo_key, lo_pos, hi_key, hi_pos)
    if hi_pos - lo_pos < 2:
        return
    placed, spilled = _learned_sort_kernel(
        column, lo_pos, hi_pos, KEY_DTYPE(model.lo_key), model.slope, model.intercept
    )
    if counters is not None:
        counters.placed += int(placed)
        counters.spilled += int(spilled)


def place_anchors(column: np.ndarray, lo_pos: int, hi_pos: int) -> None:
    """Swap the region's minimum to ``lo_pos`` and its maximum to ``hi_pos``."""
    region = column[lo_pos : hi_pos + 1]
    i = int(region.argmin())
    region[0], region[i] = region[i], region[0]
    j = int(region.argmax())
    region[-1], region[j] = region[j], region[-1]


def adaptive_sort(
    column: np.ndarray,
    lo_pos: int,
    hi_pos: int,
    tau: int = DEFAULT_TAU,
    counters: SortCounters | None = None,
) -> None:
    """Learned sort for regions longer than ``tau``, comparison sort otherwise."""
    if not (0 <= lo_pos and hi_pos < len(column)):
        raise PreconditionError(f"sort bounds [{lo_pos}, {hi_pos}] invalid")
    if hi_pos <= lo_pos:
        return
    if hi_pos - lo_pos + 1 > tau:
        place_anchors(column, lo_pos, hi_pos)
        if counters is not None:
            counters.learned_path_count += 1
        learned_sort(column, lo_pos, hi_pos, counters=counters)
    else:
        if counters is not None:
            counters.comparison_path_count += 1
        column[lo_pos : hi_pos + 1].sort()
