"""Error-bounded spline model over one sorted partition.

The build is a single greedy pass in the style of RadixSpline's spline
corridor: knots are (key, position) points, consecutive knots are joined
by straight lines, and a new knot is emitted whenever the next point
would leave the corridor of width ``epsilon`` around the current line.
Lookups predict a position and finish with a binary search inside the
``epsilon`` window, so they are exact.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np
from numba import njit

from lai.core import PreconditionError

DEFAULT_EPSILON = 32


@njit(cache=True, nogil=True)
def _orientation(dx1, dy1, dx2, dy2):
    # > 0: clockwise, < 0: counter-clockwise
    return dy1 * dx2 - dy2 * dx1


@njit(cache=True, nogil=True)
def _spline_corridor(keys, base_pos, eps):
    n = len(keys)
    knot_x = np.empty(n, dtype=np.uint64)
    knot_y = np.empty(n, dtype=np.float64)
    k0 = keys[0]
    knot_x[0] = k0
    knot_y[0] = base_pos
    m = 1
    up_x = 0.0
    up_y = 0.0
    low_x = 0.0
    low_y = 0.0
    prev_y = float(base_pos)
    prev_key = k0
    seen = 1
    for i in range(1, n):
        key = keys[i]
        if key == prev_key:
            continue  # duplicates map to their first position
        x = float(key - k0)
        y = float(base_pos + i)
        if seen == 1:
            up_x = x
            up_y = y + eps
            low_x = x
            low_y = y - eps
        else:
            last_x = float(knot_x[m - 1] - k0)
            last_y = knot_y[m - 1]
            ulx = up_x - last_x
            uly = up_y - last_y
            llx = low_x - last_x
            lly = low_y - last_y
            dx = x - last_x
            dy = y - last_y
            if _orientation(ulx, uly, dx, dy) <= 0.0 or _orientation(llx, lly, dx, dy) >= 0.0:
                knot_x[m] = prev_key
                knot_y[m] = prev_y
                m += 1
                up_x = x
                up_y = y + eps
                low_x = x
                low_y = y - eps
            else:
                uy = y + eps
                if _orientation(ulx, uly, dx, uy - last_y) > 0.0:
                    up_x = x
                    up_y = uy
                ly = y - eps
                if _orientation(llx, lly, dx, ly - last_y) < 0.0:
                    low_x = x
                    low_y = ly
        seen += 1
        prev_key = key
        prev_y = y
    if knot_x[m - 1] != prev_key:
        knot_x[m] = prev_key
        knot_y[m] = prev_y
        m += 1
    return knot_x[:m], knot_y[:m]


@dataclass(frozen=True)
class LearnedModel:
    """Piecewise-linear CDF over ``column[base_pos .. base_pos + len - 1]``.

    Segment ``i`` predicts ``intercepts[i] + slopes[i] * (k - start_keys[i])``
    for keys from ``start_keys[i]`` up to the next start key.
    """

    start_keys: tuple[int, ...]
    slopes: tuple[float, ...]
    intercepts: tuple[float, ...]
    base_pos: int
    len: int
    epsilon: int
    lo_key: int
    hi_key: int
    has_duplicates: bool = False

    @property
    def hi_pos(self) -> int:
        return self.base_pos + self.len - 1

    @property
    def segments(self) -> list[tuple[int, float, float]]:
        """``(start_key, slope, intercept)`` per segment."""
        return list(zip(self.start_keys, self.slopes, self.intercepts))

    def predict(self, k: int) -> float:
        i = bisect_right(self.start_keys, k) - 1
        if i < 0:
            i = 0
        return self.intercepts[i] + self.slopes[i] * (k - self.start_keys[i])

    def find(self, k: int, column) -> int:
        """Position of the first key ``>= k`` inside the partition.

        ``column`` may be the ndarray or a memoryview of it; the latter
        skips a conversion on hot paths.
        """
        if not (self.lo_key <= k <= self.hi_key):
            raise PreconditionError(f"key {k} outside partition keys [{self.lo_key}, {self.hi_key}]")
        return self.find_unchecked(k, column if type(column) is memoryview else memoryview(column))

    def find_unchecked(self, k: int, keys: memoryview) -> int:
        """``find`` without the key-range check, for callers that already know ``k`` is inside."""
        lo = self.base_pos
        hi = lo + self.len
        starts = self.start_keys
        i = bisect_right(starts, k) - 1
        if i < 0:
            i = 0
        pred = self.intercepts[i] + self.slopes[i] * (k - starts[i])
        # a missing key's lower bound can sit one slot past its neighbours' windows
        w_lo = max(lo, int(pred - self.epsilon) - 1)
        w_hi = min(hi, int(pred + self.epsilon) + 3)
        if w_lo >= w_hi:
            return bisect_left(keys, k, lo, hi)
        pos = bisect_left(keys, k, w_lo, w_hi)
        if self.has_duplicates and (
            (pos == w_lo and pos > lo and keys[pos - 1] >= k) or (pos == w_hi and pos < hi and keys[pos] < k)
        ):
            pos = bisect_left(keys, k, lo, hi)
        return pos

    def max_error(self, column: np.ndarray) -> float:
        """Largest |predict - first position| over the keys of the partition."""
        return _max_error(self, np.asarray(column[self.base_pos : self.hi_pos + 1]))


def build(column: np.ndarray, lo_pos: int, hi_pos: int, epsilon: int = DEFAULT_EPSILON) -> LearnedModel:
    """Fit a model over the sorted region ``column[lo_pos..=hi_pos]`` in one pass."""
    if epsilon < 1:
        raise PreconditionError("epsilon must be at least 1")
    if not (0 <= lo_pos <= hi_pos < len(column)):
        raise PreconditionError(f"model bounds [{lo_pos}, {hi_pos}] invalid")
    keys = column[lo_pos : hi_pos + 1]
    if len(keys) > 1 and bool(np.any(keys[1:] < keys[:-1])):
        raise AssertionError(f"region [{lo_pos}, {hi_pos}] is not sorted")
    knot_x, knot_y = _spline_corridor(keys, lo_pos, float(epsilon))
    xs = [int(x) for x in knot_x]
    ys = [float(y) for y in knot_y]
    if len(xs) == 1:
        slopes = (0.0,)
    else:
        slopes = tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)) + (0.0,)
    has_dup = len(keys) > 1 and bool(np.any(keys[1:] == keys[:-1]))
    model = LearnedModel(
        start_keys=tuple(xs),
        slopes=slopes,
        intercepts=tuple(ys),
        base_pos=lo_pos,
        len=hi_pos - lo_pos + 1,
        epsilon=epsilon,
        lo_key=int(keys[0]),
        hi_key=int(keys[-1]),
        has_duplicates=has_dup,
    )
    err = _max_error(model, keys)
    if err > epsilon + 1e-6:
        raise AssertionError(f"spline error {err:.3f} exceeds epsilon {epsilon}")
    return model


def _max_error(model: LearnedModel, keys: np.ndarray) -> float:
    """Vectorised largest |prediction - first position| over ``keys``."""
    firsts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    k = keys[firsts]
    starts = np.array(model.start_keys, dtype=keys.dtype)
    seg = np.maximum(np.searchsorted(starts, k, side="right") - 1, 0)
    offset = (k - starts[seg]).astype(np.float64)
    pred = np.array(model.intercepts)[seg] + np.array(model.slopes)[seg] * offset
    return float(np.max(np.abs(pred - (model.base_pos + firsts)))) if len(k) else 0.0


def find(model: LearnedModel, k: int, column: np.ndarray) -> int:
    return model.find(k, column)
