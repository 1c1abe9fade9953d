"""In-place partitioning of a column sub-array around a pivot key."""

from __future__ import annotations

import numpy as np
from numba import njit

from lai.core import KEY_DTYPE, KEY_MAX, PreconditionError


@njit(cache=True, nogil=True)
def _partition(a, lo, hi, pivot):
    # [lo, i) < pivot and (j, hi] >= pivot throughout
    i = lo
    j = hi
    while True:
        while i <= j and a[i] < pivot:
            i += 1
        while i <= j and a[j] >= pivot:
            j -= 1
        if i > j:
            return i
        tmp = a[i]
        a[i] = a[j]
        a[j] = tmp
        i += 1
        j -= 1


def _check_bounds(column: np.ndarray, p1: int, p2: int) -> None:
    if not (0 <= p1 <= p2 < len(column)):
        raise PreconditionError(f"crack bounds [{p1}, {p2}] invalid for column of length {len(column)}")


def crack(column: np.ndarray, p1: int, p2: int, k: int) -> int:
    """Reorder ``column[p1..=p2]`` so keys ``< k`` precede keys ``>= k``.

    Returns the split position ``s`` (``p1 <= s <= p2 + 1``): the first
    position holding a key ``>= k``.
    """
    _check_bounds(column, p1, p2)
    if k <= 0:
        return p1
    if k > KEY_MAX:
        return p2 + 1
    return int(_partition(column, p1, p2, KEY_DTYPE(k)))


def crack_three(column: np.ndarray, p1: int, p2: int, l: int, h: int) -> tuple[int, int]:
    """Crack on ``l`` and then on ``h + 1``; the middle ``[s_l, s_h - 1]`` holds exactly ``[l, h]``.

    The returned pair is ``(s_l, s_h - 1)``, which is an empty range
    (``hi == lo - 1``) when no key of the region falls inside ``[l, h]``.
    """
    if l > h:
        raise PreconditionError(f"crack_three needs l <= h, got [{l}, {h}]")
    s_l = crack(column, p1, p2, l)
    if h >= KEY_MAX or s_l > p2:
        s_h = p2 + 1 if h >= KEY_MAX else s_l
    else:
        s_h = crack(column, s_l, p2, h + 1)
    return s_l, s_h - 1
