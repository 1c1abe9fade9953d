"""Domain types shared by every engine: keys, the column, queries, cases, stats."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

KEY_DTYPE = np.uint64
KEY_MAX = int(np.iinfo(KEY_DTYPE).max)


class LaiError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(LaiError, ValueError):
    """A caller broke an operation's precondition (bad bounds, bad index)."""


class InvalidQuery(PreconditionError):
    pass


class InvariantViolation(LaiError, RuntimeError):
    """Internal state would become inconsistent; signals an engine bug."""


class CaseKind(enum.Enum):
    CASE1I = "1i"
    CASE1II = "1ii"
    CASE2 = "2"
    CASE3 = "3"
    CASE4 = "4"
    CASE5 = "5"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RangeQuery:
    """Inclusive range ``l <= x <= h``."""

    l: int
    h: int

    def __post_init__(self) -> None:
        check_query(self.l, self.h)


@dataclass(slots=True)
class QueryStats:
    query_index: int
    case: CaseKind | None
    latency_ns: int
    result_lo_pos: int
    result_hi_pos: int

    @property
    def count(self) -> int:
        return self.result_hi_pos - self.result_lo_pos + 1


def check_query(l: int, h: int) -> None:
    if l > h:
        raise InvalidQuery(f"lower bound {l} exceeds upper bound {h}")
    if l < 0 or h > KEY_MAX:
        raise InvalidQuery(f"bounds [{l}, {h}] outside the unsigned 64-bit key domain")


def make_column(values) -> np.ndarray:
    """Copy ``values`` into a fresh, writable uint64 column."""
    col = np.array(values, dtype=KEY_DTYPE, copy=True)
    if col.ndim != 1:
        raise PreconditionError("a column is one-dimensional")
    return col


def shuffled_column(n: int, seed: int) -> np.ndarray:
    """Seeded random permutation of the keys ``0 .. n-1``."""
    rng = np.random.default_rng(seed)
    return rng.permutation(n).astype(KEY_DTYPE)


def naive_scan(column: np.ndarray, l: int, h: int) -> np.ndarray:
    """Every ``x`` in ``column`` with ``l <= x <= h``, returned sorted (a multiset)."""
    check_query(l, h)
    col = np.asarray(column, dtype=KEY_DTYPE)
    mask = (col >= KEY_DTYPE(l)) & (col <= KEY_DTYPE(h))
    return np.sort(col[mask])


def multiset_digest(column: np.ndarray) -> tuple[int, int, int]:
    """Order-independent fingerprint (length, wrapping sum, wrapping sum of squares)."""
    col = np.asarray(column, dtype=KEY_DTYPE)
    with np.errstate(over="ignore"):
        return len(col), int(col.sum(dtype=KEY_DTYPE)), int((col * col).sum(dtype=KEY_DTYPE))
