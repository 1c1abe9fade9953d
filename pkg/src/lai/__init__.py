"""Learned adaptive indexing over a single in-memory numeric column."""

from lai.core import CaseKind, QueryStats, RangeQuery, make_column, naive_scan
from lai.engine import LaiEngine

__all__ = [
    "CaseKind",
    "LaiEngine",
    "QueryStats",
    "RangeQuery",
    "make_column",
    "naive_scan",
]
