import bisect

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lai.core import PreconditionError, make_column
from lai.learned_model import build, find


def oracle(keys, k):
    return bisect.bisect_left(keys, k)


def test_linear_region_one_segment():
    col = np.arange(1000, dtype=np.uint64)
    m = build(col, 0, 999)
    assert len(m.segments) <= 2
    assert m.segments[0][1] == pytest.approx(1.0)
    assert m.max_error(col) == 0.0


def test_single_element():
    col = make_column([7, 3, 9])
    m = build(col, 1, 1)
    assert (m.lo_key, m.hi_key, m.base_pos, m.len) == (3, 3, 1, 1)
    assert find(m, 3, col) == 1


def test_random_sample_error_and_find():
    rng = np.random.default_rng(1)
    keys = np.unique(rng.integers(0, 10**12, 10_000, dtype=np.uint64))
    col = np.concatenate([np.zeros(5, np.uint64), keys])
    col[:5] = 0
    m = build(col, 5, len(col) - 1, epsilon=32)
    assert m.max_error(col) <= 32
    assert m.base_pos == 5
    lst = col.tolist()
    for k in keys[::7].tolist():
        assert m.find(k, col) == oracle(lst, k)
    # keys missing from the region land on their lower bound
    for k in (keys[:-1:13] + 1).tolist():
        assert m.find(k, col) == bisect.bisect_left(lst, k, 5)


def test_boundaries():
    col = np.arange(10, 60, dtype=np.uint64) * 3
    m = build(col, 0, len(col) - 1, epsilon=4)
    assert m.find(m.lo_key, col) == 0
    assert m.find(m.hi_key, col) == len(col) - 1
    with pytest.raises(PreconditionError):
        m.find(m.lo_key - 1, col)
    with pytest.raises(PreconditionError):
        m.find(m.hi_key + 1, col)


def test_unsorted_region_rejected():
    with pytest.raises(AssertionError):
        build(make_column([1, 3, 2]), 0, 2)
    with pytest.raises(PreconditionError):
        build(make_column([1, 2]), 0, 2)
    with pytest.raises(PreconditionError):
        build(make_column([1, 2]), 0, 1, epsilon=0)


def test_duplicates_find_first_position():
    col = make_column(sorted([5] * 300 + [1] * 40 + [9] * 500 + list(range(100, 400))))
    m = build(col, 0, len(col) - 1, epsilon=4)
    lst = col.tolist()
    for k in sorted(set(lst)) + [2, 6, 10, 399]:
        if m.lo_key <= k <= m.hi_key:
            assert m.find(k, col) == oracle(lst, k)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(0, 2**63), min_size=1, max_size=400),
    st.sampled_from([1, 2, 4, 32]),
    st.integers(0, 3),
)
def test_find_matches_binary_search(values, eps, pad):
    keys = sorted(values)
    col = make_column([0] * pad + keys)
    m = build(col, pad, pad + len(keys) - 1, epsilon=eps)
    assert m.max_error(col) <= eps
    lst = col.tolist()
    probes = set(keys) | {min(k + 1, m.hi_key) for k in keys}
    for k in probes:
        assert m.find(k, col) == bisect.bisect_left(lst, k, pad)
