import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lai.core import PreconditionError
from lai.workloads import ALL_KINDS, WorkloadKind, WorkloadSpec, dump_csv, generate, load_csv, parse_kind, tiling

N = 100_000


def spec(kind, **kw):
    kw.setdefault("n", N)
    kw.setdefault("n_queries", 500)
    return WorkloadSpec(kind, **kw)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_ranges_valid_and_deterministic(kind):
    qs = generate(spec(kind, seed=3))
    assert len(qs) == 500
    assert all(0 <= l <= h < N for l, h in qs)
    assert qs == generate(spec(kind, seed=3))


def test_random_widths_bounded():
    s = spec(WorkloadKind.RANDOM, selectivity=0.01)
    assert max(h - l for l, h in generate(s)) <= s.max_width


def test_sequential_shapes():
    s = spec(WorkloadKind.SEQ_OVERLAP)
    ls = [l for l, _ in generate(s)]
    assert np.all(np.diff(ls) == s.seq_step)
    hs = [h for _, h in generate(spec(WorkloadKind.SEQ_INVERSE))]
    assert np.all(np.diff(hs) < 0)
    alt = generate(spec(WorkloadKind.SEQ_ALTERNATE))
    assert np.all(np.diff([h for _, h in alt[0::2]]) < 0)
    assert np.all(np.diff([l for l, _ in alt[1::2]]) > 0)
    sr = generate(spec(WorkloadKind.SEQ_RANDOM))
    assert np.all(np.diff([l for l, _ in sr[1::2]]) > 0)


def test_zoomin_unrolled():
    s = spec(WorkloadKind.ZOOMIN, step=70)
    for i, (l, h) in enumerate(generate(s)):
        if i * 70 <= N - 1 - i * 70:
            assert (l, h) == (i * 70, N - 1 - i * 70)


def test_zoomout_grows_around_centre():
    qs = generate(spec(WorkloadKind.ZOOMOUT))
    assert np.all(np.diff([l for l, _ in qs]) <= 0)
    assert np.all(np.diff([h for _, h in qs]) >= 0)
    assert qs[0][0] == qs[0][1] == (N - 1) // 2


def test_seq_zoomin_piecewise_linear():
    s = spec(WorkloadKind.SEQ_ZOOMIN)
    ls = np.array([l for l, _ in generate(s)])
    d = np.diff(ls)
    jumps = d[s.zoom_group - 1 :: s.zoom_group]
    within = np.delete(d, np.arange(s.zoom_group - 1, len(d), s.zoom_group))
    assert len(set(within.tolist())) == 1 and len(set(jumps.tolist())) == 1
    assert jumps[0] != within[0]


def test_seq_zoomout_groups_grow():
    s = spec(WorkloadKind.SEQ_ZOOMOUT)
    qs = generate(s)
    for g in range(0, 500, s.zoom_group):
        widths = [h - l for l, h in qs[g : g + s.zoom_group]]
        assert widths == sorted(widths)


def test_periodic_constant_width_and_sweep():
    qs = generate(spec(WorkloadKind.PERIODIC))
    assert len({h - l for l, h in qs}) == 1
    tiles = qs[: 500 // 20]
    assert all(a[1] < b[0] for a, b in zip(tiles, tiles[1:]))
    sweep = qs[500 // 20 :]
    for (l0, h0), (l1, h1) in zip(sweep, sweep[1:]):
        if l1 > l0:
            assert l0 <= l1 <= h0 < h1


def test_parse_kind():
    assert parse_kind("SeqZoomIn".lower()) is WorkloadKind.SEQ_ZOOMIN
    assert parse_kind("seq-overlap") is WorkloadKind.SEQ_OVERLAP
    with pytest.raises(PreconditionError):
        parse_kind("nope")


def test_invalid_spec():
    with pytest.raises(PreconditionError):
        WorkloadSpec(WorkloadKind.RANDOM, n=0)
    with pytest.raises(PreconditionError):
        WorkloadSpec(WorkloadKind.RANDOM, zoom_group=0)


def test_tiling_covers_domain():
    t = tiling(1003, 100)
    assert t[0] == (0, 99) and t[-1] == (1000, 1002)
    assert sum(h - l + 1 for l, h in t) == 1003


def test_csv_round_trip(tmp_path):
    qs = generate(spec(WorkloadKind.RANDOM, n_queries=20))
    dump_csv(qs, tmp_path / "w.csv")
    assert (tmp_path / "w.csv").read_text().startswith("idx,l,h\n0,")
    assert load_csv(tmp_path / "w.csv") == qs


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(ALL_KINDS),
    st.integers(1, 5000),
    st.integers(0, 60),
    st.floats(0.0, 3.0),
    st.one_of(st.none(), st.integers(1, 10**6)),
    st.integers(1, 9),
)
def test_out_of_domain_parameters_are_clamped(kind, n, nq, sel, step, group):
    s = WorkloadSpec(kind, n=n, n_queries=nq, selectivity=sel, step=step, zoom_group=group)
    qs = generate(s)
    assert len(qs) == nq
    assert all(0 <= l <= h < n for l, h in qs)
