"""Seeded generators for the ten synthetic range-query workloads.

Each generator is a pure function of its ``WorkloadSpec``. Ranges are
always clamped into ``[0, N - 1]`` with ``l <= h``.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lai.core import PreconditionError


class WorkloadKind(enum.Enum):
    RANDOM = "random"
    SEQ_RANDOM = "seq_random"
    SEQ_ALTERNATE = "seq_alternate"
    SEQ_INVERSE = "seq_inverse"
    SEQ_OVERLAP = "seq_overlap"
    ZOOMIN = "zoomin"
    SEQ_ZOOMIN = "seq_zoomin"
    ZOOMOUT = "zoomout"
    SEQ_ZOOMOUT = "seq_zoomout"
    PERIODIC = "periodic"


ALL_KINDS = tuple(WorkloadKind)


@dataclass(frozen=True)
class WorkloadSpec:
    """Parameters of one workload; ``None`` fields take domain-derived defaults.

    ``step`` is the per-query advance of the sequential bounds (default
    ``N // n_queries``), ``selectivity`` caps random widths at a fraction of
    ``N``, and ``zoom_group`` is the number of queries in one zoom group.
    """

    kind: WorkloadKind
    n: int = 1_000_000
    n_queries: int = 2000
    seed: int = 0
    selectivity: float = 0.001
    step: int | None = None
    zoom_group: int = 5

    def __post_init__(self) -> None:
        if self.n < 1 or self.n_queries < 0:
            raise PreconditionError("workload needs n >= 1 and n_queries >= 0")
        if self.zoom_group < 1:
            raise PreconditionError("zoom_group must be positive")

    @property
    def max_width(self) -> int:
        return max(1, int(self.selectivity * self.n))

    @property
    def seq_step(self) -> int:
        if self.step is not None:
            return max(1, self.step)
        return max(1, self.n // max(1, self.n_queries))


def _clamp(spec: WorkloadSpec, l: int, h: int) -> tuple[int, int]:
    top = spec.n - 1
    l = min(max(l, 0), top)
    h = min(max(h, 0), top)
    return (l, h) if l <= h else (h, l)


def _random(spec, rng):
    for _ in range(spec.n_queries):
        l = int(rng.integers(0, spec.n))
        yield l, l + int(rng.integers(0, spec.max_width + 1))


def _seq_random(spec, rng):
    s = spec.seq_step
    for i in range(spec.n_queries):
        # 1-based odd queries: random l; even: l sweeps upward
        l = int(rng.integers(0, spec.n)) if i % 2 == 0 else (i // 2) * 2 * s
        yield l, l + int(rng.integers(0, spec.max_width + 1))


def _seq_alternate(spec, rng):
    s = spec.seq_step
    top = spec.n - 1
    for i in range(spec.n_queries):
        if i % 2 == 0:
            h = top - (i // 2) * 2 * s
            yield h - int(rng.integers(0, spec.max_width + 1)), h
        else:
            l = (i // 2) * 2 * s
            yield l, l + int(rng.integers(0, spec.max_width + 1))


def _seq_inverse(spec, rng):
    s = spec.seq_step
    top = spec.n - 1
    for i in range(spec.n_queries):
        h = top - i * s
        yield h - int(rng.integers(0, spec.max_width + 1)), h


def _seq_overlap(spec, rng):
    s = spec.seq_step
    for i in range(spec.n_queries):
        l = i * s
        yield l, l + int(rng.integers(0, spec.max_width + 1))


def _zoom_step(spec: WorkloadSpec) -> int:
    if spec.step is not None:
        return max(1, spec.step)
    return max(1, spec.n // (2 * max(1, spec.n_queries)))


def _zoomin(spec, rng):
    s = _zoom_step(spec)
    top = spec.n - 1
    mid = top // 2
    for i in range(spec.n_queries):
        l, h = i * s, top - i * s
        if l > h:  # crossed: stay at the centre key
            l = h = mid
        yield l, h


def _zoomout(spec, rng):
    s = _zoom_step(spec)
    mid = (spec.n - 1) // 2
    for i in range(spec.n_queries):
        yield mid - i * s, mid + i * s


def _windows(spec: WorkloadSpec) -> tuple[int, int, int]:
    """(number of groups, window width, jump between windows) for the grouped zoom workloads."""
    groups = max(1, -(-spec.n_queries // spec.zoom_group))
    jump = max(1, spec.n // groups)
    return groups, jump, jump


def _seq_zoomin(spec, rng):
    g = spec.zoom_group
    _, width, jump = _windows(spec)
    zstep = max(1, width // (2 * g))
    for i in range(spec.n_queries):
        base = (i // g) * jump
        j = i % g
        yield base + j * zstep, base + width - 1 - j * zstep


def _seq_zoomout(spec, rng):
    g = spec.zoom_group
    _, width, jump = _windows(spec)
    zstep = max(1, width // (2 * g))
    for i in range(spec.n_queries):
        centre = (i // g) * jump + width // 2
        j = i % g + 1
        yield centre - j * zstep, centre + j * zstep - 1


def _periodic(spec, rng):
    # disjoint constant-width ranges spread across the domain, then a sweep whose
    # l stays inside the previous range while h runs past it
    width = max(1, spec.max_width * 5)
    tiles = max(1, min(spec.n // (2 * width), spec.n_queries // 20 or 1))
    spacing = spec.n // tiles
    s = max(1, min(width - 1, spec.seq_step))
    for i in range(spec.n_queries):
        if i < tiles:
            l = i * spacing
        else:
            l = ((i - tiles) * s) % max(1, spec.n - width)
        yield l, l + width - 1


_GENERATORS = {
    WorkloadKind.RANDOM: _random,
    WorkloadKind.SEQ_RANDOM: _seq_random,
    WorkloadKind.SEQ_ALTERNATE: _seq_alternate,
    WorkloadKind.SEQ_INVERSE: _seq_inverse,
    WorkloadKind.SEQ_OVERLAP: _seq_overlap,
    WorkloadKind.ZOOMIN: _zoomin,
    WorkloadKind.SEQ_ZOOMIN: _seq_zoomin,
    WorkloadKind.ZOOMOUT: _zoomout,
    WorkloadKind.SEQ_ZOOMOUT: _seq_zoomout,
    WorkloadKind.PERIODIC: _periodic,
}


def generate(spec: WorkloadSpec) -> list[tuple[int, int]]:
    """The deterministic query stream described by ``spec``."""
    rng = np.random.default_rng(spec.seed)
    return [_clamp(spec, l, h) for l, h in _GENERATORS[spec.kind](spec, rng)]


def parse_kind(name: str) -> WorkloadKind:
    key = name.strip().lower().replace("-", "_")
    for kind in WorkloadKind:
        if key in (kind.value, kind.name.lower(), kind.value.replace("_", "")):
            return kind
    raise PreconditionError(f"unknown workload {name!r}; choose from {[k.value for k in WorkloadKind]}")


def tiling(n: int, width: int) -> list[tuple[int, int]]:
    """Consecutive disjoint ranges covering ``[0, n)``."""
    return [(lo, min(n, lo + width) - 1) for lo in range(0, n, width)]


def dump_csv(queries, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["idx", "l", "h"])
        for i, (l, h) in enumerate(queries):
            w.writerow([i, l, h])


def load_csv(path: str | Path) -> list[tuple[int, int]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [(int(r["l"]), int(r["h"])) for r in csv.DictReader(fh)]

