"""Batch workload forecasting and index pre-building.

After a batch of queries, the ``l`` and ``h`` series are each handed to a
fixed set of forecasting methods. Every method is fitted on the first 80%
of the batch and scored by MASE on the remaining 20%; the best one per
series is refitted on the whole batch and forecasts the next batch, whose
ranges are then pushed through the engine's index-building path.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from lai.core import KEY_MAX, LaiError, PreconditionError

MIN_HISTORY = 8
VALIDATION_FRACTION = 0.2


class ConfigurationError(LaiError, ValueError):
    pass


class ForecastMethod(Protocol):
    name: str

    def forecast(self, series: np.ndarray, horizon: int) -> np.ndarray: ...


def mase(actual, predicted, training) -> float:
    """Mean absolute error scaled by the in-sample one-step naive error of ``training``."""
    actual = np.asarray(actual, dtype=np.float64)
    predicted = np.asarray(predicted, dtype=np.float64)
    training = np.asarray(training, dtype=np.float64)
    if actual.shape != predicted.shape or actual.size < 1:
        raise PreconditionError("actual and predicted must be non-empty and of equal length")
    if training.size < 2:
        raise PreconditionError("training series needs at least two points")
    err = float(np.mean(np.abs(actual - predicted)))
    scale = float(np.mean(np.abs(np.diff(training))))
    if scale == 0.0:
        return 0.0 if err == 0.0 else math.inf
    return err / scale


class NaiveLast:
    name = "naive"

    def forecast(self, series, horizon):
        return np.full(horizon, float(series[-1]))


class Drift:
    """Last value plus the mean first difference per step."""

    name = "drift"

    def forecast(self, series, horizon):
        series = np.asarray(series, dtype=np.float64)
        slope = (series[-1] - series[0]) / (len(series) - 1) if len(series) > 1 else 0.0
        return series[-1] + slope * np.arange(1, horizon + 1)


class PiecewiseLinearJumps:
    """Linear runs separated by regular jumps, replayed forward.

    A first difference counts as a jump when its magnitude exceeds
    ``c`` times the median absolute difference. Run slope, jump size and
    run length are the medians over the history.
    """

    name = "piecewise"

    def __init__(self, c: float = 5.0):
        self.c = c

    def forecast(self, series, horizon):
        x = np.asarray(series, dtype=np.float64)
        d = np.diff(x)
        if d.size == 0:
            return np.full(horizon, x[-1])
        absd = np.abs(d)
        jumps = np.flatnonzero(absd > self.c * np.median(absd))
        if jumps.size == 0:
            return x[-1] + float(np.mean(d)) * np.arange(1, horizon + 1)
        mask = np.ones(d.size, dtype=bool)
        mask[jumps] = False
        slope = float(np.median(d[mask])) if mask.any() else 0.0
        jump = float(np.median(d[jumps]))
        # a jump at diff index j starts a run at point j + 1
        run = int(np.median(np.diff(jumps))) if jumps.size > 1 else int(jumps[0]) + 1
        run = max(run, 1)
        t = len(x) - 1 - int(jumps[-1])
        out = np.empty(horizon)
        val = x[-1]
        for k in range(horizon):
            if t >= run:
                val += jump
                t = 1
            else:
                val += slope
                t += 1
            out[k] = val
        return out


class SeasonalNaive:
    """Repeats the last season; period = best autocorrelation lag in ``[2, n/2]``."""

    name = "seasonal"

    def period(self, series) -> int:
        x = np.asarray(series, dtype=np.float64)
        x = x - x.mean()
        denom = float(np.dot(x, x))
        n = len(x)
        if denom == 0.0 or n < 4:
            return 1
        best, best_r = 1, -math.inf
        for lag in range(2, n // 2 + 1):
            r = float(np.dot(x[:-lag], x[lag:])) / denom
            if r > best_r:
                best, best_r = lag, r
        return best

    def forecast(self, series, horizon):
        x = np.asarray(series, dtype=np.float64)
        p = self.period(x)
        season = x[-p:]
        return np.array([season[k % p] for k in range(horizon)])


def default_methods() -> list[ForecastMethod]:
    return [NaiveLast(), Drift(), PiecewiseLinearJumps(), SeasonalNaive()]


@dataclass(frozen=True)
class SeriesChoice:
    method: str
    scores: dict[str, float]
    forecast: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ForecastResult:
    predicted: list[tuple[int, int]]
    chosen_method_l: str
    chosen_method_h: str
    mase_scores: dict[str, dict[str, float]]


def select_and_forecast(
    series: Sequence[float], methods: Sequence[ForecastMethod], horizon: int
) -> SeriesChoice:
    """Score each method on a held-out tail and forecast with the least-MASE one."""
    x = np.asarray(series, dtype=np.float64)
    n_valid = max(1, int(round(len(x) * VALIDATION_FRACTION)))
    train, valid = x[:-n_valid], x[-n_valid:]
    scores: dict[str, float] = {}
    best = None
    for m in methods:
        s = mase(valid, m.forecast(train, n_valid), train)
        scores[m.name] = s
        if best is None or s < scores[best.name]:
            best = m
    return SeriesChoice(best.name, scores, best.forecast(x, horizon))


def _to_keys(values: np.ndarray, lo: int, hi: int) -> list[int]:
    out = []
    for v in values:
        if not math.isfinite(v):
            v = hi if v > 0 else lo
        out.append(int(min(max(round(v), lo), hi)))
    return out


def predict_workload(
    history: Sequence[tuple[int, int]],
    methods: Sequence[ForecastMethod] | None = None,
    horizon: int = 1000,
    domain: tuple[int, int] = (0, KEY_MAX),
) -> ForecastResult:
    """Forecast the next ``horizon`` ranges from one batch of past ranges."""
    if methods is None:
        methods = default_methods()
    if not methods:
        raise ConfigurationError("no forecasting methods configured")
    if len(history) < MIN_HISTORY:
        raise PreconditionError(f"need at least {MIN_HISTORY} past queries, got {len(history)}")
    ls = np.array([q[0] for q in history], dtype=np.float64)
    hs = np.array([q[1] for q in history], dtype=np.float64)
    cl = select_and_forecast(ls, methods, horizon)
    ch = select_and_forecast(hs, methods, horizon)
    lo, hi = domain
    pl = _to_keys(cl.forecast, lo, hi)
    ph = _to_keys(ch.forecast, lo, hi)
    predicted = [(a, b) if a <= b else (b, a) for a, b in zip(pl, ph)]
    return ForecastResult(predicted, cl.method, ch.method, {"l": cl.scores, "h": ch.scores})


def apply_forecast(engine, result: ForecastResult) -> int:
    """Pre-build index regions for every predicted range; returns how many changed the engine."""
    return sum(1 for l, h in result.predicted if engine.prebuild(l, h))


class AuditLog:
    """Rows of ``batch_index,series,method,mase,chosen`` for every forecast made."""

    header = ("batch_index", "series", "method", "mase", "chosen")

    def __init__(self):
        self.rows: list[tuple] = []

    def record(self, batch_index: int, result: ForecastResult) -> None:
        for series, chosen in (("l", result.chosen_method_l), ("h", result.chosen_method_h)):
            for method, score in result.mase_scores[series].items():
                self.rows.append((batch_index, series, method, score, int(method == chosen)))

    def write(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header)
            w.writerows(self.rows)
