"""Choose (algorithm, shutter, gain) for a continuous illumination reading.

Each illumination level contributes its table optimum; between two levels the
optimal coordinates (not the tables) are interpolated linearly in lux, so the
output parameters are continuous.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from activecam.errors import ValidationError
from activecam.perftable import AxisSpec, PerformanceTable, axis_value


@dataclass(frozen=True)
class CameraConfig:
    shutter_ms: float
    gain_db: float

    @property
    def gain_linear(self) -> float:
        return 10.0 ** (self.gain_db / 20.0)

    def within(self, shutter: AxisSpec, gain: AxisSpec, eps: float = 1e-12) -> bool:
        return (
            shutter.low - eps <= self.shutter_ms <= shutter.high + eps
            and gain.low - eps <= self.gain_db <= gain.high + eps
        )


@dataclass(frozen=True)
class LightReading:
    lux: float
    timestamp: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.lux) and self.lux > 0):
            raise ValidationError(f"lux reading must be finite and positive, got {self.lux!r}")


@dataclass(frozen=True)
class Selection:
    algorithm_id: str
    config: CameraConfig
    predicted_ap: float
    lux_used: float
    level_lo: float
    level_hi: float
    # position of the winner in the registration order used for AP ties
    rank: int = 0

    def format_line(self) -> str:
        return "\t".join(
            [
                self.algorithm_id,
                f"{self.config.shutter_ms:.6f}",
                f"{self.config.gain_db:.6f}",
                f"{self.predicted_ap:.6f}",
                f"{self.lux_used:.6f}",
                f"{self.level_lo:.6f}",
                f"{self.level_hi:.6f}",
            ]
        )


class TableSet:
    """One algorithm's tables, one per illumination level, sharing axes and sigma."""

    def __init__(self, algorithm_id: str, tables: Sequence[PerformanceTable]):
        if not tables:
            raise ValidationError(f"table set {algorithm_id!r} is empty")
        tables = sorted(tables, key=lambda t: t.illumination)
        first = tables[0]
        for t in tables:
            if t.algorithm_id != algorithm_id:
                raise ValidationError(f"table for {t.algorithm_id!r} in set {algorithm_id!r}")
            if t.shutter_axis != first.shutter_axis or t.gain_axis != first.gain_axis:
                raise ValidationError(f"{algorithm_id}: tables disagree on axes")
            if t.sigma != first.sigma:
                raise ValidationError(f"{algorithm_id}: tables disagree on smoothing")
        lux = [t.illumination for t in tables]
        if any(b <= a for a, b in zip(lux, lux[1:])):
            raise ValidationError(f"{algorithm_id}: illumination levels must be distinct")
        self.algorithm_id = algorithm_id
        self.tables = tuple(tables)
        self.levels = tuple(lux)
        self._optima = tuple(optimum_at_level(t) for t in tables)

    @property
    def shutter_axis(self) -> AxisSpec:
        return self.tables[0].shutter_axis

    @property
    def gain_axis(self) -> AxisSpec:
        return self.tables[0].gain_axis

    def optimum(self, k: int) -> tuple[CameraConfig, float]:
        return self._optima[k]

    def __repr__(self):
        return f"TableSet({self.algorithm_id!r}, levels={list(self.levels)})"


def argmax_cell(t: PerformanceTable) -> tuple[int, int]:
    """1-based (i, j) of the best cell; ties go to the lowest gain, then lowest shutter."""
    m = t.values
    best = m.max()
    # column-major scan visits (j, i) in tie-break order
    cols, rows = np.nonzero(m.T == best)
    return int(rows[0]) + 1, int(cols[0]) + 1


def optimum_at_level(t: PerformanceTable) -> tuple[CameraConfig, float]:
    i, j = argmax_cell(t)
    cfg = CameraConfig(axis_value(t.shutter_axis, i), axis_value(t.gain_axis, j))
    return cfg, t.at(i, j)


def _select_one(ts: TableSet, lux: float) -> tuple[CameraConfig, float, float, float, float]:
    levels = ts.levels
    x = min(max(lux, levels[0]), levels[-1])
    hi = bisect.bisect_left(levels, x)
    if levels[hi] == x:
        cfg, ap = ts.optimum(hi)
        return cfg, ap, x, x, x
    lo = hi - 1
    l0, l1 = levels[lo], levels[hi]
    (c0, ap0), (c1, ap1) = ts.optimum(lo), ts.optimum(hi)
    t = (x - l0) / (l1 - l0)
    cfg = CameraConfig(
        (1 - t) * c0.shutter_ms + t * c1.shutter_ms,
        (1 - t) * c0.gain_db + t * c1.gain_db,
    )
    ap = min(1.0, max(0.0, (1 - t) * ap0 + t * ap1))
    return cfg, ap, x, l0, l1


def select_for_illumination(sets: Sequence[TableSet], reading: LightReading | float) -> Selection:
    """Best (algorithm, config) for one reading; equal predicted AP keeps the earliest set."""
    if not sets:
        raise ValidationError("no table sets to select from")
    lux = reading.lux if isinstance(reading, LightReading) else LightReading(float(reading)).lux
    levels = sets[0].levels
    for ts in sets[1:]:
        if ts.levels != levels:
            raise ValidationError(
                f"illumination levels of {ts.algorithm_id!r} differ from {sets[0].algorithm_id!r}"
            )
    best: Selection | None = None
    for rank, ts in enumerate(sets):
        cfg, ap, x, l0, l1 = _select_one(ts, lux)
        if best is None or ap > best.predicted_ap:
            best = Selection(ts.algorithm_id, cfg, ap, x, l0, l1, rank)
    return best


def table_sets(tables: Sequence[PerformanceTable]) -> list[TableSet]:
    """Group tables by algorithm, in order of first appearance."""
    groups: dict[str, list[PerformanceTable]] = {}
    for t in tables:
        groups.setdefault(t.algorithm_id, []).append(t)
    return [TableSet(alg, ts) for alg, ts in groups.items()]
