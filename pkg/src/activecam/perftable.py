"""Shutter x gain performance tables: construction, smoothing and the v1 text format.

Row index ``i`` is the shutter sample (longer shutter further down), column
index ``j`` the gain sample. Indices are 1-based everywhere in the public API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from activecam import metrics
from activecam.errors import ParseError, ValidationError

FORMAT_HEADER = "perftable v1"

# Flea3 FL3-U3-13E4C-C permissible ranges.
SHUTTER_RANGE_MS = (0.016, 24.973)
GAIN_RANGE_DB = (0.0, 24.014)
GRID_SIZE = 8


@dataclass(frozen=True)
class AxisSpec:
    a: float
    b: float
    n: int = GRID_SIZE
    unit: str = "ms"

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise ValidationError(f"axis range must satisfy a < b, got [{self.a}, {self.b}]")
        if self.n < 2:
            raise ValidationError(f"axis needs at least 2 samples, got {self.n}")
        if self.unit not in ("ms", "dB"):
            raise ValidationError(f"unknown axis unit {self.unit!r}")

    @property
    def low(self) -> float:
        return self.a

    @property
    def high(self) -> float:
        """Largest sampled value; the sampling never reaches ``b`` itself."""
        return axis_value(self, self.n)

    def values(self) -> list[float]:
        return [axis_value(self, i) for i in range(1, self.n + 1)]


def shutter_axis(n: int = GRID_SIZE) -> AxisSpec:
    return AxisSpec(*SHUTTER_RANGE_MS, n=n, unit="ms")


def gain_axis(n: int = GRID_SIZE) -> AxisSpec:
    return AxisSpec(*GAIN_RANGE_DB, n=n, unit="dB")


def axis_value(axis: AxisSpec, i: int) -> float:
    """Physical value of the i-th sample: ``a + (b - a) / n * (i - 1)``."""
    if not 1 <= i <= axis.n:
        raise ValidationError(f"index {i} outside 1..{axis.n}")
    return axis.a + (axis.b - axis.a) / axis.n * (i - 1)


def axis_nearest_index(axis: AxisSpec, v: float) -> int:
    if not math.isfinite(v):
        raise ValidationError(f"non-finite axis value {v!r}")
    best, best_d = 1, math.inf
    for i in range(1, axis.n + 1):
        d = abs(axis_value(axis, i) - v)
        if d < best_d:  # strict: ties stay on the lower index
            best, best_d = i, d
    return best


@dataclass(frozen=True)
class CellRuns:
    i: int
    j: int
    detections: tuple[metrics.Detection, ...] = ()
    annotations: tuple[metrics.Annotation, ...] = ()


@dataclass(frozen=True, eq=False)
class PerformanceTable:
    algorithm_id: str
    illumination: float
    values: np.ndarray
    shutter_axis: AxisSpec = field(default_factory=shutter_axis)
    gain_axis: AxisSpec = field(default_factory=gain_axis)
    sigma: float | None = None
    missing: tuple[tuple[int, int], ...] = ()
    no_ground_truth: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if not self.algorithm_id or any(c.isspace() for c in self.algorithm_id):
            raise ValidationError(f"algorithm id must be a non-empty token, got {self.algorithm_id!r}")
        if not (math.isfinite(self.illumination) and self.illumination > 0):
            raise ValidationError(f"illumination must be positive, got {self.illumination}")
        shape = (self.shutter_axis.n, self.gain_axis.n)
        if vals.shape != shape:
            raise ValidationError(f"table shape {vals.shape} does not match axes {shape}")
        if not np.all(np.isfinite(vals)) or vals.min() < 0.0 or vals.max() > 1.0:
            raise ValidationError("table entries must lie in [0, 1]")
        if self.sigma is not None and not self.sigma > 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")

    @property
    def smoothing(self) -> str:
        return "none" if self.sigma is None else f"gaussian:{_fmt_real(self.sigma)}"

    def at(self, i: int, j: int) -> float:
        return float(self.values[i - 1, j - 1])

    def __eq__(self, other):
        if not isinstance(other, PerformanceTable):
            return NotImplemented
        return (
            self.algorithm_id == other.algorithm_id
            and self.illumination == other.illumination
            and self.shutter_axis == other.shutter_axis
            and self.gain_axis == other.gain_axis
            and self.sigma == other.sigma
            and self.missing == other.missing
            and self.no_ground_truth == other.no_ground_truth
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def build_table(
    cells: Sequence[CellRuns],
    algorithm_id: str,
    illumination: float,
    shutter: AxisSpec | None = None,
    gain: AxisSpec | None = None,
    allow_missing: bool = False,
    threshold: float = 0.5,
) -> PerformanceTable:
    """AP of every (shutter, gain) cell, pooled over that cell's images."""
    shutter = shutter or shutter_axis()
    gain = gain or gain_axis()
    values = np.zeros((shutter.n, gain.n))
    seen: set[tuple[int, int]] = set()
    empty = []
    for cell in cells:
        key = (cell.i, cell.j)
        if not (1 <= cell.i <= shutter.n and 1 <= cell.j <= gain.n):
            raise ValidationError(f"cell {key} outside the {shutter.n}x{gain.n} grid")
        if key in seen:
            raise ValidationError(f"duplicate cell {key}")
        seen.add(key)
        res = metrics.evaluate(cell.detections, cell.annotations, threshold)
        values[cell.i - 1, cell.j - 1] = res.ap
        if res.no_ground_truth:
            empty.append(key)
    missing = [(i, j) for i in range(1, shutter.n + 1) for j in range(1, gain.n + 1) if (i, j) not in seen]
    if missing and not allow_missing:
        raise ValidationError(f"{len(missing)} cells missing, first {missing[0]}")
    return PerformanceTable(
        algorithm_id=algorithm_id,
        illumination=illumination,
        values=values,
        shutter_axis=shutter,
        gain_axis=gain,
        missing=tuple(missing),
        no_ground_truth=tuple(sorted(empty)),
    )


def gaussian_weights(sigma: float) -> np.ndarray:
    """Unnormalised 3x3 Gaussian taps, indexed [k + 1, l + 1] for offsets k, l in {-1, 0, 1}."""
    k = np.arange(-1, 2)
    return np.exp(-(k[:, None] ** 2 + k[None, :] ** 2) / (2.0 * sigma**2))


def gaussian_smooth(t: PerformanceTable, sigma: float) -> PerformanceTable:
    """3x3 Gaussian smoothing with the kernel cropped and renormalised at borders."""
    if not (math.isfinite(sigma) and sigma > 0):
        raise ValidationError(f"sigma must be positive, got {sigma}")
    if t.sigma is not None:
        raise ValidationError("table is already smoothed")
    w = gaussian_weights(sigma)
    m = t.values
    rows, cols = m.shape
    # zero padding drops out-of-grid taps from both sums, which is the crop
    padded = np.pad(m, 1)
    inside = np.pad(np.ones_like(m), 1)
    num = np.zeros_like(m)
    den = np.zeros_like(m)
    for k in range(3):
        for l in range(3):
            num += w[k, l] * padded[k : k + rows, l : l + cols]
            den += w[k, l] * inside[k : k + rows, l : l + cols]
    out = num / den
    # a convex combination cannot leave [0, 1] except by rounding
    np.clip(out, 0.0, 1.0, out=out)
    return PerformanceTable(
        algorithm_id=t.algorithm_id,
        illumination=t.illumination,
        values=out,
        shutter_axis=t.shutter_axis,
        gain_axis=t.gain_axis,
        sigma=float(sigma),
        missing=t.missing,
        no_ground_truth=t.no_ground_truth,
    )


# ---------------------------------------------------------------- text format


def _fmt_real(x: float) -> str:
    # shortest repr that round-trips exactly
    return repr(float(x))


def _fmt_cells(cells) -> str:
    return ";".join(f"{i},{j}" for i, j in cells)


def _fmt_axis(name: str, axis: AxisSpec) -> str:
    return f"{name}={_fmt_real(axis.a)},{_fmt_real(axis.b)},{axis.n},{axis.unit}"


def save_table(t: PerformanceTable) -> bytes:
    lines = [
        FORMAT_HEADER,
        f"algorithm={t.algorithm_id} lux={_fmt_real(t.illumination)} smoothing={t.smoothing}",
        _fmt_axis("shutter", t.shutter_axis),
        _fmt_axis("gain", t.gain_axis),
    ]
    for row in t.values:
        lines.append("\t".join(f"{v:.6f}" for v in row))
    if t.missing:
        lines.append(f"# missing={_fmt_cells(t.missing)}")
    if t.no_ground_truth:
        lines.append(f"# no-ground-truth={_fmt_cells(t.no_ground_truth)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _parse_real(text: str, line: int, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{what}: not a number {text!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"{what}: non-finite value {text!r}", line)
    return v


def _parse_axis(text: str, name: str, line: int) -> AxisSpec:
    prefix = name + "="
    if not text.startswith(prefix):
        raise ParseError(f"expected '{prefix}...'", line)
    parts = text[len(prefix) :].split(",")
    if len(parts) != 4:
        raise ParseError(f"{name} axis needs a,b,n,unit", line)
    try:
        n = int(parts[2])
    except ValueError:
        raise ParseError(f"{name} axis sample count {parts[2]!r}", line) from None
    try:
        return AxisSpec(_parse_real(parts[0], line, name), _parse_real(parts[1], line, name), n, parts[3])
    except ParseError:
        raise
    except ValidationError as exc:
        raise ParseError(str(exc), line) from None


def _parse_cells(text: str, line: int) -> tuple[tuple[int, int], ...]:
    out = []
    for item in filter(None, text.split(";")):
        try:
            i, j = (int(x) for x in item.split(","))
        except ValueError:
            raise ParseError(f"bad cell reference {item!r}", line) from None
        out.append((i, j))
    return tuple(out)


def load_table(data: bytes) -> PerformanceTable:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != FORMAT_HEADER:
        got = lines[0] if lines else ""
        raise ParseError(f"unsupported header {got!r}, expected {FORMAT_HEADER!r}", 1)
    if len(lines) < 4:
        raise ParseError("truncated header", len(lines))

    meta = {}
    for tok in lines[1].split(" "):
        key, sep, val = tok.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {tok!r}", 2)
        meta[key] = val
    if set(meta) != {"algorithm", "lux", "smoothing"}:
        raise ParseError(f"metadata keys {sorted(meta)}", 2)
    lux = _parse_real(meta["lux"], 2, "lux")
    smoothing = meta["smoothing"]
    if smoothing == "none":
        sigma = None
    elif smoothing.startswith("gaussian:"):
        sigma = _parse_real(smoothing[len("gaussian:") :], 2, "sigma")
    else:
        raise ParseError(f"unknown smoothing {smoothing!r}", 2)

    shutter = _parse_axis(lines[2], "shutter", 3)
    gain = _parse_axis(lines[3], "gain", 4)

    rows = []
    body = lines[4 : 4 + shutter.n]
    if len(body) < shutter.n:
        raise ParseError(f"expected {shutter.n} grid rows, found {len(body)}", 4 + len(body) + 1)
    for r, raw in enumerate(body):
        lineno = 5 + r
        cells = raw.split("\t")
        if len(cells) != gain.n:
            raise ParseError(f"malformed grid: {len(cells)} columns, expected {gain.n}", lineno)
        row = []
        for c, cell in enumerate(cells, start=1):
            v = _parse_real(cell, lineno, "entry")
            if not 0.0 <= v <= 1.0:
                raise ParseError(f"entry {cell} outside [0, 1]", lineno, c)
            row.append(v)
        rows.append(row)

    missing: tuple[tuple[int, int], ...] = ()
    no_gt: tuple[tuple[int, int], ...] = ()
    for k, raw in enumerate(lines[4 + shutter.n :], start=5 + shutter.n):
        if raw.startswith("# missing="):
            missing = _parse_cells(raw[len("# missing=") :], k)
        elif raw.startswith("# no-ground-truth="):
            no_gt = _parse_cells(raw[len("# no-ground-truth=") :], k)
        else:
            raise ParseError(f"unexpected trailing line {raw!r}", k)

    try:
        return PerformanceTable(
            algorithm_id=meta["algorithm"],
            illumination=lux,
            values=np.array(rows),
            shutter_axis=shutter,
            gain_axis=gain,
            sigma=sigma,
            missing=missing,
            no_ground_truth=no_gt,
        )
    except ValidationError as exc:
        raise ParseError(str(exc), 2) from None
