"""TSV readers/writers for manifests, detections and annotations.

All three formats are UTF-8, tab-separated, with a mandatory header row.
Numbers are written with 6 fractional digits and parsed at full precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from activecam.errors import ParseError, ValidationError
from activecam.metrics import Annotation, BoundingBox, Detection
from activecam.perftable import GRID_SIZE, CellRuns

MANIFEST_HEADER = ("image_id", "object_class", "lux", "shutter_idx", "gain_idx", "path")
DETECTION_HEADER = ("image_id", "class", "score", "x_min", "y_min", "x_max", "y_max")
ANNOTATION_HEADER = ("image_id", "class", "x_min", "y_min", "x_max", "y_max")


@dataclass(frozen=True)
class ManifestRow:
    image_id: str
    object_class: str
    lux: float
    shutter_idx: int
    gain_idx: int
    path: str | None = None


@dataclass(frozen=True)
class DatasetSplit:
    train: frozenset[str]
    test: frozenset[str]

    def __post_init__(self):
        if self.train & self.test:
            raise ValidationError(f"split overlaps on {sorted(self.train & self.test)[:3]}")


def _rows(data: bytes, header: Sequence[str]):
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from None
    lines = text.splitlines()
    if not lines or tuple(lines[0].split("\t")) != tuple(header):
        raise ParseError(f"bad header, expected {' '.join(header)!r}", 1)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(fields)}", lineno)
        yield lineno, fields


def _real(text: str, lineno: int, col: int, name: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{name}: not a number {text!r}", lineno, col) from None
    if not math.isfinite(v):
        raise ParseError(f"{name}: non-finite value {text!r}", lineno, col)
    return v


def _index(text: str, lineno: int, col: int, name: str, n: int) -> int:
    try:
        v = int(text)
    except ValueError:
        raise ParseError(f"{name}: not an integer {text!r}", lineno, col) from None
    if not 1 <= v <= n:
        raise ParseError(f"{name} {v} outside 1..{n}", lineno, col)
    return v


def _token(text: str, lineno: int, col: int, name: str) -> str:
    if not text or text != text.strip():
        raise ParseError(f"{name}: empty or padded value {text!r}", lineno, col)
    return text


def _box(fields: Sequence[str], lineno: int, first_col: int) -> BoundingBox:
    names = ("x_min", "y_min", "x_max", "y_max")
    coords = [_real(f, lineno, first_col + k, names[k]) for k, f in enumerate(fields)]
    try:
        return BoundingBox(*coords)
    except ValidationError as exc:
        raise ParseError(str(exc), lineno, first_col) from None


def parse_manifest(data: bytes, n: int = GRID_SIZE) -> list[ManifestRow]:
    rows = []
    first_seen: dict[str, int] = {}
    for lineno, f in _rows(data, MANIFEST_HEADER):
        image_id = _token(f[0], lineno, 1, "image_id")
        if image_id in first_seen:
            raise ParseError(
                f"duplicate image_id {image_id!r} (first on line {first_seen[image_id]})", lineno, 1
            )
        first_seen[image_id] = lineno
        lux = _real(f[2], lineno, 3, "lux")
        if lux <= 0:
            raise ParseError(f"lux must be positive, got {f[2]}", lineno, 3)
        rows.append(
            ManifestRow(
                image_id=image_id,
                object_class=_token(f[1], lineno, 2, "object_class"),
                lux=lux,
                shutter_idx=_index(f[3], lineno, 4, "shutter_idx", n),
                gain_idx=_index(f[4], lineno, 5, "gain_idx", n),
                path=f[5] or None,
            )
        )
    return rows


def parse_detections(data: bytes) -> list[Detection]:
    out = []
    for lineno, f in _rows(data, DETECTION_HEADER):
        out.append(
            Detection(
                image_id=_token(f[0], lineno, 1, "image_id"),
                class_label=_token(f[1], lineno, 2, "class"),
                score=_real(f[2], lineno, 3, "score"),
                box=_box(f[3:7], lineno, 4),
            )
        )
    return out


def parse_annotations(data: bytes) -> list[Annotation]:
    out = []
    for lineno, f in _rows(data, ANNOTATION_HEADER):
        out.append(
            Annotation(
                image_id=_token(f[0], lineno, 1, "image_id"),
                class_label=_token(f[1], lineno, 2, "class"),
                box=_box(f[2:6], lineno, 3),
            )
        )
    return out


def _num(x: float) -> str:
    return f"{x:.6f}"


def _write(header: Sequence[str], rows: Iterable[Sequence[str]]) -> bytes:
    lines = ["\t".join(header)] + ["\t".join(r) for r in rows]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _box_fields(b: BoundingBox) -> list[str]:
    return [_num(b.x_min), _num(b.y_min), _num(b.x_max), _num(b.y_max)]


def write_manifest(rows: Iterable[ManifestRow]) -> bytes:
    return _write(
        MANIFEST_HEADER,
        (
            [r.image_id, r.object_class, _num(r.lux), str(r.shutter_idx), str(r.gain_idx), r.path or ""]
            for r in rows
        ),
    )


def write_detections(dets: Iterable[Detection]) -> bytes:
    return _write(
        DETECTION_HEADER,
        ([d.image_id, d.class_label, _num(d.score), *_box_fields(d.box)] for d in dets),
    )


def write_annotations(gts: Iterable[Annotation]) -> bytes:
    return _write(ANNOTATION_HEADER, ([g.image_id, g.class_label, *_box_fields(g.box)] for g in gts))


def group_cells(
    manifest: Sequence[ManifestRow],
    detections: Sequence[Detection],
    annotations: Sequence[Annotation],
    lux_level: float,
    rel_tol: float = 1e-9,
) -> list[CellRuns]:
    """Bucket the level's detections and annotations by (shutter_idx, gain_idx).

    Cells are returned in row-major order; only cells with at least one
    manifest image at ``lux_level`` appear.
    """
    by_id = {r.image_id: r for r in manifest}
    for kind, items in (("detection", detections), ("annotation", annotations)):
        for k, item in enumerate(items):
            if item.image_id not in by_id:
                raise ValidationError(f"{kind} {k} references unknown image_id {item.image_id!r}")

    def at_level(r: ManifestRow) -> bool:
        return math.isclose(r.lux, lux_level, rel_tol=rel_tol)

    cells: dict[tuple[int, int], tuple[list, list]] = {}
    for r in manifest:
        if at_level(r):
            cells.setdefault((r.shutter_idx, r.gain_idx), ([], []))
    for d in detections:
        r = by_id[d.image_id]
        if at_level(r):
            cells[(r.shutter_idx, r.gain_idx)][0].append(d)
    for g in annotations:
        r = by_id[g.image_id]
        if at_level(r):
            cells[(r.shutter_idx, r.gain_idx)][1].append(g)
    return [CellRuns(i, j, tuple(ds), tuple(gs)) for (i, j), (ds, gs) in sorted(cells.items())]


def split_manifest(manifest: Sequence[ManifestRow], train_classes: Iterable[str]) -> DatasetSplit:
    """Split by object: images of ``train_classes`` train, all others test."""
    train_classes = set(train_classes)
    train = frozenset(r.image_id for r in manifest if r.object_class in train_classes)
    test = frozenset(r.image_id for r in manifest) - train
    return DatasetSplit(train, test)


def parse_lux_stream(lines: Iterable[str]):
    """Yield one lux value per non-blank line of a sensor stream."""
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        v = _real(text, lineno, 1, "lux")
        if v <= 0:
            raise ParseError(f"lux must be positive, got {text}", lineno, 1)
        yield v
