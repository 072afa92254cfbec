"""Detection evaluation: IoU, NMS, greedy matching, PR curves and 11-point AP.

Boxes use continuous corner coordinates; area is ``(x_max - x_min) * (y_max - y_min)``
with no +1 pixel convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from activecam.errors import ValidationError

TP = True
FP = False

RECALL_SAMPLES = tuple(i / 10 for i in range(11))


@dataclass(frozen=True, order=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(c) for c in coords):
            raise ValidationError(f"non-finite box coordinates {coords}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValidationError(f"degenerate box {coords}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class Annotation:
    image_id: str
    class_label: str
    box: BoundingBox

    def __post_init__(self):
        if not self.class_label:
            raise ValidationError("empty class label")


@dataclass(frozen=True)
class Detection:
    image_id: str
    class_label: str
    box: BoundingBox
    score: float

    def __post_init__(self):
        if not self.class_label:
            raise ValidationError("empty class label")
        if not math.isfinite(self.score):
            raise ValidationError(f"non-finite score {self.score!r}")


@dataclass(frozen=True)
class PRPoint:
    recall: float
    precision: float


@dataclass(frozen=True)
class EvalResult:
    """AP of one pooled evaluation plus the bookkeeping needed to audit it."""

    ap: float
    n_gt: int
    n_det: int
    flags: tuple[bool, ...]
    no_ground_truth: bool = False
    curve: tuple[PRPoint, ...] = field(default=(), repr=False)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    return min(1.0, inter / union)


def _rank_key(d: Detection):
    # score ties resolved lexicographically so every run orders identically
    return (-d.score, d.image_id, d.class_label, d.box.x_min, d.box.y_min)


def sort_by_score(dets: Iterable[Detection]) -> list[Detection]:
    """Descending score, ties broken by (image_id, class_label, x_min, y_min)."""
    return sorted(dets, key=_rank_key)


def nms(dets: Sequence[Detection], overlap: float = 0.5) -> list[Detection]:
    """Class-wise greedy non-maximum suppression.

    A lower-scored detection is dropped when its IoU with an already kept
    detection of the same class is at least ``overlap``.
    """
    if not 0 < overlap < 1:
        raise ValidationError(f"overlap must lie in (0, 1), got {overlap}")
    if len({d.image_id for d in dets}) > 1:
        raise ValidationError("nms expects detections from a single image")
    kept: list[Detection] = []
    for d in sort_by_score(dets):
        if all(k.class_label != d.class_label or iou(k.box, d.box) < overlap for k in kept):
            kept.append(d)
    return kept


def match_detections(
    dets: Sequence[Detection], gts: Sequence[Annotation], threshold: float = 0.5
) -> list[bool]:
    """Flag each detection TP/FP, in descending score order.

    Each ground truth absorbs at most one detection; a detection takes the
    still-unmatched ground truth of its image and label with the largest IoU,
    provided that IoU reaches ``threshold``.
    """
    by_key: dict[tuple[str, str], list[int]] = {}
    for idx, g in enumerate(gts):
        by_key.setdefault((g.image_id, g.class_label), []).append(idx)
    taken = [False] * len(gts)
    flags = []
    for d in sort_by_score(dets):
        best, best_iou = -1, -1.0
        for idx in by_key.get((d.image_id, d.class_label), ()):
            if taken[idx]:
                continue
            o = iou(d.box, gts[idx].box)
            if o >= threshold and o > best_iou:
                best, best_iou = idx, o
        if best >= 0:
            taken[best] = True
            flags.append(TP)
        else:
            flags.append(FP)
    return flags


def precision_recall(flags: Sequence[bool], n_gt: int) -> list[PRPoint]:
    if n_gt < 0:
        raise ValidationError(f"negative ground-truth count {n_gt}")
    if n_gt == 0:
        return []
    curve = []
    tp = 0
    for k, flag in enumerate(flags, start=1):
        tp += bool(flag)
        curve.append(PRPoint(recall=tp / n_gt, precision=tp / k))
    return curve


def average_precision(curve: Sequence[PRPoint]) -> float:
    """VOC2007 11-point interpolated AP."""
    total = 0.0
    for r in RECALL_SAMPLES:
        total += max((p.precision for p in curve if p.recall >= r), default=0.0)
    return total / len(RECALL_SAMPLES)


def mean_average_precision(aps: Sequence[float]) -> float:
    if len(aps) == 0:
        raise ValidationError("mAP of an empty list")
    for ap in aps:
        if not 0.0 <= ap <= 1.0:
            raise ValidationError(f"AP {ap} outside [0, 1]")
    return math.fsum(aps) / len(aps)


def evaluate(
    dets: Sequence[Detection], gts: Sequence[Annotation], threshold: float = 0.5
) -> EvalResult:
    """Pool every detection/annotation into one PR curve and return its AP.

    With no ground truth the AP is defined as 0 and ``no_ground_truth`` is set.
    """
    flags = match_detections(dets, gts, threshold)
    curve = precision_recall(flags, len(gts))
    return EvalResult(
        ap=average_precision(curve),
        n_gt=len(gts),
        n_det=len(dets),
        flags=tuple(flags),
        no_ground_truth=len(gts) == 0,
        curve=tuple(curve),
    )
