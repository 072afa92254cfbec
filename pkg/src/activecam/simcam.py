"""Statistics-level camera, detector and auto-exposure simulator.

A scene is an object box of one reflectance on a background of another. Under
a camera config every pixel of a region has the noiseless value

    k * lux * reflectance * shutter_ms * 10 ** (gain_db / 20)

plus zero-mean Gaussian read noise of ``read_noise_sigma * 10 ** (gain_db / 20)``,
clipped to ``[0, full_scale]``. Region means and clipped fractions of that
clipped Gaussian are computed in closed form, so rendering needs no sampling.

The synthetic detector turns image statistics into a quality score and emits
detections whose measured AP falls as the quality falls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from activecam import metrics
from activecam.errors import ParseError, ValidationError
from activecam.metrics import Annotation, BoundingBox, Detection
from activecam.perftable import (
    AxisSpec,
    CellRuns,
    build_table,
    gain_axis,
    gaussian_smooth,
    shutter_axis,
)
from activecam.selector import CameraConfig, TableSet, select_for_illumination

DEFAULT_LEVELS = (50.0, 200.0, 400.0, 800.0, 1600.0, 3200.0)
DEFAULT_CLASSES = ("bicycle", "bottle", "chair", "pottedplant", "tvmonitor")


@dataclass(frozen=True)
class SceneSpec:
    illumination: float
    object_reflectance: float
    background_reflectance: float
    object_box: BoundingBox
    frame_size: tuple[int, int] = (640, 480)
    seed: int = 0
    object_class: str = "object"

    def __post_init__(self):
        if not (math.isfinite(self.illumination) and self.illumination > 0):
            raise ValidationError(f"illumination must be positive, got {self.illumination}")
        for name in ("object_reflectance", "background_reflectance"):
            r = getattr(self, name)
            if not 0 < r <= 1:
                raise ValidationError(f"{name} must lie in (0, 1], got {r}")
        w, h = self.frame_size
        b = self.object_box
        if b.x_min < 0 or b.y_min < 0 or b.x_max > w or b.y_max > h:
            raise ValidationError(f"object box {b} not inside a {w}x{h} frame")

    @property
    def frame_box(self) -> BoundingBox:
        return BoundingBox(0.0, 0.0, float(self.frame_size[0]), float(self.frame_size[1]))

    def annotation(self, image_id: str) -> Annotation:
        return Annotation(image_id, self.object_class, self.object_box)


@dataclass(frozen=True)
class ExposureModel:
    k: float = 0.02  # counts per lux*ms at unit reflectance and 0 dB
    read_noise_sigma: float = 1.5
    full_scale: float = 255.0

    def __post_init__(self):
        if not self.k > 0:
            raise ValidationError(f"sensitivity k must be positive, got {self.k}")
        if not self.read_noise_sigma >= 0:
            raise ValidationError(f"read noise must be non-negative, got {self.read_noise_sigma}")
        if not self.full_scale > 0:
            raise ValidationError(f"full scale must be positive, got {self.full_scale}")


@dataclass(frozen=True)
class ImageStats:
    mean_brightness: float  # over the requested ROI
    clipped_fraction: float  # share of object-box pixels at full scale
    effective_noise_sigma: float
    object_contrast: float
    object_mean: float = 0.0
    background_mean: float = 0.0


@dataclass(frozen=True)
class DetectorModel:
    """Quality map of a synthetic detector.

    q = (1 - exp(-contrast / contrast_scale))
        * (1 - clipped_fraction) ** alpha
        / (1 + (noise_sigma / noise_scale) ** 2)
    """

    name: str = "synthetic"
    contrast_scale: float = 15.0
    noise_scale: float = 12.0
    alpha: float = 2.0

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise ValidationError(f"detector name must be a non-empty token, got {self.name!r}")
        if not (self.contrast_scale > 0 and self.noise_scale > 0 and self.alpha > 0):
            raise ValidationError(f"detector constants must be positive: {self}")


# score above which the true box is reported cleanly
CLEAN_QUALITY = 0.5
# largest box shift at q = 0, as a fraction of box size
MAX_JITTER = 0.6
MAX_FALSE_POSITIVES = 3


# ------------------------------------------------------------------ rendering


def _phi(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def _cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def clipped_gaussian(v: float, sigma: float, full_scale: float) -> tuple[float, float]:
    """Mean of clip(v + sigma * Z, 0, full_scale) and P(pixel at full scale)."""
    if sigma == 0:
        return min(max(v, 0.0), full_scale), 1.0 if v >= full_scale else 0.0
    a = (0.0 - v) / sigma
    b = (full_scale - v) / sigma
    above = _cdf(-b)
    inside = v * (_cdf(b) - _cdf(a)) + sigma * (_phi(a) - _phi(b))
    mean = inside + full_scale * above
    return min(max(mean, 0.0), full_scale), above


def _overlap_area(a: BoundingBox, b: BoundingBox) -> float:
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    return max(iw, 0.0) * max(ih, 0.0)


def render(
    scene: SceneSpec,
    config: CameraConfig,
    model: ExposureModel,
    roi: BoundingBox | None = None,
) -> ImageStats:
    roi = roi or scene.frame_box
    gain = config.gain_linear
    scale = model.k * scene.illumination * config.shutter_ms * gain
    sigma = model.read_noise_sigma * gain
    obj_mean, obj_clip = clipped_gaussian(scale * scene.object_reflectance, sigma, model.full_scale)
    bg_mean, _ = clipped_gaussian(scale * scene.background_reflectance, sigma, model.full_scale)

    roi_area = roi.area
    obj_in_roi = _overlap_area(roi, scene.object_box)
    mean = (obj_in_roi * obj_mean + (roi_area - obj_in_roi) * bg_mean) / roi_area
    return ImageStats(
        mean_brightness=mean,
        clipped_fraction=min(max(obj_clip, 0.0), 1.0),
        effective_noise_sigma=sigma,
        object_contrast=abs(obj_mean - bg_mean),
        object_mean=obj_mean,
        background_mean=bg_mean,
    )


# -------------------------------------------------------------- auto-exposure


@dataclass(frozen=True)
class AutoExposure:
    config: CameraConfig
    converged: bool
    iterations: int
    mean_brightness: float


def auto_expose(
    scene: SceneSpec,
    model: ExposureModel,
    target_mean: float = 118.0,
    roi: BoundingBox | None = None,
    tol: float = 5.0,
    max_iter: int = 50,
    initial: CameraConfig | None = None,
    shutter: AxisSpec | None = None,
    gain: AxisSpec | None = None,
) -> AutoExposure:
    """Mean-brightness auto-exposure with shutter priority.

    Brightening lengthens the shutter until it hits the largest sampled value
    and then raises gain; darkening drops gain first and then shortens the
    shutter. Stops once the ROI mean is within ``tol`` of the target, or when
    both parameters are pinned at a limit.
    """
    if not 0 < target_mean < model.full_scale:
        raise ValidationError(f"target mean must lie in (0, {model.full_scale}), got {target_mean}")
    shutter = shutter or shutter_axis()
    gain = gain or gain_axis()
    s_lo, s_hi = shutter.low, shutter.high
    g_lo, g_hi = gain.low, gain.high
    cfg = initial or CameraConfig((s_lo + s_hi) / 2.0, g_lo)
    cfg = CameraConfig(min(max(cfg.shutter_ms, s_lo), s_hi), min(max(cfg.gain_db, g_lo), g_hi))

    mean = render(scene, cfg, model, roi).mean_brightness
    for it in range(1, max_iter + 1):
        if abs(mean - target_mean) <= tol:
            return AutoExposure(cfg, True, it - 1, mean)
        ratio = target_mean / mean if mean > 0 else 1e6
        s, g = cfg.shutter_ms, cfg.gain_linear
        if ratio > 1:
            new_s = min(s * ratio, s_hi)
            g_db = 20.0 * math.log10(g * ratio * s / new_s)
        else:
            g_db = max(20.0 * math.log10(g * ratio), g_lo)
            new_s = max(s * ratio * g / 10.0 ** (g_db / 20.0), s_lo)
        nxt = CameraConfig(new_s, min(max(g_db, g_lo), g_hi))
        if nxt == cfg:
            break
        cfg = nxt
        mean = render(scene, cfg, model, roi).mean_brightness
    else:
        it = max_iter
    return AutoExposure(cfg, abs(mean - target_mean) <= tol, it, mean)


# ------------------------------------------------------------------ detection


def detection_quality(stats: ImageStats, detector: DetectorModel = DetectorModel()) -> float:
    q_contrast = -math.expm1(-stats.object_contrast / detector.contrast_scale)
    q_clip = (1.0 - stats.clipped_fraction) ** detector.alpha
    q_noise = 1.0 / (1.0 + (stats.effective_noise_sigma / detector.noise_scale) ** 2)
    return min(max(q_contrast * q_clip * q_noise, 0.0), 1.0)


def synthetic_detect(
    stats: ImageStats,
    gt: Annotation,
    seed: int | Sequence[int],
    detector: DetectorModel = DetectorModel(),
) -> list[Detection]:
    """Detections for one image holding the single object ``gt``.

    With quality q >= 0.5 the true box is reported with score q. Below that
    the box is shifted by up to ``MAX_JITTER * severity`` of its size and up
    to three false positives with scores in [0, 0.5) appear, where
    severity = (0.5 - q) / 0.5. At q = 0 the true box is not reported.
    """
    q = detection_quality(stats, detector)
    box = gt.box
    if q >= CLEAN_QUALITY:
        return [Detection(gt.image_id, gt.class_label, box, q)]

    rng = np.random.default_rng(seed)
    severity = (CLEAN_QUALITY - q) / CLEAN_QUALITY
    dets = []
    if q > 0:
        dx, dy = rng.uniform(-1.0, 1.0, size=2) * MAX_JITTER * severity
        shifted = BoundingBox(
            box.x_min + dx * box.width,
            box.y_min + dy * box.height,
            box.x_max + dx * box.width,
            box.y_max + dy * box.height,
        )
        dets.append(Detection(gt.image_id, gt.class_label, shifted, q))
    n_fp = int(rng.binomial(MAX_FALSE_POSITIVES, severity))
    for _ in range(n_fp):
        # at least 1.5 box widths away horizontally, so never overlapping the object
        sign = 1.0 if rng.random() < 0.5 else -1.0
        ox = sign * (1.5 + rng.random()) * box.width
        oy = rng.uniform(-1.0, 1.0) * box.height
        score = float(rng.uniform(0.0, CLEAN_QUALITY))
        fp = BoundingBox(box.x_min + ox, box.y_min + oy, box.x_max + ox, box.y_max + oy)
        dets.append(Detection(gt.image_id, gt.class_label, fp, score))
    return metrics.sort_by_score(dets)


# --------------------------------------------------------------- configuration


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _pair(text: str) -> tuple[float, float]:
    v = _floats(text)
    if len(v) != 2 or not v[0] <= v[1]:
        raise ValueError(f"expected 'low,high', got {text!r}")
    return v


def _detectors(text: str) -> tuple[DetectorModel, ...]:
    out = []
    for item in text.split(","):
        name, c, s, a = item.split(":")
        out.append(DetectorModel(name, float(c), float(s), float(a)))
    return tuple(out)


@dataclass(frozen=True)
class SimConfig:
    """Everything ``simulate`` needs; read from ``key=value`` lines."""

    k: float = 0.02
    read_noise_sigma: float = 1.5
    full_scale: float = 255.0
    levels: tuple[float, ...] = DEFAULT_LEVELS
    classes: tuple[str, ...] = DEFAULT_CLASSES
    frame: tuple[int, int] = (640, 480)
    object_reflectance: tuple[float, float] = (0.3, 0.95)
    background_reflectance: tuple[float, float] = (0.1, 0.4)
    object_fraction: tuple[float, float] = (0.08, 0.2)
    detectors: tuple[DetectorModel, ...] = (
        DetectorModel("localfeat", 15.0, 12.0, 2.0),
        DetectorModel("convnet", 8.0, 7.0, 3.0),
    )
    sigma: float = 1.0
    train_objects: int = 2  # training scenes per class and level
    trials: int = 3  # images per scene
    ae_target: float = 118.0
    ae_tol: float = 5.0
    ae_max_iter: int = 50
    # recorded for provenance only; no effect on the model
    aperture: float = 4.0
    white_balance: tuple[float, float] = (500.0, 800.0)

    @property
    def model(self) -> ExposureModel:
        return ExposureModel(self.k, self.read_noise_sigma, self.full_scale)

    _PARSERS = {
        "k": float,
        "read_noise_sigma": float,
        "full_scale": float,
        "levels": _floats,
        "classes": lambda t: tuple(t.split(",")),
        "frame": lambda t: tuple(int(x) for x in t.split(",")),
        "object_reflectance": _pair,
        "background_reflectance": _pair,
        "object_fraction": _pair,
        "detectors": _detectors,
        "sigma": float,
        "train_objects": int,
        "trials": int,
        "ae_target": float,
        "ae_tol": float,
        "ae_max_iter": int,
        "aperture": float,
        "white_balance": _pair,
    }

    @classmethod
    def from_text(cls, text: str) -> "SimConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep or key not in cls._PARSERS:
                raise ParseError(f"unknown setting {key!r}", lineno)
            if key in values:
                raise ParseError(f"duplicate setting {key!r}", lineno)
            try:
                values[key] = cls._PARSERS[key](val)
            except (ValueError, ValidationError) as exc:
                raise ParseError(f"{key}: {exc}", lineno) from None
        try:
            return cls(**values)
        except ValidationError as exc:
            raise ParseError(str(exc)) from None

    def __post_init__(self):
        self.model  # validates k / noise / full scale
        if not self.levels or any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValidationError("levels must be strictly increasing")
        if not self.classes or len(self.frame) != 2:
            raise ValidationError("need at least one class and a width,height frame")
        if not 0 < self.object_fraction[0] <= self.object_fraction[1] < 1:
            raise ValidationError(f"object fraction {self.object_fraction} outside (0, 1)")
        if not self.detectors or len({d.name for d in self.detectors}) != len(self.detectors):
            raise ValidationError("detector names must be unique")
        if self.train_objects < 1 or self.trials < 1:
            raise ValidationError("train_objects and trials must be positive")

    def to_text(self) -> str:
        def fmt(v):
            if isinstance(v, tuple):
                if v and isinstance(v[0], DetectorModel):
                    return ",".join(
                        f"{d.name}:{d.contrast_scale!r}:{d.noise_scale!r}:{d.alpha!r}" for d in v
                    )
                return ",".join(fmt(x) for x in v)
            return repr(v) if isinstance(v, float) else str(v)

        return "".join(f"{f.name}={fmt(getattr(self, f.name))}\n" for f in fields(self))


# ------------------------------------------------------------------ scenes


def draw_scenes(cfg: SimConfig, seed: int | Sequence[int], per_class: int = 1) -> list[SceneSpec]:
    """``per_class`` random scenes for every (level, class), level-major order."""
    rng = np.random.default_rng(seed)
    w, h = cfg.frame
    out = []
    for lux in cfg.levels:
        for cls in cfg.classes:
            for _ in range(per_class):
                frac = rng.uniform(*cfg.object_fraction)
                aspect = rng.uniform(0.6, 1.6)
                bw = min(math.sqrt(frac * w * h * aspect), 0.9 * w)
                bh = min(frac * w * h / bw, 0.9 * h)
                x0 = rng.uniform(0.0, w - bw)
                y0 = rng.uniform(0.0, h - bh)
                out.append(
                    SceneSpec(
                        illumination=float(lux),
                        object_reflectance=float(rng.uniform(*cfg.object_reflectance)),
                        background_reflectance=float(rng.uniform(*cfg.background_reflectance)),
                        object_box=BoundingBox(x0, y0, x0 + bw, y0 + bh),
                        frame_size=(w, h),
                        seed=int(rng.integers(2**31)),
                        object_class=cls,
                    )
                )
    return out


def _image_runs(
    scenes: Sequence[SceneSpec],
    config: CameraConfig,
    model: ExposureModel,
    detector: DetectorModel,
    trials: int,
    det_index: int,
    tag: str,
) -> tuple[list[Detection], list[Annotation]]:
    dets: list[Detection] = []
    gts: list[Annotation] = []
    for s_idx, scene in enumerate(scenes):
        stats = render(scene, config, model)
        for trial in range(trials):
            gt = scene.annotation(f"{tag}/{s_idx}/{trial}")
            gts.append(gt)
            dets.extend(synthetic_detect(stats, gt, (scene.seed, trial, det_index), detector))
    return dets, gts


def config_ap(
    scenes: Sequence[SceneSpec],
    config: CameraConfig,
    model: ExposureModel,
    detector: DetectorModel = DetectorModel(),
    trials: int = 1,
    det_index: int = 0,
) -> float:
    """AP pooled over ``trials`` images of every scene, all taken with ``config``."""
    dets, gts = _image_runs(scenes, config, model, detector, trials, det_index, "img")
    return metrics.evaluate(dets, gts).ap


def build_sim_tables(
    cfg: SimConfig,
    seed: int = 0,
    shutter: AxisSpec | None = None,
    gain: AxisSpec | None = None,
    smooth: bool = True,
) -> list[TableSet]:
    """Performance tables from a simulated training split, one TableSet per detector."""
    shutter = shutter or shutter_axis()
    gain = gain or gain_axis()
    scenes = draw_scenes(cfg, (seed, 0), per_class=cfg.train_objects)
    model = cfg.model
    sets = []
    for d_idx, det in enumerate(cfg.detectors):
        tables = []
        for lux in cfg.levels:
            level_scenes = [s for s in scenes if s.illumination == lux]
            cells = []
            for i, sv in enumerate(shutter.values(), start=1):
                for j, gv in enumerate(gain.values(), start=1):
                    dets, gts = _image_runs(
                        level_scenes, CameraConfig(sv, gv), model, det, cfg.trials, d_idx, f"train/{i}/{j}"
                    )
                    cells.append(CellRuns(i, j, tuple(dets), tuple(gts)))
            t = build_table(cells, det.name, lux, shutter, gain)
            tables.append(gaussian_smooth(t, cfg.sigma) if smooth else t)
        sets.append(TableSet(det.name, tables))
    return sets


# --------------------------------------------------------------- closed loop


@dataclass(frozen=True)
class SceneOutcome:
    index: int
    lux: float
    object_class: str
    algorithm: str
    auto_ap: float
    active_ap: float
    auto_config: CameraConfig
    active_config: CameraConfig
    auto_converged: bool


@dataclass
class ClosedLoopReport:
    auto_map: float
    active_map: float
    selected_map: float
    per_algorithm: dict[str, tuple[float, float]]
    per_level: dict[float, tuple[float, float]]
    per_scene: list[SceneOutcome] = field(repr=False)

    def format(self) -> str:
        """Tab-separated summary block followed by the per-scene breakdown."""
        lines = [
            "metric\tauto_map\tactive_map",
            f"overall\t{self.auto_map:.6f}\t{self.active_map:.6f}",
            f"selected\t-\t{self.selected_map:.6f}",
        ]
        for alg, (a, b) in self.per_algorithm.items():
            lines.append(f"algorithm:{alg}\t{a:.6f}\t{b:.6f}")
        for lux, (a, b) in self.per_level.items():
            lines.append(f"lux:{lux:.6f}\t{a:.6f}\t{b:.6f}")
        lines.append("")
        lines.append(
            "scene\tlux\tclass\talgorithm\tauto_ap\tactive_ap\tauto_shutter_ms\tauto_gain_db"
            "\tactive_shutter_ms\tactive_gain_db\tauto_converged"
        )
        for o in self.per_scene:
            lines.append(
                f"{o.index}\t{o.lux:.6f}\t{o.object_class}\t{o.algorithm}\t{o.auto_ap:.6f}\t{o.active_ap:.6f}"
                f"\t{o.auto_config.shutter_ms:.6f}\t{o.auto_config.gain_db:.6f}"
                f"\t{o.active_config.shutter_ms:.6f}\t{o.active_config.gain_db:.6f}"
                f"\t{str(o.auto_converged).lower()}"
            )
        return "\n".join(lines) + "\n"


def _check_axes(tablesets: Sequence[TableSet], shutter: AxisSpec, gain: AxisSpec) -> None:
    for ts in tablesets:
        if ts.shutter_axis != shutter or ts.gain_axis != gain:
            raise ValidationError(f"tables of {ts.algorithm_id!r} use axes that differ from the camera ranges")


def run_closed_loop(
    scenes: Sequence[SceneSpec],
    model: ExposureModel,
    tablesets: Sequence[TableSet],
    trials: int = 3,
    detectors: Sequence[DetectorModel] | None = None,
    ae_target: float = 118.0,
    ae_tol: float = 5.0,
    ae_max_iter: int = 50,
    shutter: AxisSpec | None = None,
    gain: AxisSpec | None = None,
) -> ClosedLoopReport:
    """Active control versus auto-exposure on the same scenes.

    Per algorithm, active control queries only that algorithm's tables; the
    ``selected_map`` column lets the selector also pick the algorithm.
    Every scene is imaged ``trials`` times under each config and scored by
    the AP of those images.
    """
    if not scenes or not tablesets:
        raise ValidationError("closed loop needs scenes and tables")
    shutter = shutter or shutter_axis()
    gain = gain or gain_axis()
    _check_axes(tablesets, shutter, gain)
    if detectors is None:
        detectors = [DetectorModel(ts.algorithm_id) for ts in tablesets]
    by_name = {d.name: (k, d) for k, d in enumerate(detectors)}
    missing = [ts.algorithm_id for ts in tablesets if ts.algorithm_id not in by_name]
    if missing:
        raise ValidationError(f"no detector model for {missing}")

    outcomes = []
    selected = []
    for idx, scene in enumerate(scenes):
        ae = auto_expose(scene, model, ae_target, None, ae_tol, ae_max_iter, shutter=shutter, gain=gain)
        for ts in tablesets:
            d_idx, det = by_name[ts.algorithm_id]
            active_cfg = select_for_illumination([ts], scene.illumination).config
            outcomes.append(
                SceneOutcome(
                    index=idx,
                    lux=scene.illumination,
                    object_class=scene.object_class,
                    algorithm=ts.algorithm_id,
                    auto_ap=config_ap([scene], ae.config, model, det, trials, d_idx),
                    active_ap=config_ap([scene], active_cfg, model, det, trials, d_idx),
                    auto_config=ae.config,
                    active_config=active_cfg,
                    auto_converged=ae.converged,
                )
            )
        sel = select_for_illumination(tablesets, scene.illumination)
        d_idx, det = by_name[sel.algorithm_id]
        selected.append(config_ap([scene], sel.config, model, det, trials, d_idx))

    def mean_pair(items):
        return (
            metrics.mean_average_precision([o.auto_ap for o in items]),
            metrics.mean_average_precision([o.active_ap for o in items]),
        )

    per_alg = {ts.algorithm_id: mean_pair([o for o in outcomes if o.algorithm == ts.algorithm_id]) for ts in tablesets}
    levels = sorted({o.lux for o in outcomes})
    per_level = {lux: mean_pair([o for o in outcomes if o.lux == lux]) for lux in levels}
    auto_map, active_map = mean_pair(outcomes)
    return ClosedLoopReport(
        auto_map=auto_map,
        active_map=active_map,
        selected_map=metrics.mean_average_precision(selected),
        per_algorithm=per_alg,
        per_level=per_level,
        per_scene=outcomes,
    )


def simulate(cfg: SimConfig, seed: int = 0, tablesets: Sequence[TableSet] | None = None) -> ClosedLoopReport:
    """Build tables from a training draw (unless given) and run one test draw."""
    if tablesets is None:
        tablesets = build_sim_tables(cfg, seed)
    scenes = draw_scenes(cfg, (seed, 1))
    return run_closed_loop(
        scenes,
        cfg.model,
        tablesets,
        trials=cfg.trials,
        detectors=cfg.detectors,
        ae_target=cfg.ae_target,
        ae_tol=cfg.ae_tol,
        ae_max_iter=cfg.ae_max_iter,
    )


# ------------------------------------------------------------------ trends


def shutter_profile(
    cfg: SimConfig, lux: float, gain_db: float, seed: int = 0, detector: int = 0
) -> list[float]:
    """AP at each sampled shutter value, pooled over one scene per class."""
    scenes = [replace(s, illumination=float(lux)) for s in draw_scenes(replace(cfg, levels=(lux,)), seed)]
    det = cfg.detectors[detector]
    return [
        config_ap(scenes, CameraConfig(s, gain_db), cfg.model, det, cfg.trials, detector)
        for s in shutter_axis().values()
    ]


def illumination_profile(
    cfg: SimConfig, shutter_ms: float, gain_db: float, seed: int = 0, detector: int = 0
) -> list[float]:
    """AP at each configured level for a fixed camera config; same objects at every level."""
    base = draw_scenes(replace(cfg, levels=(cfg.levels[0],)), seed)
    det = cfg.detectors[detector]
    return [
        config_ap(
            [replace(s, illumination=float(lux)) for s in base],
            CameraConfig(shutter_ms, gain_db),
            cfg.model,
            det,
            cfg.trials,
            detector,
        )
        for lux in cfg.levels
    ]


def is_unimodal(values: Sequence[float], eps: float = 1e-12) -> bool:
    """True when the sequence strictly rises at least once, then strictly falls, and never rises again."""
    rose = fell = False
    for a, b in zip(values, values[1:]):
        if b > a + eps:
            if fell:
                return False
            rose = True
        elif b < a - eps:
            if not rose:
                return False
            fell = True
    return rose and fell

