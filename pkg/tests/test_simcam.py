from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from activecam import metrics, perftable, simcam
from activecam.errors import ParseError, ValidationError
from activecam.metrics import Annotation, BoundingBox
from activecam.selector import CameraConfig, TableSet, optimum_at_level
from activecam.simcam import DetectorModel, ExposureModel, ImageStats, SceneSpec

OBJ = BoundingBox(100.0, 100.0, 200.0, 200.0)
SHUTTER_MAX = perftable.shutter_axis().high
GAIN_MAX = perftable.gain_axis().high


def scene(lux=400.0, obj=0.5, bg=0.25, **kw):
    return SceneSpec(lux, obj, bg, OBJ, (640, 480), **kw)


def stats(contrast=100.0, clipped=0.0, noise=0.0):
    return ImageStats(100.0, clipped, noise, contrast)


# ---------------------------------------------------------------- render


def test_render_closed_form_pixel():
    model = ExposureModel(k=0.05, read_noise_sigma=0.0)
    # k * lux * refl * shutter = 0.05 * 400 * 0.5 * 10 = 100
    s = simcam.render(scene(), CameraConfig(10.0, 0.0), model, roi=OBJ)
    assert s.mean_brightness == pytest.approx(100.0, abs=1e-12)
    assert s.object_mean == pytest.approx(100.0, abs=1e-12)
    assert s.clipped_fraction == 0.0
    assert s.object_contrast == pytest.approx(50.0, abs=1e-12)


def test_render_full_saturation():
    s = simcam.render(scene(3200.0), CameraConfig(SHUTTER_MAX, GAIN_MAX), ExposureModel())
    assert s.clipped_fraction == 1.0
    assert s.object_contrast == 0.0
    assert s.mean_brightness == 255.0


def test_six_db_doubles_signal_and_noise():
    model = ExposureModel(k=0.01, read_noise_sigma=0.0)
    cfg = CameraConfig(5.0, 3.0)
    a = simcam.render(scene(), cfg, model)
    b = simcam.render(scene(), replace(cfg, gain_db=cfg.gain_db + 6.0206), model)
    assert b.mean_brightness / a.mean_brightness == pytest.approx(2.0, rel=1e-7)
    noisy = ExposureModel(k=0.01, read_noise_sigma=2.0)
    na = simcam.render(scene(), cfg, noisy).effective_noise_sigma
    nb = simcam.render(scene(), replace(cfg, gain_db=cfg.gain_db + 6.0206), noisy).effective_noise_sigma
    assert nb / na == pytest.approx(2.0, rel=1e-7)


@given(st.floats(0.0, 24.0), st.floats(0.0, 5.0))
def test_noise_scaling_exact(gain_db, read):
    s = simcam.render(scene(), CameraConfig(1.0, gain_db), ExposureModel(read_noise_sigma=read))
    assert s.effective_noise_sigma == read * 10 ** (gain_db / 20)


def test_clipped_gaussian_against_sampling():
    rng = np.random.default_rng(5)
    for v, sigma in [(250.0, 10.0), (3.0, 4.0), (120.0, 30.0)]:
        x = np.clip(v + sigma * rng.standard_normal(400_000), 0, 255)
        mean, above = simcam.clipped_gaussian(v, sigma, 255.0)
        assert mean == pytest.approx(x.mean(), abs=0.1)
        assert above == pytest.approx(np.mean(x >= 255.0), abs=3e-3)


@pytest.mark.parametrize("read", [0.0, 2.0])
def test_brightness_monotone_in_shutter_and_gain(read):
    model = ExposureModel(read_noise_sigma=read)
    shutters = np.linspace(0.016, SHUTTER_MAX, 40)
    means = [simcam.render(scene(), CameraConfig(s, 0.0), model).mean_brightness for s in shutters]
    unclipped = [m for m in means if m < 255.0 - 1e-9]
    assert np.all(np.diff(unclipped) > 0)
    gains = np.linspace(0.0, GAIN_MAX, 40)
    means = [simcam.render(scene(), CameraConfig(5.0, g), model).mean_brightness for g in gains]
    unclipped = [m for m in means if m < 255.0 - 1e-9]
    assert np.all(np.diff(unclipped) > 0)


def test_brightness_constant_at_full_clipping():
    model = ExposureModel(read_noise_sigma=0.0)
    vals = {simcam.render(scene(3200.0), CameraConfig(s, 20.0), model).mean_brightness for s in (15.0, 18.0, 21.0)}
    assert vals == {255.0}


def test_scene_validation():
    with pytest.raises(ValidationError):
        scene(obj=0.0)
    with pytest.raises(ValidationError):
        scene(bg=1.5)
    with pytest.raises(ValidationError):
        SceneSpec(100.0, 0.5, 0.5, BoundingBox(600, 0, 700, 10), (640, 480))


# ---------------------------------------------------------------- auto-exposure


def test_auto_expose_reaches_target():
    res = simcam.auto_expose(scene(400.0), ExposureModel())
    assert res.converged
    s = simcam.render(scene(400.0), res.config, ExposureModel())
    assert abs(s.mean_brightness - 118.0) <= 5.0
    assert res.config.within(perftable.shutter_axis(), perftable.gain_axis())


def test_auto_expose_dark_scene_saturates():
    res = simcam.auto_expose(scene(50.0), ExposureModel(k=1e-4))
    assert not res.converged
    assert res.config.shutter_ms == SHUTTER_MAX
    assert res.config.gain_db == GAIN_MAX


def test_auto_expose_bright_scene_bottoms_out():
    res = simcam.auto_expose(scene(3200.0), ExposureModel(k=50.0))
    assert not res.converged
    assert res.config == CameraConfig(0.016, 0.0)


def test_auto_expose_fixed_point():
    initial = CameraConfig((0.016 + SHUTTER_MAX) / 2, 0.0)
    sc = scene(400.0)
    # unclipped, so brightness is linear in k: rescale k to land exactly on 118
    m = simcam.render(sc, initial, ExposureModel(k=1e-3, read_noise_sigma=0.0)).mean_brightness
    model = ExposureModel(k=1e-3 * 118.0 / m, read_noise_sigma=0.0)
    res = simcam.auto_expose(sc, model)
    assert res.config == initial and res.converged and res.iterations == 0


def test_auto_expose_uses_roi():
    sc = SceneSpec(800.0, 0.9, 0.1, OBJ, (640, 480))
    full = simcam.auto_expose(sc, ExposureModel())
    on_obj = simcam.auto_expose(sc, ExposureModel(), roi=OBJ)
    assert on_obj.config.shutter_ms < full.config.shutter_ms
    assert simcam.render(sc, on_obj.config, ExposureModel(), roi=OBJ).mean_brightness == pytest.approx(118, abs=5)


def test_auto_expose_bad_target():
    with pytest.raises(ValidationError):
        simcam.auto_expose(scene(), ExposureModel(), target_mean=300.0)


# ---------------------------------------------------------------- detector

GT = Annotation("img", "bottle", OBJ)


def test_clean_image_detected():
    dets = simcam.synthetic_detect(stats(contrast=200.0), GT, seed=1)
    assert len(dets) == 1 and dets[0].box == OBJ and dets[0].score >= 0.95
    assert metrics.evaluate(dets, [GT]).ap == 1.0


def test_fully_clipped_image_has_no_true_positive():
    s = stats(contrast=0.0, clipped=1.0)
    assert simcam.detection_quality(s) == 0.0
    for seed in range(20):
        dets = simcam.synthetic_detect(s, GT, seed)
        assert all(metrics.iou(d.box, OBJ) == 0.0 for d in dets)
        assert metrics.evaluate(dets, [GT]).ap == 0.0


@pytest.mark.parametrize("contrast", [2.0, 8.0, 30.0])
def test_detection_is_deterministic(contrast):
    s = stats(contrast=contrast, noise=10.0)
    assert simcam.synthetic_detect(s, GT, (3, 1)) == simcam.synthetic_detect(s, GT, (3, 1))


def test_quality_monotone_grid():
    det = DetectorModel()
    clips = np.linspace(0, 1, 21)
    noises = np.linspace(0, 60, 21)
    for c in (5.0, 40.0, 200.0):
        q = np.array([[simcam.detection_quality(stats(c, cf, n), det) for n in noises] for cf in clips])
        assert np.all(np.diff(q, axis=0) <= 0)
        assert np.all(np.diff(q, axis=1) <= 0)
        assert np.all((q >= 0) & (q <= 1))


def test_measured_ap_falls_with_quality():
    aps = []
    for contrast in (200.0, 12.0, 6.0, 3.0, 1.0):
        dets, gts = [], []
        for k in range(200):
            gt = Annotation(f"i{k}", "bottle", OBJ)
            gts.append(gt)
            dets += simcam.synthetic_detect(stats(contrast=contrast), gt, (k,))
        aps.append(metrics.evaluate(dets, gts).ap)
    assert aps[0] == 1.0
    assert all(b <= a for a, b in zip(aps, aps[1:]))
    assert aps[-1] < 0.3


# ---------------------------------------------------------------- config file


def test_config_round_trip():
    cfg = simcam.SimConfig()
    assert simcam.SimConfig.from_text(cfg.to_text()) == cfg


def test_shipped_config_is_default():
    from importlib import resources

    text = resources.files("activecam").joinpath("data/reference.cfg").read_text()
    assert simcam.SimConfig.from_text(text) == simcam.SimConfig()


@pytest.mark.parametrize(
    "text, line",
    [("k=0.1\nbogus=1\n", 2), ("k=abc\n", 1), ("k=1\nk=2\n", 2), ("levels=200,50\n", None), ("noequals\n", 1)],
)
def test_config_errors(text, line):
    with pytest.raises(ParseError) as exc:
        simcam.SimConfig.from_text(text)
    assert exc.value.line == line


# ---------------------------------------------------------------- closed loop

SMALL = replace(simcam.SimConfig(), levels=(50.0, 800.0, 3200.0), classes=("a", "b"), trials=2)


@pytest.fixture(scope="module")
def small_sets():
    return simcam.build_sim_tables(SMALL, seed=0)


def test_tables_are_smoothed_and_valid(small_sets):
    assert [ts.algorithm_id for ts in small_sets] == ["localfeat", "convnet"]
    for ts in small_sets:
        assert ts.levels == SMALL.levels
        for t in ts.tables:
            assert t.sigma == SMALL.sigma
            assert t.values.shape == (8, 8)


def test_degenerate_model_both_perfect():
    cfg = replace(SMALL, k=1.0, read_noise_sigma=0.0, full_scale=1e12)
    sets = simcam.build_sim_tables(cfg, seed=0)
    report = simcam.simulate(cfg, seed=1, tablesets=sets)
    assert report.auto_map == 1.0 and report.active_map == 1.0


def test_closed_loop_active_not_worse(small_sets):
    report = simcam.simulate(SMALL, seed=4, tablesets=small_sets)
    assert report.active_map >= report.auto_map
    assert set(report.per_level) == set(SMALL.levels)
    assert len(report.per_scene) == len(SMALL.levels) * len(SMALL.classes) * len(small_sets)


def test_active_uses_level_optimum(small_sets):
    ts = small_sets[0]
    sc = replace(simcam.draw_scenes(SMALL, 9)[0], illumination=800.0)
    report = simcam.run_closed_loop([sc], SMALL.model, [ts], trials=1)
    cfg, _ = optimum_at_level(ts.tables[1])
    assert report.per_scene[0].active_config == cfg


def test_closed_loop_rejects_foreign_axes(small_sets):
    other = perftable.AxisSpec(0.016, 30.0, 8, "ms")
    t = perftable.PerformanceTable("localfeat", 50.0, np.zeros((8, 8)), shutter_axis=other, sigma=1.0)
    with pytest.raises(ValidationError, match="axes"):
        simcam.run_closed_loop(simcam.draw_scenes(SMALL, 1), SMALL.model, [TableSet("localfeat", [t])])


def test_report_is_deterministic(small_sets):
    a = simcam.simulate(SMALL, seed=2, tablesets=small_sets).format()
    b = simcam.simulate(SMALL, seed=2, tablesets=simcam.build_sim_tables(SMALL, seed=0)).format()
    assert a == b
    assert a.startswith("metric\tauto_map\tactive_map\n")


def test_unimodal_helper():
    assert simcam.is_unimodal([0, 0.2, 1, 1, 0.4, 0])
    assert not simcam.is_unimodal([0, 1, 0, 1])
    assert not simcam.is_unimodal([1, 1, 1])
    assert not simcam.is_unimodal([0, 0.5, 1])
