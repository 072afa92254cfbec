"""Regenerate tests/fixtures.

Inputs are deterministic; golden outputs are computed with tests/oracles.py
(shapely IoU, rational 11-point AP, scipy normalised convolution) and written
by hand-rolled formatting, so they do not depend on the code under test.
"""
import math
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))
sys.path.insert(0, str(ROOT / "src"))

from oracles import ap11_bruteforce, flags_bruteforce, smooth_bruteforce  # noqa: E402

from activecam.metrics import Annotation, BoundingBox, Detection  # noqa: E402

OUT = ROOT / "tests" / "fixtures"
CLASSES = ["bicycle", "bottle", "chair", "pottedplant", "tvmonitor"]
HEADER_AXES = "shutter=0.016,24.973,8,ms\ngain=0.0,24.014,8,dB\n"


def grid_text(alg, lux, smoothing, values, trailer=""):
    rows = "".join("\t".join(f"{v:.6f}" for v in row) + "\n" for row in values)
    return f"perftable v1\nalgorithm={alg} lux={lux!r} smoothing={smoothing}\n{HEADER_AXES}{rows}{trailer}"


def eval_inputs():
    manifest = ["image_id\tobject_class\tlux\tshutter_idx\tgain_idx\tpath"]
    dets = ["image_id\tclass\tscore\tx_min\ty_min\tx_max\ty_max"]
    gts = ["image_id\tclass\tx_min\ty_min\tx_max\ty_max"]
    det_objs, gt_objs, cell_of = [], [], {}
    for lux in (800.0, 400.0):
        for i in range(1, 9):
            for j in range(1, 9):
                for copy in range(2):
                    img = f"L{int(lux)}_s{i}_g{j}_{copy}"
                    cls = CLASSES[(i + j + copy) % 5]
                    manifest.append(f"{img}\t{cls}\t{lux:.6f}\t{i}\t{j}\timages/{img}.png")
                    x0, y0 = 40.0 * i, 30.0 * j
                    g = BoundingBox(x0, y0, x0 + 100.0, y0 + 80.0)
                    gts.append(f"{img}\t{cls}\t{g.x_min:.6f}\t{g.y_min:.6f}\t{g.x_max:.6f}\t{g.y_max:.6f}")
                    cell_of[img] = (lux, i, j)
                    gt_objs.append(Annotation(img, cls, g))
                    # true box, shifted by an amount that grows with shutter and gain distance from (3, 2)
                    shift = 12.0 * (abs(i - 3) + abs(j - 2)) + 3.0 * copy
                    score = round(0.95 - 0.04 * (abs(i - 3) + abs(j - 2)) - 0.01 * copy, 6)
                    cand = [(BoundingBox(x0 + shift, y0, x0 + 100.0 + shift, y0 + 80.0), score, cls)]
                    if (i * j + copy) % 3 == 0:
                        cand.append((BoundingBox(x0 + 300, y0, x0 + 380, y0 + 60), round(0.98 - 0.01 * j, 6), cls))
                    if (i + copy) % 4 == 0:
                        cand.append((g, 0.55, CLASSES[(i + j + copy + 1) % 5]))
                    for b, s, c in cand:
                        dets.append(f"{img}\t{c}\t{s:.6f}\t{b.x_min:.6f}\t{b.y_min:.6f}\t{b.x_max:.6f}\t{b.y_max:.6f}")
                        det_objs.append(Detection(img, c, b, s))
    return manifest, dets, gts, det_objs, gt_objs, cell_of


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    manifest, dets, gts, det_objs, gt_objs, cell_of = eval_inputs()
    (OUT / "manifest.tsv").write_text("\n".join(manifest) + "\n")
    (OUT / "detections.tsv").write_text("\n".join(dets) + "\n")
    (OUT / "annotations.tsv").write_text("\n".join(gts) + "\n")

    values = np.zeros((8, 8))
    for i in range(1, 9):
        for j in range(1, 9):
            cd = [d for d in det_objs if cell_of[d.image_id] == (800.0, i, j)]
            cg = [g for g in gt_objs if cell_of[g.image_id] == (800.0, i, j)]
            values[i - 1, j - 1] = ap11_bruteforce(flags_bruteforce(cd, cg), len(cg))
    (OUT / "golden_eval_800.tbl").write_text(grid_text("dpm", 800.0, "none", values))

    # partial manifest for --allow-missing: drop cells (8, 7) and (8, 8) at 800 lx
    keep = [r for r in manifest if not (r.startswith("L800_s8_g7_") or r.startswith("L800_s8_g8_"))]
    dropped = {r.split("\t")[0] for r in manifest} - {r.split("\t")[0] for r in keep}
    (OUT / "manifest_partial.tsv").write_text("\n".join(keep) + "\n")
    (OUT / "detections_partial.tsv").write_text(
        "\n".join(r for r in dets if r.split("\t")[0] not in dropped) + "\n"
    )
    (OUT / "annotations_partial.tsv").write_text(
        "\n".join(r for r in gts if r.split("\t")[0] not in dropped) + "\n"
    )

    impulse = np.zeros((8, 8))
    impulse[3, 4] = 1.0
    impulse[0, 0] = 1.0
    (OUT / "impulse.tbl").write_text(grid_text("dpm", 800.0, "none", impulse))
    (OUT / "golden_impulse_s1.tbl").write_text(
        grid_text("dpm", 800.0, "gaussian:1.0", smooth_bruteforce(impulse, 1.0))
    )
    # closed forms the golden file must agree with
    assert math.isclose(smooth_bruteforce(impulse, 1.0)[3, 4], 1 / (1 + 4 * math.exp(-0.5) + 4 * math.exp(-1)))

    (OUT / "constant.tbl").write_text(grid_text("dpm", 800.0, "none", np.full((8, 8), 0.42)))
    (OUT / "ones.tbl").write_text(grid_text("dpm", 800.0, "none", np.ones((8, 8))))
    (OUT / "zeros.tbl").write_text(grid_text("dpm", 800.0, "none", np.zeros((8, 8))))

    # two smoothed levels whose optima are (2, 1) and (3, 2)
    sel_dir = OUT / "select_tables"
    sel_dir.mkdir(exist_ok=True)
    for lux, (i, j) in ((200.0, (2, 1)), (400.0, (3, 2))):
        m = np.full((8, 8), 0.1)
        m[i - 1, j - 1] = 0.9
        (sel_dir / f"dpm_{lux:g}lx.tbl").write_text(grid_text("dpm", lux, "gaussian:1.0", m))


if __name__ == "__main__":
    main()
