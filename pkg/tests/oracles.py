"""Reference computations that share no code with the package under test."""
from fractions import Fraction

import numpy as np
from scipy.signal import convolve2d
from shapely.geometry import box as shp_box


def iou_shapely(a, b):
    pa = shp_box(a.x_min, a.y_min, a.x_max, a.y_max)
    pb = shp_box(b.x_min, b.y_min, b.x_max, b.y_max)
    inter = pa.intersection(pb).area
    return inter / pa.union(pb).area


def flags_bruteforce(dets, gts, threshold=0.5):
    """Greedy one-to-one matching, written independently of activecam.metrics."""
    order = sorted(
        range(len(dets)),
        key=lambda k: (-dets[k].score, dets[k].image_id, dets[k].class_label, dets[k].box.x_min, dets[k].box.y_min),
    )
    used = set()
    flags = []
    for k in order:
        d = dets[k]
        cands = [
            (iou_shapely(d.box, g.box), -n)
            for n, g in enumerate(gts)
            if n not in used and g.image_id == d.image_id and g.class_label == d.class_label
        ]
        cands = [c for c in cands if c[0] >= threshold]
        if cands:
            used.add(-max(cands)[1])
            flags.append(True)
        else:
            flags.append(False)
    return flags


def ap11_bruteforce(flags, n_gt):
    """11-point AP from raw TP/FP flags, exact rational arithmetic until the end."""
    if n_gt == 0:
        return 0.0
    points = []
    tp = 0
    for k, f in enumerate(flags, start=1):
        tp += 1 if f else 0
        points.append((Fraction(tp, n_gt), Fraction(tp, k)))
    total = Fraction(0)
    for step in range(11):
        r = Fraction(step, 10)
        ps = [p for rec, p in points if rec >= r]
        total += max(ps) if ps else Fraction(0)
    return float(total / 11)


def smooth_bruteforce(values, sigma):
    """Cropped, renormalised 3x3 Gaussian as normalised convolution with zero padding."""
    k = np.arange(-1, 2)
    w = np.exp(-(k[:, None] ** 2 + k[None, :] ** 2) / (2 * sigma**2))
    num = convolve2d(values, w, mode="same", boundary="fill", fillvalue=0.0)
    den = convolve2d(np.ones_like(values), w, mode="same", boundary="fill", fillvalue=0.0)
    return num / den


def neighbourhood_bounds(values):
    rows, cols = values.shape
    lo = np.empty_like(values)
    hi = np.empty_like(values)
    for r in range(rows):
        for c in range(cols):
            patch = values[max(r - 1, 0) : r + 2, max(c - 1, 0) : c + 2]
            lo[r, c], hi[r, c] = patch.min(), patch.max()
    return lo, hi
