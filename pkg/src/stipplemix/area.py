"""Area (shading) distribution from error-diffusion halftoning, plus the
per-class positional jitter applied to sampled dots."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import BinaryMask, ProbGrid, dpf_from_binary_image
from .rng import make_rng
from .tone import Prefilter, as_tone

# Ostromoukhov (2001) variable coefficients for input levels 0..127 as
# (right, down-left, down, sum); levels 128..255 mirror them.
_OSTRO_HALF = [
    (13, 0, 5, 18), (13, 0, 5, 18), (21, 0, 10, 31), (7, 0, 4, 11),
    (8, 0, 5, 13), (47, 3, 28, 78), (23, 3, 13, 39), (15, 3, 8, 26),
    (22, 6, 11, 39), (43, 15, 20, 78), (7, 3, 3, 13), (501, 224, 211, 936),
    (249, 116, 103, 468), (165, 80, 67, 312), (123, 62, 49, 234), (489, 256, 191, 936),
    (81, 44, 31, 156), (483, 272, 181, 936), (60, 35, 22, 117), (53, 32, 19, 104),
    (237, 148, 83, 468), (471, 304, 161, 936), (3, 2, 1, 6), (481, 314, 185, 980),
    (354, 226, 155, 735), (1389, 866, 685, 2940), (227, 138, 125, 490), (267, 158, 163, 588),
    (327, 188, 220, 735), (61, 34, 45, 140), (627, 338, 505, 1470), (1227, 638, 1075, 2940),
    (20, 10, 19, 49), (1937, 1000, 1767, 4704), (977, 520, 855, 2352), (657, 360, 551, 1568),
    (71, 40, 57, 168), (2005, 1160, 1539, 4704), (337, 200, 247, 784), (2039, 1240, 1425, 4704),
    (257, 160, 171, 588), (691, 440, 437, 1568), (1045, 680, 627, 2352), (301, 200, 171, 672),
    (177, 120, 95, 392), (2141, 1480, 1083, 4704), (1079, 760, 513, 2352), (725, 520, 323, 1568),
    (137, 100, 57, 294), (2209, 1640, 855, 4704), (53, 40, 19, 112), (2243, 1720, 741, 4704),
    (565, 440, 171, 1176), (759, 600, 209, 1568), (1147, 920, 285, 2352), (2311, 1880, 513, 4704),
    (97, 80, 19, 196), (335, 280, 57, 672), (1181, 1000, 171, 2352), (793, 680, 95, 1568),
    (599, 520, 57, 1176), (2413, 2120, 171, 4704), (405, 360, 19, 784), (2447, 2200, 57, 4704),
    (11, 10, 0, 21), (158, 151, 3, 312), (178, 179, 7, 364), (1030, 1091, 63, 2184),
    (248, 277, 21, 546), (318, 375, 35, 728), (458, 571, 63, 1092), (878, 1159, 147, 2184),
    (5, 7, 1, 13), (172, 181, 37, 390), (97, 76, 22, 195), (72, 41, 17, 130),
    (119, 47, 29, 195), (4, 1, 1, 6), (4, 1, 1, 6), (4, 1, 1, 6),
    (4, 1, 1, 6), (4, 1, 1, 6), (4, 1, 1, 6), (4, 1, 1, 6),
    (4, 1, 1, 6), (4, 1, 1, 6), (65, 18, 17, 100), (95, 29, 26, 150),
    (185, 62, 53, 300), (30, 11, 9, 50), (35, 14, 11, 60), (85, 37, 28, 150),
    (55, 26, 19, 100), (80, 41, 29, 150), (155, 86, 59, 300),
] + [(5, 3, 2, 10)] * 33

OSTROMOUKHOV_TABLE = _OSTRO_HALF + _OSTRO_HALF[::-1]

_FLOYD_STEINBERG = ((0, 1, 7 / 16), (1, -1, 3 / 16), (1, 0, 5 / 16), (1, 1, 1 / 16))

_METHODS = {
    "fs": "fs", "floyd_steinberg": "fs", "error_diffusion_fs": "fs",
    "ostromoukhov": "ostromoukhov", "error_diffusion_ostromoukhov": "ostromoukhov",
}


@dataclass(frozen=True)
class AreaParams:
    halftone: str = "fs"
    packing: int = 1
    jitter_area: float = 0.5
    jitter_edge: float = 0.0
    prefilter: Prefilter = field(default_factory=Prefilter)

    def __post_init__(self):
        if self.halftone not in _METHODS:
            raise ValueError(f"unknown halftone method {self.halftone!r}")
        if int(self.packing) != self.packing or self.packing < 1:
            raise ValueError("packing must be a positive integer")
        if self.jitter_area < 0 or self.jitter_edge < 0:
            raise ValueError("jitter must be non-negative")


def error_diffusion(image: np.ndarray, method: str = "fs", serpentine: bool = True) -> np.ndarray:
    """Binary halftone of a [0, 1] tone image; ``True`` marks a black pixel."""
    method = _METHODS[method]
    img = np.asarray(image, dtype=np.float64)
    h, w = img.shape
    levels = np.clip(np.round(img * 255.0), 0, 255).astype(int).tolist()
    rows = [r.copy() for r in img.tolist()] + [[0.0] * w]
    black = np.zeros((h, w), dtype=bool)
    for y in range(h):
        rev = serpentine and (y % 2 == 1)
        xs = range(w - 1, -1, -1) if rev else range(w)
        sgn = -1 if rev else 1
        cur, nxt = rows[y], rows[y + 1]
        last = y == h - 1
        for x in xs:
            v = cur[x]
            out = 1.0 if v >= 0.5 else 0.0
            if out == 0.0:
                black[y, x] = True
            err = v - out
            if method == "fs":
                taps = _FLOYD_STEINBERG
            else:
                r, dl, d, s = OSTROMOUKHOV_TABLE[levels[y][x]]
                taps = ((0, 1, r / s), (1, -1, dl / s), (1, 0, d / s))
            for dy, dx, wt in taps:
                xx = x + sgn * dx
                if 0 <= xx < w and not (dy and last):
                    if dy:
                        nxt[xx] += err * wt
                    else:
                        cur[xx] += err * wt
    return black


def _block_mean(img: np.ndarray, p: int) -> np.ndarray:
    h, w = img.shape
    hh, ww = -(-h // p), -(-w // p)
    padded = np.pad(img, ((0, hh * p - h), (0, ww * p - w)), mode="edge")
    return padded.reshape(hh, p, ww, p).mean(axis=(1, 3))


def halftone_mask(image, params: AreaParams) -> BinaryMask:
    """Halftone at the packing pitch; each black coarse pixel marks the
    centre cell of its block in the full-resolution grid."""
    img = params.prefilter(as_tone(image))
    p = int(params.packing)
    if p == 1:
        return BinaryMask(error_diffusion(img, params.halftone))
    coarse = error_diffusion(_block_mean(img, p), params.halftone)
    h, w = img.shape
    bits = np.zeros((h, w), dtype=bool)
    cy, cx = np.nonzero(coarse)
    ys = np.minimum(cy * p + p // 2, h - 1)
    xs = np.minimum(cx * p + p // 2, w - 1)
    bits[ys, xs] = True
    return BinaryMask(bits)


def halftone_distribution(image, params: AreaParams) -> ProbGrid:
    return dpf_from_binary_image(halftone_mask(image, params))


def jitter_dots(points, classes, params: AreaParams, seed=None,
                bounds: tuple[float, float] | None = None) -> np.ndarray:
    """Offset each ``(x, y)`` point by uniform noise in ``[-j, j]^2``, where
    ``j`` is ``jitter_edge`` for edge-class dots and ``jitter_area`` for
    area-class dots. ``bounds=(width, height)`` clamps results to the canvas.
    """
    if hasattr(points, "points"):
        points = points.points()
    pts = np.array(points, dtype=np.float64).reshape(-1, 2)
    cls = np.asarray(classes)
    if len(cls) != len(pts):
        raise ValueError("need one class label per dot")
    amp = np.where(cls == "edge", params.jitter_edge, params.jitter_area)
    noise = make_rng(seed).uniform(-1.0, 1.0, size=pts.shape)
    out = pts + noise * amp[:, None]
    if bounds is not None:
        out[:, 0] = np.clip(out[:, 0], 0.0, bounds[0])
        out[:, 1] = np.clip(out[:, 1], 0.0, bounds[1])
    return out
