"""Dot sizing and final output as SVG circles or a grayscale raster."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import make_rng
from .textures import Atlas, load_atlas

MM_PER_INCH = 25.4
A5_MM = (148.5, 210.0)


@dataclass(frozen=True)
class SizePolicy:
    """Area dot diameters in output pixels.

    ``constant`` uses ``values[0]``; ``modulated`` maps tone 1..0 onto
    ``min..max`` (darker is bigger); ``discrete`` picks uniformly from
    ``values``.
    """

    kind: str = "modulated"
    values: tuple[float, ...] = (4.0, 8.0)

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        object.__setattr__(self, "values", v)
        need = {"constant": 1, "modulated": 2}
        if self.kind not in ("constant", "modulated", "discrete"):
            raise ValueError(f"unknown size policy {self.kind!r}")
        if self.kind in need and len(v) != need[self.kind]:
            raise ValueError(f"{self.kind} size policy takes {need[self.kind]} value(s)")
        if not v or any(x <= 0 for x in v):
            raise ValueError("dot sizes must be positive")
        if self.kind == "modulated" and v[0] > v[1]:
            raise ValueError("modulated sizes need min <= max")

    @property
    def range(self) -> tuple[float, float]:
        return min(self.values), max(self.values)

    @classmethod
    def parse(cls, text: str) -> "SizePolicy":
        kind, _, rest = text.strip().partition(":")
        kind = {"random_discrete": "discrete"}.get(kind, kind)
        try:
            values = tuple(float(v) for v in rest.split(",") if v.strip())
        except ValueError as exc:
            raise ValueError(f"bad size policy {text!r}") from exc
        return cls(kind, values)

    def to_string(self) -> str:
        return f"{self.kind}:" + ",".join(repr(v) for v in self.values)


@dataclass(frozen=True)
class EdgeSizePolicy:
    """Edge dot diameters: ``mean_pm25`` scales the middle of the area range
    by a uniform factor in [0.75, 1.25]; ``constant`` uses ``value``;
    ``same`` follows the area policy."""

    kind: str = "mean_pm25"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("mean_pm25", "constant", "same"):
            raise ValueError(f"unknown edge size policy {self.kind!r}")
        if self.kind == "constant" and self.value <= 0:
            raise ValueError("constant edge size must be positive")

    @classmethod
    def parse(cls, text: str) -> "EdgeSizePolicy":
        kind, _, rest = text.strip().partition(":")
        return cls(kind, float(rest) if rest else 0.0)

    def to_string(self) -> str:
        return f"constant:{self.value!r}" if self.kind == "constant" else self.kind


@dataclass(frozen=True)
class RenderConfig:
    page: tuple[float, float] = A5_MM
    ppi: float = 1200.0
    sizes: SizePolicy = field(default_factory=SizePolicy)
    edge_sizes: EdgeSizePolicy = field(default_factory=EdgeSizePolicy)
    atlas: str | None = None     # None: circles; "bundled" or an atlas directory
    output: str = "svg"
    embed_class: bool = False

    def __post_init__(self):
        if self.ppi <= 0:
            raise ValueError("ppi must be positive")
        if len(self.page) != 2 or min(self.page) <= 0:
            raise ValueError("page needs a positive width and height in mm")
        if self.output not in ("svg", "raster"):
            raise ValueError(f"unknown output kind {self.output!r}")

    def canvas_size(self) -> tuple[float, float]:
        """Canvas width and height in output pixels (unrounded)."""
        return (self.page[0] * self.ppi / MM_PER_INCH, self.page[1] * self.ppi / MM_PER_INCH)

    def raster_shape(self) -> tuple[int, int]:
        w, h = self.canvas_size()
        return max(1, int(round(h))), max(1, int(round(w)))


@dataclass(frozen=True, eq=False)
class DotSet:
    """Dots in canvas pixel coordinates with diameter, class and texture."""

    x: np.ndarray
    y: np.ndarray
    size: np.ndarray
    cls: np.ndarray
    texture: np.ndarray

    def __len__(self):
        return len(self.x)

    @classmethod
    def empty(cls) -> "DotSet":
        z = np.zeros(0)
        return cls(z, z, z, np.zeros(0, dtype="<U4"), np.zeros(0, dtype=np.int64))

    def count(self, kind: str) -> int:
        return int(np.count_nonzero(self.cls == kind))


def _tone_at(tone: np.ndarray, x: np.ndarray, y: np.ndarray, canvas: tuple[float, float]):
    th, tw = tone.shape
    col = np.clip((x / canvas[0] * tw).astype(np.int64), 0, tw - 1)
    row = np.clip((y / canvas[1] * th).astype(np.int64), 0, th - 1)
    return tone[row, col]


def assign_sizes(points, classes, tone, config: RenderConfig, seed=None,
                 n_textures: int | None = None) -> DotSet:
    """Give every dot a diameter (and a texture index when an atlas is used).

    ``points`` are canvas pixel coordinates. ``tone`` is either a [0, 1]
    image spanning the canvas or one tone per dot; the modulated policy
    needs it.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    cls = np.asarray(classes, dtype="<U4").reshape(-1)
    if len(cls) != len(pts):
        raise ValueError("need one class label per dot")
    n = len(pts)
    rng = make_rng(seed)
    u_area = rng.random(n)
    u_edge = rng.random(n)
    pol = config.sizes

    if pol.kind == "constant":
        area = np.full(n, pol.values[0])
    elif pol.kind == "modulated":
        if tone is None:
            raise ValueError("modulated dot sizes need a tone image")
        lo, hi = pol.values
        tone = np.asarray(tone, dtype=np.float64)
        if tone.ndim == 1:
            if len(tone) != n:
                raise ValueError("per-dot tone needs one value per dot")
            t = tone
        else:
            t = _tone_at(tone, pts[:, 0], pts[:, 1], config.canvas_size())
        area = lo + (1.0 - t) * (hi - lo)
    else:
        choices = np.asarray(pol.values)
        area = choices[np.minimum((u_area * len(choices)).astype(int), len(choices) - 1)]

    ep = config.edge_sizes
    if ep.kind == "same":
        edge = area
    elif ep.kind == "constant":
        edge = np.full(n, ep.value)
    else:
        lo, hi = pol.range
        edge = (lo + hi) / 2.0 * (0.75 + 0.5 * u_edge)
    size = np.where(cls == "edge", edge, area)

    if n_textures is None and config.atlas is not None:
        n_textures = len(load_atlas(config.atlas).stamps)
    if n_textures:
        tex = rng.integers(0, n_textures, size=n)
    else:
        tex = np.full(n, -1, dtype=np.int64)
    return DotSet(pts[:, 0].copy(), pts[:, 1].copy(), size, cls, tex)


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def render_svg(dots: DotSet, config: RenderConfig) -> str:
    """SVG 1.1 document with one filled circle per dot; user units are mm."""
    k = MM_PER_INCH / config.ppi
    pw, ph = config.page
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{pw:g}mm" height="{ph:g}mm" viewBox="0 0 {pw:g} {ph:g}">',
        f'<rect x="0" y="0" width="{pw:g}" height="{ph:g}" fill="white"/>',
        '<g fill="black" stroke="none">',
    ]
    for i in range(len(dots)):
        cx = _fmt(dots.x[i] * k)
        cy = _fmt(dots.y[i] * k)
        r = _fmt(dots.size[i] * 0.5 * k)
        extra = f' class="{dots.cls[i]}"' if config.embed_class else ""
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{r}"{extra}/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _stamp_disk(trans: np.ndarray, x: float, y: float, r: float):
    h, w = trans.shape
    x0 = max(int(np.floor(x - r - 1)), 0)
    x1 = min(int(np.ceil(x + r + 1)), w)
    y0 = max(int(np.floor(y - r - 1)), 0)
    y1 = min(int(np.ceil(y + r + 1)), h)
    if x0 >= x1 or y0 >= y1:
        return
    yy, xx = np.mgrid[y0:y1, x0:x1]
    dist = np.hypot(xx + 0.5 - x, yy + 0.5 - y)
    cover = np.clip(r + 0.5 - dist, 0.0, 1.0)
    trans[y0:y1, x0:x1] *= 1.0 - cover


def scaled_stamp(stamp: np.ndarray, diameter: float, target: float) -> np.ndarray:
    """Resize ink ``stamp`` by a whole number of texels per pixel (or pixels
    per texel) so no texel is resampled."""
    factor = target / diameter
    if factor >= 1.0:
        k = max(1, int(round(factor)))
        return np.kron(stamp, np.ones((k, k)))
    k = max(1, int(round(1.0 / factor)))
    h, w = stamp.shape
    hh, ww = -(-h // k), -(-w // k)
    padded = np.pad(stamp, ((0, hh * k - h), (0, ww * k - w)))
    return padded.reshape(hh, k, ww, k).mean(axis=(1, 3))


def _stamp_texture(trans: np.ndarray, x: float, y: float, ink: np.ndarray):
    h, w = trans.shape
    sh, sw = ink.shape
    top = int(np.floor(y - sh / 2.0 + 0.5))
    left = int(np.floor(x - sw / 2.0 + 0.5))
    y0, x0 = max(top, 0), max(left, 0)
    y1, x1 = min(top + sh, h), min(left + sw, w)
    if y0 >= y1 or x0 >= x1:
        return
    trans[y0:y1, x0:x1] *= 1.0 - ink[y0 - top:y1 - top, x0 - left:x1 - left]


def render_raster(dots: DotSet, config: RenderConfig, atlas: Atlas | None = None,
                  band: int = 512) -> np.ndarray:
    """8-bit grayscale canvas; overlapping dots multiply their transmittance.

    Circles get coverage antialiasing. With an atlas, each dot's stamp is
    scaled to twice its nominal diameter. The canvas is built in horizontal
    bands of ``band`` rows so large pages never hold a full float buffer.
    """
    if atlas is None and config.atlas is not None:
        atlas = load_atlas(config.atlas)
    h, w = config.raster_shape()
    n = len(dots)
    inks = []
    reach = np.empty(n)
    for i in range(n):
        s, t = float(dots.size[i]), int(dots.texture[i])
        if atlas is None:
            if t >= 0:
                raise ValueError("dot refers to a texture but no atlas was given")
            inks.append(None)
            reach[i] = s / 2.0 + 1.0
        else:
            stamp = atlas.stamps[t % len(atlas.stamps)]
            ink = scaled_stamp(stamp.ink, stamp.diameter, 2.0 * s)
            inks.append(ink)
            reach[i] = ink.shape[0] / 2.0 + 1.0
    ys = np.asarray(dots.y, dtype=np.float64)
    out = np.empty((h, w), dtype=np.uint8)
    for r0 in range(0, h, band):
        r1 = min(r0 + band, h)
        trans = np.ones((r1 - r0, w))
        for i in np.flatnonzero((ys + reach >= r0) & (ys - reach <= r1)):
            x, y = float(dots.x[i]), float(dots.y[i]) - r0
            if inks[i] is None:
                _stamp_disk(trans, x, y, float(dots.size[i]) / 2.0)
            else:
                _stamp_texture(trans, x, y, inks[i])
        out[r0:r1] = np.round(trans * 255.0).astype(np.uint8)
    return out
