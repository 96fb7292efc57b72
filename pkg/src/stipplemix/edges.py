"""Edge stipple distribution: one-pixel edges, corner cleanup and evenly
spaced dots along the edge paths."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage.morphology import thin

from .grid import BinaryMask, ProbGrid, dpf_from_binary_image
from .rng import make_rng
from .tone import Prefilter, as_tone

SQRT2 = math.sqrt(2.0)

# 8-neighbourhood offsets (dy, dx) in scan order.
_NEIGHBOURS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class EdgeParams:
    filter: str = "canny"
    # canny: gaussian sigma, hysteresis thresholds as fractions of max gradient
    sigma: float = 1.4
    low: float = 0.1
    high: float = 0.3
    # dog: pixels darker than the wide blur by more than `thresh`
    sigma1: float = 1.0
    sigma2: float = 1.6
    # log: scale-normalized laplacian above `thresh`
    log_sigma: float = 2.0
    thresh: float = 0.02
    prefilter: Prefilter = field(default_factory=Prefilter)
    d0: float = 3.5
    dn: float = 0.0
    walk: bool = True

    def __post_init__(self):
        if self.filter not in ("canny", "dog", "log"):
            raise ValueError(f"unknown edge filter {self.filter!r}")
        if self.d0 < 1:
            raise ValueError("d0 must be at least 1 pixel")
        if not 0 <= self.dn <= self.d0:
            raise ValueError("dn must lie in [0, d0]")
        if self.sigma <= 0 or self.sigma1 <= 0 or self.sigma2 <= 0 or self.log_sigma <= 0:
            raise ValueError("filter sigmas must be positive")
        if not 0 <= self.low <= self.high:
            raise ValueError("canny thresholds need 0 <= low <= high")
        if self.filter == "dog" and self.sigma2 <= self.sigma1:
            raise ValueError("dog needs sigma2 > sigma1")
        if self.thresh < 0:
            raise ValueError("threshold must be non-negative")


def canny(image: np.ndarray, sigma: float = 1.4, low: float = 0.1,
          high: float = 0.3) -> np.ndarray:
    """Canny edges with non-maximum suppression and hysteresis.

    ``low`` and ``high`` are fractions of the largest gradient magnitude.
    """
    img = ndimage.gaussian_filter(np.asarray(image, dtype=np.float64), sigma, mode="nearest")
    gx = ndimage.sobel(img, axis=1, mode="nearest")
    gy = ndimage.sobel(img, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    top = mag.max()
    if top <= 1e-9:
        return np.zeros(img.shape, dtype=bool)

    # Quantize the gradient axis to 0, 45, 90 or 135 degrees.
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.round(angle / 45.0).astype(int)) % 4
    pad = np.pad(mag, 1)
    h, w = mag.shape

    def shifted(dy, dx):
        return pad[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]

    keep = np.zeros(mag.shape, dtype=bool)
    # (dy, dx) steps along the gradient axis for each sector.
    for s, (dy, dx) in enumerate(((0, 1), (1, 1), (1, 0), (1, -1))):
        ahead = shifted(dy, dx)
        behind = shifted(-dy, -dx)
        # Plateaus of equal magnitude keep only their first pixel.
        keep |= (sector == s) & (mag > behind) & (mag >= ahead)
    keep &= mag > 0

    strong = keep & (mag >= high * top)
    weak = keep & (mag >= low * top)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3)))
    if n == 0:
        return np.zeros(img.shape, dtype=bool)
    hit = np.zeros(n + 1, dtype=bool)
    hit[np.unique(labels[strong])] = True
    hit[0] = False
    return hit[labels]


def dog_edges(image: np.ndarray, sigma1: float, sigma2: float, thresh: float) -> np.ndarray:
    img = np.asarray(image, dtype=np.float64)
    narrow = ndimage.gaussian_filter(img, sigma1, mode="nearest")
    wide = ndimage.gaussian_filter(img, sigma2, mode="nearest")
    return thin((narrow - wide) < -thresh)


def log_edges(image: np.ndarray, sigma: float, thresh: float) -> np.ndarray:
    img = np.asarray(image, dtype=np.float64)
    resp = ndimage.gaussian_laplace(img, sigma, mode="nearest") * sigma**2
    return thin(resp > thresh)


def detect_edges(image, params: EdgeParams) -> BinaryMask:
    """One-pixel-wide edge mask of a [0, 1] tone image (0 = black)."""
    img = params.prefilter(as_tone(image))
    if params.filter == "canny":
        bits = canny(img, params.sigma, params.low, params.high)
    elif params.filter == "dog":
        bits = dog_edges(img, params.sigma1, params.sigma2, params.thresh)
    else:
        bits = log_edges(img, params.log_sigma, params.thresh)
    return BinaryMask(bits)


def _elbow(win: np.ndarray) -> tuple[int, int] | None:
    """Cell of a 3-black 2x2 window that touches both other black cells."""
    if int(win.sum()) != 3:
        return None
    wy, wx = np.argwhere(~win)[0]
    return 1 - wy, 1 - wx


def clean_corners(mask: BinaryMask) -> BinaryMask:
    """Remove the elbow pixel of every 2x2 window holding exactly three
    black pixels, repeating until no such window is left."""
    bits = mask.bits.copy()
    while True:
        b = bits.astype(np.int8)
        counts = b[:-1, :-1] + b[:-1, 1:] + b[1:, :-1] + b[1:, 1:]
        cand = np.argwhere(counts == 3)
        if len(cand) == 0:
            break
        for y, x in cand:
            elbow = _elbow(bits[y:y + 2, x:x + 2])
            if elbow is not None:
                bits[y + elbow[0], x + elbow[1]] = False
    return BinaryMask(bits)


def _rank_key(incoming: tuple[int, int], step: tuple[int, int]):
    vy, vx = incoming
    uy, ux = step
    cross = vx * uy - vy * ux
    dot = vx * ux + vy * uy
    turn = abs(math.atan2(cross, dot))
    # Image rows grow downwards, so a left turn has negative cross product.
    side = 0 if cross < 0 else (1 if cross == 0 else 2)
    return (round(turn, 9), side)


def walk_paths(mask: BinaryMask, d0: float, dn: float = 0.0, seed=None) -> BinaryMask:
    """Thin edge pixels to dots spaced roughly ``d0`` apart along each path.

    Paths start at the first unvisited black pixel in raster order and follow
    unvisited 8-neighbours, preferring the smallest turn and, on ties, the
    left-most one. The first step of a path goes to a random neighbour. A
    path pixel is emitted once the walked length (1 per straight, sqrt(2)
    per diagonal step) reaches ``d = max(1, d0 + U(-dn, dn))``; the length
    then resets and a fresh ``d`` is drawn. Path starts are always emitted.
    """
    if d0 < 1:
        raise ValueError("d0 must be at least 1 pixel")
    if dn < 0:
        raise ValueError("dn must be non-negative")
    rng = make_rng(seed)
    bits = mask.bits
    h, w = bits.shape
    visited = ~bits.copy()
    out = np.zeros_like(bits)

    def target():
        d = d0 + rng.uniform(-dn, dn) if dn > 0 else d0
        return max(1.0, d)

    order = np.flatnonzero(bits.ravel())
    for flat in order:
        y, x = divmod(int(flat), w)
        if visited[y, x]:
            continue
        visited[y, x] = True
        out[y, x] = True
        acc = 0.0
        d = target()
        incoming = None
        while True:
            cands = [(dy, dx) for dy, dx in _NEIGHBOURS
                     if 0 <= y + dy < h and 0 <= x + dx < w and not visited[y + dy, x + dx]]
            if not cands:
                break
            if incoming is None:
                step = cands[int(rng.integers(len(cands)))]
            else:
                step = min(cands, key=lambda s: _rank_key(incoming, s))
            y += step[0]
            x += step[1]
            visited[y, x] = True
            acc += SQRT2 if step[0] and step[1] else 1.0
            incoming = step
            if acc >= d - 1e-9:
                out[y, x] = True
                acc = 0.0
                d = target()
    return BinaryMask(out)


@dataclass(frozen=True)
class EdgeStages:
    detected: BinaryMask
    cleaned: BinaryMask
    walked: BinaryMask


def edge_stages(image, params: EdgeParams, seed=None) -> EdgeStages:
    detected = detect_edges(image, params)
    cleaned = clean_corners(detected)
    if params.walk:
        walked = walk_paths(cleaned, params.d0, params.dn, seed)
    else:
        walked = cleaned
    return EdgeStages(detected, cleaned, walked)


def edge_distribution(image, params: EdgeParams, seed=None) -> ProbGrid:
    """Detect, clean and walk the edges, then spread probability equally
    over the surviving pixels."""
    return dpf_from_binary_image(edge_stages(image, params, seed).walked)
