"""Discrete probability grids and the constructors that build them.

A :class:`ProbGrid` stores, per raster cell, the probability that the next
stipple dot lands in that cell. Cells with probability zero are *white*,
cells with positive probability are *black*.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# Renormalization is skipped when the total is already this close to one, so
# grids that are valid on input pass through interpolation bit-for-bit.
NORMALIZE_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """2D bit grid, ``True`` marks a black (on) cell."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[0] == 0 or bits.shape[1] == 0:
            raise ValueError(f"mask must be a non-empty 2D array, got shape {bits.shape}")
        object.__setattr__(self, "bits", _frozen(bits))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        return int(self.bits.sum())

    def any(self) -> bool:
        return bool(self.bits.any())

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    @classmethod
    def empty(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.zeros((height, width), dtype=bool))


@dataclass(frozen=True, eq=False)
class ProbGrid:
    """Per-cell dot probabilities, row-major ``(height, width)`` float64."""

    prob: np.ndarray

    def __post_init__(self):
        prob = np.array(self.prob, dtype=np.float64)
        if prob.ndim != 2 or prob.shape[0] == 0 or prob.shape[1] == 0:
            raise ValueError(f"grid must be a non-empty 2D array, got shape {prob.shape}")
        if not np.all(np.isfinite(prob)):
            raise ValueError("grid contains non-finite probabilities")
        if np.any(prob < 0):
            raise ValueError("grid contains negative probabilities")
        total = prob.sum()
        if total > 0 and abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "prob", _frozen(prob))

    @property
    def width(self) -> int:
        return self.prob.shape[1]

    @property
    def height(self) -> int:
        return self.prob.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.prob.shape

    def black(self) -> BinaryMask:
        return BinaryMask(self.prob > 0)

    def n_black(self) -> int:
        return int(np.count_nonzero(self.prob))

    def total(self) -> float:
        return float(self.prob.sum())

    def is_empty(self) -> bool:
        return self.n_black() == 0

    def __eq__(self, other):
        if not isinstance(other, ProbGrid):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.prob, other.prob))

    @classmethod
    def white(cls, width: int, height: int) -> "ProbGrid":
        return cls(np.zeros((height, width)))

    @classmethod
    def from_weights(cls, weights: np.ndarray) -> "ProbGrid":
        """Normalize non-negative weights into a grid (all-zero stays white)."""
        return cls(normalize(weights))


def normalize(weights: np.ndarray) -> np.ndarray:
    w = np.array(weights, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    total = w.sum()
    if total == 0 or abs(total - 1.0) <= NORMALIZE_TOL:
        return w
    return w / total


@dataclass(frozen=True)
class AnalyticPdf:
    """A continuous density over a rectangle in cell coordinates.

    ``kind`` is one of ``uniform2d``, ``normal2d``, ``annulus`` or
    ``image_weighted``. ``domain`` is ``(x0, y0, x1, y1)``.
    """

    kind: str
    domain: tuple[float, float, float, float]
    mean: tuple[float, float] | None = None
    sigma: float | None = None
    center: tuple[float, float] | None = None
    r_inner: float | None = None
    r_outer: float | None = None
    weights: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        x0, y0, x1, y1 = self.domain
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"empty domain {self.domain}")
        if self.kind == "normal2d":
            if self.mean is None or self.sigma is None:
                raise ValueError("normal2d needs mean and sigma")
            if self.sigma < 0:
                raise ValueError("sigma must be non-negative")
        elif self.kind == "annulus":
            if self.center is None or self.r_inner is None or self.r_outer is None:
                raise ValueError("annulus needs center, r_inner and r_outer")
            if not 0 <= self.r_inner <= self.r_outer:
                raise ValueError("annulus needs 0 <= r_inner <= r_outer")
        elif self.kind == "image_weighted":
            if self.weights is None:
                raise ValueError("image_weighted needs a weight image")
            w = np.asarray(self.weights, dtype=np.float64)
            if w.ndim != 2 or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be a finite non-negative 2D array")
        elif self.kind != "uniform2d":
            raise ValueError(f"unknown pdf kind {self.kind!r}")

    @classmethod
    def uniform2d(cls, domain) -> "AnalyticPdf":
        return cls("uniform2d", tuple(domain))

    @classmethod
    def normal2d(cls, mean, sigma: float, domain) -> "AnalyticPdf":
        return cls("normal2d", tuple(domain), mean=tuple(mean), sigma=float(sigma))

    @classmethod
    def annulus(cls, center, r_inner: float, r_outer: float, domain) -> "AnalyticPdf":
        return cls("annulus", tuple(domain), center=tuple(center),
                   r_inner=float(r_inner), r_outer=float(r_outer))

    @classmethod
    def image_weighted(cls, weights: np.ndarray, domain=None) -> "AnalyticPdf":
        w = np.asarray(weights, dtype=np.float64)
        if domain is None:
            domain = (0.0, 0.0, float(w.shape[1]), float(w.shape[0]))
        return cls("image_weighted", tuple(domain), weights=w)

    def density(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Unnormalized density at the given points (zero outside the domain)."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        x0, y0, x1, y1 = self.domain
        inside = (x >= x0) & (x < x1) & (y >= y0) & (y < y1)
        if self.kind == "uniform2d":
            d = np.ones_like(x)
        elif self.kind == "normal2d":
            mx, my = self.mean
            if self.sigma == 0:
                d = ((x == mx) & (y == my)).astype(np.float64)
            else:
                d = np.exp(-((x - mx) ** 2 + (y - my) ** 2) / (2 * self.sigma**2))
        elif self.kind == "annulus":
            cx, cy = self.center
            r = np.hypot(x - cx, y - cy)
            d = ((r >= self.r_inner) & (r <= self.r_outer)).astype(np.float64)
        else:
            w = np.asarray(self.weights, dtype=np.float64)
            h, wd = w.shape
            col = np.clip(((x - x0) / (x1 - x0) * wd).astype(int), 0, wd - 1)
            row = np.clip(((y - y0) / (y1 - y0) * h).astype(int), 0, h - 1)
            d = w[row, col]
        return np.where(inside, d, 0.0)


def _cell_indices(points, width: int, height: int) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    bad = ~((pts[:, 0] >= 0) & (pts[:, 0] < width) & (pts[:, 1] >= 0) & (pts[:, 1] < height))
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"point {i} at {tuple(pts[i])} lies outside the {width}x{height} grid")
    cols = np.floor(pts[:, 0]).astype(np.int64)
    rows = np.floor(pts[:, 1]).astype(np.int64)
    return rows * width + cols


def dpf_from_points(points: Sequence, width: int, height: int,
                    init: str = "uniform") -> ProbGrid:
    """Build a grid from ``(x, y)`` points in cell coordinates.

    Cells holding at least one point become black. ``init="uniform"`` gives
    every black cell ``1/M``; ``init="count_weighted"`` makes a cell's
    probability proportional to the number of points it holds.
    """
    if init not in ("uniform", "count_weighted"):
        raise ValueError(f"unknown init policy {init!r}")
    if width <= 0 or height <= 0:
        raise ValueError("grid dimensions must be positive")
    counts = np.zeros(width * height, dtype=np.float64)
    if len(points):
        idx = _cell_indices(points, width, height)
        np.add.at(counts, idx, 1.0)
    if init == "uniform":
        counts = (counts > 0).astype(np.float64)
    return ProbGrid.from_weights(counts.reshape(height, width))


def dpf_from_binary_image(mask: BinaryMask) -> ProbGrid:
    return ProbGrid.from_weights(mask.bits.astype(np.float64))


def dpf_from_pdf(pdf: AnalyticPdf, n_samples: int, width: int, height: int,
                 seed=None) -> ProbGrid:
    """Monte Carlo discretization of ``pdf``: sample, bin, weight by count."""
    from .sampler import sample_pdf

    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    pts = sample_pdf(pdf, n_samples, seed)
    # Domain edges may coincide with the grid edge.
    pts[:, 0] = np.clip(pts[:, 0], 0.0, np.nextafter(width, 0))
    pts[:, 1] = np.clip(pts[:, 1], 0.0, np.nextafter(height, 0))
    return dpf_from_points(pts, width, height, init="count_weighted")


def supersample(image: np.ndarray, factor: int) -> np.ndarray:
    """Nearest-neighbour upscale by an integer factor."""
    if factor < 1 or int(factor) != factor:
        raise ValueError("supersampling factor must be a positive integer")
    if factor == 1:
        return np.asarray(image)
    return np.repeat(np.repeat(np.asarray(image), factor, axis=0), factor, axis=1)
