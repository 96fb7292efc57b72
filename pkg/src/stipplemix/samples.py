"""Synthetic test images and masks."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .grid import BinaryMask


def disk_and_gradient(size: int = 256) -> np.ndarray:
    """Horizontal light-to-mid gradient with a dark disk and a thin dark line."""
    yy, xx = np.mgrid[:size, :size].astype(np.float64)
    img = 0.92 - 0.5 * xx / (size - 1)
    c = size * 0.42
    r = size * 0.25
    img[(xx - c) ** 2 + (yy - c) ** 2 <= r * r] = 0.22
    y_line = int(size * 0.84)
    img[y_line, size // 8: size - size // 8] = 0.05
    return np.clip(img, 0.0, 1.0)


def bundled_image_path() -> Path:
    return Path(str(resources.files("stipplemix") / "data" / "disk_gradient.png"))


def disk_mask(width: int, height: int, radius: float, center=None) -> BinaryMask:
    cx, cy = center if center is not None else ((width - 1) / 2.0, (height - 1) / 2.0)
    yy, xx = np.mgrid[:height, :width]
    return BinaryMask((xx - cx) ** 2 + (yy - cy) ** 2 <= radius**2)


def ring_mask(width: int, height: int, r_inner: float, r_outer: float, center=None) -> BinaryMask:
    cx, cy = center if center is not None else ((width - 1) / 2.0, (height - 1) / 2.0)
    yy, xx = np.mgrid[:height, :width]
    d2 = (xx - cx) ** 2 + (yy - cy) ** 2
    return BinaryMask((d2 >= r_inner**2) & (d2 <= r_outer**2))


def wavy_lines_mask(width: int, height: int, spacing: float = 16.0,
                    amplitude: float = 4.0, period: float = 48.0) -> BinaryMask:
    """Horizontal sine curves, one pixel thick, ``spacing`` rows apart."""
    bits = np.zeros((height, width), dtype=bool)
    xs = np.arange(width)
    wave = amplitude * np.sin(2 * np.pi * xs / period)
    base = spacing / 2.0
    while base < height:
        ys = np.round(base + wave).astype(int)
        ok = (ys >= 0) & (ys < height)
        bits[ys[ok], xs[ok]] = True
        # Bridge steep segments so each curve stays 8-connected.
        for x in range(1, width):
            a, b = ys[x - 1], ys[x]
            lo, hi = sorted((a, b))
            for y in range(lo + 1, hi):
                if 0 <= y < height:
                    bits[y, x] = True
        base += spacing
    return BinaryMask(bits)
