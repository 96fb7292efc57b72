"""Tone adjustments applied before edge detection or halftoning."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class Prefilter:
    """Blur, then brightness/contrast about mid-gray, then gamma."""

    blur: float = 0.0
    brightness: float = 0.0
    contrast: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.blur < 0:
            raise ValueError("blur sigma must be non-negative")
        if self.contrast < 0:
            raise ValueError("contrast factor must be non-negative")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def is_identity(self) -> bool:
        return self == Prefilter()

    def __call__(self, image: np.ndarray) -> np.ndarray:
        img = np.asarray(image, dtype=np.float64)
        if self.is_identity():
            return img
        if self.blur > 0:
            img = ndimage.gaussian_filter(img, self.blur, mode="nearest")
        img = (img - 0.5) * self.contrast + 0.5 + self.brightness
        img = np.clip(img, 0.0, 1.0)
        if self.gamma != 1.0:
            img = img ** self.gamma
        return img


def as_tone(image) -> np.ndarray:
    """Validate a grayscale raster with values in [0, 1]."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2D grayscale image, got shape {img.shape}")
    if np.any(img < 0) or np.any(img > 1) or not np.all(np.isfinite(img)):
        raise ValueError("tone values must lie in [0, 1]")
    return img
