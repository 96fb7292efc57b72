"""PNG load/save for tone images, masks and 16-bit debug dumps."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .grid import BinaryMask, ProbGrid


def load_gray(path) -> np.ndarray:
    """Load an image as float64 tone in [0, 1], 0 = black, 1 = white."""
    with Image.open(path) as img:
        if img.mode in ("I;16", "I;16B", "I"):
            arr = np.asarray(img, dtype=np.float64)
            return np.clip(arr / 65535.0, 0.0, 1.0)
        if img.mode in ("RGBA", "LA", "P"):
            img = img.convert("RGBA")
            bg = Image.new("RGBA", img.size, (255, 255, 255, 255))
            img = Image.alpha_composite(bg, img)
        arr = np.asarray(img.convert("L"), dtype=np.float64)
    return arr / 255.0


def save_gray(path, tone: np.ndarray) -> None:
    """Write a [0, 1] tone array as 8-bit grayscale PNG."""
    data = np.round(np.clip(tone, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(data).save(Path(path))


def save_u8(path, data: np.ndarray) -> None:
    Image.fromarray(np.asarray(data, dtype=np.uint8)).save(Path(path))


def load_mask(path) -> BinaryMask:
    """8-bit grayscale PNG to mask; pixels below 128 are black (on)."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"), dtype=np.uint8)
    return BinaryMask(arr < 128)


def save_mask(path, mask: BinaryMask) -> None:
    data = np.where(mask.bits, 0, 255).astype(np.uint8)
    Image.fromarray(data).save(Path(path))


def save_u16(path, values: np.ndarray, scale_max: float | None = None) -> None:
    """Linear 16-bit grayscale dump; ``scale_max`` maps to 65535."""
    v = np.asarray(values, dtype=np.float64)
    top = float(v.max()) if scale_max is None else float(scale_max)
    if top > 0:
        v = v / top
    data = np.round(np.clip(v, 0.0, 1.0) * 65535.0).astype(np.uint16)
    Image.fromarray(data).save(Path(path))


def load_u16(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img, dtype=np.uint16)


def save_probgrid(path, grid: ProbGrid) -> None:
    """Debug dump, maximum probability maps to 65535."""
    save_u16(path, grid.prob)
