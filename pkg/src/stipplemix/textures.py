"""Dot texture atlases.

An atlas is a directory of grayscale PNG stamps (0 = full ink, 255 = paper)
plus ``manifest.json``::

    {"stamps": [{"name": "dot0", "file": "dot0.png", "ppi": 1200, "diameter": 24}, ...]}

``diameter`` is the nominal dot diameter in stamp pixels at ``ppi``. Scanned
dots can replace the bundled procedural ones by writing such a directory.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .rng import make_rng


@dataclass(frozen=True, eq=False)
class Stamp:
    name: str
    ink: np.ndarray   # [0, 1], 1 = full ink
    ppi: float
    diameter: float


@dataclass(frozen=True, eq=False)
class Atlas:
    stamps: tuple[Stamp, ...]


def bundled_atlas_dir() -> Path:
    return Path(str(resources.files("stipplemix") / "data" / "atlas"))


@lru_cache(maxsize=8)
def load_atlas(path: str) -> Atlas:
    root = bundled_atlas_dir() if path == "bundled" else Path(path)
    manifest = json.loads((root / "manifest.json").read_text())
    stamps = []
    for entry in manifest["stamps"]:
        with Image.open(root / entry["file"]) as img:
            gray = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
        stamps.append(Stamp(entry.get("name", entry["file"]), 1.0 - gray,
                            float(entry["ppi"]), float(entry["diameter"])))
    if not stamps:
        raise ValueError(f"atlas {root} has no stamps")
    return Atlas(tuple(stamps))


def blob_stamp(rng: np.random.Generator, diameter: int = 24, pad: int = 4) -> np.ndarray:
    """Irregular ink blob: a wobbly disk, lighter towards its centre."""
    size = diameter + 2 * pad
    c = (size - 1) / 2.0
    yy, xx = np.mgrid[:size, :size]
    dx, dy = xx - c, yy - c
    theta = np.arctan2(dy, dx)
    radius = np.full(theta.shape, diameter / 2.0)
    for k in range(2, 6):
        amp = rng.uniform(0.02, 0.09) / (k - 1)
        radius = radius * (1.0 + amp * np.cos(k * theta + rng.uniform(0, 2 * np.pi)))
    rho = np.hypot(dx, dy) / radius
    edge = np.clip((1.0 - rho) * diameter / 2.0 + 0.5, 0.0, 1.0)
    core = 0.8 + 0.2 * np.clip(rho, 0.0, 1.0) ** 2
    grain = 1.0 - 0.08 * rng.random(theta.shape)
    return np.clip(edge * core * grain, 0.0, 1.0)


def generate_atlas(out_dir, n: int = 8, diameter: int = 24, ppi: float = 1200.0,
                   seed: int = 1200) -> Path:
    """Write ``n`` procedural stamps and their manifest to ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = make_rng(seed)
    entries = []
    for i in range(n):
        ink = blob_stamp(rng, diameter)
        name = f"dot{i}"
        data = np.round((1.0 - ink) * 255.0).astype(np.uint8)
        Image.fromarray(data).save(out / f"{name}.png")
        entries.append({"name": name, "file": f"{name}.png", "ppi": ppi, "diameter": diameter})
    (out / "manifest.json").write_text(json.dumps({"stamps": entries}, indent=2) + "\n")
    return out
