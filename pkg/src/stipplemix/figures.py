"""Toy interpolation sweeps rendered as point-cloud PNGs."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import AnalyticPdf, BinaryMask, ProbGrid, dpf_from_binary_image, dpf_from_pdf
from .interp import DistanceField, GammaSpec, MixSpec, distance_field, interp_global, interp_with_field
from .pngio import save_u8
from .render import DotSet, RenderConfig, SizePolicy, render_raster
from .rng import make_rng
from .samples import disk_mask, ring_mask, wavy_lines_mask
from .sampler import SampleRun, sample_dpf

FIGURES = ("uniform-to-normal", "normal-to-annulus", "masked-field", "bias-sweep")
ALPHA_STEPS = 8
BIAS_VALUES = (-1.0, -0.5, 0.0, 0.5, 1.0)


@dataclass
class Panel:
    label: str
    grid: ProbGrid
    run: SampleRun
    classes: np.ndarray              # "f" or "g" per dot, by source support
    stats: dict = field(default_factory=dict)


@dataclass
class FigureResult:
    figure: str
    panels: list[Panel]
    files: list[Path] = field(default_factory=list)


def radial_rms(points: np.ndarray, center) -> float:
    """Root-mean-square distance of the points from ``center``."""
    d = np.asarray(points, dtype=np.float64) - np.asarray(center, dtype=np.float64)
    return float(np.sqrt(np.mean(np.sum(d * d, axis=1))))


def radial_std(points: np.ndarray, center) -> float:
    d = np.asarray(points, dtype=np.float64) - np.asarray(center, dtype=np.float64)
    return float(np.std(np.hypot(d[:, 0], d[:, 1])))


def plot_points(points: np.ndarray, width: int, height: int, scale: int = 4,
                dot: float = 2.5) -> np.ndarray:
    """Grayscale image of ``points`` (cell coordinates) as black disks."""
    cfg = RenderConfig(page=(width * scale, height * scale), ppi=25.4,
                       sizes=SizePolicy("constant", (dot,)))
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2) * scale
    n = len(pts)
    dots = DotSet(pts[:, 0], pts[:, 1], np.full(n, dot), np.full(n, "area"),
                  np.full(n, -1, dtype=np.int64))
    return render_raster(dots, cfg)


def _classes(f: ProbGrid, run: SampleRun) -> np.ndarray:
    return np.where(f.prob.ravel()[run.cells] > 0, "f", "g")


def _panel(label: str, f: ProbGrid, mixed: ProbGrid, n: int | None, rng) -> Panel:
    count = mixed.n_black() if n is None else n
    run = sample_dpf(mixed, count, rng)
    return Panel(label, mixed, run, _classes(f, run))


def _pdf_pair(first: str, second: str, size: int, n_samples: int, seed):
    dom = (0.0, 0.0, float(size), float(size))
    c = (size / 2.0, size / 2.0)
    pdfs = {
        "uniform": AnalyticPdf.uniform2d(dom),
        "normal": AnalyticPdf.normal2d(c, size / 8.0, dom),
        "annulus": AnalyticPdf.annulus(c, size * 0.28, size * 0.4, dom),
    }
    f = dpf_from_pdf(pdfs[first], n_samples, size, size, make_rng(seed, f"pdf-{first}"))
    g = dpf_from_pdf(pdfs[second], n_samples, size, size, make_rng(seed, f"pdf-{second}"))
    return f, g


def alpha_sweep(first: str, second: str, size: int = 64, n_samples: int = 4096,
                n_dots: int = 1500, steps: int = ALPHA_STEPS, seed: int = 0) -> FigureResult:
    """Global interpolation from ``first`` to ``second`` at alpha = k/(steps-1)."""
    f, g = _pdf_pair(first, second, size, n_samples, seed)
    rng = make_rng(seed, "alpha-sweep")
    center = (size / 2.0, size / 2.0)
    panels = []
    for k in range(steps):
        alpha = k / (steps - 1)
        p = _panel(f"alpha={k}/{steps - 1}", f, interp_global(f, g, alpha), n_dots, rng)
        pts = p.run.points()
        p.stats = {"alpha": alpha, "dots": len(pts), "radial_rms": radial_rms(pts, center),
                   "radial_std": radial_std(pts, center)}
        panels.append(p)
    return FigureResult(f"{first}-to-{second}", panels)


def lattice_and_scatter(size: int, spacing: int = 3, seed=0) -> tuple[ProbGrid, ProbGrid]:
    """A regular lattice ``f`` and a random scatter ``g`` with disjoint
    support and the same number of black cells."""
    yy, xx = np.mgrid[:size, :size]
    lattice = (xx % spacing == 0) & (yy % spacing == 0)
    free = np.flatnonzero(~lattice.ravel())
    pick = make_rng(seed, "scatter").choice(free, size=int(lattice.sum()), replace=False)
    scatter = np.zeros(size * size, dtype=bool)
    scatter[pick] = True
    return (dpf_from_binary_image(BinaryMask(lattice)),
            dpf_from_binary_image(BinaryMask(scatter.reshape(size, size))))


def figure_masks(size: int) -> dict[str, BinaryMask]:
    c = (size - 1) / 2.0
    return {
        "disk": disk_mask(size, size, size * 0.12, (c, c)),
        "ring": ring_mask(size, size, size * 0.3, size * 0.32, (c, c)),
        "wavy": wavy_lines_mask(size, size, spacing=size / 3.0, amplitude=size / 24.0,
                                period=size / 2.0),
    }


def class_audit(df: DistanceField, run: SampleRun, classes: np.ndarray, bins: int = 10) -> dict:
    """Per distance bin, the number of dots and the fraction that are f-class."""
    delta = df.delta.ravel()[run.cells]
    idx = np.minimum((delta * bins).astype(int), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    f_counts = np.bincount(idx, weights=(classes == "f").astype(float), minlength=bins)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(counts > 0, f_counts / np.maximum(counts, 1), np.nan)
    return {"counts": counts.tolist(), "f_fraction": frac.tolist()}


def masked_field(size: int = 256, seed: int = 0, mix: MixSpec | None = None) -> FigureResult:
    """Interpolate lattice to scatter through the distance field of three masks."""
    f, g = lattice_and_scatter(size, seed=seed)
    mix = mix or MixSpec()
    rng = make_rng(seed, "masked-field")
    panels = []
    for name, mask in figure_masks(size).items():
        df = distance_field(mask)
        p = _panel(name, f, interp_with_field(f, g, df, mix, rng), None, rng)
        p.stats = {"mask": name, "dots": len(p.run.cells), **class_audit(df, p.run, p.classes)}
        panels.append(p)
    return FigureResult("masked-field", panels)


def bias_sweep(size: int = 256, seed: int = 0, biases=BIAS_VALUES,
               gamma: GammaSpec | None = None, mode: str = "expected") -> FigureResult:
    """Disk-mask interpolation for a range of biases."""
    f, g = lattice_and_scatter(size, seed=seed)
    df = distance_field(figure_masks(size)["disk"])
    rng = make_rng(seed, "bias-sweep")
    panels = []
    for b in biases:
        mix = MixSpec(bias=b, gamma=gamma or GammaSpec.linear(), mode=mode)
        mixed = interp_with_field(f, g, df, mix, rng)
        p = _panel(f"bias={b:+g}", f, mixed, None, rng)
        p.stats = {"bias": b, "dots": len(p.run.cells), "f_dots": int(np.sum(p.classes == "f"))}
        panels.append(p)
    return FigureResult("bias-sweep", panels)


def make_figure(figure: str, seed: int = 0) -> FigureResult:
    if figure == "uniform-to-normal":
        return alpha_sweep("uniform", "normal", seed=seed)
    if figure == "normal-to-annulus":
        return alpha_sweep("normal", "annulus", seed=seed)
    if figure == "masked-field":
        return masked_field(seed=seed)
    if figure == "bias-sweep":
        return bias_sweep(seed=seed)
    raise ValueError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")


def write_figure(result: FigureResult, out_dir) -> list[Path]:
    """One PNG per panel plus ``<figure>.json`` with the panel statistics."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, p in enumerate(result.panels):
        path = out / f"{result.figure}_{i:02d}.png"
        save_u8(path, plot_points(p.run.points(), p.grid.width, p.grid.height))
        files.append(path)
    stats_path = out / f"{result.figure}.json"
    stats = [{"label": p.label, **p.stats} for p in result.panels]
    stats_path.write_text(json.dumps(stats, indent=2) + "\n")
    files.append(stats_path)
    result.files = files
    return files
