"""End-to-end stippling: edge and area distributions mixed through a
distance field, sampled, jittered, sized and rendered."""
from __future__ import annotations

import contextlib
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .area import AreaParams, halftone_mask, jitter_dots
from .edges import EdgeParams, EdgeStages, edge_stages
from .grid import BinaryMask, ProbGrid, dpf_from_binary_image, supersample
from .interp import DistanceField, GammaSpec, MixSpec, distance_field, interp_with_field, mix_weights
from .pngio import load_gray, load_mask, save_mask, save_probgrid, save_u8, save_u16
from .render import DotSet, EdgeSizePolicy, RenderConfig, SizePolicy, assign_sizes, render_raster, render_svg
from .rng import make_rng
from .sampler import SampleRun, sample_dpf
from .tone import Prefilter, as_tone


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@contextlib.contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


@dataclass(frozen=True)
class PipelineConfig:
    input: str | None = None
    area: AreaParams = field(default_factory=AreaParams)
    edges: EdgeParams = field(default_factory=EdgeParams)
    mix: MixSpec = field(default_factory=MixSpec)
    render: RenderConfig = field(default_factory=RenderConfig)
    n_dots: int | None = None
    seed: int = 0
    supersample: int = 1
    subcell: str = "center"
    redistribute: str = "proportional"
    output: str | None = None

    def __post_init__(self):
        if self.n_dots is not None and self.n_dots < 0:
            raise ValueError("n_dots must be non-negative")
        if self.subcell not in ("center", "uniform"):
            raise ValueError(f"unknown sub-cell mode {self.subcell!r}")


@dataclass
class PipelineResult:
    dots: DotSet
    output: object          # SVG text or uint8 raster
    stats: dict
    edges: EdgeStages
    area: BinaryMask
    mixed: ProbGrid
    field: DistanceField | None
    weights: np.ndarray | None
    run: SampleRun | None
    classes: np.ndarray


def canvas_transform(grid_shape: tuple[int, int], render: RenderConfig):
    """Uniform scale and offset placing the grid centred on the canvas."""
    h, w = grid_shape
    cw, ch = render.canvas_size()
    s = min(cw / w, ch / h)
    return s, ((cw - s * w) / 2.0, (ch - s * h) / 2.0)


def _boundary(config: PipelineConfig, edges: EdgeStages) -> BinaryMask:
    mix = config.mix
    if mix.field_source == "edge_mask":
        return edges.detected
    ext = mix.external_mask
    mask = ext if isinstance(ext, BinaryMask) else load_mask(ext)
    if mask.shape != edges.detected.shape:
        raise ValueError(f"external mask {mask.shape} does not match grid {edges.detected.shape}")
    return mask


def run_pipeline(config: PipelineConfig, image=None) -> PipelineResult:
    """Run every stage; ``image`` overrides ``config.input`` when given."""
    seed = config.seed
    with _stage("input"):
        if image is None:
            if config.input is None:
                raise ValueError("no input image")
            image = load_gray(config.input)
        tone = as_tone(supersample(as_tone(image), config.supersample))
        h, w = tone.shape

    with _stage("area"):
        area_mask = halftone_mask(tone, config.area)
        g = dpf_from_binary_image(area_mask)
    with _stage("edges"):
        stages = edge_stages(tone, config.edges, make_rng(seed, "walk"))
        f = dpf_from_binary_image(stages.walked)
    with _stage("field"):
        boundary = _boundary(config, stages)
        fallback = not boundary.any()
        df = weights = None
        if fallback:
            # No boundary means no distance field: area distribution only.
            mixed = g
        else:
            df = distance_field(boundary)
            weights = mix_weights(df, config.mix)
    with _stage("mix"):
        if not fallback:
            mixed = interp_with_field(f, g, df, config.mix, make_rng(seed, "mix"))

    run = None
    with _stage("sample"):
        n = mixed.n_black() if config.n_dots is None else config.n_dots
        if n > 0 and not mixed.is_empty():
            run = sample_dpf(mixed, n, make_rng(seed, "sample"), offsets=config.subcell,
                             redistribute=config.redistribute)
            classes = np.where(f.prob.ravel()[run.cells] > 0, "edge", "area")
            pts = run.points()
        else:
            classes = np.zeros(0, dtype="<U4")
            pts = np.zeros((0, 2))

    with _stage("jitter"):
        pts = jitter_dots(pts, classes, config.area, make_rng(seed, "jitter"), bounds=(w, h))
    with _stage("size"):
        s, (ox, oy) = canvas_transform((h, w), config.render)
        canvas_pts = pts * s + np.array([ox, oy])
        cells_r = np.clip(pts[:, 1].astype(np.int64), 0, h - 1)
        cells_c = np.clip(pts[:, 0].astype(np.int64), 0, w - 1)
        dots = assign_sizes(canvas_pts, classes, tone[cells_r, cells_c], config.render,
                            make_rng(seed, "size"))
    with _stage("render"):
        if config.render.output == "svg":
            output = render_svg(dots, config.render)
        else:
            output = render_raster(dots, config.render)

    stats = {
        "seed": seed,
        "grid": [w, h],
        "dots": len(dots),
        "edge_dots": dots.count("edge"),
        "area_dots": dots.count("area"),
        "black_cells": {"edge": f.n_black(), "area": g.n_black(), "mixed": mixed.n_black()},
        "edge_fallback": fallback,
    }
    return PipelineResult(dots, output, stats, stages, area_mask, mixed, df, weights, run, classes)


def write_outputs(result: PipelineResult, config: PipelineConfig, out_path) -> list[Path]:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(result.output, str):
        out.write_text(result.output)
    else:
        save_u8(out, result.output)
    stats_path = out.with_name(out.stem + ".stats.json")
    stats_path.write_text(json.dumps(result.stats, indent=2, sort_keys=True) + "\n")
    return [out, stats_path]


def dump_debug(result: PipelineResult, directory) -> list[Path]:
    """Write every intermediate grid as PNG into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    for name, mask in (("edges_detected", result.edges.detected),
                       ("edges_cleaned", result.edges.cleaned),
                       ("edges_walked", result.edges.walked),
                       ("area_halftone", result.area)):
        save_mask(d / f"{name}.png", mask)
        written.append(d / f"{name}.png")
    if result.field is not None:
        save_u16(d / "distance_field.png", result.field.delta, scale_max=1.0)
        save_u16(d / "gamma_field.png", result.weights, scale_max=1.0)
        written += [d / "distance_field.png", d / "gamma_field.png"]
    save_probgrid(d / "mixed_dpf.png", result.mixed)
    written.append(d / "mixed_dpf.png")
    return written


# -- JSON config ---------------------------------------------------------

def _prefilter_from(d: dict | None) -> Prefilter:
    return Prefilter(**(d or {}))


def config_from_dict(data: dict, base_dir=None) -> PipelineConfig:
    """Build a config from the JSON layout; missing fields take defaults."""
    known = {"input", "area", "edges", "mix", "render", "seed", "n_dots",
             "supersample", "subcell", "redistribute", "output"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")

    def path(p):
        if p is None or base_dir is None or Path(p).is_absolute():
            return p
        return str(Path(base_dir) / p)

    area = dict(data.get("area") or {})
    area["prefilter"] = _prefilter_from(area.get("prefilter"))
    edges = dict(data.get("edges") or {})
    edges["prefilter"] = _prefilter_from(edges.get("prefilter"))

    mixd = dict(data.get("mix") or {})
    gamma = GammaSpec.parse(mixd.pop("gamma", "linear"))
    mask = mixd.pop("mask", None)
    region = mixd.pop("region", None)
    mix = MixSpec(
        bias=float(mixd.pop("bias", 0.0)),
        gamma=gamma,
        field_source="external_mask" if mask else "edge_mask",
        external_mask=path(mask),
        invert=bool(mixd.pop("invert", False)),
        # Region PNGs mark the emphasized area in white.
        region=BinaryMask(~load_mask(path(region)).bits) if region else None,
        region_bias=float(mixd.pop("region_bias", 0.0)),
        mode=mixd.pop("mode", "expected"),
    )
    if mixd:
        raise ValueError(f"unknown mix fields: {sorted(mixd)}")

    rd = dict(data.get("render") or {})
    render = RenderConfig(
        page=tuple(float(v) for v in rd.pop("page", RenderConfig.page)),
        ppi=float(rd.pop("ppi", RenderConfig.ppi)),
        sizes=SizePolicy.parse(rd.pop("sizes", "modulated:4,8")),
        edge_sizes=EdgeSizePolicy.parse(rd.pop("edge_sizes", "mean_pm25")),
        atlas=path(rd.pop("atlas", None)) if rd.get("atlas") != "bundled" else rd.pop("atlas"),
        output=rd.pop("output", "svg"),
        embed_class=bool(rd.pop("embed_class", False)),
    )
    if rd:
        raise ValueError(f"unknown render fields: {sorted(rd)}")

    return PipelineConfig(
        input=path(data.get("input")),
        area=AreaParams(**area),
        edges=EdgeParams(**edges),
        mix=mix,
        render=render,
        n_dots=data.get("n_dots"),
        seed=int(data.get("seed", 0)),
        supersample=int(data.get("supersample", 1)),
        subcell=data.get("subcell", "center"),
        redistribute=data.get("redistribute", "proportional"),
        output=path(data.get("output")),
    )


def config_to_dict(config: PipelineConfig) -> dict:
    """Inverse of :func:`config_from_dict` for path-based configs."""
    mix = config.mix
    if mix.region is not None:
        raise ValueError("in-memory region masks cannot be serialized")
    ext = mix.external_mask
    if isinstance(ext, BinaryMask):
        raise ValueError("in-memory external masks cannot be serialized")
    r = config.render
    return {
        "input": config.input,
        "area": dataclasses.asdict(config.area),
        "edges": dataclasses.asdict(config.edges),
        "mix": {"bias": mix.bias, "gamma": mix.gamma.to_string(), "mask": ext,
                "invert": mix.invert, "region_bias": mix.region_bias, "mode": mix.mode},
        "render": {"page": list(r.page), "ppi": r.ppi, "sizes": r.sizes.to_string(),
                   "edge_sizes": r.edge_sizes.to_string(), "atlas": r.atlas,
                   "output": r.output, "embed_class": r.embed_class},
        "seed": config.seed,
        "n_dots": config.n_dots,
        "supersample": config.supersample,
        "subcell": config.subcell,
        "redistribute": config.redistribute,
        "output": config.output,
    }


def load_config(path) -> PipelineConfig:
    p = Path(path)
    return config_from_dict(json.loads(p.read_text()), base_dir=p.parent)
