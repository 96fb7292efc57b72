"""Command-line front end: ``stipplemix stipple`` and ``stipplemix figures``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .figures import FIGURES, make_figure, write_figure
from .interp import GammaSpec
from .pipeline import PipelineConfig, config_from_dict, dump_debug, run_pipeline, write_outputs
from .render import SizePolicy

SEED_ENV = "STIPPLEMIX_SEED"


def _page(text: str) -> tuple[float, float]:
    w, sep, h = text.lower().partition("x")
    try:
        page = (float(w), float(h))
    except ValueError:
        page = None
    if not sep or page is None or min(page) <= 0:
        raise argparse.ArgumentTypeError(f"page must look like WxH in mm, got {text!r}")
    return page


def _checked(parse):
    def conv(text):
        try:
            return parse(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    conv.__name__ = getattr(parse, "__name__", "value")
    return conv


def _add_stipple_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-i", "--input", help="input grayscale image")
    p.add_argument("-o", "--output", help="output file; .svg for vector, .png for raster")
    p.add_argument("-c", "--config", help="JSON configuration file")
    p.add_argument("--seed", type=int, help=f"random seed (falls back to ${SEED_ENV})")
    p.add_argument("--filter", choices=("canny", "dog", "log"), help="edge filter")
    p.add_argument("--d0", type=float, help="mean spacing of edge dots along a path, in cells")
    p.add_argument("--dn", type=float, help="spacing noise amplitude, in cells")
    p.add_argument("--bias", type=float, help="mixing bias in [-1, 1]")
    p.add_argument("--gamma", type=_checked(GammaSpec.parse), help="linear or band:L1,L2")
    p.add_argument("--sizes", type=_checked(SizePolicy.parse),
                   help="constant:d, modulated:min,max or discrete:a,b,...")
    p.add_argument("--ppi", type=float, help="output resolution")
    p.add_argument("--page", type=_page, help="page size WxH in mm")
    p.add_argument("--mask", help="PNG whose black cells replace the edges as distance source")
    p.add_argument("--n-dots", type=int, help="number of dots (default: black cells of the mix)")
    p.add_argument("--debug-dir", help="write intermediate grids here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stipplemix",
                                     description="Stippling by mixing dot distributions.")
    sub = parser.add_subparsers(dest="command", required=True)
    st = sub.add_parser("stipple", help="stipple an image")
    _add_stipple_args(st)
    fg = sub.add_parser("figures", help="render the toy interpolation sweeps")
    fg.add_argument("figure", nargs="+", choices=FIGURES + ("all",))
    fg.add_argument("-o", "--out-dir", default="figures")
    fg.add_argument("--seed", type=int)
    return parser


def _env_seed() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """Config file first, then flags on top. The seed comes from ``--seed``,
    else the config file, else the environment, else 0."""
    data: dict = {}
    base = None
    if args.config:
        path = Path(args.config)
        data = json.loads(path.read_text())
        base = path.parent
    if "seed" not in data:
        env = _env_seed()
        if env is not None:
            data["seed"] = env
    cfg = config_from_dict(data, base_dir=base)
    return apply_flags(cfg, args)


def apply_flags(cfg: PipelineConfig, args: argparse.Namespace) -> PipelineConfig:
    rep = dataclasses.replace
    if args.input is not None:
        cfg = rep(cfg, input=args.input)
    if args.output is not None:
        kind = "raster" if Path(args.output).suffix.lower() == ".png" else "svg"
        cfg = rep(cfg, output=args.output, render=rep(cfg.render, output=kind))
    if args.seed is not None:
        cfg = rep(cfg, seed=args.seed)
    edges = {k: v for k, v in (("filter", args.filter), ("d0", args.d0), ("dn", args.dn))
             if v is not None}
    if edges:
        cfg = rep(cfg, edges=rep(cfg.edges, **edges))
    mix = {}
    if args.bias is not None:
        mix["bias"] = args.bias
    if args.gamma is not None:
        mix["gamma"] = args.gamma
    if args.mask is not None:
        mix.update(field_source="external_mask", external_mask=args.mask)
    if mix:
        cfg = rep(cfg, mix=rep(cfg.mix, **mix))
    render = {k: v for k, v in (("sizes", args.sizes), ("ppi", args.ppi), ("page", args.page))
              if v is not None}
    if render:
        cfg = rep(cfg, render=rep(cfg.render, **render))
    if args.n_dots is not None:
        cfg = rep(cfg, n_dots=args.n_dots)
    return cfg


def config_to_flags(cfg: PipelineConfig) -> list[str]:
    """Flags that reproduce the flag-addressable fields of ``cfg``."""
    flags = []
    if cfg.input is not None:
        flags += ["-i", cfg.input]
    if cfg.output is not None:
        flags += ["-o", cfg.output]
    flags += ["--seed", str(cfg.seed), "--filter", cfg.edges.filter,
              "--d0", repr(cfg.edges.d0), "--dn", repr(cfg.edges.dn),
              "--bias", repr(cfg.mix.bias), "--gamma", cfg.mix.gamma.to_string(),
              "--sizes", cfg.render.sizes.to_string(), "--ppi", repr(cfg.render.ppi),
              "--page", f"{cfg.render.page[0]!r}x{cfg.render.page[1]!r}"]
    if cfg.mix.field_source == "external_mask":
        flags += ["--mask", str(cfg.mix.external_mask)]
    if cfg.n_dots is not None:
        flags += ["--n-dots", str(cfg.n_dots)]
    return flags


def cmd_stipple(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if cfg.input is None:
        raise ValueError("no input image (use -i or set input in the config)")
    if not Path(cfg.input).is_file():
        raise FileNotFoundError(f"input image not found: {cfg.input}")
    if cfg.output is None:
        raise ValueError("no output file (use -o or set output in the config)")
    result = run_pipeline(cfg)
    written = write_outputs(result, cfg, cfg.output)
    if args.debug_dir:
        written += dump_debug(result, args.debug_dir)
    for path in written:
        print(path)
    return 0


def cmd_figures(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else (_env_seed() or 0)
    ids = FIGURES if "all" in args.figure else tuple(dict.fromkeys(args.figure))
    for fig in ids:
        for path in write_figure(make_figure(fig, seed=seed), args.out_dir):
            print(path)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "stipple":
            return cmd_stipple(args)
        return cmd_figures(args)
    except (OSError, ValueError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"stipplemix: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
