import json
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from stipplemix.cli import build_config, build_parser, config_to_flags, main
from stipplemix.figures import BIAS_VALUES
from stipplemix.interp import GammaSpec
from stipplemix.pngio import save_gray
from stipplemix.samples import disk_mask


@pytest.fixture
def image(tmp_path):
    img = np.full((48, 48), 0.85)
    img[disk_mask(48, 48, 15).bits] = 0.25
    path = tmp_path / "in.png"
    save_gray(path, img)
    return path


SMALL = ["--page", "48x48", "--ppi", "25.4"]


def run(argv):
    return main([str(a) for a in argv])


def test_svg_is_deterministic(tmp_path, image):
    for name in ("a.svg", "b.svg"):
        assert run(["stipple", "-i", image, "-o", tmp_path / name, "--seed", 7, *SMALL]) == 0
    a, b = (tmp_path / "a.svg").read_bytes(), (tmp_path / "b.svg").read_bytes()
    assert a == b and b"<circle" in a
    stats = json.loads((tmp_path / "a.stats.json").read_text())
    assert stats["seed"] == 7


def test_png_output(tmp_path, image):
    assert run(["stipple", "-i", image, "-o", tmp_path / "a.png", *SMALL]) == 0
    with Image.open(tmp_path / "a.png") as im:
        assert im.size == (48, 48) and im.mode == "L"


def test_flags_parse_exactly(image):
    args = build_parser().parse_args(["stipple", "-i", str(image), "--gamma", "band:0.1,0.3", "--bias", "0.2",
                                      "--filter", "dog", "--d0", "3.5", "--dn", "1.75"])
    cfg = build_config(args)
    assert cfg.mix.gamma == GammaSpec("band", 0.1, 0.3) and cfg.mix.bias == 0.2
    assert (cfg.edges.filter, cfg.edges.d0, cfg.edges.dn) == ("dog", 3.5, 1.75)


def test_config_flags_round_trip(tmp_path, image):
    data = {"input": str(image), "output": str(tmp_path / "o.svg"), "seed": 3, "n_dots": 200,
            "edges": {"filter": "log", "d0": 2.5, "dn": 0.5},
            "mix": {"bias": -0.25, "gamma": "band:0.05,0.4", "mask": str(image)},
            "render": {"page": [90, 120], "ppi": 150, "sizes": "discrete:1.5,3"}}
    cfgp = tmp_path / "c.json"
    cfgp.write_text(json.dumps(data))
    from_file = build_config(build_parser().parse_args(["stipple", "-c", str(cfgp)]))
    from_flags = build_config(build_parser().parse_args(["stipple", *config_to_flags(from_file)]))
    assert config_to_flags(from_flags) == config_to_flags(from_file)
    assert from_flags.mix.external_mask == str(image) and from_flags.render.page == (90.0, 120.0)


def test_flags_override_config(tmp_path, image):
    cfgp = tmp_path / "c.json"
    cfgp.write_text(json.dumps({"seed": 3, "mix": {"bias": 0.5}}))
    cfg = build_config(build_parser().parse_args(["stipple", "-c", str(cfgp), "--seed", "9"]))
    assert cfg.seed == 9 and cfg.mix.bias == 0.5


def test_seed_from_environment(monkeypatch, image):
    monkeypatch.setenv("STIPPLEMIX_SEED", "41")
    assert build_config(build_parser().parse_args(["stipple"])).seed == 41
    assert build_config(build_parser().parse_args(["stipple", "--seed", "2"])).seed == 2
    monkeypatch.setenv("STIPPLEMIX_SEED", "abc")
    assert run(["stipple", "-i", image, "-o", "x.svg"]) == 1
    monkeypatch.delenv("STIPPLEMIX_SEED")
    assert build_config(build_parser().parse_args(["stipple"])).seed == 0


def test_missing_input(tmp_path, capsys):
    assert run(["stipple", "-i", tmp_path / "nope.png", "-o", tmp_path / "o.svg"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("stipplemix: error:") and "nope.png" in err
    assert run(["stipple", "-o", tmp_path / "o.svg"]) == 1


def test_bad_flag_values(image):
    for bad in (["--gamma", "band:0.5"], ["--page", "A5"], ["--filter", "sobel"], ["--sizes", "big:1"]):
        with pytest.raises(SystemExit) as exc:
            run(["stipple", "-i", image, *bad])
        assert exc.value.code == 2
    assert run(["stipple", "-i", image, "-o", "x.svg", "--bias", "3"]) == 1


def test_debug_dir(tmp_path, image, capsys):
    assert run(["stipple", "-i", image, "-o", tmp_path / "o.svg", "--debug-dir", tmp_path / "dbg", *SMALL]) == 0
    names = sorted(p.name for p in (tmp_path / "dbg").iterdir())
    assert "distance_field.png" in names and "mixed_dpf.png" in names and len(names) == 7
    assert str(tmp_path / "dbg" / "mixed_dpf.png") in capsys.readouterr().out


class TestFigures:
    def test_uniform_to_normal(self, tmp_path):
        assert run(["figures", "uniform-to-normal", "-o", tmp_path]) == 0
        assert len(list(tmp_path.glob("uniform-to-normal_*.png"))) == 8
        stats = json.loads((tmp_path / "uniform-to-normal.json").read_text())
        assert [s["alpha"] for s in stats] == pytest.approx([k / 7 for k in range(8)])

    def test_bias_sweep_endpoints(self, tmp_path):
        assert run(["figures", "bias-sweep", "-o", tmp_path, "--seed", 4]) == 0
        stats = json.loads((tmp_path / "bias-sweep.json").read_text())
        assert [s["bias"] for s in stats] == list(BIAS_VALUES)
        assert stats[0]["f_dots"] == stats[0]["dots"]
        assert stats[-1]["f_dots"] == 0 and stats[-1]["dots"] > 0

    def test_masked_field_three_panels(self, tmp_path):
        assert run(["figures", "masked-field", "-o", tmp_path]) == 0
        pngs = sorted(tmp_path.glob("masked-field_*.png"))
        assert len(pngs) == 3
        assert len({p.read_bytes() for p in pngs}) == 3

    def test_unknown_figure(self, tmp_path):
        with pytest.raises(SystemExit):
            run(["figures", "spiral", "-o", tmp_path])


def test_module_entry_point(tmp_path, image):
    proc = subprocess.run([sys.executable, "-m", "stipplemix.cli", "stipple", "-i", str(image),
                           "-o", str(tmp_path / "m.svg"), *SMALL], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "m.svg").is_file()
