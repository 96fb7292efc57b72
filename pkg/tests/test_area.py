import numpy as np
import pytest

from stipplemix.area import (OSTROMOUKHOV_TABLE, AreaParams, error_diffusion, halftone_distribution,
                             halftone_mask, jitter_dots)
from stipplemix.tone import Prefilter


@pytest.mark.parametrize("method", ["fs", "ostromoukhov"])
class TestHalftone:
    def test_white_is_empty(self, method):
        assert not error_diffusion(np.ones((16, 16)), method).any()

    def test_black_is_full(self, method):
        assert error_diffusion(np.zeros((16, 16)), method).all()

    @pytest.mark.parametrize("level", [0.1, 0.25, 0.5, 0.8])
    def test_tone_preserved(self, method, level):
        black = error_diffusion(np.full((128, 128), level), method)
        assert black.mean() == pytest.approx(1 - level, abs=0.02)

    def test_ramp_tone_by_column_band(self, method):
        ramp = np.tile(np.linspace(0, 1, 128), (64, 1))
        black = error_diffusion(ramp, method)
        for c in range(0, 128, 32):
            band = slice(c, c + 32)
            assert black[:, band].mean() == pytest.approx(1 - ramp[:, band].mean(), abs=0.03)


def test_ostromoukhov_rows_sum():
    assert len(OSTROMOUKHOV_TABLE) == 256
    for r, dl, d, s in OSTROMOUKHOV_TABLE:
        assert r + dl + d == s and min(r, dl, d) >= 0
    assert OSTROMOUKHOV_TABLE[:128] == OSTROMOUKHOV_TABLE[:127:-1]


def test_method_aliases_agree():
    img = np.random.default_rng(1).random((20, 20))
    assert np.array_equal(error_diffusion(img, "fs"), error_diffusion(img, "floyd_steinberg"))


def test_distribution_is_uniform_over_black():
    g = halftone_distribution(np.full((32, 32), 0.5), AreaParams())
    vals = g.prob[g.prob > 0]
    assert np.allclose(vals, 1 / len(vals))


def test_prefilter_is_applied():
    # Gamma pushes mid gray lighter, so fewer black cells.
    plain = halftone_mask(np.full((64, 64), 0.5), AreaParams()).count()
    light = halftone_mask(np.full((64, 64), 0.5), AreaParams(prefilter=Prefilter(gamma=0.5))).count()
    assert light < plain


class TestPacking:
    def test_one_dot_per_block_at_most(self):
        m = halftone_mask(np.zeros((20, 20)), AreaParams(packing=4))
        assert m.count() == 25
        assert np.all(m.bits[2::4, 2::4])

    def test_tone_at_coarse_pitch(self):
        m = halftone_mask(np.full((120, 120), 0.5), AreaParams(packing=3))
        assert m.count() / (40 * 40) == pytest.approx(0.5, abs=0.03)

    def test_ragged_edge(self):
        m = halftone_mask(np.zeros((10, 7)), AreaParams(packing=4))
        assert m.shape == (10, 7) and m.count() == 3 * 2


@pytest.mark.parametrize("kwargs", [{"halftone": "bayer"}, {"packing": 0}, {"packing": 1.5},
                                    {"jitter_area": -0.1}])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        AreaParams(**kwargs)


class TestJitter:
    def test_zero_is_identity(self):
        pts = np.random.default_rng(0).random((50, 2)) * 10
        out = jitter_dots(pts, ["area"] * 50, AreaParams(jitter_area=0.0), seed=1)
        assert np.array_equal(out, pts)

    def test_edge_dots_stay(self):
        pts = np.random.default_rng(0).random((100, 2)) * 10
        cls = np.array(["edge", "area"] * 50)
        out = jitter_dots(pts, cls, AreaParams(jitter_area=1.0), seed=1)
        assert np.array_equal(out[cls == "edge"], pts[cls == "edge"])
        assert np.all(np.any(out[cls == "area"] != pts[cls == "area"], axis=1))

    def test_bound(self):
        pts = np.zeros((100_000, 2)) + 50
        out = jitter_dots(pts, np.full(100_000, "area"), AreaParams(jitter_area=2.0), seed=3)
        d = np.abs(out - pts)
        assert d.max() <= 2.0 and d.max() > 1.99
        assert np.abs(d.mean(axis=0) - 1.0).max() < 0.01

    def test_clamped_to_canvas(self):
        pts = np.array([[0.0, 0.0], [10.0, 5.0]] * 200)
        out = jitter_dots(pts, ["area"] * 400, AreaParams(jitter_area=3.0), seed=2, bounds=(10.0, 5.0))
        assert out.min() >= 0 and out[:, 0].max() <= 10 and out[:, 1].max() <= 5

    def test_deterministic_and_label_check(self):
        pts = np.ones((10, 2))
        a = jitter_dots(pts, ["area"] * 10, AreaParams(), seed=9)
        assert np.array_equal(a, jitter_dots(pts, ["area"] * 10, AreaParams(), seed=9))
        with pytest.raises(ValueError):
            jitter_dots(pts, ["area"] * 9, AreaParams(), seed=9)
