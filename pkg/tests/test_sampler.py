import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from stipplemix.grid import AnalyticPdf, ProbGrid
from stipplemix.sampler import DpfSampler, read_points, sample_dpf, sample_pdf, write_points


def grid_from(weights):
    return ProbGrid.from_weights(np.asarray(weights, dtype=float))


class TestSampleDpf:
    def test_single_cell_takes_everything(self):
        g = grid_from([[0, 0, 0], [0, 1, 0]])
        run = sample_dpf(g, 5, seed=1)
        assert run.cells.tolist() == [4] * 5

    def test_four_equal_cells_one_dot_each(self):
        g = grid_from(np.full((2, 2), 0.25))
        rng = np.random.default_rng(0)
        totals = np.zeros(4)
        runs = 100_000
        draws = rng.random((runs, 4))
        for row in draws:
            s = DpfSampler(g, 4)
            for u in row:
                totals[s.step(float(u))] += 1
        assert np.all(np.abs(totals / runs - 1.0) <= 0.02)

    def test_first_step_conserves_mass(self):
        g = grid_from(np.random.default_rng(1).random((6, 6)))
        for mode in ("proportional", "equal"):
            s = DpfSampler(g, 50, mode)
            s.step(0.37)
            assert abs(s.probabilities().sum() - 1.0) <= 1e-9

    def test_empty_grid(self):
        with pytest.raises(ValueError, match="empty distribution"):
            sample_dpf(ProbGrid.white(3, 3), 4, seed=0)

    def test_needs_a_dot(self):
        with pytest.raises(ValueError):
            sample_dpf(grid_from([[1.0]]), 0)

    def test_unknown_modes(self):
        g = grid_from([[1.0, 1.0]])
        with pytest.raises(ValueError):
            sample_dpf(g, 2, offsets="corner")
        with pytest.raises(ValueError):
            sample_dpf(g, 2, redistribute="greedy")

    def test_no_steps_after_the_last_dot(self):
        s = DpfSampler(grid_from([[1.0, 1.0]]), 1)
        s.step(0.5)
        with pytest.raises(RuntimeError):
            s.step(0.5)

    def test_deterministic(self):
        g = grid_from(np.random.default_rng(3).random((10, 10)))
        a = sample_dpf(g, 300, seed=42, offsets="uniform")
        b = sample_dpf(g, 300, seed=42, offsets="uniform")
        assert np.array_equal(a.cells, b.cells) and np.array_equal(a.offsets, b.offsets)

    def test_offsets(self):
        g = grid_from(np.ones((4, 4)))
        assert np.all(sample_dpf(g, 40, seed=1).offsets == 0.5)
        off = sample_dpf(g, 400, seed=1, offsets="uniform").offsets
        assert off.min() >= 0.0 and off.max() < 1.0 and off.std() > 0.2

    def test_points_are_inside_their_cells(self):
        g = grid_from(np.random.default_rng(8).random((5, 7)))
        run = sample_dpf(g, 100, seed=8, offsets="uniform")
        pts = run.points()
        assert np.array_equal(np.floor(pts[:, 0]), run.cols())
        assert np.array_equal(np.floor(pts[:, 1]), run.rows())

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 10), st.integers(1, 10), st.integers(1, 200),
           st.integers(0, 2**32 - 1), st.sampled_from(["proportional", "equal"]))
    def test_support_and_count(self, h, w, n, seed, mode):
        r = np.random.default_rng(seed)
        weights = np.where(r.random((h, w)) < 0.4, r.random((h, w)), 0.0)
        weights.flat[r.integers(h * w)] = 1.0
        g = grid_from(weights)
        run = sample_dpf(g, n, seed=seed, redistribute=mode)
        assert len(run.cells) == n
        assert np.all(g.prob.ravel()[run.cells] > 0)
        assert run.counts().sum() == n


class TestRedistribution:
    def test_equal_rule_bumps_every_other_cell_alike(self):
        g = grid_from([[0.1, 0.2], [0.3, 0.4]])
        s = DpfSampler(g, 20, "equal")
        before = s.probabilities().ravel()
        cell = s.step(0.05)             # lands in the first cell
        after = s.probabilities().ravel()
        assert cell == 0
        assert after[0] == pytest.approx(before[0] - 1 / 20)
        bumps = np.delete(after - before, 0)
        assert np.allclose(bumps, (1 / 20) / 3)

    def test_partial_take_kills_cell(self):
        g = grid_from([[0.01, 0.99]])
        s = DpfSampler(g, 10, "equal")
        s.step(0.001)
        assert s.probabilities().ravel().tolist() == [0.0, 1.0]
        assert s.n_alive == 1

    def test_proportional_keeps_marginals(self):
        r = np.random.default_rng(4)
        p = r.random(16) + 0.05
        g = grid_from(p.reshape(4, 4))
        n = 200_000
        counts = sample_dpf(g, n, seed=4).counts().ravel()
        assert chisquare(counts, g.prob.ravel() * n).pvalue > 0.01

    def test_equal_rule_pulls_towards_uniform(self):
        # Measured behaviour of the literal equal-share rule: expected counts
        # follow (N/B) * (1 - (1 - B p) / (k + 1)) with k = B / (B - 1).
        r = np.random.default_rng(5)
        b = 16
        p = r.random(b) + 0.05
        p /= p.sum()
        n = 200_000
        counts = sample_dpf(grid_from(p.reshape(4, 4)), n, seed=3, redistribute="equal").counts().ravel()
        k = b / (b - 1)
        predicted = (n / b) * (1 - (1 - b * p) / (k + 1))
        assert np.all(np.abs(counts / predicted - 1) < 0.03)
        assert chisquare(counts, p * n).pvalue < 1e-6

    def test_proportional_survives_a_dominant_cell(self):
        g = grid_from([[1.0, 1e-14, 1e-14]])
        run = sample_dpf(g, 5, seed=0)
        assert len(run.cells) == 5

    def test_many_steps_stay_normalized(self):
        g = grid_from(np.random.default_rng(6).random((8, 8)) + 1e-3)
        for mode in ("proportional", "equal"):
            s = DpfSampler(g, 5000, mode)
            r = np.random.default_rng(7)
            for i in range(4999):
                s.step(float(r.random()))
                if i % 97 == 0 and s.n_alive > 1:
                    assert abs(s.probabilities().sum() - 1.0) <= 1e-9


def test_points_file_round_trip(tmp_path):
    g = grid_from(np.ones((3, 4)))
    run = sample_dpf(g, 12, seed=77, offsets="uniform")
    write_points(tmp_path / "pts.txt", run)
    header, pts = read_points(tmp_path / "pts.txt")
    assert header == {"seed": 77, "N": 12, "width": 4, "height": 3}
    assert np.allclose(pts, run.points(), atol=1e-6)


class TestSamplePdf:
    def test_uniform_mean(self):
        pts = sample_pdf(AnalyticPdf.uniform2d((0, 0, 1, 1)), 100_000, seed=1)
        assert np.all(np.abs(pts.mean(axis=0) - 0.5) <= 0.01)

    def test_normal_covariance(self):
        sigma = 2.0
        pts = sample_pdf(AnalyticPdf.normal2d((50, 50), sigma, (0, 0, 100, 100)), 100_000, seed=2)
        cov = np.cov(pts.T)
        assert np.all(np.abs(np.diag(cov) / sigma**2 - 1) <= 0.05)
        assert abs(cov[0, 1]) <= 0.05 * sigma**2

    def test_annulus_support(self):
        pdf = AnalyticPdf.annulus((10, 10), 4.0, 6.0, (0, 0, 20, 20))
        pts = sample_pdf(pdf, 20_000, seed=3)
        r = np.hypot(pts[:, 0] - 10, pts[:, 1] - 10)
        assert r.min() >= 4.0 and r.max() <= 6.0

    def test_annulus_clipped_by_domain(self):
        pdf = AnalyticPdf.annulus((0, 0), 2.0, 3.0, (0, 0, 10, 10))
        pts = sample_pdf(pdf, 2000, seed=4)
        assert np.all(pts >= 0)

    def test_image_weighted_follows_weights(self):
        w = np.array([[1.0, 3.0]])
        pts = sample_pdf(AnalyticPdf.image_weighted(w), 40_000, seed=5)
        assert np.mean(pts[:, 0] >= 1.0) == pytest.approx(0.75, abs=0.01)

    def test_deterministic(self):
        pdf = AnalyticPdf.normal2d((5, 5), 1.0, (0, 0, 10, 10))
        assert np.array_equal(sample_pdf(pdf, 100, seed=9), sample_pdf(pdf, 100, seed=9))

    def test_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            sample_pdf(AnalyticPdf.image_weighted(np.zeros((3, 3))), 10, seed=0)
        far = AnalyticPdf.normal2d((500, 500), 0.0, (0, 0, 10, 10))
        with pytest.raises(ValueError):
            sample_pdf(far, 10, seed=0)
