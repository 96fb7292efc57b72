"""Stochastic dot placement over a probability grid, and Monte Carlo
sampling of analytic densities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import AnalyticPdf, ProbGrid
from .rng import make_rng

# A cell whose remaining probability falls to this level is white.
DEPLETED = 1e-12


@dataclass(frozen=True, eq=False)
class SampleRun:
    """Result of :func:`sample_dpf`: one entry per placed dot."""

    n_total: int
    seed: int | None
    width: int
    height: int
    cells: np.ndarray      # flat cell index per dot
    offsets: np.ndarray    # (n, 2) sub-cell offset in [0, 1)^2, x then y

    @property
    def placements(self) -> list[tuple[int, tuple[float, float]]]:
        return [(int(c), (float(o[0]), float(o[1]))) for c, o in zip(self.cells, self.offsets)]

    def rows(self) -> np.ndarray:
        return self.cells // self.width

    def cols(self) -> np.ndarray:
        return self.cells % self.width

    def points(self) -> np.ndarray:
        """Continuous ``(x, y)`` grid coordinates of every dot."""
        pts = np.empty((len(self.cells), 2))
        pts[:, 0] = self.cols() + self.offsets[:, 0]
        pts[:, 1] = self.rows() + self.offsets[:, 1]
        return pts

    def counts(self) -> np.ndarray:
        """Dots per cell as a ``(height, width)`` array."""
        c = np.bincount(self.cells, minlength=self.width * self.height)
        return c.reshape(self.height, self.width)


class DpfSampler:
    """Step-by-step state of the dot-casting loop.

    Each black cell's probability is kept as ``q[i] + offset``: spreading mass
    equally over all other black cells only bumps ``offset`` (and corrects the
    chosen cell), so a step costs O(log M) instead of O(M). Two Fenwick trees
    hold the sums of ``q`` and of the live-cell indicator, which lets the
    inverse-CDF lookup descend on ``q + offset * count``.

    ``redistribute="proportional"`` (the default) rescales all remaining mass,
    which keeps every cell's expected share of the dots equal to its initial
    probability. ``"equal"`` adds the same amount to every other black cell;
    this pulls the dot counts towards uniform when the grid is not uniform.
    """

    def __init__(self, grid: ProbGrid, n: int, redistribute: str = "proportional"):
        if n < 1:
            raise ValueError("n must be at least 1")
        if redistribute not in ("equal", "proportional"):
            raise ValueError(f"unknown redistribution {redistribute!r}")
        flat = grid.prob.ravel()
        self.cell_ids = np.flatnonzero(flat)
        if len(self.cell_ids) == 0:
            raise ValueError("empty distribution")
        self.grid = grid
        self.n_total = n
        self.remaining = n
        self.redistribute = redistribute
        self.m = len(self.cell_ids)
        self.q = [float(v) for v in flat[self.cell_ids]]
        total = math.fsum(self.q)
        self.q = [v / total for v in self.q]
        self.offset = 0.0
        self.scale = 1.0          # used by the proportional rule
        self.alive = [True] * self.m
        self.n_alive = self.m
        self._last = None
        self._rebuild()

    # -- Fenwick trees -------------------------------------------------
    def _rebuild(self):
        m = self.m
        tq = [0.0] * (m + 1)
        tc = [0.0] * (m + 1)
        for i in range(m):
            if self.alive[i]:
                tq[i + 1] += self.q[i]
                tc[i + 1] += 1.0
        for i in range(1, m + 1):
            j = i + (i & -i)
            if j <= m:
                tq[j] += tq[i]
                tc[j] += tc[i]
        self._tq, self._tc = tq, tc
        self._top = 1 << (m.bit_length() - 1)

    def _add(self, i: int, dq: float, dc: float = 0.0):
        tq, tc, m = self._tq, self._tc, self.m
        i += 1
        while i <= m:
            tq[i] += dq
            tc[i] += dc
            i += i & -i

    def _find(self, u: float) -> int:
        tq, tc, off, m = self._tq, self._tc, self.offset, self.m
        pos = 0
        step = self._top
        while step:
            nxt = pos + step
            if nxt <= m:
                w = tq[nxt] + off * tc[nxt]
                if w <= u:
                    pos = nxt
                    u -= w
            step >>= 1
        if pos >= m or not self.alive[pos]:
            pos = self._nearest_alive(min(pos, m - 1))
        return pos

    def _nearest_alive(self, i: int) -> int:
        for k in range(self.m):
            for j in (i - k, i + k):
                if 0 <= j < self.m and self.alive[j]:
                    return j
        raise RuntimeError("no live cell left")

    def _total(self) -> float:
        s = 0.0
        i = self.m
        # Root sums: walk down the tree's disjoint cover of [1, m].
        while i > 0:
            s += self._tq[i] + self.offset * self._tc[i]
            i -= i & -i
        return s

    # -- state ---------------------------------------------------------
    def probabilities(self) -> np.ndarray:
        """Current per-cell probabilities as a ``(height, width)`` array."""
        out = np.zeros(self.grid.width * self.grid.height)
        vals = [(q + self.offset) * self.scale if a else 0.0
                for q, a in zip(self.q, self.alive)]
        out[self.cell_ids] = vals
        return out.reshape(self.grid.shape)

    def prob_of(self, i: int) -> float:
        return (self.q[i] + self.offset) * self.scale if self.alive[i] else 0.0

    def _kill(self, i: int):
        self._add(i, -self.q[i], -1.0)
        self.alive[i] = False
        self.n_alive -= 1
        self.q[i] = 0.0

    def step(self, u: float) -> int:
        """Place one dot using uniform draw ``u`` in [0, 1); return its cell."""
        if self.remaining <= 0:
            raise RuntimeError("all dots already placed")
        if self.n_alive == 1:
            if self._last is None:
                self._last = self._nearest_alive(0)
            self.remaining -= 1
            return int(self.cell_ids[self._last])
        i = self._find(u * self._total())
        share = 1.0 / self.remaining
        if self.redistribute == "equal":
            self._step_equal(i, share)
        else:
            self._step_proportional(i, share)
        self.remaining -= 1
        return int(self.cell_ids[i])

    def _step_equal(self, i: int, share: float):
        p = self.q[i] + self.offset
        taken = share
        if p - share <= DEPLETED:
            taken = p
            self._kill(i)
            others = self.n_alive
        else:
            others = self.n_alive - 1
        bump = taken / others
        self.offset += bump
        if self.alive[i]:
            # The chosen cell gives up `share` and must not receive the bump.
            dq = -share - bump
            self.q[i] += dq
            self._add(i, dq)
        if self.offset > 1.0:
            self._rebase()

    def _step_proportional(self, i: int, share: float):
        # Probabilities are (q + offset) * scale with offset kept at 0 here.
        p = self.q[i] * self.scale
        taken = min(share, p)
        if p - taken <= DEPLETED:
            taken = p
            self._kill(i)
        else:
            dq = -taken / self.scale
            self.q[i] += dq
            self._add(i, dq)
        # Renormalize from the live mass itself; dividing by (1 - taken)
        # breaks down when the chosen cell held nearly everything.
        live = self._total()
        if live <= 0.0:
            self._rebase()
            return
        self.scale = 1.0 / live
        if self.scale > 1e6:
            self._rebase()

    def _rebase(self):
        vals = [(q + self.offset) * self.scale if a else 0.0
                for q, a in zip(self.q, self.alive)]
        total = math.fsum(vals)
        if total <= 0.0:
            # Live mass underflowed: fall back to an even split.
            vals = [1.0 if a else 0.0 for a in self.alive]
            total = float(self.n_alive)
        self.q = [v / total for v in vals]
        self.offset = 0.0
        self.scale = 1.0
        self._rebuild()


def sample_dpf(grid: ProbGrid, n: int, seed=None, offsets: str = "center",
               redistribute: str = "proportional") -> SampleRun:
    """Cast ``n`` dots onto the black cells of ``grid``.

    Each dot picks a black cell by its current probability. The chosen cell
    then gives up ``1/N'`` (``N'`` = dots still to place, this one included),
    or everything it has left if that is less, and the released mass is
    spread over the other black cells. Cells that run dry turn white. When
    one black cell remains it takes every remaining dot.

    ``offsets`` is ``"center"`` (dot at the cell centre) or ``"uniform"``
    (uniform position inside the cell).
    """
    if offsets not in ("center", "uniform"):
        raise ValueError(f"unknown offset mode {offsets!r}")
    state = DpfSampler(grid, n, redistribute)
    rng = make_rng(seed)
    draws = rng.random(n).tolist()
    cells = np.fromiter((state.step(u) for u in draws), dtype=np.int64, count=n)
    if offsets == "center":
        offs = np.full((n, 2), 0.5)
    else:
        offs = rng.random((n, 2))
    seed_val = int(seed) if isinstance(seed, (int, np.integer)) else None
    return SampleRun(n, seed_val, grid.width, grid.height, cells, offs)


def write_points(path, run: SampleRun) -> None:
    """Plain-text export: a header line, then one ``x y`` pair per line."""
    lines = [f"# seed={run.seed} N={run.n_total} width={run.width} height={run.height}"]
    lines += [f"{x:.6f} {y:.6f}" for x, y in run.points()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_points(path) -> tuple[dict, np.ndarray]:
    text = Path(path).read_text().splitlines()
    header = {}
    for tok in text[0].lstrip("#").split():
        k, _, v = tok.partition("=")
        header[k] = None if v == "None" else int(v)
    pts = np.array([[float(a) for a in ln.split()] for ln in text[1:] if ln.strip()])
    return header, pts.reshape(-1, 2)


# -- analytic densities ------------------------------------------------

_MAX_EMPTY_PROPOSALS = 2_000_000


def sample_pdf(pdf: AnalyticPdf, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` points from ``pdf`` by rejection sampling.

    Proposals come from a per-kind envelope (uniform box, the normal itself,
    the exact ring) and are rejected outside the domain or, for weighted
    images, against the density bound.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = make_rng(seed)
    x0, y0, x1, y1 = pdf.domain

    if pdf.kind == "normal2d" and pdf.sigma == 0:
        mx, my = pdf.mean
        if not (x0 <= mx < x1 and y0 <= my < y1):
            raise ValueError("degenerate PDF: point mass outside the domain")
        return np.tile([mx, my], (n, 1)).astype(np.float64)

    bound = 1.0
    if pdf.kind == "image_weighted":
        bound = float(np.max(pdf.weights)) if np.size(pdf.weights) else 0.0
    if bound <= 0:
        raise ValueError("degenerate PDF: density is zero everywhere")

    chunks = []
    got = 0
    tried = 0
    while got < n:
        batch = max(2 * (n - got), 1024)
        pts = _propose(pdf, rng, batch)
        keep = (pts[:, 0] >= x0) & (pts[:, 0] < x1) & (pts[:, 1] >= y0) & (pts[:, 1] < y1)
        if pdf.kind == "image_weighted":
            u = rng.random(batch) * bound
            keep &= u < pdf.density(pts[:, 0], pts[:, 1])
        acc = pts[keep]
        chunks.append(acc)
        got += len(acc)
        tried += batch
        if got == 0 and tried >= _MAX_EMPTY_PROPOSALS:
            raise ValueError("degenerate PDF: no mass inside the domain")
    return np.concatenate(chunks)[:n]


def _propose(pdf: AnalyticPdf, rng: np.random.Generator, k: int) -> np.ndarray:
    x0, y0, x1, y1 = pdf.domain
    if pdf.kind == "normal2d":
        return rng.normal(loc=pdf.mean, scale=pdf.sigma, size=(k, 2))
    if pdf.kind == "annulus":
        cx, cy = pdf.center
        ri2, ro2 = pdf.r_inner**2, pdf.r_outer**2
        r = np.sqrt(ri2 + rng.random(k) * (ro2 - ri2))
        t = rng.random(k) * (2 * np.pi)
        return np.column_stack([cx + r * np.cos(t), cy + r * np.sin(t)])
    u = rng.random((k, 2))
    return np.column_stack([x0 + u[:, 0] * (x1 - x0), y0 + u[:, 1] * (y1 - y0)])
