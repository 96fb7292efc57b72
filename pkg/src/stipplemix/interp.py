"""Mixing two probability grids, globally or through a distance field."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import BinaryMask, ProbGrid, normalize

_INF = float("inf")


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Per-cell distance to the nearest source cell, normalized to [0, 1]."""

    delta: np.ndarray
    max_distance: float = 1.0   # Euclidean distance that maps to 1

    def __post_init__(self):
        d = np.array(self.delta, dtype=np.float64)
        if d.ndim != 2:
            raise ValueError("distance field must be 2D")
        if np.any(d < 0) or np.any(d > 1):
            raise ValueError("distance field values must lie in [0, 1]")
        d.setflags(write=False)
        object.__setattr__(self, "delta", d)

    @property
    def shape(self) -> tuple[int, int]:
        return self.delta.shape

    @property
    def width(self) -> int:
        return self.delta.shape[1]

    @property
    def height(self) -> int:
        return self.delta.shape[0]


@dataclass(frozen=True)
class GammaSpec:
    """Shaping function applied to the distance field before mixing.

    ``linear`` is the identity. ``band`` is 0 up to ``l1``, ramps linearly to
    1 at ``l2`` and stays at 1 beyond. ``table`` interpolates piecewise
    linearly through values sampled at evenly spaced distances in [0, 1].
    """

    kind: str = "linear"
    l1: float = 0.0
    l2: float = 1.0
    table: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "band":
            if not 0 <= self.l1 <= self.l2 <= 1:
                raise ValueError(f"band needs 0 <= L1 <= L2 <= 1, got {self.l1}, {self.l2}")
        elif self.kind == "table":
            t = np.asarray(self.table, dtype=np.float64)
            if len(t) < 2:
                raise ValueError("gamma table needs at least two samples")
            if np.any(t < 0) or np.any(t > 1) or np.any(np.diff(t) < 0):
                raise ValueError("gamma table must be non-decreasing within [0, 1]")
        elif self.kind != "linear":
            raise ValueError(f"unknown gamma kind {self.kind!r}")

    @classmethod
    def linear(cls) -> "GammaSpec":
        return cls("linear")

    @classmethod
    def band(cls, l1: float, l2: float) -> "GammaSpec":
        return cls("band", float(l1), float(l2))

    @classmethod
    def from_table(cls, values: Sequence[float]) -> "GammaSpec":
        return cls("table", table=tuple(float(v) for v in values))

    def __call__(self, delta):
        d = np.asarray(delta, dtype=np.float64)
        if self.kind == "linear":
            out = d.copy()
        elif self.kind == "band":
            l1, l2 = self.l1, self.l2
            if l2 > l1:
                # Same line as (d - l1) / (l2 - l1), anchored at the midpoint
                # so the centre of the band maps to exactly 0.5.
                ramp = 0.5 + (d - (l1 + l2) / 2.0) / (l2 - l1)
            else:
                ramp = np.zeros_like(d)
            # At d == l2 the ramp equals 1; return it without rounding error.
            out = np.where(d <= l1, 0.0, np.where(d < l2, ramp, 1.0))
        else:
            t = np.asarray(self.table)
            out = np.interp(d, np.linspace(0.0, 1.0, len(t)), t)
        return np.clip(out, 0.0, 1.0)

    def to_string(self) -> str:
        if self.kind == "linear":
            return "linear"
        if self.kind == "band":
            return f"band:{self.l1!r},{self.l2!r}"
        return "table:" + ",".join(repr(v) for v in self.table)

    @classmethod
    def parse(cls, text: str) -> "GammaSpec":
        """Parse ``linear``, ``band:L1,L2`` or ``table:v0,v1,...``."""
        kind, _, rest = text.strip().partition(":")
        if kind == "linear" and not rest:
            return cls.linear()
        try:
            values = [float(v) for v in rest.split(",")] if rest else []
        except ValueError as exc:
            raise ValueError(f"bad gamma spec {text!r}") from exc
        if kind == "band" and len(values) == 2:
            return cls.band(*values)
        if kind == "table":
            return cls.from_table(values)
        raise ValueError(f"bad gamma spec {text!r}")


@dataclass(frozen=True, eq=False)
class MixSpec:
    """How two grids are mixed through a distance field.

    The weight given to the second grid is ``clamp(gamma(delta) + bias, 0, 1)``.
    ``field_source`` is ``"edge_mask"`` or ``"external_mask"`` (then
    ``external_mask`` names a PNG or holds a :class:`BinaryMask`). With
    ``invert`` the first grid's share is dropped, leaving the cells near the
    mask empty. ``region`` marks cells whose distance is forced to 0 and whose
    bias is ``region_bias``.
    """

    bias: float = 0.0
    gamma: GammaSpec = field(default_factory=GammaSpec)
    field_source: str = "edge_mask"
    external_mask: object = None
    invert: bool = False
    region: BinaryMask | None = None
    region_bias: float = 0.0
    mode: str = "expected"

    def __post_init__(self):
        for name in ("bias", "region_bias"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1], got {v}")
        if self.field_source not in ("edge_mask", "external_mask"):
            raise ValueError(f"unknown field source {self.field_source!r}")
        if self.field_source == "external_mask" and self.external_mask is None:
            raise ValueError("external_mask field source needs a mask")
        if self.mode not in ("expected", "stochastic"):
            raise ValueError(f"unknown mix mode {self.mode!r}")


def _check_prob(name, v):
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v}")


def interp_cell_prob(pf: float, pg: float, alpha: float) -> float:
    """Probability that a cell fires when its own value is taken from ``f``
    with chance ``1 - alpha`` and from ``g`` with chance ``alpha``."""
    _check_prob("pf", pf)
    _check_prob("pg", pg)
    _check_prob("alpha", alpha)
    return pf * (1.0 - alpha) + pg * alpha


def interp_cell_event(pf: float, pg: float, alpha: float, rng, size=None):
    """One draw (or ``size`` draws) of the per-cell mixing event.

    A uniform ``U`` picks the source: ``f`` when ``U >= alpha``, else ``g``;
    the chosen source's Bernoulli event then decides whether the cell fires.
    """
    _check_prob("pf", pf)
    _check_prob("pg", pg)
    _check_prob("alpha", alpha)
    if size is None:
        u = rng.random()
        p = pf if u >= alpha else pg
        return bool(rng.random() < p)
    u = rng.random(size)
    p = np.where(u >= alpha, pf, pg)
    return rng.random(size) < p


def _check_same(f: ProbGrid, g: ProbGrid):
    if f.shape != g.shape:
        raise ValueError(f"grid dimensions differ: {f.shape} vs {g.shape}")


def interp_global(f: ProbGrid, g: ProbGrid, alpha: float) -> ProbGrid:
    _check_same(f, g)
    _check_prob("alpha", alpha)
    return ProbGrid(normalize(f.prob * (1.0 - alpha) + g.prob * alpha))


# -- distance transform --------------------------------------------------

def _envelope_1d(f: list, n: int) -> list:
    """Exact 1D squared distance transform of sampled function ``f``.

    Lower envelope of the parabolas ``(x - q)^2 + f(q)``; infinite samples
    contribute no parabola.
    """
    v = [0] * n
    z = [0.0] * (n + 1)
    k = -1
    for q in range(n):
        fq = f[q]
        if fq == _INF:
            continue
        if k < 0:
            k = 0
            v[0] = q
            z[0] = -_INF
            z[1] = _INF
            continue
        while True:
            p = v[k]
            s = ((fq + q * q) - (f[p] + p * p)) / (2 * (q - p))
            if s <= z[k]:
                k -= 1
                if k < 0:
                    break
            else:
                break
        k += 1
        v[k] = q
        z[k] = -_INF if k == 0 else s
        z[k + 1] = _INF
    if k < 0:
        return [_INF] * n
    out = [0.0] * n
    j = 0
    for x in range(n):
        while z[j + 1] < x:
            j += 1
        p = v[j]
        out[x] = (x - p) * (x - p) + f[p]
    return out


def squared_edt(bits: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distance from every cell to the nearest
    ``True`` cell, computed separably (columns, then rows)."""
    h, w = bits.shape
    cols = np.where(bits, 0.0, _INF)
    tmp = np.empty((h, w))
    for x in range(w):
        tmp[:, x] = _envelope_1d(cols[:, x].tolist(), h)
    out = np.empty((h, w))
    for y in range(h):
        out[y, :] = _envelope_1d(tmp[y, :].tolist(), w)
    return out


def distance_field(omega_boundary: BinaryMask, metric: str = "euclidean") -> DistanceField:
    """Distance from each cell to the nearest black mask cell, divided by the
    largest such distance in the grid."""
    if metric != "euclidean":
        raise ValueError(f"unsupported metric {metric!r}")
    if not omega_boundary.any():
        raise ValueError("empty ∂Ω: the mask has no black cells")
    d = np.sqrt(squared_edt(omega_boundary.bits))
    top = float(d.max())
    if top == 0:
        return DistanceField(np.zeros_like(d), 1.0)
    return DistanceField(d / top, top)


def apply_gamma(df: DistanceField, gamma: GammaSpec) -> DistanceField:
    return DistanceField(gamma(df.delta), df.max_distance)


def mix_weights(df: DistanceField, mix: MixSpec) -> np.ndarray:
    """Per-cell weight of the second grid, ``clamp(gamma(delta) + bias)``."""
    delta = df.delta
    bias = np.full(delta.shape, float(mix.bias))
    if mix.region is not None:
        if mix.region.shape != delta.shape:
            raise ValueError("region mask does not match the distance field")
        delta = np.where(mix.region.bits, 0.0, delta)
        bias[mix.region.bits] = mix.region_bias
    return np.clip(mix.gamma(delta) + bias, 0.0, 1.0)


def interp_with_field(f: ProbGrid, g: ProbGrid, df: DistanceField, mix: MixSpec,
                      rng=None) -> ProbGrid:
    """Mix ``f`` and ``g`` cell by cell with weight ``w`` from the field.

    In ``expected`` mode a cell gets ``f * (1 - w) + g * w``. In
    ``stochastic`` mode each cell keeps either ``f``'s or ``g``'s value, the
    latter with chance ``w`` (needs ``rng``). The result is renormalized.
    """
    _check_same(f, g)
    if df.shape != f.shape:
        raise ValueError(f"distance field {df.shape} does not match grids {f.shape}")
    w = mix_weights(df, mix)
    fpart = np.zeros_like(f.prob) if mix.invert else f.prob
    if mix.mode == "expected":
        out = fpart * (1.0 - w) + g.prob * w
    else:
        if rng is None:
            raise ValueError("stochastic mixing needs a random generator")
        take_g = rng.random(w.shape) < w
        out = np.where(take_g, g.prob, fpart)
    return ProbGrid(normalize(out))
