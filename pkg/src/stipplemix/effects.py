"""Mask-driven effects expressed as mixing configurations."""
from __future__ import annotations

from .grid import BinaryMask
from .interp import GammaSpec, MixSpec

EFFECTS = ("white_border", "inverted", "emphasis", "external")


def build_mask_effects(mask: BinaryMask, effect: str, *, l1: float = 0.02, l2: float = 0.05,
                       region: BinaryMask | None = None, bias: float = 0.0,
                       gamma: GammaSpec | None = None) -> tuple[MixSpec, BinaryMask]:
    """Return the mixing settings and distance-field source for ``effect``.

    ``white_border`` leaves a gap of width ``l1`` (fraction of the largest
    distance) around the mask that area dots never enter, ramping in fully
    by ``l2``. ``inverted`` drops the first grid so mask cells stay empty.
    ``emphasis`` forces distance 0 and bias ``bias`` inside ``region``.
    ``external`` routes the distance field to ``mask`` (e.g. wavy lines)
    instead of the image edges.
    """
    if effect not in EFFECTS:
        raise ValueError(f"unknown effect {effect!r}")
    gamma = gamma or GammaSpec.linear()
    if effect == "white_border":
        return MixSpec(bias=0.0, gamma=GammaSpec.band(l1, l2)), mask
    if effect == "inverted":
        return MixSpec(bias=bias, gamma=gamma, invert=True), mask
    if effect == "external":
        return MixSpec(bias=bias, gamma=gamma, field_source="external_mask",
                       external_mask=mask), mask
    if region is None:
        raise ValueError("emphasis needs a region mask")
    if region.shape != mask.shape:
        raise ValueError(f"region mask {region.shape} does not match mask {mask.shape}")
    return MixSpec(gamma=gamma, region=region, region_bias=bias), mask
