"""Seeded random streams.

Every random draw in the package goes through numpy's PCG64 bit generator,
which produces the same stream on every platform for the same seed. Stages
of the pipeline get independent streams derived from the master seed and a
stage label, so changing one stage never shifts the draws of another.
"""
from __future__ import annotations

import zlib

import numpy as np


def make_rng(seed=None, label: str | None = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if label is None:
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(derive(seed, label)))


def derive(seed, label: str) -> np.random.SeedSequence:
    key = zlib.crc32(label.encode("utf-8"))
    entropy = 0 if seed is None else int(seed)
    return np.random.SeedSequence(entropy, spawn_key=(key,))
