"""Deterministic random streams keyed by (master seed, module tag, index)."""

import zlib

import numpy as np


def tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode())


def rng(seed: int, tag: str, *index: int) -> np.random.Generator:
    """Independent generator for one (seed, tag, index...) coordinate."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, tag_id(tag), *map(int, index)]
    return np.random.default_rng(np.random.SeedSequence(entropy))
