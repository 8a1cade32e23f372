"""Named, index-addressable random streams derived from one root seed."""
from __future__ import annotations

import zlib

import numpy as np


def stream_key(name: str) -> int:
    return zlib.crc32(name.encode("ascii"))


def seed_sequence(root: int, name: str, *index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(root), spawn_key=(stream_key(name), *map(int, index)))


def generator(root: int, name: str, *index: int) -> np.random.Generator:
    """Generator for subsystem ``name`` at position ``index`` under ``root``.

    The same (root, name, index) always yields the same stream, regardless of
    which other streams were drawn first.
    """
    return np.random.default_rng(seed_sequence(root, name, *index))
