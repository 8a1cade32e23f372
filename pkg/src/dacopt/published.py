"""Reference architectures for the 8-bit case.

``PUBLISHED_BASES`` and ``PUBLISHED_ROWS`` are the literature values: the
mismatch-optimized bases for L = 9..13 and the mapping of codewords 118..138
for the 13-switch basis (bit strings with basis index 0 leftmost).

``REFERENCE_BASES`` are this package's own annealing results with the default
``AnnealConfig`` and seed 0; ``dacopt optimize`` reproduces them.
"""
from __future__ import annotations

from .model import Basis, ConfigError

N_BITS = 8

PUBLISHED_BASES: dict[int, tuple[int, ...]] = {
    9: (1, 2, 4, 8, 16, 32, 35, 77, 80),
    10: (1, 2, 4, 8, 16, 17, 32, 33, 70, 72),
    11: (1, 2, 4, 8, 8, 16, 17, 32, 33, 66, 70),
    12: (1, 2, 4, 7, 8, 15, 15, 23, 25, 30, 61, 64),
    13: (1, 2, 4, 6, 8, 9, 12, 16, 17, 25, 32, 61, 66),
}

PUBLISHED_ROWS: dict[int, str] = {
    118: "0001011001001",
    119: "1001011001001",
    120: "0101011001001",
    121: "1101011001001",
    122: "0011011001001",
    123: "1011011001001",
    124: "0111011001001",
    125: "1111011001001",
    126: "0001001011001",
    127: "1001001011001",
    128: "0101001011001",
    129: "1101001011001",
    130: "0011001011001",
    131: "1011001011001",
    132: "0111001011001",
    133: "1111001011001",
    134: "1010011011001",
    135: "0001011011001",
    136: "1001011011001",
    137: "0101011011001",
    138: "1101011011001",
}

REFERENCE_BASES: dict[int, tuple[int, ...]] = {
    9: (1, 2, 4, 8, 16, 32, 32, 80, 80),
    10: (1, 2, 4, 8, 16, 16, 32, 32, 72, 72),
    11: (1, 2, 4, 8, 8, 17, 17, 33, 33, 66, 66),
    12: (1, 2, 4, 8, 8, 16, 16, 16, 30, 31, 61, 62),
    13: (1, 2, 4, 4, 8, 8, 16, 16, 16, 29, 30, 60, 61),
}


def published_basis(length: int) -> Basis:
    try:
        return Basis(PUBLISHED_BASES[length], N_BITS)
    except KeyError:
        raise ConfigError(f"no published basis of length {length}; have {sorted(PUBLISHED_BASES)}") from None


def reference_basis(length: int) -> Basis:
    try:
        return Basis(REFERENCE_BASES[length], N_BITS)
    except KeyError:
        raise ConfigError(f"no reference basis of length {length}; have {sorted(REFERENCE_BASES)}") from None
