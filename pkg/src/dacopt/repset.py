"""Subset-sum representations of codewords and basis completeness."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import Basis, IncompleteBasisError

MAX_ENUM_LENGTH = 20


class CapacityError(ValueError):
    """Basis too long to enumerate all of its subsets."""


@dataclass(frozen=True)
class RepresentationSet:
    codeword: int
    masks: np.ndarray

    def vectors(self, length: int) -> np.ndarray:
        return ((self.masks[:, None] >> np.arange(length)) & 1).astype(np.uint8)

    def __len__(self):
        return int(self.masks.size)


@dataclass(frozen=True, eq=False)
class RepresentationIndex:
    """All in-range subsets of a basis bucketed by their sum.

    ``masks[offsets[x]:offsets[x + 1]]`` holds every L-bit mask summing to
    ``x``, in ascending mask order. Subsets summing past ``2^N - 1`` are
    dropped.
    """

    basis: Basis
    offsets: np.ndarray = field(repr=False)
    masks: np.ndarray = field(repr=False)

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    def __getitem__(self, x: int) -> RepresentationSet:
        return RepresentationSet(int(x), self.masks[self.offsets[x]:self.offsets[x + 1]])

    def is_complete(self) -> bool:
        return bool(np.all(self.counts > 0))

    def locate(self, masks) -> np.ndarray:
        """Position in ``self.masks`` of each codeword's mask, or -1 if it is not in R(x)."""
        masks = np.asarray(masks, dtype=np.int64)
        shift = self.basis.length
        keys = np.repeat(np.arange(self.basis.n_codes, dtype=np.int64), self.counts) << shift
        keys |= self.masks
        want = (np.arange(masks.size, dtype=np.int64) << shift) | masks
        pos = np.minimum(np.searchsorted(keys, want), max(keys.size - 1, 0))
        return np.where(keys[pos] == want, pos, -1)

    @property
    def total(self) -> int:
        return int(self.masks.size)


def subset_sums(weights) -> np.ndarray:
    """Sum of every subset, indexed by its L-bit mask."""
    weights = np.asarray(weights, dtype=np.int64)
    sums = np.zeros(1 << weights.size, dtype=np.int64)
    for i, w in enumerate(weights):
        half = 1 << i
        sums[half:2 * half] = sums[:half] + w
    return sums


def enumerate_all(basis: Basis) -> RepresentationIndex:
    if basis.length > MAX_ENUM_LENGTH:
        raise CapacityError(
            f"basis length {basis.length} exceeds the enumeration limit of {MAX_ENUM_LENGTH}"
        )
    n_codes = basis.n_codes
    sums = subset_sums(basis.weights)
    keep = np.flatnonzero(sums < n_codes)
    # stable sort keeps masks ascending inside each bucket
    order = keep[np.argsort(sums[keep], kind="stable")]
    counts = np.bincount(sums[order], minlength=n_codes)
    offsets = np.zeros(n_codes + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return RepresentationIndex(basis, offsets, order.astype(np.int64))


def is_complete(basis: Basis) -> bool:
    """Whether every integer in [0, 2^N - 1] is a subset sum of the weights.

    Reachable sums are tracked as bits of one integer, one shift-or per weight.
    """
    if not basis.covers_range():
        return False
    full = (1 << basis.n_codes) - 1
    reach = 1
    for w in basis.weights:
        reach = (reach | (reach << w)) & full
        if reach == full:
            return True
    return reach == full


def first_unreachable(basis: Basis) -> int | None:
    """Smallest codeword that is not a subset sum, or None for a complete basis."""
    full = (1 << basis.n_codes) - 1
    reach = 1
    for w in basis.weights:
        reach = (reach | (reach << w)) & full
    missing = ~reach & full
    return (missing & -missing).bit_length() - 1 if missing else None


def require_complete(basis: Basis) -> None:
    if not is_complete(basis):
        raise IncompleteBasisError(
            f"basis {list(basis.weights)} is incomplete: codeword {first_unreachable(basis)} "
            f"has no representation"
        )


def mean_representation_count(basis: Basis) -> float:
    require_complete(basis)
    return enumerate_all(basis).total / basis.n_codes
