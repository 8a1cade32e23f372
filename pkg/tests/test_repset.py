import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dacopt.model import Basis, IncompleteBasisError, binary_basis
from dacopt.repset import (
    MAX_ENUM_LENGTH, CapacityError, enumerate_all, is_complete, mean_representation_count, subset_sums,
)

from conftest import TABLE1


def brute_force_sets(weights, n_codes):
    sets = {x: [] for x in range(n_codes)}
    for bits in itertools.product((0, 1), repeat=len(weights)):
        total = sum(b * w for b, w in zip(bits, weights))
        if total < n_codes:
            sets[total].append(bits)
    return sets


def test_small_hand_enumeration():
    index = enumerate_all(Basis((1, 1, 2), 2))
    members = {tuple(v) for v in index[2].vectors(3)}
    assert members == {(0, 0, 1), (1, 1, 0)}
    assert len(index[2]) == 2


def test_binary_unique():
    index = enumerate_all(binary_basis(3))
    assert index.counts.tolist() == [1] * 8


def test_table1_l13_total_matches_brute_force(basis13):
    index = enumerate_all(basis13)
    expected = sum(len(v) for v in brute_force_sets(basis13.weights, 256).values())
    assert index.total == expected


def test_buckets_decode_and_are_ascending(basis13):
    index = enumerate_all(basis13)
    weights = np.array(basis13.weights)
    for x in range(256):
        rep = index[x]
        assert np.all(np.diff(rep.masks) > 0)
        assert np.all(rep.vectors(13).astype(int) @ weights == x)


def test_subset_sums_against_brute_force():
    w = (3, 5, 7, 11)
    sums = subset_sums(w)
    for mask in range(16):
        assert sums[mask] == sum(w[i] for i in range(4) if mask >> i & 1)


@pytest.mark.parametrize("length", sorted(TABLE1))
def test_table1_complete(length):
    assert is_complete(Basis(TABLE1[length], 8))


def test_incomplete_cases():
    assert is_complete(binary_basis(8))
    assert not is_complete(Basis((2, 4, 8, 16, 32, 64, 128, 128), 8))
    assert not is_complete(Basis((1, 2, 4), 4))


def test_mean_representation_count():
    assert mean_representation_count(binary_basis(8)) == 1.0
    assert mean_representation_count(Basis((1, 1, 2), 2)) == 1.75
    # loose order-of-magnitude check of the 2^(L-N) estimate
    assert 16 <= mean_representation_count(Basis(TABLE1[13], 8)) <= 64
    with pytest.raises(IncompleteBasisError):
        mean_representation_count(Basis((2, 4), 2))


def test_enumeration_guard():
    with pytest.raises(CapacityError):
        enumerate_all(Basis((1,) * (MAX_ENUM_LENGTH + 1), 4))


bases = st.integers(1, 5).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(1, 1 << n), min_size=1, max_size=9)))


@settings(max_examples=150, deadline=None)
@given(bases)
def test_completeness_agrees_with_enumeration(case):
    n, weights = case
    basis = Basis(tuple(weights), n)
    assert is_complete(basis) == enumerate_all(basis).is_complete()
    expected = brute_force_sets(weights, 1 << n)
    assert enumerate_all(basis).counts.tolist() == [len(expected[x]) for x in range(1 << n)]


@settings(max_examples=100, deadline=None)
@given(bases, st.integers(0, 8))
def test_duplicate_weight_keeps_completeness(case, pick):
    n, weights = case
    basis = Basis(tuple(weights), n)
    if not is_complete(basis):
        return
    w = weights[pick % len(weights)]
    bigger = Basis(tuple(weights) + (w,), n)
    assert is_complete(bigger)
    assert np.all(enumerate_all(bigger).counts >= enumerate_all(basis).counts)
