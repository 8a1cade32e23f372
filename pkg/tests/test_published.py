import pytest

from dacopt import published
from dacopt.metric import mismatch_mse
from dacopt.model import ConfigError
from dacopt.optimize import DescentConfig, descend_multistart
from dacopt.repset import is_complete


def test_lengths():
    assert sorted(published.PUBLISHED_BASES) == list(range(9, 14))
    assert sorted(published.REFERENCE_BASES) == list(range(9, 14))
    for series in (published.PUBLISHED_BASES, published.REFERENCE_BASES):
        for length, weights in series.items():
            assert len(weights) == length
            assert list(weights) == sorted(weights)


def test_unknown_length():
    with pytest.raises(ConfigError):
        published.published_basis(8)
    with pytest.raises(ConfigError):
        published.reference_basis(20)


def test_rows_use_basis_columns():
    # row 118 switches on exactly the 6, 9, 12, 25 and 66 sources
    weights = published.PUBLISHED_BASES[13]
    on = [w for w, b in zip(weights, published.PUBLISHED_ROWS[118]) if b == "1"]
    assert on == [6, 9, 12, 25, 66]


@pytest.fixture(scope="module")
def reference_metrics(gauss8):
    out = {}
    for length in range(9, 14):
        basis = published.reference_basis(length)
        table, _ = descend_multistart(basis, gauss8, DescentConfig(max_sweeps=1000), restarts=20)
        out[length] = mismatch_mse(table, gauss8).raw
    return out


def test_reference_bases_complete_and_improving(reference_metrics):
    for length in range(9, 14):
        assert is_complete(published.reference_basis(length))
    values = [reference_metrics[L] for L in range(9, 14)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_reference_not_worse_than_published(gauss8, reference_metrics):
    for length in range(9, 14):
        table, _ = descend_multistart(published.published_basis(length), gauss8,
                                      DescentConfig(max_sweeps=1000), restarts=20)
        assert reference_metrics[length] <= 1.01 * mismatch_mse(table, gauss8).raw
