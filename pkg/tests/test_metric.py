import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from dacopt.metric import (
    InputPmf, activation_profile, gaussian_pmf, mismatch_mse, optimal_rms, quantization_mse, raw_metric,
    receiver_error, receiver_errors, sqnr, uniform_pmf,
)
from dacopt.model import (
    Basis, ConfigError, SegmentSpec, binary_basis, canonical_mapping, segmented_basis, thermometer_basis,
)
from dacopt.optimize import descend_representations

from conftest import TABLE1


def closed_form_quantization_mse(n_bits, sigma):
    """Gaussian partial moments per quantizer cell, no quadrature."""
    n = 1 << n_bits
    mu = (n - 1) / 2
    c = np.arange(n)
    a = (np.concatenate([[-np.inf], c[:-1] + 0.5]) - mu) / sigma
    b = (np.concatenate([c[:-1] + 0.5, [np.inf]]) - mu) / sigma
    d = (mu - c) / sigma

    def prim(z):
        # antiderivative of (z + d)^2 phi(z); z*phi(z) -> 0 at +-inf
        zphi = np.where(np.isinf(z), 0.0, np.nan_to_num(z) * norm.pdf(z))
        return norm.cdf(z) - zphi - 2 * d * norm.pdf(z) + d * d * norm.cdf(z)

    return float(sigma * sigma * np.sum(prim(b) - prim(a)))


@pytest.mark.parametrize("n_bits, sigma", [(3, 1.7), (8, 32.5), (8, 10.0), (8, 90.0), (1, 0.5), (4, 3.3)])
def test_quadrature_matches_closed_form(n_bits, sigma):
    assert quantization_mse(n_bits, sigma) == pytest.approx(closed_form_quantization_mse(n_bits, sigma), rel=1e-8)


def test_fine_quantizer_approaches_uniform_noise():
    # sigma far inside the range, far above 1 LSB: MSE ~ 1/12
    assert quantization_mse(12, 300.0) == pytest.approx(1 / 12, rel=1e-4)


def test_optimal_rms_golden():
    assert optimal_rms(8) == 32.5
    assert optimal_rms(1) == 0.5


def test_optimal_rms_agrees_with_closed_form_grid():
    grid = np.arange(0.5, 256.25, 0.5)
    oracle = grid[np.argmax([s * s / closed_form_quantization_mse(8, s) for s in grid[:160]])]
    assert optimal_rms(8) == oracle
    assert 10 * np.log10(sqnr(8, 32.5)) == pytest.approx(40.57, abs=0.01)


def test_gaussian_pmf_properties(gauss8):
    p = gauss8.probs
    assert p.sum() == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(p, p[::-1], rtol=1e-10)
    assert gauss8.mean() == pytest.approx(127.5, abs=1e-9)
    assert np.argmax(p[:128]) == 127
    # interior codeword: mass of its unit-wide bin
    assert p[100] == pytest.approx(norm.cdf(100.5, 127.5, 32.5) - norm.cdf(99.5, 127.5, 32.5), rel=1e-9)
    # edge codeword absorbs the tail
    assert p[0] == pytest.approx(norm.cdf(0.5, 127.5, 32.5), rel=1e-9)


def test_pmf_validation():
    with pytest.raises(ConfigError):
        InputPmf(np.array([0.5, 0.6]))
    with pytest.raises(ConfigError):
        InputPmf(np.array([0.5, 0.25, 0.25]))
    with pytest.raises(ConfigError):
        InputPmf(np.array([1.5, -0.5]))
    with pytest.raises(ConfigError):
        gaussian_pmf(8, 0.0)


def variance_oracle(table, probs):
    """E_delta sum_x P(x) e(x)^2 with unit sigma_delta, via per-codeword variances."""
    bits = table.bits.astype(float)
    w = table.basis.array
    means = probs @ bits
    return float(sum(p * np.sum((row - means) ** 2 * w) for p, row in zip(probs, bits)))


def test_binary_uniform_golden(uniform8):
    table = canonical_mapping(binary_basis(8), "binary")
    assert raw_metric(table, uniform8) == pytest.approx(63.75, abs=1e-12)


def test_thermometer_uniform_profile(uniform8):
    table = canonical_mapping(thermometer_basis(8), "thermometer")
    means = activation_profile(table, uniform8).means
    np.testing.assert_allclose(means, (255 - np.arange(255)) / 256, atol=1e-15)


def test_thermometer_normalizes_to_one(gauss8, uniform8):
    for pmf in (gauss8, uniform8):
        v = mismatch_mse(canonical_mapping(thermometer_basis(8), "thermometer"), pmf)
        assert v.normalized == 1.0


@pytest.mark.parametrize("m", [2, 3, 4])
def test_segmented_metric_matches_oracle(gauss8, m):
    spec = SegmentSpec.for_bits(8, m)
    table = canonical_mapping(segmented_basis(spec, 8), "segmented", spec)
    assert raw_metric(table, gauss8) == pytest.approx(variance_oracle(table, gauss8.probs), rel=1e-12)


def test_segmented_golden_values(gauss8):
    # segmentation ordering on the default Gaussian input
    vals = []
    for m in (2, 3, 4):
        spec = SegmentSpec.for_bits(8, m)
        vals.append(mismatch_mse(canonical_mapping(segmented_basis(spec, 8), "segmented", spec), gauss8).normalized)
    assert vals == sorted(vals, reverse=True)
    assert vals[2] == pytest.approx(1.2045, abs=1e-4)


def test_metric_mse_scales_with_sigma(gauss8):
    table = canonical_mapping(binary_basis(8), "binary")
    a, b = mismatch_mse(table, gauss8, 0.05), mismatch_mse(table, gauss8, 0.1)
    assert a.raw == b.raw
    assert b.mse == pytest.approx(4 * a.mse)


def test_receiver_error_forms_agree(gauss8, basis13, rng):
    table, _ = descend_representations(basis13, gauss8)
    prof = activation_profile(table, gauss8)
    delta = rng.normal(size=13) * np.sqrt(basis13.array)
    all_e = receiver_errors(table, prof, delta)
    for x in (0, 77, 128, 255):
        assert receiver_error(table.bits[x], prof, delta) == pytest.approx(all_e[x], abs=1e-12)
    # offset-removed: zero mean over the input distribution
    assert gauss8.probs @ all_e == pytest.approx(0.0, abs=1e-12)


def test_metric_equals_mismatch_average(uniform8, rng):
    table = canonical_mapping(segmented_basis(SegmentSpec.for_bits(8, 2), 8), "segmented")
    prof = activation_profile(table, uniform8)
    d = rng.normal(size=(40_000, table.basis.length)) * np.sqrt(table.basis.array)
    e = (table.bits - prof.means) @ d.T
    mc = float(np.mean(uniform8.probs @ (e * e)))
    assert mc == pytest.approx(raw_metric(table, uniform8), rel=0.02)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.data())
def test_metric_oracle_random_tables(n, data):
    weights = data.draw(st.lists(st.integers(1, 1 << (n - 1)), min_size=n, max_size=n + 3))
    basis = Basis(tuple(sorted(weights + [1])), n)
    from dacopt.repset import is_complete
    if not is_complete(basis):
        return
    seed = data.draw(st.integers(0, 2 ** 32 - 1))
    raw_p = np.random.default_rng(seed).random(1 << n) + 1e-3
    pmf = InputPmf(raw_p / raw_p.sum())
    table, _ = descend_representations(basis, pmf)
    got = raw_metric(table, pmf)
    assert got == pytest.approx(variance_oracle(table, pmf.probs), rel=1e-10, abs=1e-12)
    assert got >= 0
