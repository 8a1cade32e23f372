"""Input distributions and the closed-form amplitude-mismatch error metric."""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.special import ndtr

from .model import ConfigError, RepresentationTable, canonical_mapping, thermometer_basis

DEFAULT_SIGMA_DELTA = 0.05


@dataclass(frozen=True, eq=False)
class InputPmf:
    """Probability of each codeword ``0 .. 2^N - 1``."""

    probs: np.ndarray = field(repr=False)
    description: str = "custom"

    def __post_init__(self):
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        n = probs.size
        if probs.ndim != 1 or n < 2 or n & (n - 1):
            raise ConfigError(f"pmf length must be a power of two >= 2, got {probs.shape}")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ConfigError("pmf entries must be finite and non-negative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ConfigError(f"pmf sums to {probs.sum()!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def n_bits(self) -> int:
        return self.probs.size.bit_length() - 1

    def mean(self) -> float:
        return float(self.probs @ np.arange(self.probs.size))

    def variance(self) -> float:
        x = np.arange(self.probs.size) - self.mean()
        return float(self.probs @ (x * x))

    def to_csv(self) -> str:
        rows = ["codeword,probability"]
        rows += [f"{x},{p!r}" for x, p in enumerate(self.probs.tolist())]
        return "\n".join(rows) + "\n"

    def _key(self):
        return self.probs.tobytes()


def uniform_pmf(n_bits: int) -> InputPmf:
    n = 1 << n_bits
    return InputPmf(np.full(n, 1.0 / n), "uniform")


def gaussian_pmf(n_bits: int, sigma_s: float) -> InputPmf:
    """Hard-clipped, mid-range-centred Gaussian quantized to integer codewords.

    Tail mass beyond either end of the range lands on the edge codeword.
    """
    if not sigma_s > 0:
        raise ConfigError(f"sigma_s must be positive, got {sigma_s}")
    n = 1 << n_bits
    mu = (n - 1) / 2
    edges = (np.arange(n - 1) + 0.5 - mu) / sigma_s
    # lower half from the CDF, upper half from the survival function: keeps tail precision
    cdf = np.where(edges <= 0, ndtr(edges), 1.0 - ndtr(-edges))
    upper = np.concatenate([cdf, [1.0]])
    lower = np.concatenate([[0.0], cdf])
    probs = upper - lower
    probs /= probs.sum()
    return InputPmf(probs, f"clipped-gaussian(sigma_s={sigma_s!r})")


def _quantizer_segments(n_bits: int, sigma: float, tail: float = 12.0):
    n = 1 << n_bits
    mu = (n - 1) / 2
    inner = np.arange(n - 1) + 0.5 - mu
    lo = np.concatenate([[min(-tail * sigma, inner[0] - 1.0)], inner])
    hi = np.concatenate([inner, [max(tail * sigma, inner[-1] + 1.0)]])
    levels = np.arange(n) - mu
    return lo, hi, levels


def quantization_mse(n_bits: int, sigma: float, points: int = 65, tail_points: int = 4097) -> float:
    """E[(q(s) - s)^2] for s ~ N(0, sigma^2) through the clipped mid-rise quantizer.

    Piecewise Simpson quadrature on each quantizer cell; the two clipping
    regions get a denser grid and are cut at 12 sigma.
    """
    lo, hi, levels = _quantizer_segments(n_bits, sigma)
    total = 0.0
    for a, b, c, k in ((lo[1:-1], hi[1:-1], levels[1:-1], points),
                       (lo[[0, -1]], hi[[0, -1]], levels[[0, -1]], tail_points)):
        if a.size == 0:
            continue
        t = np.linspace(0.0, 1.0, k)
        s = a[:, None] + (b - a)[:, None] * t[None, :]
        dens = np.exp(-0.5 * (s / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))
        f = (c[:, None] - s) ** 2 * dens
        total += float(np.sum(simpson(f, x=s, axis=1)))
    return total


def sqnr(n_bits: int, sigma: float) -> float:
    return sigma * sigma / quantization_mse(n_bits, sigma)


def optimal_rms(n_bits: int, step: float = 0.5, upper: float | None = None) -> float:
    """Gaussian input RMS (in LSB) maximizing SQNR, on a ``step``-spaced grid."""
    if upper is None:
        upper = float(1 << n_bits)
    grid = np.arange(step, upper + step / 2, step)
    values = np.array([sqnr(n_bits, s) for s in grid])
    return float(grid[int(np.argmax(values))])


@functools.lru_cache(maxsize=8)
def _optimal_rms_cached(n_bits: int) -> float:
    return optimal_rms(n_bits)


def auto_gaussian_pmf(n_bits: int) -> InputPmf:
    """Gaussian pmf at the SQNR-optimal loading."""
    return gaussian_pmf(n_bits, _optimal_rms_cached(n_bits))


@dataclass(frozen=True)
class ActivationProfile:
    means: np.ndarray


@dataclass(frozen=True)
class MetricValue:
    """``raw`` is the MSE in units of sigma_delta^2."""

    raw: float
    normalized: float
    sigma_delta: float = DEFAULT_SIGMA_DELTA

    @property
    def mse(self) -> float:
        return self.sigma_delta ** 2 * self.raw


def activation_profile(mapping: RepresentationTable, pmf: InputPmf) -> ActivationProfile:
    if mapping.bits.shape[0] != pmf.probs.size:
        raise ValueError(f"mapping has {mapping.bits.shape[0]} rows, pmf has {pmf.probs.size} codewords")
    return ActivationProfile(pmf.probs @ mapping.bits)


def raw_metric(mapping: RepresentationTable, pmf: InputPmf) -> float:
    means = activation_profile(mapping, pmf).means
    return float(np.sum(means * (1.0 - means) * mapping.basis.array))


def _thermometer_raw(pmf: InputPmf) -> float:
    return _thermometer_raw_cached(pmf.n_bits, pmf._key())


@functools.lru_cache(maxsize=32)
def _thermometer_raw_cached(n_bits: int, key: bytes) -> float:
    pmf = InputPmf(np.frombuffer(key, dtype=np.float64))
    return raw_metric(canonical_mapping(thermometer_basis(n_bits), "thermometer"), pmf)


def mismatch_mse(mapping: RepresentationTable, pmf: InputPmf,
                 sigma_delta: float = DEFAULT_SIGMA_DELTA) -> MetricValue:
    """Expected squared mismatch error, raw and relative to full thermometer coding."""
    if mapping.basis.n_bits != pmf.n_bits:
        raise ValueError("mapping and pmf disagree on the number of bits")
    raw = raw_metric(mapping, pmf)
    ref = _thermometer_raw(pmf)
    return MetricValue(raw, raw / ref if ref > 0 else 0.0, sigma_delta)


def receiver_error(w, profile: ActivationProfile, delta) -> float:
    """Offset-removed error ``sum_i (w_i - E[W_i]) * delta_i`` for one codeword."""
    w = np.asarray(w, dtype=float)
    d = np.asarray(getattr(delta, "deltas", delta), dtype=float)
    if w.shape != profile.means.shape or d.shape != profile.means.shape:
        raise ValueError("selection vector, profile and mismatch must have equal length")
    return float((w - profile.means) @ d)


def receiver_errors(mapping: RepresentationTable, profile: ActivationProfile, delta) -> np.ndarray:
    """Receiver error for every codeword at once."""
    d = np.asarray(getattr(delta, "deltas", delta), dtype=float)
    return (mapping.bits - profile.means[None, :]) @ d
