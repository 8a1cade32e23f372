"""Monte Carlo SNDR statistics over static mismatch realizations."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .metric import InputPmf, activation_profile
from .model import ConfigError, RepresentationTable
from .seeding import generator

# realizations per generator stream; realization j lives in stream j // BLOCK
BLOCK = 1024
MODES = ("exact", "sampled")


@dataclass(frozen=True)
class SimConfig:
    realizations: int = 100_000
    sigma_delta: float = 0.05
    yield_quantile: float = 0.95
    seed: int = 0
    mode: str = "exact"
    samples: int = 100_000

    def __post_init__(self):
        if self.realizations < 1:
            raise ConfigError(f"realizations must be >= 1, got {self.realizations}")
        if not self.sigma_delta > 0:
            raise ConfigError(
                f"sigma_delta must be > 0 (got {self.sigma_delta}); "
                "without mismatch the SNDR is unbounded"
            )
        if not 0.0 < self.yield_quantile < 1.0:
            raise ConfigError(f"yield quantile must lie in (0, 1), got {self.yield_quantile}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "sampled" and self.samples < 10_000:
            raise ConfigError("sampled mode needs at least 10^4 samples per realization")


@dataclass(frozen=True, eq=False)
class SndrDistribution:
    """Per-realization SNDR values with their error powers.

    ``mean`` is the power-domain mean: signal power over the realization-averaged
    error power. It tracks the closed-form metric exactly in expectation. The
    dB-domain and linear-SNDR averages are kept alongside it.
    """

    values: np.ndarray = field(repr=False)
    noise: np.ndarray = field(repr=False)
    signal: float
    yield_quantile: float = 0.95

    @property
    def finite(self) -> np.ndarray:
        return self.values[np.isfinite(self.values)]

    @property
    def mean(self) -> float:
        return float(10 * np.log10(self.signal / np.mean(self.noise)))

    @property
    def mean_of_db(self) -> float:
        return float(np.mean(self.finite))

    @property
    def mean_linear_db(self) -> float:
        return float(10 * np.log10(np.mean(10 ** (self.finite / 10))))

    @property
    def yield_value(self) -> float:
        return yield_sndr(self.values, self.yield_quantile)

    @property
    def min(self) -> float:
        return float(np.min(self.values))

    @property
    def max(self) -> float:
        return float(np.max(self.values))

    def summary(self) -> dict:
        return {
            "realizations": int(self.values.size),
            "mean_db": self.mean,
            "mean_of_db": self.mean_of_db,
            "mean_linear_db": self.mean_linear_db,
            "yield_quantile": self.yield_quantile,
            "yield_db": self.yield_value,
            "min_db": self.min,
            "max_db": self.max,
        }

    def to_csv(self) -> str:
        rows = ["realization,sndr_db,error_power"]
        rows += [f"{j},{v!r},{d!r}" for j, (v, d) in enumerate(zip(self.values.tolist(), self.noise.tolist()))]
        return "\n".join(rows) + "\n"


def yield_sndr(values, quantile: float) -> float:
    """SNDR exceeded by a ``quantile`` fraction of realizations (nearest rank)."""
    ordered = np.sort(np.asarray(values, dtype=float))
    # round before ceil: (1 - 0.95) * 10000 is 500.0000000000004 in floating point
    rank = max(1, math.ceil(round((1.0 - quantile) * ordered.size, 9)))
    return float(ordered[rank - 1])


def mismatch_draws(mapping: RepresentationTable, sigma_delta: float, seed: int,
                   start: int, stop: int) -> np.ndarray:
    """Deviation vectors for realizations ``start .. stop - 1``.

    Realization j is the same array row however the range is split.
    """
    scale = np.sqrt(mapping.basis.array.astype(float)) * sigma_delta
    out = np.empty((stop - start, mapping.basis.length))
    j = start
    while j < stop:
        block, offset = divmod(j, BLOCK)
        take = min(BLOCK - offset, stop - j)
        z = generator(seed, "mismatch", block).standard_normal((offset + take, mapping.basis.length))
        out[j - start:j - start + take] = z[offset:]
        j += take
    return out * scale


def _centered(mapping: RepresentationTable, pmf: InputPmf) -> np.ndarray:
    means = activation_profile(mapping, pmf).means
    return mapping.bits - means[None, :]


def error_powers(mapping: RepresentationTable, pmf: InputPmf, deltas) -> np.ndarray:
    """Input-averaged squared receiver error for each realization row."""
    deltas = np.atleast_2d(np.asarray(deltas, dtype=float))
    return _kernels.error_power(_centered(mapping, pmf), pmf.probs, deltas)


def _to_db(signal: float, noise: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(signal / noise)


def sndr_one_realization(mapping: RepresentationTable, pmf: InputPmf, delta) -> float:
    """SNDR in dB of one DAC instance; ``inf`` when the mismatch is exactly zero."""
    d = np.asarray(getattr(delta, "deltas", delta), dtype=float)
    if d.shape != (mapping.basis.length,):
        raise ValueError("mismatch length does not match the basis")
    noise = error_powers(mapping, pmf, d[None, :])
    return float(_to_db(pmf.variance(), noise)[0])


def sampled_waveform_sndr(mapping: RepresentationTable, delta, sigma_s: float,
                          n_samples: int, seed: int, index: int = 0) -> float:
    """SNDR of a sampled clipped-Gaussian waveform through the mismatched DAC.

    Cross-check for the exact-expectation path; converges to it as
    ``n_samples`` grows.
    """
    if n_samples < 10_000:
        raise ConfigError("sampled SNDR needs at least 10^4 samples")
    d = np.asarray(getattr(delta, "deltas", delta), dtype=float)
    n = mapping.basis.n_codes
    mu = (n - 1) / 2
    s = generator(seed, "waveform", index).normal(0.0, sigma_s, n_samples)
    x = np.clip(np.rint(s + mu), 0, n - 1).astype(np.int64)
    levels = mapping.bits @ (mapping.basis.array + d)
    y = levels[x]
    ideal = x - x.mean()
    err = (y - y.mean()) - ideal
    noise = float(np.mean(err * err))
    if noise == 0.0:
        return math.inf
    return float(10.0 * np.log10(np.mean(ideal * ideal) / noise))


def run_simulation(mapping: RepresentationTable, pmf: InputPmf, cfg: SimConfig = SimConfig(),
                   sigma_s: float | None = None) -> SndrDistribution:
    """Per-realization SNDR over ``cfg.realizations`` independent DAC instances.

    ``sigma_s`` is only needed in sampled mode.
    """
    mapping.check()
    deltas = mismatch_draws(mapping, cfg.sigma_delta, cfg.seed, 0, cfg.realizations)
    signal = pmf.variance()
    if cfg.mode == "exact":
        noise = error_powers(mapping, pmf, deltas)
        values = _to_db(signal, noise)
    else:
        if sigma_s is None:
            raise ConfigError("sampled mode needs the Gaussian input RMS")
        values = np.array([
            sampled_waveform_sndr(mapping, d, sigma_s, cfg.samples, cfg.seed, j)
            for j, d in enumerate(deltas)
        ])
        noise = signal / 10 ** (values / 10)
    n_inf = int(np.sum(~np.isfinite(values)))
    if n_inf:
        warnings.warn(f"{n_inf} realization(s) with zero error excluded from averages", RuntimeWarning)
    return SndrDistribution(values, noise, signal, cfg.yield_quantile)
