"""Experiment configuration and architecture resolution."""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import published
from .metric import InputPmf, _optimal_rms_cached, gaussian_pmf, uniform_pmf
from .model import (
    Basis, ConfigError, RepresentationTable, SegmentSpec, binary_basis, canonical_mapping, load_basis,
    segmented_basis, thermometer_basis,
)
from .montecarlo import SimConfig
from .optimize import AnnealConfig, DescentConfig, anneal_basis, descend_multistart
from .repset import require_complete

ARCH_PATTERN = re.compile(r"^(binary|thermometer|segmented:\d+|published:\d+|reference:\d+|optimize:\d+|basis:.+)$")
DEFAULT_ARCHITECTURES = [
    "thermometer", "binary", "segmented:2", "segmented:3", "segmented:4",
    "published:9", "published:10", "published:11", "published:12", "published:13",
]


@dataclass
class SimulationSettings:
    realizations: int = 10_000
    quantile: float = 0.95
    mode: str = "exact"
    samples: int = 100_000


@dataclass
class DescentSettings:
    max_sweeps: int = 1000
    restarts: int = 20


@dataclass
class AnnealSettings:
    restarts: int = 100
    initial_temperature: float | None = None
    cooling_factor: float = 0.95
    steps_per_temperature: int = 50
    min_temperature: float | None = None
    inner_sweeps: int = 10
    workers: int = 1


@dataclass
class ExperimentConfig:
    n_bits: int = 8
    architectures: list[str] = field(default_factory=lambda: list(DEFAULT_ARCHITECTURES))
    pmf: str = "gaussian"
    sigma_delta: float = 0.05
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    descent: DescentSettings = field(default_factory=DescentSettings)
    anneal: AnnealSettings = field(default_factory=AnnealSettings)
    seed: int = 0
    out: str = "results"

    def validate(self) -> ExperimentConfig:
        if not isinstance(self.n_bits, int) or not 1 <= self.n_bits <= 16:
            raise ConfigError(f"n_bits must be an integer in [1, 16], got {self.n_bits!r}")
        if not isinstance(self.architectures, list) or not self.architectures:
            raise ConfigError("architectures must be a non-empty list")
        for arch in self.architectures:
            if not isinstance(arch, str) or not ARCH_PATTERN.match(arch):
                raise ConfigError(f"unknown architecture {arch!r}")
        parse_pmf_spec(self.pmf)
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        self.sim_config()
        self.anneal_config()
        self.descent_config()
        return self

    def pmf_dist(self) -> InputPmf:
        kind, sigma = parse_pmf_spec(self.pmf)
        if kind == "uniform":
            return uniform_pmf(self.n_bits)
        return gaussian_pmf(self.n_bits, sigma if sigma is not None else _optimal_rms_cached(self.n_bits))

    def sim_config(self) -> SimConfig:
        s = self.simulation
        return SimConfig(realizations=s.realizations, sigma_delta=self.sigma_delta,
                         yield_quantile=s.quantile, seed=self.seed, mode=s.mode, samples=s.samples)

    def descent_config(self) -> DescentConfig:
        if self.descent.restarts < 1:
            raise ConfigError("descent.restarts must be >= 1")
        return DescentConfig(max_sweeps=self.descent.max_sweeps, seed=self.seed)

    def anneal_config(self) -> AnnealConfig:
        a = self.anneal
        return AnnealConfig(
            restarts=a.restarts, initial_temperature=a.initial_temperature,
            cooling_factor=a.cooling_factor, steps_per_temperature=a.steps_per_temperature,
            min_temperature=a.min_temperature, inner_descent=DescentConfig(max_sweeps=a.inner_sweeps),
            seed=self.seed, workers=a.workers,
        )

    def echo(self) -> dict:
        """Resolved settings for provenance; omits the output directory."""
        data = dataclasses.asdict(self)
        data.pop("out")
        kind, sigma = parse_pmf_spec(self.pmf)
        if kind == "gaussian" and sigma is None:
            data["pmf"] = f"gaussian:{_optimal_rms_cached(self.n_bits)!r}"
        # worker count does not affect results
        data["anneal"].pop("workers")
        return data


def parse_pmf_spec(spec) -> tuple[str, float | None]:
    if not isinstance(spec, str):
        raise ConfigError(f"pmf must be 'uniform', 'gaussian' or 'gaussian:<rms>', got {spec!r}")
    kind, _, arg = spec.partition(":")
    if kind == "uniform" and not arg:
        return "uniform", None
    if kind == "gaussian":
        if not arg or arg == "auto":
            return "gaussian", None
        try:
            sigma = float(arg)
        except ValueError:
            raise ConfigError(f"bad gaussian rms {arg!r}") from None
        if not sigma > 0:
            raise ConfigError("gaussian rms must be positive")
        return "gaussian", sigma
    raise ConfigError(f"pmf must be 'uniform', 'gaussian' or 'gaussian:<rms>', got {spec!r}")


_NESTED = {"simulation": SimulationSettings, "descent": DescentSettings, "anneal": AnnealSettings}


def _coerce(default, value, where: str):
    if default is None:
        # optional float settings
        if value is None:
            return None
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        raise ConfigError(f"{where} should be a number or null, got {value!r}")
    if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if type(value) is not type(default):
        raise ConfigError(f"{where} should be {type(default).__name__}, got {value!r}")
    return value


def _build(cls, data, where: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a mapping")
    unknown = sorted(set(data) - {f.name for f in dataclasses.fields(cls)})
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {unknown}")
    defaults = cls()
    kwargs = {}
    for key, value in data.items():
        if cls is ExperimentConfig and key in _NESTED:
            kwargs[key] = _build(_NESTED[key], value, key)
        else:
            kwargs[key] = _coerce(getattr(defaults, key), value, f"{where}.{key}")
    return cls(**kwargs)


def load_config(path=None, **overrides) -> ExperimentConfig:
    """Read a YAML experiment file (or defaults) and apply non-None overrides."""
    data = {}
    if path is not None:
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text()) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ConfigError(f"{path}: malformed YAML", mark.line + 1 if mark else None) from None
    cfg = _build(ExperimentConfig, data, "config")
    for key, value in overrides.items():
        if value is None:
            continue
        if key in ("realizations", "quantile"):
            setattr(cfg.simulation, key, value)
        else:
            setattr(cfg, key, value)
    return cfg.validate()


@dataclass
class Architecture:
    name: str
    series: str
    basis: Basis
    mapping: RepresentationTable
    trace: object = None


def resolve(spec: str, cfg: ExperimentConfig, pmf: InputPmf) -> Architecture:
    """Build the basis and mapping an architecture string names.

    Non-canonical bases get the best of ``descent.restarts`` descents;
    ``optimize:L`` runs the basis annealer.
    """
    n = cfg.n_bits
    kind, _, arg = spec.partition(":")
    if kind == "binary":
        basis = binary_basis(n)
        return Architecture("binary", "binary", basis, canonical_mapping(basis, "binary"))
    if kind == "thermometer":
        basis = thermometer_basis(n)
        return Architecture("thermometer", "thermometer", basis, canonical_mapping(basis, "thermometer"))
    if kind == "segmented":
        seg = SegmentSpec.for_bits(n, int(arg))
        basis = segmented_basis(seg, n)
        return Architecture(seg.name, "segmented", basis, canonical_mapping(basis, "segmented", seg))
    if kind == "optimize":
        basis, table, trace = anneal_basis(n, int(arg), pmf, cfg.anneal_config())
        return Architecture(f"optimized-{arg}", "optimized", basis, table, trace)
    if kind == "published":
        basis, name = published.published_basis(int(arg)), f"published-{arg}"
    elif kind == "reference":
        basis, name = published.reference_basis(int(arg)), f"reference-{arg}"
    else:
        basis, name = load_basis(arg), Path(arg).stem
    if basis.n_bits != n:
        raise ConfigError(f"{spec}: basis is {basis.n_bits}-bit but n_bits is {n}")
    require_complete(basis)
    table, trace = descend_multistart(basis, pmf, cfg.descent_config(), restarts=cfg.descent.restarts)
    return Architecture(name, "optimized", basis, table, trace)
