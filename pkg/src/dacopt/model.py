"""Current-steering DAC domain types and the canonical baseline architectures.

All currents are dimensionless multiples of the unit current source.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

MAX_THERMOMETER_BITS = 16


class ConfigError(ValueError):
    """Invalid user-supplied configuration or input file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IncompleteBasisError(ValueError):
    """A basis cannot represent every codeword in [0, 2^N - 1]."""


class InvariantError(RuntimeError):
    """Internal consistency check failed."""


@dataclass(frozen=True)
class Basis:
    """Ordered nominal current weights of the L switches.

    Index order is the bit-position contract for selection vectors and
    mapping tables.
    """

    weights: tuple[int, ...]
    n_bits: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if self.n_bits < 1:
            raise ConfigError(f"n_bits must be >= 1, got {self.n_bits}")
        if not self.weights:
            raise ConfigError("basis must contain at least one weight")
        if min(self.weights) < 1:
            raise ConfigError(f"all weights must be >= 1, got {list(self.weights)}")

    @property
    def length(self) -> int:
        return len(self.weights)

    @property
    def n_codes(self) -> int:
        return 1 << self.n_bits

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.int64)

    def covers_range(self) -> bool:
        """Cheap necessary condition for completeness."""
        return sum(self.weights) >= self.n_codes - 1

    def sorted(self) -> Basis:
        return Basis(tuple(sorted(self.weights)), self.n_bits)

    def value(self, bits) -> int:
        bits = np.asarray(bits)
        if bits.shape != (self.length,):
            raise ValueError(f"selection vector has shape {bits.shape}, basis length is {self.length}")
        return int(bits.astype(np.int64) @ self.array)


@dataclass(frozen=True)
class SegmentSpec:
    """``unary_bits`` MSBs thermometer-coded, the remaining LSBs binary."""

    unary_bits: int
    binary_bits: int

    @classmethod
    def for_bits(cls, n_bits: int, unary_bits: int) -> SegmentSpec:
        if not 0 <= unary_bits <= n_bits:
            raise ConfigError(f"unary bits must lie in [0, {n_bits}], got {unary_bits}")
        return cls(unary_bits, n_bits - unary_bits)

    @property
    def n_bits(self) -> int:
        return self.unary_bits + self.binary_bits

    @property
    def switch_count(self) -> int:
        return (1 << self.unary_bits) - 1 + self.binary_bits

    @property
    def name(self) -> str:
        return f"{self.unary_bits}T+{self.binary_bits}B"


@dataclass(frozen=True)
class MismatchRealization:
    """One static draw of the per-source current deviations."""

    deltas: np.ndarray
    sigma_delta: float

    def scaled(self, k: float) -> MismatchRealization:
        return MismatchRealization(self.deltas * k, self.sigma_delta * k)


def sample_mismatch(basis: Basis, sigma_delta: float, rng: np.random.Generator,
                    size: int | None = None):
    """Draw independent zero-mean Gaussian deviations, std ``sqrt(B_i) * sigma_delta``.

    With ``size`` given, returns a ``(size, L)`` array of deviations instead of
    a single :class:`MismatchRealization`.
    """
    scale = np.sqrt(basis.array.astype(float)) * sigma_delta
    if size is None:
        return MismatchRealization(rng.standard_normal(basis.length) * scale, sigma_delta)
    return rng.standard_normal((size, basis.length)) * scale


@dataclass(frozen=True, eq=False)
class RepresentationTable:
    """Static codeword -> switch mapping, one selection row per codeword (the LUT)."""

    basis: Basis
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.shape != (self.basis.n_codes, self.basis.length):
            raise ValueError(
                f"mapping shape {bits.shape} does not match "
                f"({self.basis.n_codes}, {self.basis.length})"
            )
        if bits.max(initial=0) > 1:
            raise ValueError("selection vectors must be binary")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_masks(cls, basis: Basis, masks) -> RepresentationTable:
        masks = np.asarray(masks, dtype=np.int64)
        shifts = np.arange(basis.length, dtype=np.int64)
        return cls(basis, ((masks[:, None] >> shifts) & 1).astype(np.uint8))

    @property
    def masks(self) -> np.ndarray:
        if self.basis.length > 62:
            raise ValueError("mask view needs L <= 62")
        return self.bits.astype(np.int64) @ (np.int64(1) << np.arange(self.basis.length, dtype=np.int64))

    def decoded(self) -> np.ndarray:
        return self.bits.astype(np.int64) @ self.basis.array

    def bad_rows(self) -> np.ndarray:
        """Codewords whose row does not decode back to the codeword."""
        return np.flatnonzero(self.decoded() != np.arange(self.basis.n_codes))

    def check(self) -> None:
        bad = self.bad_rows()
        if bad.size:
            x = int(bad[0])
            raise InvariantError(f"row for codeword {x} decodes to {int(self.decoded()[x])}")

    def __eq__(self, other):
        if not isinstance(other, RepresentationTable):
            return NotImplemented
        return self.basis == other.basis and np.array_equal(self.bits, other.bits)

    __hash__ = None


def binary_basis(n_bits: int) -> Basis:
    return Basis(tuple(1 << i for i in range(n_bits)), n_bits)


def thermometer_basis(n_bits: int) -> Basis:
    if n_bits > MAX_THERMOMETER_BITS:
        raise ConfigError(f"thermometer basis limited to {MAX_THERMOMETER_BITS} bits, got {n_bits}")
    return Basis((1,) * ((1 << n_bits) - 1), n_bits)


def segmented_basis(spec: SegmentSpec, n_bits: int) -> Basis:
    """Binary LSB weights followed by ``2^M - 1`` unary MSB cells."""
    if spec.n_bits != n_bits:
        raise ConfigError(f"segment spec {spec.name} is not a {n_bits}-bit split")
    if spec.unary_bits > MAX_THERMOMETER_BITS:
        raise ConfigError(f"thermometer segment limited to {MAX_THERMOMETER_BITS} bits")
    lsb = tuple(1 << i for i in range(spec.binary_bits))
    msb = (1 << spec.binary_bits,) * ((1 << spec.unary_bits) - 1)
    return Basis(lsb + msb, n_bits)


def canonical_mapping(basis: Basis, kind: str, spec: SegmentSpec | None = None) -> RepresentationTable:
    """Direct-drive mapping for the classic architectures.

    Thermometer cells (including the unary part of a segmented basis) switch
    on in ascending index order.
    """
    n = basis.n_bits
    x = np.arange(basis.n_codes, dtype=np.int64)
    if kind == "binary":
        if basis != binary_basis(n):
            raise ConfigError("binary mapping needs the binary basis")
        spec = SegmentSpec(0, n)
    elif kind == "thermometer":
        if basis != thermometer_basis(n):
            raise ConfigError("thermometer mapping needs the thermometer basis")
        spec = SegmentSpec(n, 0)
    elif kind == "segmented":
        if spec is None:
            spec = _infer_segments(basis)
        if basis != segmented_basis(spec, n):
            raise ConfigError(f"basis does not match segmentation {spec.name}")
    else:
        raise ConfigError(f"unknown architecture kind {kind!r}")

    b = spec.binary_bits
    lsb = (x[:, None] >> np.arange(b)) & 1
    units = x >> b
    msb = (np.arange((1 << spec.unary_bits) - 1)[None, :] < units[:, None])
    table = RepresentationTable(basis, np.hstack([lsb, msb]).astype(np.uint8))
    table.check()
    return table


def _infer_segments(basis: Basis) -> SegmentSpec:
    for m in range(basis.n_bits + 1):
        spec = SegmentSpec.for_bits(basis.n_bits, m)
        if spec.switch_count == basis.length:
            return spec
    raise ConfigError(f"basis of length {basis.length} is not a segmented {basis.n_bits}-bit basis")


def dac_output(w, basis: Basis, delta: MismatchRealization) -> float:
    """Output current ``sum_i w_i * (B_i + delta_i)``."""
    w = np.asarray(w, dtype=float)
    if w.shape != (basis.length,) or delta.deltas.shape != (basis.length,):
        raise ValueError("selection vector, basis and mismatch must have equal length")
    return float(w @ (basis.array + delta.deltas))


# ---------------------------------------------------------------------------
# basis file format
# ---------------------------------------------------------------------------

def dump_basis(basis: Basis) -> str:
    return f"n_bits: {basis.n_bits}\nweights: [{', '.join(str(w) for w in basis.weights)}]\n"


def parse_basis(text: str, source: str = "<basis>") -> Basis:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"{source}: malformed basis file ({getattr(exc, 'problem', exc)})", line) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: expected a mapping with n_bits and weights", 1)
    lines = {key: i + 1 for i, raw in enumerate(text.splitlines())
             for key in ("n_bits", "weights") if raw.lstrip().startswith(key)}
    unknown = set(data) - {"n_bits", "weights"}
    if unknown:
        raise ConfigError(f"{source}: unknown field(s) {sorted(unknown)}", 1)
    for key in ("n_bits", "weights"):
        if key not in data:
            raise ConfigError(f"{source}: missing field {key!r}", 1)
    n_bits, weights = data["n_bits"], data["weights"]
    if not isinstance(n_bits, int) or isinstance(n_bits, bool):
        raise ConfigError(f"{source}: n_bits must be an integer", lines.get("n_bits"))
    if not isinstance(weights, list) or not all(isinstance(w, int) and not isinstance(w, bool) for w in weights):
        raise ConfigError(f"{source}: weights must be a list of integers", lines.get("weights"))
    try:
        return Basis(tuple(weights), n_bits)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}", lines.get("weights")) from None


def save_basis(basis: Basis, path) -> None:
    Path(path).write_text(dump_basis(basis))


def load_basis(path) -> Basis:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read basis file {path}: {exc.strerror}") from None
    return parse_basis(text, str(path))
