"""Mapping and basis search.

Coordinate descent picks one representation per codeword for a fixed basis;
simulated annealing searches over bases, scoring each candidate with a
budgeted descent.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .metric import DEFAULT_SIGMA_DELTA, InputPmf, mismatch_mse
from .model import Basis, ConfigError, IncompleteBasisError, InvariantError, RepresentationTable, binary_basis
from .repset import RepresentationIndex, enumerate_all, is_complete, require_complete
from .seeding import generator

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DescentConfig:
    max_sweeps: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ConfigError(f"max_sweeps must be >= 1, got {self.max_sweeps}")


@dataclass(frozen=True)
class AnnealConfig:
    """Simulated annealing schedule.

    ``initial_temperature=None`` calibrates T0 so that about
    ``target_acceptance`` of uphill moves are accepted at the start;
    ``min_temperature=None`` stops at ``min_temperature_ratio * T0``.
    Moves change one weight by a geometric(``step_p``) step of random sign.
    """

    restarts: int = 100
    initial_temperature: float | None = None
    cooling_factor: float = 0.95
    steps_per_temperature: int = 50
    min_temperature: float | None = None
    min_temperature_ratio: float = 1e-4
    target_acceptance: float = 0.8
    calibration_moves: int = 40
    step_p: float = 0.25
    init_moves: int = 20
    inner_descent: DescentConfig = DescentConfig(max_sweeps=10)
    polish_sweeps: int = 1000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.steps_per_temperature < 1 or self.workers < 1:
            raise ConfigError("restarts, steps_per_temperature and workers must be positive")
        if not 0.0 < self.cooling_factor < 1.0:
            raise ConfigError(f"cooling_factor must lie in (0, 1), got {self.cooling_factor}")
        if not 0.0 < self.step_p <= 1.0 or not 0.0 < self.target_acceptance < 1.0:
            raise ConfigError("step_p must lie in (0, 1] and target_acceptance in (0, 1)")
        for name in ("initial_temperature", "min_temperature"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError(f"{name} must be positive")


@dataclass
class OptimizationTrace:
    """Objective history of one search.

    For descent, ``values[0]`` is the random start and ``values[k]`` the
    objective after sweep k. For annealing, one entry per temperature level
    holds the best energy found so far.
    """

    values: list[float] = field(default_factory=list)
    changes: list[int] = field(default_factory=list)
    temperatures: list[float] = field(default_factory=list)
    accepted: int = 0
    rejected: int = 0
    infeasible: int = 0
    final_means: np.ndarray | None = field(default=None, repr=False)

    @property
    def final(self) -> float:
        return self.values[-1]


def _tolerance(basis: Basis) -> float:
    return 1e-12 * max(1.0, float(sum(basis.weights)))


def random_choice(index: RepresentationIndex, rng: np.random.Generator) -> np.ndarray:
    """Index into ``index.masks`` of a uniformly random member of each R(x)."""
    counts = index.counts
    if np.any(counts == 0):
        raise IncompleteBasisError(f"basis {list(index.basis.weights)} is incomplete")
    return index.offsets[:-1] + rng.integers(0, counts)


def choice_from_table(index: RepresentationIndex, table: RepresentationTable) -> np.ndarray:
    choice = index.locate(table.masks)
    bad = np.flatnonzero(choice < 0)
    if bad.size:
        raise InvariantError(f"row for codeword {int(bad[0])} is not a representation of it")
    return choice


def descend_representations(basis: Basis, pmf: InputPmf, cfg: DescentConfig = DescentConfig(),
                            index: RepresentationIndex | None = None,
                            initial: RepresentationTable | None = None,
                            rng: np.random.Generator | None = None):
    """Coordinate descent over the representation of each codeword.

    Starting from a random representation per codeword (or ``initial``), each
    sweep visits codewords in ascending order and swaps in the member of R(y)
    that minimizes the metric with every other row held fixed. An incumbent
    is only replaced on strict improvement; among equal challengers the
    lowest mask wins. Stops after ``cfg.max_sweeps`` or a sweep with no change.

    Returns:
        ``(table, trace)``.
    """
    require_complete(basis)
    if pmf.probs.size != basis.n_codes:
        raise ValueError("pmf and basis disagree on the number of codewords")
    if index is None:
        index = enumerate_all(basis)
    if initial is not None:
        choice = choice_from_table(index, initial)
    else:
        if rng is None:
            rng = generator(cfg.seed, "descent-init")
        choice = random_choice(index, rng)
    choice, means, values, changes = _kernels.descend(
        np.asarray(basis.weights, dtype=np.float64), pmf.probs, index.offsets, index.masks,
        choice, cfg.max_sweeps, _tolerance(basis),
    )
    table = RepresentationTable.from_masks(basis, index.masks[choice])
    trace = OptimizationTrace(values=values.tolist(), changes=changes.tolist(), final_means=means)
    trace.accepted = int(changes.sum())
    return table, trace


def descend_multistart(basis: Basis, pmf: InputPmf, cfg: DescentConfig = DescentConfig(),
                       restarts: int = 20, index: RepresentationIndex | None = None):
    """Best of ``restarts`` independently seeded descents, ties to the lowest restart."""
    if index is None:
        require_complete(basis)
        index = enumerate_all(basis)
    best = None
    for k in range(restarts):
        table, trace = descend_representations(
            basis, pmf, cfg, index=index, rng=generator(cfg.seed, "descent-init", k))
        if best is None or trace.final < best[1].final:
            best = (table, trace)
    return best


# ---------------------------------------------------------------------------
# simulated annealing over bases
# ---------------------------------------------------------------------------

@dataclass
class _State:
    weights: tuple[int, ...]
    energy: float
    masks: np.ndarray


class _Chain:
    """One annealing chain; owns its generator.

    Weights keep their positions while the chain runs, so the previous
    mapping stays meaningful after a move: rows that still decode are kept
    and only rows that used the moved switch are re-drawn at random before
    the budgeted descent.
    """

    def __init__(self, n_bits: int, length: int, pmf: InputPmf, cfg: AnnealConfig, chain: int):
        self.n_bits = n_bits
        self.length = length
        self.pmf = pmf
        self.cfg = cfg
        self.rng = generator(cfg.seed, "anneal-chain", chain)
        self.hi = (1 << n_bits) - 1

    def evaluate(self, weights: tuple[int, ...], warm: np.ndarray | None = None) -> _State:
        basis = Basis(weights, self.n_bits)
        index = enumerate_all(basis)
        choice = random_choice(index, self.rng)
        if warm is not None:
            kept = index.locate(warm)
            choice = np.where(kept >= 0, kept, choice)
        choice, _, values, _ = _kernels.descend(
            np.asarray(weights, dtype=np.float64), self.pmf.probs, index.offsets, index.masks,
            choice, self.cfg.inner_descent.max_sweeps, _tolerance(basis),
        )
        return _State(weights, float(values[-1]), index.masks[choice])

    def propose(self, weights: tuple[int, ...]) -> tuple[int, ...] | None:
        i = int(self.rng.integers(self.length))
        step = int(self.rng.geometric(self.cfg.step_p))
        sign = 1 if self.rng.random() < 0.5 else -1
        new = min(max(weights[i] + sign * step, 1), self.hi)
        if new == weights[i]:
            return None
        out = weights[:i] + (new,) + weights[i + 1:]
        if not is_complete(Basis(out, self.n_bits)):
            return None
        return out

    def initial_weights(self) -> tuple[int, ...]:
        top = max(1, 1 << max(self.n_bits - 2, 0))
        extra = self.rng.integers(1, top + 1, size=self.length - self.n_bits)
        weights = binary_basis(self.n_bits).weights + tuple(int(w) for w in extra)
        for _ in range(self.cfg.init_moves):
            moved = self.propose(weights)
            if moved is not None:
                weights = moved
        return weights

    def calibrate(self, state: _State) -> float:
        uphill = []
        for _ in range(self.cfg.calibration_moves):
            moved = self.propose(state.weights)
            if moved is None:
                continue
            delta = self.evaluate(moved, state.masks).energy - state.energy
            if delta > 0:
                uphill.append(delta)
        if not uphill:
            return max(1e-3 * state.energy, 1e-9)
        return -float(np.mean(uphill)) / math.log(self.cfg.target_acceptance)

    def run(self) -> tuple[_State, OptimizationTrace]:
        cfg = self.cfg
        current = self.evaluate(self.initial_weights())
        best = current
        t0 = cfg.initial_temperature or self.calibrate(current)
        t_min = cfg.min_temperature or cfg.min_temperature_ratio * t0
        trace = OptimizationTrace()
        temperature = t0
        while temperature >= t_min:
            for _ in range(cfg.steps_per_temperature):
                moved = self.propose(current.weights)
                if moved is None:
                    trace.infeasible += 1
                    trace.rejected += 1
                    continue
                cand = self.evaluate(moved, current.masks)
                delta = cand.energy - current.energy
                if delta <= 0 or self.rng.random() < math.exp(-delta / temperature):
                    current = cand
                    trace.accepted += 1
                    if current.energy < best.energy:
                        best = current
                else:
                    trace.rejected += 1
            trace.temperatures.append(temperature)
            trace.values.append(best.energy)
            temperature *= cfg.cooling_factor
        if not is_complete(Basis(best.weights, self.n_bits)):
            raise InvariantError(f"annealing produced incomplete basis {list(best.weights)}")
        return best, trace


def _run_chain(args):
    n_bits, length, pmf, cfg, chain = args
    best, trace = _Chain(n_bits, length, pmf, cfg, chain).run()
    # report the basis ascending, permuting mapping columns to match
    order = np.argsort(best.weights, kind="stable")
    basis = Basis(tuple(best.weights[i] for i in order), n_bits)
    bits = ((best.masks[:, None] >> np.arange(length)) & 1)[:, order]
    return best.energy, chain, basis, RepresentationTable(basis, bits), trace


def anneal_basis(n_bits: int, length: int, pmf: InputPmf, cfg: AnnealConfig = AnnealConfig()):
    """Search for the length-L basis with the lowest descended metric.

    Runs ``cfg.restarts`` independent chains and keeps the lowest energy
    (ties to the lower chain index), then re-polishes its mapping with a
    full-length descent.

    Returns:
        ``(basis, table, trace)`` with the basis in ascending weight order;
        ``trace`` is the winning chain's trace.
    """
    from .repset import MAX_ENUM_LENGTH, CapacityError

    if length < n_bits:
        raise IncompleteBasisError(f"no complete basis of length {length} exists for {n_bits} bits")
    if length > MAX_ENUM_LENGTH:
        raise CapacityError(f"basis length {length} exceeds the enumeration limit of {MAX_ENUM_LENGTH}")
    jobs = [(n_bits, length, pmf, cfg, k) for k in range(cfg.restarts)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_chain, jobs))
    else:
        results = [_run_chain(job) for job in jobs]
    for energy, chain, *_ in results:
        log.debug("chain %d best energy %.6f", chain, energy)
    energy, chain, basis, table, trace = min(results, key=lambda r: (r[0], r[1]))
    polish = replace(cfg.inner_descent, max_sweeps=cfg.polish_sweeps)
    table, polish_trace = descend_representations(basis, pmf, polish, initial=table)
    trace.values.append(polish_trace.final)
    trace.final_means = polish_trace.final_means
    return basis, table, trace


@dataclass(frozen=True)
class ArchReport:
    """One architecture's figures of merit; SNDR fields stay ``None`` until simulated."""

    name: str
    switches: int
    raw: float
    normalized: float
    mean_sndr_db: float | None = None
    yield_sndr_db: float | None = None


def evaluate_architecture(name: str, basis: Basis, mapping: RepresentationTable, pmf: InputPmf,
                          sigma_delta: float = DEFAULT_SIGMA_DELTA) -> ArchReport:
    mapping.check()
    value = mismatch_mse(mapping, pmf, sigma_delta)
    return ArchReport(name, basis.length, value.raw, value.normalized)
