"""Metropolis Monte Carlo of a photon gas exchanging quanta with a heat
bath at zero chemical potential.

Every radiation mode holds an integer number of entities of energy
:math:`\\varepsilon(\\nu)` given by the quantum hypothesis. One step picks a
mode uniformly, proposes :math:`\\Delta n = \\pm 1` with equal probability
and accepts with :math:`\\min(1, e^{-\\Delta n\\,\\varepsilon/kT})`; moves
below :math:`n = 0` are rejected. A sweep consists of as many steps as
there are modes.

The random numbers come from a :py:class:`numpy.random.Generator` owned by
the state, the inner loop runs in a :py:func:`numba.njit` kernel.

"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np
from numba import njit

from photon_lab.constants import BOLTZMANN
from photon_lab.constants import PLANCK
from photon_lab.errors import DomainError
from photon_lab.numerics import GENERATOR_NAME
from photon_lab.numerics import random_stream
from photon_lab.numerics import spawn_streams
from photon_lab.photon_statistics import QuantumHypothesis
from photon_lab.runtime_choice import WORKER_THREADS
from photon_lab.spectral_laws import Spectrum
from photon_lab.spectral_laws import mode_density

_logger = logging.getLogger(__name__)

#: number of batches for the batch means error estimate
DEFAULT_BATCHES = 20

#: sweeps whose random numbers are drawn at once
SWEEPS_PER_BLOCK = 4096

#: occupation levels tracked by the transition counters, higher levels
#: share the last bin
TRACKED_LEVELS = 128


def _copy_generator(rng: np.random.Generator) -> np.random.Generator:
    clone = np.random.Generator(np.random.PCG64())
    clone.bit_generator.state = rng.bit_generator.state
    return clone


@dataclass(frozen=True)
class ModeGasState:
    """Occupancies of a set of modes in contact with a bath.

    ``degeneracy`` is the number of physical modes represented by each
    entry, ``proposals`` counts the Metropolis proposals made so far.

    """

    frequencies: np.ndarray
    degeneracy: np.ndarray
    occupancy: np.ndarray
    temperature: float
    hypothesis: QuantumHypothesis
    seed: int
    proposals: int = 0
    rng: np.random.Generator = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        if not self.temperature > 0:
            raise DomainError(
                "the bath temperature must be positive, got "
                f"{self.temperature}"
            )
        if np.any(self.occupancy < 0):
            raise ValueError("occupancies must be non-negative")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("mode frequencies must be strictly increasing")
        if np.any(self.frequencies <= 0):
            raise DomainError("mode frequencies must be positive")
        if self.hypothesis.classical_limit:
            raise ValueError(
                "the equipartition hypothesis has no discrete quanta to "
                "exchange"
            )
        if self.rng is None:
            object.__setattr__(self, "rng", random_stream(self.seed))

    @staticmethod
    def create(
        frequencies: Sequence[float],
        temperature: float,
        hypothesis: QuantumHypothesis,
        seed: int,
        rng: Optional[np.random.Generator] = None,
    ) -> "ModeGasState":
        """Creates an empty gas (all occupancies 0)."""
        nu = np.asarray(frequencies, dtype=float)
        return ModeGasState(
            frequencies=nu,
            degeneracy=np.full(
                len(nu), hypothesis.mode_multiplicity, dtype=np.int64
            ),
            occupancy=np.zeros(len(nu), dtype=np.int64),
            temperature=temperature,
            hypothesis=hypothesis,
            seed=seed,
            rng=rng,
        )

    @property
    def mode_count(self) -> int:
        return len(self.frequencies)

    @property
    def sweep_counter(self) -> int:
        if self.mode_count == 0:
            return 0
        return self.proposals // self.mode_count

    def entity_energies(self) -> np.ndarray:
        return self.hypothesis.entity_energy(self.frequencies)

    def reduced_energies(self) -> np.ndarray:
        """:math:`\\varepsilon/kT` per mode"""
        return self.entity_energies() / (BOLTZMANN * self.temperature)


def log_spaced_modes(
    temperature: float,
    hypothesis: QuantumHypothesis,
    reduced_min: float,
    reduced_max: float,
    count: int,
) -> np.ndarray:
    """Frequencies whose entity energies :math:`\\varepsilon/kT` are
    log-spaced on ``[reduced_min, reduced_max]``.

    """
    reduced = np.geomspace(reduced_min, reduced_max, count)
    return (
        reduced
        * BOLTZMANN
        * temperature
        / (hypothesis.entity_energy.value * PLANCK)
    )


def step(state: ModeGasState) -> ModeGasState:
    """Performs a single Metropolis proposal and returns the new state.

    ``state`` itself is left untouched, including its generator.

    """
    if state.mode_count == 0:
        return replace(state, proposals=state.proposals + 1)
    rng = _copy_generator(state.rng)
    mode = int(rng.integers(0, state.mode_count))
    delta = 1 if rng.integers(0, 2) == 1 else -1
    uniform = rng.random()

    occupancy = state.occupancy.copy()
    target = occupancy[mode] + delta
    if target >= 0:
        if delta < 0 or uniform < math.exp(-state.reduced_energies()[mode]):
            occupancy[mode] = target
    return replace(
        state, occupancy=occupancy, proposals=state.proposals + 1, rng=rng
    )


@njit(nogil=True, cache=True)
def _metropolis_block(
    occupancy,
    boltzmann_factors,
    modes,
    directions,
    uniforms,
    first_sweep,
    burn_in,
    batch_size,
    batch_sums,
    up_proposed,
    up_accepted,
    down_proposed,
    down_accepted,
    visits,
):
    n_modes = occupancy.shape[0]
    n_batches = batch_sums.shape[0]
    top = visits.shape[1] - 1
    n_sweeps = modes.shape[0] // n_modes
    for s in range(n_sweeps):
        sweep = first_sweep + s
        measuring = sweep >= burn_in
        for j in range(n_modes):
            k = s * n_modes + j
            mode = modes[k]
            n = occupancy[mode]
            level = min(n, top)
            if directions[k] == 1:
                if measuring:
                    up_proposed[mode, level] += 1
                if uniforms[k] < boltzmann_factors[mode]:
                    occupancy[mode] = n + 1
                    if measuring:
                        up_accepted[mode, level] += 1
            else:
                if measuring:
                    down_proposed[mode, level] += 1
                if n > 0:
                    occupancy[mode] = n - 1
                    if measuring:
                        down_accepted[mode, level] += 1
        if measuring:
            batch = (sweep - burn_in) // batch_size
            if batch < n_batches:
                for i in range(n_modes):
                    batch_sums[batch, i] += occupancy[i]
                    visits[i, min(occupancy[i], top)] += 1


@dataclass(frozen=True)
class TransitionCounts:
    """Per-mode, per-level counts of the measured proposals.

    Index ``[i, n]`` refers to moves of mode ``i`` starting at level ``n``;
    ``visits[i, n]`` counts the measured sweeps ending with mode ``i`` at
    level ``n``.

    """

    up_proposed: np.ndarray
    up_accepted: np.ndarray
    down_proposed: np.ndarray
    down_accepted: np.ndarray
    visits: np.ndarray

    def up_acceptance(self, mode: int, level: int) -> float:
        return self.up_accepted[mode, level] / self.up_proposed[mode, level]

    def down_acceptance(self, mode: int, level: int) -> float:
        return (
            self.down_accepted[mode, level] / self.down_proposed[mode, level]
        )

    def merged(self, other: "TransitionCounts") -> "TransitionCounts":
        return TransitionCounts(
            up_proposed=self.up_proposed + other.up_proposed,
            up_accepted=self.up_accepted + other.up_accepted,
            down_proposed=self.down_proposed + other.down_proposed,
            down_accepted=self.down_accepted + other.down_accepted,
            visits=self.visits + other.visits,
        )


@dataclass(frozen=True)
class OccupancyStatistics:
    """Per-mode mean occupancy and its batch means standard error."""

    mean: np.ndarray
    stderr: np.ndarray
    sweeps: int
    burn_in: int
    batches: int
    seed: int
    generator: str
    transitions: TransitionCounts
    final_state: ModeGasState = field(repr=False)
    chains: int = 1


def run(
    state: ModeGasState,
    sweeps: int,
    burn_in: int,
    batches: int = DEFAULT_BATCHES,
) -> OccupancyStatistics:
    """Runs ``sweeps`` sweeps of which the first ``burn_in`` are discarded.

    The occupancies after every measured sweep are averaged in ``batches``
    consecutive batches of equal length; sweeps that do not fill a batch
    are simulated but not measured. The generator of ``state`` is copied,
    so that repeated runs from the same state are identical.

    """
    if not sweeps > burn_in >= 0:
        raise ValueError(
            f"need sweeps > burn_in >= 0, got sweeps={sweeps}, "
            f"burn_in={burn_in}"
        )
    if batches < 2:
        raise ValueError(f"need at least 2 batches, got {batches}")
    batch_size = (sweeps - burn_in) // batches
    if batch_size < 1:
        raise ValueError(
            f"{sweeps - burn_in} measured sweeps cannot fill {batches} batches"
        )

    n_modes = state.mode_count
    rng = _copy_generator(state.rng)
    occupancy = state.occupancy.astype(np.int64).copy()
    boltzmann_factors = np.exp(-state.reduced_energies())
    batch_sums = np.zeros((batches, n_modes), dtype=np.float64)
    counters = [
        np.zeros((n_modes, TRACKED_LEVELS), dtype=np.int64) for _ in range(5)
    ]

    done = 0
    while n_modes and done < sweeps:
        block = min(SWEEPS_PER_BLOCK, sweeps - done)
        draws = block * n_modes
        modes = rng.integers(0, n_modes, size=draws, dtype=np.int64)
        directions = rng.integers(0, 2, size=draws, dtype=np.int64)
        uniforms = rng.random(draws)
        _metropolis_block(
            occupancy,
            boltzmann_factors,
            modes,
            directions,
            uniforms,
            done,
            burn_in,
            batch_size,
            batch_sums,
            *counters,
        )
        done += block
    _logger.debug(
        "ran %d sweeps over %d modes (seed %d)", sweeps, n_modes, state.seed
    )

    batch_means = batch_sums / batch_size
    mean = batch_means.mean(axis=0)
    stderr = batch_means.std(axis=0, ddof=1) / math.sqrt(batches)
    final_state = replace(
        state,
        occupancy=occupancy,
        proposals=state.proposals + sweeps * n_modes,
        rng=rng,
    )
    return OccupancyStatistics(
        mean=mean,
        stderr=stderr,
        sweeps=sweeps,
        burn_in=burn_in,
        batches=batches,
        seed=state.seed,
        generator=GENERATOR_NAME,
        transitions=TransitionCounts(*counters),
        final_state=final_state,
    )


def merge_statistics(
    results: Sequence[OccupancyStatistics],
) -> OccupancyStatistics:
    """Combines equally long independent chains in the given order."""
    if not results:
        raise ValueError("no chains to merge")
    first = results[0]
    n_chains = len(results)
    mean = sum(r.mean for r in results) / n_chains
    stderr = np.sqrt(sum(r.stderr**2 for r in results)) / n_chains
    transitions = first.transitions
    for r in results[1:]:
        transitions = transitions.merged(r.transitions)
    return replace(
        first,
        mean=mean,
        stderr=stderr,
        transitions=transitions,
        chains=n_chains,
    )


def run_chains(
    frequencies: Sequence[float],
    temperature: float,
    hypothesis: QuantumHypothesis,
    seed: int,
    chains: int,
    sweeps: int,
    burn_in: int,
    batches: int = DEFAULT_BATCHES,
) -> OccupancyStatistics:
    """Runs ``chains`` independent chains with streams spawned from
    ``seed`` on :py:const:`~photon_lab.runtime_choice.WORKER_THREADS`
    threads and merges them.

    """
    if chains < 1:
        raise ValueError(f"need at least one chain, got {chains}")
    states: List[ModeGasState] = [
        ModeGasState.create(frequencies, temperature, hypothesis, seed, rng)
        for rng in spawn_streams(seed, chains)
    ]
    with ThreadPoolExecutor(max_workers=WORKER_THREADS) as pool:
        results = list(
            pool.map(lambda s: run(s, sweeps, burn_in, batches), states)
        )
    return merge_statistics(results)


def spectrum_estimate(
    stats: OccupancyStatistics, state: ModeGasState
) -> Spectrum:
    """Spectral energy density :math:`\\rho(\\nu)\\,\\varepsilon\\,\\bar{n}`
    from the measured occupancies, with propagated standard errors.

    """
    hyp = state.hypothesis
    nu = state.frequencies
    weight = hyp.density(nu) * state.entity_energies()
    values = weight * stats.mean
    if hyp.zero_point_offset:
        values = values + mode_density(nu) * (PLANCK * nu / 2)
    return Spectrum(
        frequencies=nu,
        values=values,
        temperature=state.temperature,
        law=f"mc-{hyp.law_variant.value}",
        errors=weight * stats.stderr,
    )
