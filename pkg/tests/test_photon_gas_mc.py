"""Tests of the Metropolis photon gas: single step rules, convergence to
the Bose-Einstein occupancy, detailed balance and reproducibility.

The statistical assertions use fixed seeds and bounds of 4 or more
standard errors.

"""

import math

import numpy as np
import pytest

from photon_lab.errors import DomainError
from photon_lab.photon_gas_mc import ModeGasState
from photon_lab.photon_gas_mc import TRACKED_LEVELS
from photon_lab.photon_gas_mc import log_spaced_modes
from photon_lab.photon_gas_mc import run
from photon_lab.photon_gas_mc import run_chains
from photon_lab.photon_gas_mc import spectrum_estimate
from photon_lab.photon_gas_mc import step
from photon_lab.photon_statistics import QuantumHypothesis
from photon_lab.photon_statistics import compose_law
from photon_lab.photon_statistics import mean_occupancy
from photon_lab.spectral_laws import LawVariant
from photon_lab.spectral_laws import SpectralLaw
from photon_lab.spectral_laws import evaluate

TEMPERATURE = 1000.0
PLANCK_HYP = QuantumHypothesis.planck()


def _single_mode(reduced: float, seed: int = 11, hyp=PLANCK_HYP):
    freqs = log_spaced_modes(TEMPERATURE, hyp, reduced, reduced, 1)
    return ModeGasState.create(freqs, TEMPERATURE, hyp, seed)


def test_log_spaced_modes_reduced_energies():
    hyp = QuantumHypothesis.half_quantum()
    freqs = log_spaced_modes(TEMPERATURE, hyp, 0.1, 10.0, 5)
    state = ModeGasState.create(freqs, TEMPERATURE, hyp, seed=1)
    np.testing.assert_allclose(
        state.reduced_energies(), np.geomspace(0.1, 10.0, 5), rtol=1e-14
    )


def test_create_starts_empty():
    state = _single_mode(1.0)
    assert state.occupancy.tolist() == [0]
    assert state.proposals == 0
    assert state.degeneracy.tolist() == [2]


def test_state_validation():
    freqs = [1e13, 2e13]
    with pytest.raises(DomainError):
        ModeGasState.create(freqs, 0.0, PLANCK_HYP, seed=1)
    with pytest.raises(ValueError):
        ModeGasState.create([2e13, 1e13], TEMPERATURE, PLANCK_HYP, seed=1)
    with pytest.raises(ValueError):
        ModeGasState.create(
            freqs, TEMPERATURE, QuantumHypothesis.equipartition(), seed=1
        )


def test_step_never_goes_below_zero():
    state = _single_mode(0.5)
    for _ in range(500):
        new = step(state)
        assert new.occupancy[0] >= 0
        assert abs(int(new.occupancy[0]) - int(state.occupancy[0])) <= 1
        assert new.proposals == state.proposals + 1
        state = new


def test_step_leaves_input_untouched():
    state = _single_mode(0.5)
    first = step(state)
    again = step(state)
    assert np.array_equal(first.occupancy, again.occupancy)
    assert state.proposals == 0
    assert state.occupancy[0] == 0


def test_step_without_modes():
    state = ModeGasState.create([], TEMPERATURE, PLANCK_HYP, seed=1)
    assert step(state).proposals == 1


def test_frozen_mode_stays_empty():
    stats = run(_single_mode(50.0), sweeps=20_000, burn_in=1_000)
    assert stats.mean[0] == 0.0
    assert stats.stderr[0] == 0.0


def test_upward_acceptance_is_boltzmann_factor():
    stats = run(_single_mode(1.0), sweeps=200_000, burn_in=1_000)
    acceptance = stats.transitions.up_acceptance(0, 0)
    assert acceptance == pytest.approx(math.exp(-1.0), abs=0.01)
    assert stats.transitions.down_acceptance(0, 1) == 1.0


def test_single_mode_occupancy():
    """The mean occupancy at :math:`\\varepsilon = kT` converges to
    :math:`1/(e - 1)`.

    """
    stats = run(_single_mode(1.0), sweeps=200_000, burn_in=1_000)
    expected = 0.581976706869326
    assert stats.stderr[0] > 0
    assert abs(stats.mean[0] - expected) <= 4 * stats.stderr[0]
    assert stats.mean[0] == pytest.approx(expected, abs=0.02)


def test_flows_balance_between_levels():
    """Every accepted move from n to n+1 is matched by one from n+1 back
    to n, up to the move still in flight at the end.

    """
    stats = run(_single_mode(0.3), sweeps=100_000, burn_in=0)
    up = stats.transitions.up_accepted[0]
    down = stats.transitions.down_accepted[0]
    for level in range(TRACKED_LEVELS - 2):
        assert abs(int(up[level]) - int(down[level + 1])) <= 1


def test_visits_follow_boltzmann_ratios():
    stats = run(_single_mode(1.0), sweeps=200_000, burn_in=1_000)
    visits = stats.transitions.visits[0].astype(float)
    assert visits[1] / visits[0] == pytest.approx(math.exp(-1.0), rel=0.05)
    assert visits[2] / visits[1] == pytest.approx(math.exp(-1.0), rel=0.1)


def test_run_is_reproducible():
    state = _single_mode(1.0, seed=5)
    first = run(state, sweeps=5_000, burn_in=100)
    second = run(state, sweeps=5_000, burn_in=100)
    assert np.array_equal(first.mean, second.mean)
    assert np.array_equal(
        first.final_state.occupancy, second.final_state.occupancy
    )
    other = run(_single_mode(1.0, seed=6), sweeps=5_000, burn_in=100)
    assert not np.array_equal(first.mean, other.mean)


def test_run_metadata():
    stats = run(_single_mode(1.0, seed=9), sweeps=2_000, burn_in=100)
    assert stats.seed == 9
    assert stats.generator == "PCG64"
    assert stats.batches == 20
    assert stats.final_state.proposals == 2_000
    assert stats.final_state.sweep_counter == 2_000


@pytest.mark.parametrize(
    "sweeps,burn_in,batches",
    [(100, 100, 20), (50, 100, 20), (100, 10, 1), (30, 20, 20)],
)
def test_run_argument_validation(sweeps, burn_in, batches):
    with pytest.raises(ValueError):
        run(_single_mode(1.0), sweeps=sweeps, burn_in=burn_in, batches=batches)


def test_empty_mode_set():
    state = ModeGasState.create([], TEMPERATURE, PLANCK_HYP, seed=1)
    stats = run(state, sweeps=100, burn_in=10)
    estimate = spectrum_estimate(stats, state)
    assert len(estimate) == 0


@pytest.mark.slow
def test_mode_family_matches_bose_einstein():
    """30 modes with :math:`\\varepsilon/kT` log-spaced on [0.1, 5]."""
    freqs = log_spaced_modes(TEMPERATURE, PLANCK_HYP, 0.1, 5.0, 30)
    state = ModeGasState.create(freqs, TEMPERATURE, PLANCK_HYP, seed=2024)
    stats = run(state, sweeps=400_000, burn_in=5_000, batches=40)
    expected = mean_occupancy(state.entity_energies(), TEMPERATURE)
    tolerance = np.maximum(5 * stats.stderr, 1e-12)
    assert np.all(np.abs(stats.mean - expected) <= tolerance)


@pytest.mark.slow
def test_spectrum_estimate_half_quantum():
    hyp = QuantumHypothesis.half_quantum()
    freqs = log_spaced_modes(TEMPERATURE, hyp, 0.5, 4.0, 4)
    state = ModeGasState.create(freqs, TEMPERATURE, hyp, seed=77)
    stats = run(state, sweeps=200_000, burn_in=2_000, batches=40)
    estimate = spectrum_estimate(stats, state)
    exact = evaluate(compose_law(hyp), freqs, TEMPERATURE)
    assert estimate.law == "mc-half-quantum"
    assert np.all(np.abs(estimate.values - exact) <= 5 * estimate.errors)


@pytest.mark.slow
def test_half_quantum_gas_matches_bose_einstein():
    """30 modes with :math:`h\\nu/2kT` log-spaced on [0.1, 5], every
    occupancy and every spectral value within three standard errors.

    """
    hyp = QuantumHypothesis.half_quantum()
    freqs = log_spaced_modes(TEMPERATURE, hyp, 0.1, 5.0, 30)
    state = ModeGasState.create(freqs, TEMPERATURE, hyp, seed=20240601)
    stats = run(state, sweeps=1_000_000, burn_in=10_000, batches=100)
    expected = mean_occupancy(state.entity_energies(), TEMPERATURE)
    assert np.all(np.abs(stats.mean - expected) <= 3 * stats.stderr)
    estimate = spectrum_estimate(stats, state)
    exact = evaluate(SpectralLaw(LawVariant.HALF_QUANTUM), freqs, TEMPERATURE)
    assert np.all(np.abs(estimate.values - exact) <= 3 * estimate.errors)


@pytest.mark.slow
def test_pair_spectrum_estimate_matches_planck():
    hyp = QuantumHypothesis.photon_pair()
    freqs = log_spaced_modes(TEMPERATURE, hyp, 0.3, 4.0, 5)
    state = ModeGasState.create(freqs, TEMPERATURE, hyp, seed=5)
    stats = run(state, sweeps=400_000, burn_in=5_000, batches=50)
    estimate = spectrum_estimate(stats, state)
    planck = evaluate(SpectralLaw(LawVariant.PLANCK), freqs, TEMPERATURE)
    assert estimate.law == "mc-pair-planck"
    assert np.all(estimate.errors > 0)
    assert np.all(np.abs(estimate.values - planck) <= 3 * estimate.errors)


@pytest.mark.slow
def test_chains_are_merged_and_reproducible():
    freqs = log_spaced_modes(TEMPERATURE, PLANCK_HYP, 0.5, 2.0, 3)
    kwargs = {"seed": 3, "chains": 4, "sweeps": 50_000, "burn_in": 1_000}
    first = run_chains(freqs, TEMPERATURE, PLANCK_HYP, **kwargs)
    second = run_chains(freqs, TEMPERATURE, PLANCK_HYP, **kwargs)
    assert first.chains == 4
    assert np.array_equal(first.mean, second.mean)
    expected = mean_occupancy(
        first.final_state.entity_energies(), TEMPERATURE
    )
    assert np.all(np.abs(first.mean - expected) <= 5 * first.stderr)


def test_chains_need_at_least_one():
    with pytest.raises(ValueError):
        run_chains([1e13], TEMPERATURE, PLANCK_HYP, 1, 0, 100, 10)
