"""Tests of the closed-form spectral laws and the quantities derived from
them: totals, peaks, comparisons and the Stefan-Boltzmann fit.

"""

import math

import numpy as np
import pytest

from photon_lab.constants import BOLTZMANN
from photon_lab.constants import PLANCK
from photon_lab.constants import radiation_constant
from photon_lab.errors import DomainError
from photon_lab.errors import NoInteriorPeakError
from photon_lab.errors import NonIntegrableSpectrumError
from photon_lab.spectral_laws import LAW_NAMES
from photon_lab.spectral_laws import LawVariant
from photon_lab.spectral_laws import SpectralLaw
from photon_lab.spectral_laws import Spectrum
from photon_lab.spectral_laws import bose_weight
from photon_lab.spectral_laws import compare
from photon_lab.spectral_laws import evaluate
from photon_lab.spectral_laws import law_catalogue
from photon_lab.spectral_laws import mode_density
from photon_lab.spectral_laws import peak_frequency
from photon_lab.spectral_laws import regime
from photon_lab.spectral_laws import spectrum
from photon_lab.spectral_laws import stefan_fit
from photon_lab.spectral_laws import total_energy_density

PLANCK_LAW = SpectralLaw(LawVariant.PLANCK)
HALF_QUANTUM = SpectralLaw(LawVariant.HALF_QUANTUM)


def _frequencies(temperature: float, x_min: float, x_max: float, n: int):
    return np.geomspace(x_min, x_max, n) * BOLTZMANN * temperature / PLANCK


def test_half_quantum_reference_value():
    assert evaluate(HALF_QUANTUM, 1e14, 5000.0) == pytest.approx(
        5.0e-16, rel=1e-2
    )


def test_evaluate_keeps_scalars_and_arrays():
    assert isinstance(evaluate(PLANCK_LAW, 1e14, 300.0), float)
    values = evaluate(PLANCK_LAW, np.array([1e13, 1e14]), 300.0)
    assert values.shape == (2,)


def test_evaluate_at_zero_frequency():
    for name in LAW_NAMES:
        assert evaluate(SpectralLaw.from_name(name), 0.0, 300.0) == 0.0


@pytest.mark.parametrize("name", [n for n in LAW_NAMES if n != "zero-point"])
def test_thermal_laws_need_positive_temperature(name):
    with pytest.raises(DomainError):
        evaluate(SpectralLaw.from_name(name), 1e14, 0.0)


def test_zero_point_ignores_temperature():
    law = SpectralLaw(LawVariant.ZERO_POINT)
    assert evaluate(law, 1e14, 0.0) == evaluate(law, 1e14, 5000.0)


def test_negative_frequency_is_rejected():
    with pytest.raises(DomainError):
        evaluate(PLANCK_LAW, -1.0, 300.0)


def test_unknown_law_name():
    with pytest.raises(ValueError, match="unknown law"):
        SpectralLaw.from_name("sun")


def test_law_catalogue_names():
    catalogue = law_catalogue()
    assert tuple(catalogue) == LAW_NAMES
    assert all(law.name == name for name, law in catalogue.items())


def test_bose_weight_limit_and_series():
    assert bose_weight(0.0) == 1.0
    x = np.array([1e-8, 1e-7, 2e-6, 1e-3])
    np.testing.assert_allclose(bose_weight(x), x / np.expm1(x), rtol=1e-14)


def test_planck_total_energy_density():
    """The Planck total at 1000 K equals :math:`aT^4`."""
    total = total_energy_density(PLANCK_LAW, 1000.0)
    assert total.value == pytest.approx(7.5657e-4, rel=1e-4)
    assert total.value == pytest.approx(
        radiation_constant() * 1000.0**4, rel=1e-9
    )
    assert not total.zero_point_divergent


@pytest.mark.parametrize("temperature", [300.0, 1000.0, 5800.0])
def test_half_quantum_total_is_eight_times_planck(temperature):
    ratio = (
        total_energy_density(HALF_QUANTUM, temperature).value
        / total_energy_density(PLANCK_LAW, temperature).value
    )
    assert ratio == pytest.approx(8.0, rel=1e-9)


def test_wien_total():
    """The Wien total is :math:`6/(\\pi^4/15)` of the Planck total."""
    wien = total_energy_density(SpectralLaw(LawVariant.WIEN), 1000.0)
    planck = total_energy_density(PLANCK_LAW, 1000.0)
    assert wien.value / planck.value == pytest.approx(
        90 / math.pi**4, rel=1e-9
    )


@pytest.mark.parametrize(
    "variant", [LawVariant.RAYLEIGH_JEANS, LawVariant.ZERO_POINT]
)
def test_divergent_totals(variant):
    with pytest.raises(NonIntegrableSpectrumError) as exc_info:
        total_energy_density(SpectralLaw(variant), 1000.0)
    assert exc_info.value.law_name == variant.value


def test_planck_second_total_flags_divergence():
    second = SpectralLaw(LawVariant.PLANCK_SECOND)
    total = total_energy_density(second, 1000.0)
    assert total.zero_point_divergent
    assert total.value == pytest.approx(
        total_energy_density(PLANCK_LAW, 1000.0).value, rel=1e-12
    )


def test_planck_peak_frequency():
    assert peak_frequency(PLANCK_LAW, 1000.0) == pytest.approx(
        5.879e13, rel=1e-3
    )


@pytest.mark.parametrize("temperature", [300.0, 1000.0, 5800.0])
def test_half_quantum_peak_is_twice_planck(temperature):
    assert peak_frequency(HALF_QUANTUM, temperature) == pytest.approx(
        2 * peak_frequency(PLANCK_LAW, temperature), rel=1e-8
    )


def test_peak_scales_with_temperature():
    assert peak_frequency(PLANCK_LAW, 2000.0) == pytest.approx(
        2 * peak_frequency(PLANCK_LAW, 1000.0), rel=1e-8
    )


@pytest.mark.parametrize(
    "variant",
    [
        LawVariant.RAYLEIGH_JEANS,
        LawVariant.ZERO_POINT,
        LawVariant.PLANCK_SECOND,
    ],
)
def test_peakless_laws(variant):
    with pytest.raises(NoInteriorPeakError):
        peak_frequency(SpectralLaw(variant), 1000.0)


@pytest.mark.parametrize("temperature", [300.0, 3000.0, 30000.0])
def test_pair_planck_matches_planck(temperature):
    frequencies = _frequencies(temperature, 1e-3, 50.0, 200)
    report = compare(
        SpectralLaw(LawVariant.PAIR_PLANCK),
        PLANCK_LAW,
        frequencies,
        temperature,
    )
    assert report.max_rel_dev < 1e-12


def test_planck_and_wien_agree_at_high_frequency():
    frequencies = _frequencies(1000.0, 50.0, 200.0, 50)
    report = compare(
        PLANCK_LAW, SpectralLaw(LawVariant.WIEN), frequencies, 1000.0
    )
    assert report.max_rel_dev < 1e-15
    assert {row.regime for row in report.rows} == {"wien"}


def test_rayleigh_jeans_limit():
    frequencies = _frequencies(1000.0, 1e-8, 1e-5, 30)
    report = compare(
        SpectralLaw(LawVariant.RAYLEIGH_JEANS),
        PLANCK_LAW,
        frequencies,
        1000.0,
    )
    assert report.max_rel_dev < 1e-4
    assert report.low_frequency_regime == "rayleigh-jeans"
    assert report.low_frequency_ratio == pytest.approx(1.0, abs=1e-7)


def test_half_quantum_approaches_rayleigh_jeans():
    """The relative deviation is :math:`h\\nu/4kT` to first order, so
    halving the frequency halves it.

    """
    temperature = 1000.0
    x = np.geomspace(1e-8, 2e-4, 20)
    frequencies = x * BOLTZMANN * temperature / PLANCK
    deviation = 1.0 - evaluate(
        HALF_QUANTUM, frequencies, temperature
    ) / evaluate(
        SpectralLaw(LawVariant.RAYLEIGH_JEANS), frequencies, temperature
    )
    assert np.all(deviation > 0)
    assert np.max(deviation) < 1e-4
    np.testing.assert_allclose(deviation / x, 0.25, rtol=1e-3)
    halved = 1.0 - evaluate(
        HALF_QUANTUM, frequencies / 2, temperature
    ) / evaluate(
        SpectralLaw(LawVariant.RAYLEIGH_JEANS), frequencies / 2, temperature
    )
    np.testing.assert_allclose(halved / deviation, 0.5, rtol=1e-3)


@pytest.mark.parametrize("temperature", [300.0, 5800.0])
def test_half_quantum_is_planck_with_half_the_quantum(temperature):
    frequencies = _frequencies(temperature, 1e-3, 80.0, 60)
    half_x = (PLANCK / 2) * frequencies / (BOLTZMANN * temperature)
    expected = (
        mode_density(frequencies)
        * BOLTZMANN
        * temperature
        * bose_weight(half_x)
    )
    values = evaluate(HALF_QUANTUM, frequencies, temperature)
    np.testing.assert_allclose(values, expected, rtol=1e-14)
    np.testing.assert_allclose(
        values,
        evaluate(PLANCK_LAW, frequencies, 2 * temperature) / 2,
        rtol=1e-14,
    )


@pytest.mark.parametrize("name", [n for n in LAW_NAMES if n != "zero-point"])
def test_thermal_laws_increase_with_temperature(name):
    law = SpectralLaw.from_name(name)
    temperatures = np.geomspace(100.0, 1e5, 30)
    frequencies = np.array([1e11, 1e13, 1e14])
    values = np.array([evaluate(law, frequencies, t) for t in temperatures])
    assert np.all(np.diff(values, axis=0) > 0)


def test_planck_second_minus_planck_is_zero_point():
    frequencies = _frequencies(1000.0, 0.1, 10.0, 40)
    difference = evaluate(
        SpectralLaw(LawVariant.PLANCK_SECOND), frequencies, 1000.0
    ) - evaluate(PLANCK_LAW, frequencies, 1000.0)
    np.testing.assert_allclose(
        difference,
        evaluate(SpectralLaw(LawVariant.ZERO_POINT), frequencies, 1000.0),
        rtol=1e-12,
    )


def test_compare_skips_underflow():
    frequencies = _frequencies(300.0, 1.0, 800.0, 5)
    report = compare(PLANCK_LAW, HALF_QUANTUM, frequencies, 300.0)
    assert report.rows[-1].rel_dev is None
    assert report.rows[0].rel_dev is not None


@pytest.mark.parametrize("frequencies", [[], [2.0, 1.0], [1.0, 1.0]])
def test_compare_rejects_bad_grids(frequencies):
    with pytest.raises(ValueError):
        compare(PLANCK_LAW, HALF_QUANTUM, frequencies, 300.0)


@pytest.mark.parametrize(
    "x,expected",
    [(0.01, "rayleigh-jeans"), (1.0, "intermediate"), (20.0, "wien")],
)
def test_regime(x, expected):
    assert regime(x) == expected


def test_stefan_fit_planck():
    fit = stefan_fit(PLANCK_LAW, [300.0, 1000.0, 3000.0, 6000.0])
    assert fit.slope == pytest.approx(4.0, abs=1e-6)
    assert fit.prefactor == pytest.approx(radiation_constant(), rel=1e-6)


def test_stefan_fit_half_quantum():
    temperatures = [500.0, 1000.0, 2000.0]
    half = stefan_fit(HALF_QUANTUM, temperatures)
    planck = stefan_fit(PLANCK_LAW, temperatures)
    assert half.slope == pytest.approx(4.0, abs=1e-6)
    assert half.prefactor / planck.prefactor == pytest.approx(8.0, rel=1e-6)


@pytest.mark.parametrize(
    "variant,ratio",
    [
        (LawVariant.PLANCK, 1.0),
        (LawVariant.HALF_QUANTUM, 8.0),
        (LawVariant.PAIR_PLANCK, 1.0),
    ],
)
def test_stefan_fit_slope_and_prefactor(variant, ratio):
    fit = stefan_fit(SpectralLaw(variant), [500.0, 1000.0, 2000.0, 4000.0])
    assert fit.slope == pytest.approx(4.0, abs=1e-6)
    assert fit.prefactor == pytest.approx(
        ratio * radiation_constant(), rel=1e-6
    )


def test_stefan_fit_needs_three_temperatures():
    with pytest.raises(ValueError):
        stefan_fit(PLANCK_LAW, [300.0, 1000.0])
    with pytest.raises(ValueError):
        stefan_fit(PLANCK_LAW, [300.0, 300.0, 1000.0])


def test_spectrum_sampling():
    frequencies = np.linspace(1e12, 1e14, 10)
    sampled = spectrum(PLANCK_LAW, 1000.0, frequencies)
    assert len(sampled) == 10
    assert sampled.law == "planck"
    assert sampled.errors is None


def test_spectrum_validation():
    with pytest.raises(ValueError):
        Spectrum(
            frequencies=np.array([2.0, 1.0]),
            values=np.array([0.0, 0.0]),
            temperature=1.0,
            law="planck",
        )
    with pytest.raises(ValueError):
        Spectrum(
            frequencies=np.array([1.0]),
            values=np.array([-1.0]),
            temperature=1.0,
            law="planck",
        )
