"""Closed-form spectral energy densities :math:`u(\\nu, T)` of black-body
radiation and the derived quantities: total energy density, peak
frequency, pairwise comparison and the Stefan-Boltzmann fit.

Every law is written as mode density times mean energy per mode,

.. math::

   u(\\nu, T) = \\frac{8\\pi\\nu^2}{c^3}\\,\\bar{E}(\\nu, T),

and, with :math:`x = h\\nu / kT`, as
:math:`u = \\frac{8\\pi (kT)^3}{h^2 c^3}\\, x^2 \\phi(x)` where
:math:`\\phi = \\bar{E} / kT` is the dimensionless mean energy that the
totals and peaks are computed from. All quantities are SI.

"""

import enum
import logging
import math
from dataclasses import dataclass
from dataclasses import field
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np

from photon_lab.constants import BOLTZMANN
from photon_lab.constants import PLANCK
from photon_lab.constants import SPEED_OF_LIGHT
from photon_lab.errors import DomainError
from photon_lab.errors import NoInteriorPeakError
from photon_lab.errors import NonIntegrableSpectrumError
from photon_lab.numerics import Quadrature
from photon_lab.numerics import find_maximum
from photon_lab.numerics import integrate

_logger = logging.getLogger(__name__)

#: below this value of :math:`x` the Bose weight is evaluated from its series
SERIES_THRESHOLD = 1e-6

#: spectral values below this floor are skipped by :py:func:`compare`
UNDERFLOW_FLOOR = 1e-300

#: bracket of the dimensionless frequency :math:`x = h\nu/kT` searched for
#: spectral peaks
PEAK_BRACKET = (1e-3, 50.0)

#: :math:`x = h\nu/kT` below which a sample counts as Rayleigh-Jeans regime
RAYLEIGH_JEANS_REGIME = 0.1

#: :math:`x = h\nu/kT` above which a sample counts as Wien regime
WIEN_REGIME = 10.0


class LawVariant(enum.Enum):
    """The spectral laws known to the laboratory. The value is the name
    used on the command line.

    """

    PLANCK = "planck"
    RAYLEIGH_JEANS = "rayleigh-jeans"
    WIEN = "wien"
    HALF_QUANTUM = "half-quantum"
    PAIR_PLANCK = "pair-planck"
    PLANCK_SECOND = "planck-second"
    ZERO_POINT = "zero-point"

    @property
    def thermal(self) -> bool:
        return self != LawVariant.ZERO_POINT


#: all law names accepted on the command line
LAW_NAMES = tuple(variant.value for variant in LawVariant)

#: laws whose spectrum diverges when integrated over all frequencies
DIVERGENT_LAWS = (LawVariant.RAYLEIGH_JEANS, LawVariant.ZERO_POINT)

#: laws without an interior spectral maximum
PEAKLESS_LAWS = (
    LawVariant.RAYLEIGH_JEANS,
    LawVariant.ZERO_POINT,
    LawVariant.PLANCK_SECOND,
)


@dataclass(frozen=True)
class SpectralLaw:
    """A spectral energy density law.

    ``composed`` optionally replaces the closed form by a function
    :math:`(\\nu, T) \\mapsto u` built from a quantum hypothesis (see
    :py:func:`photon_lab.photon_statistics.compose_law`); ``label`` then
    names the hypothesis.

    """

    variant: LawVariant
    composed: Optional[Callable[[np.ndarray, float], np.ndarray]] = field(
        default=None, compare=False
    )
    label: Optional[str] = None

    @staticmethod
    def from_name(name: str) -> "SpectralLaw":
        try:
            return SpectralLaw(LawVariant(name))
        except ValueError as val_err:
            raise ValueError(
                f"unknown law '{name}', expected one of {', '.join(LAW_NAMES)}"
            ) from val_err

    @property
    def name(self) -> str:
        return self.label or self.variant.value


@dataclass(frozen=True)
class Spectrum:
    """Samples :math:`(\\nu_i, u_i)` of one law at one temperature.

    ``errors`` carries standard errors for estimated spectra.

    """

    frequencies: np.ndarray
    values: np.ndarray
    temperature: float
    law: str
    errors: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.frequencies.shape != self.values.shape:
            raise ValueError("frequencies and values differ in length")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValueError("spectral values must be finite and >= 0")

    def __len__(self) -> int:
        return len(self.frequencies)


def mode_density(nu: np.ndarray, polarizations: int = 2) -> np.ndarray:
    """Electromagnetic modes per volume and frequency interval,
    :math:`4\\pi\\nu^2 / c^3` per polarization state.

    """
    nu = np.asarray(nu, dtype=float)
    return polarizations * (4 * math.pi * nu**2 / SPEED_OF_LIGHT**3)


def bose_weight(x: np.ndarray) -> np.ndarray:
    """:math:`x / (e^x - 1)` with the limit 1 at :math:`x = 0`.

    The value is formed as :math:`x e^{-x} / (1 - e^{-x})` so that it
    equals the Wien factor :math:`x e^{-x}` bit for bit once
    :math:`e^{-x}` drops below the rounding unit.

    """
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        regular = wien_weight(x) / -np.expm1(-x)
    series = 1.0 - x / 2.0 + x**2 / 12.0
    return np.where(x < SERIES_THRESHOLD, series, regular)


def wien_weight(x: np.ndarray) -> np.ndarray:
    """:math:`x e^{-x}`"""
    x = np.asarray(x, dtype=float)
    with np.errstate(under="ignore"):
        return x * np.exp(-x)


def _check_temperature(law: SpectralLaw, temperature: float) -> None:
    if law.variant.thermal and not temperature > 0:
        raise DomainError(
            f"the law '{law.name}' needs a positive temperature, got "
            f"T={temperature}"
        )


def _reduced_frequency(nu: np.ndarray, temperature: float) -> np.ndarray:
    return PLANCK * nu / (BOLTZMANN * temperature)


def _mean_energy_factor(variant: LawVariant, x: np.ndarray) -> np.ndarray:
    """Dimensionless mean energy per mode :math:`\\bar{E}/kT` at
    :math:`x = h\\nu/kT` for the thermal laws.

    """
    if variant in (LawVariant.PLANCK, LawVariant.PAIR_PLANCK):
        return bose_weight(x)
    if variant == LawVariant.HALF_QUANTUM:
        return bose_weight(x / 2)
    if variant == LawVariant.WIEN:
        return wien_weight(x)
    if variant == LawVariant.RAYLEIGH_JEANS:
        return np.ones_like(x)
    if variant == LawVariant.PLANCK_SECOND:
        return bose_weight(x) + x / 2
    raise DomainError(f"{variant.value} has no thermal mean energy")


def evaluate(law: SpectralLaw, nu, temperature: float):
    """Evaluates :math:`u(\\nu, T)` in J·m⁻³·Hz⁻¹.

    ``nu`` may be a scalar or an array of frequencies :math:`\\ge 0`. The
    zero-point law ignores ``temperature``, all other laws require
    :math:`T > 0`.

    """
    scalar = np.ndim(nu) == 0
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 0):
        raise DomainError("frequencies must be non-negative")
    _check_temperature(law, temperature)

    if law.composed is not None:
        u = np.asarray(law.composed(nu, temperature), dtype=float)
    elif law.variant == LawVariant.ZERO_POINT:
        u = mode_density(nu) * (PLANCK * nu / 2)
    elif law.variant == LawVariant.PAIR_PLANCK:
        # two photons of opposite spin per spin-zero pair, one mode each
        u = 2 * mode_density(nu, polarizations=1) * (
            BOLTZMANN
            * temperature
            * bose_weight(_reduced_frequency(nu, temperature))
        )
    elif law.variant == LawVariant.PLANCK_SECOND:
        u = evaluate(SpectralLaw(LawVariant.PLANCK), nu, temperature) + (
            evaluate(SpectralLaw(LawVariant.ZERO_POINT), nu, temperature)
        )
    else:
        x = _reduced_frequency(nu, temperature)
        u = mode_density(nu) * (
            BOLTZMANN * temperature * _mean_energy_factor(law.variant, x)
        )
    return float(u) if scalar else u


def spectrum(
    law: SpectralLaw, temperature: float, frequencies: Sequence[float]
) -> Spectrum:
    """Samples ``law`` at ``frequencies`` into a :py:class:`Spectrum`."""
    nu = np.asarray(frequencies, dtype=float)
    return Spectrum(
        frequencies=nu,
        values=np.asarray(evaluate(law, nu, temperature), dtype=float),
        temperature=temperature,
        law=law.name,
    )


@dataclass(frozen=True)
class TotalEnergyDensity:
    """Result of :py:func:`total_energy_density`.

    ``zero_point_divergent`` is set for laws that carry a zero-point term;
    ``value`` then only contains the thermal part.

    """

    law: str
    temperature: float
    value: float
    error: float
    zero_point_divergent: bool = False


def _reduced_integral(variant: LawVariant, q: Quadrature):
    if variant == LawVariant.PLANCK_SECOND:
        variant = LawVariant.PLANCK

    def integrand(x: float) -> float:
        return float(x**2 * _mean_energy_factor(variant, np.float64(x)))

    return integrate(integrand, 0.0, math.inf, q)


def total_energy_density(
    law: SpectralLaw, temperature: float, q: Quadrature = Quadrature()
) -> TotalEnergyDensity:
    """Integrates ``law`` over all frequencies (J·m⁻³).

    The integral is carried out in :math:`x = h\\nu/kT`, so that

    .. math::

       \\int_0^\\infty u\\,d\\nu = \\frac{8\\pi (kT)^4}{h^3 c^3}
       \\int_0^\\infty x^2 \\phi(x)\\,dx .

    The Rayleigh-Jeans and zero-point spectra raise
    :py:class:`~photon_lab.errors.NonIntegrableSpectrumError`. For Planck's
    second theory only the thermal part is integrated and the divergence
    of the zero-point part is flagged in the result.

    """
    if law.variant in DIVERGENT_LAWS:
        raise NonIntegrableSpectrumError(law.name)
    _check_temperature(law, temperature)

    reduced = _reduced_integral(law.variant, q)
    scale = (
        8
        * math.pi
        * (BOLTZMANN * temperature) ** 4
        / (PLANCK * SPEED_OF_LIGHT) ** 3
    )
    divergent = law.variant == LawVariant.PLANCK_SECOND
    if divergent:
        _logger.info(
            "the zero-point part of '%s' diverges, integrating the thermal "
            "part only",
            law.name,
        )
    return TotalEnergyDensity(
        law=law.name,
        temperature=temperature,
        value=scale * reduced.value,
        error=scale * reduced.error,
        zero_point_divergent=divergent,
    )


def peak_frequency(law: SpectralLaw, temperature: float) -> float:
    """Frequency (Hz) of the maximum of :math:`u(\\nu, T)` over
    :math:`\\nu`, found on the dimensionless profile :math:`x^2 \\phi(x)`.

    """
    if law.variant in PEAKLESS_LAWS:
        raise NoInteriorPeakError(
            f"the law '{law.name}' has no interior spectral peak"
        )
    _check_temperature(law, temperature)

    def profile(x: float) -> float:
        return float(x**2 * _mean_energy_factor(law.variant, np.float64(x)))

    peak = find_maximum(profile, PEAK_BRACKET)
    return peak.location * BOLTZMANN * temperature / PLANCK


def regime(x: float) -> str:
    """Names the spectral regime of the reduced frequency
    :math:`x = h\\nu/kT`.

    """
    if x < RAYLEIGH_JEANS_REGIME:
        return "rayleigh-jeans"
    if x > WIEN_REGIME:
        return "wien"
    return "intermediate"


@dataclass(frozen=True)
class DeviationRow:
    nu: float
    u_a: float
    u_b: float
    #: ``None`` when either value is below :py:const:`UNDERFLOW_FLOOR`
    rel_dev: Optional[float]
    regime: str


@dataclass(frozen=True)
class DeviationReport:
    """Pointwise comparison of two laws at one temperature.

    The relative deviation is :math:`|u_A - u_B| / u_B`.

    """

    law_a: str
    law_b: str
    temperature: float
    max_rel_dev: float
    location: Optional[float]
    low_frequency_regime: str
    low_frequency_ratio: Optional[float]
    rows: List[DeviationRow]


def compare(
    law_a: SpectralLaw,
    law_b: SpectralLaw,
    frequencies: Sequence[float],
    temperature: float,
) -> DeviationReport:
    """Compares ``law_a`` against ``law_b`` on the frequency grid."""
    nu = np.asarray(frequencies, dtype=float)
    if nu.ndim != 1 or len(nu) == 0:
        raise ValueError("the frequency grid must be a non-empty sequence")
    if np.any(np.diff(nu) <= 0):
        raise ValueError("the frequency grid must be strictly increasing")

    u_a = np.asarray(evaluate(law_a, nu, temperature), dtype=float)
    u_b = np.asarray(evaluate(law_b, nu, temperature), dtype=float)
    x = _reduced_frequency(nu, temperature)

    rows: List[DeviationRow] = []
    max_rel_dev, location = 0.0, None
    for i, frequency in enumerate(nu):
        rel_dev: Optional[float] = None
        if u_a[i] > UNDERFLOW_FLOOR and u_b[i] > UNDERFLOW_FLOOR:
            rel_dev = float(abs(u_a[i] - u_b[i]) / u_b[i])
            if location is None or rel_dev > max_rel_dev:
                max_rel_dev, location = rel_dev, float(frequency)
        rows.append(
            DeviationRow(
                nu=float(frequency),
                u_a=float(u_a[i]),
                u_b=float(u_b[i]),
                rel_dev=rel_dev,
                regime=regime(float(x[i])),
            )
        )

    low_ratio = None
    if u_b[0] > UNDERFLOW_FLOOR:
        low_ratio = float(u_a[0] / u_b[0])

    return DeviationReport(
        law_a=law_a.name,
        law_b=law_b.name,
        temperature=temperature,
        max_rel_dev=max_rel_dev,
        location=location,
        low_frequency_regime=regime(float(x[0])),
        low_frequency_ratio=low_ratio,
        rows=rows,
    )


@dataclass(frozen=True)
class StefanFit:
    """Least squares fit :math:`\\log U = \\text{slope}\\cdot\\log T +
    \\log(\\text{prefactor})`.

    """

    law: str
    slope: float
    prefactor: float
    temperatures: List[float]
    totals: List[float]


def stefan_fit(
    law: SpectralLaw,
    temperatures: Sequence[float],
    q: Quadrature = Quadrature(),
) -> StefanFit:
    """Fits the total energy density of ``law`` against temperature on a
    log-log scale. At least 3 distinct temperatures are required.

    """
    temps = [float(t) for t in temperatures]
    if len(set(temps)) < 3:
        raise ValueError(
            "a Stefan-Boltzmann fit needs >= 3 distinct temperatures, got "
            f"{temps}"
        )
    totals = [total_energy_density(law, t, q).value for t in temps]
    slope, intercept = np.polyfit(np.log(temps), np.log(totals), 1)
    return StefanFit(
        law=law.name,
        slope=float(slope),
        prefactor=float(math.exp(intercept)),
        temperatures=temps,
        totals=totals,
    )


def law_catalogue() -> Dict[str, SpectralLaw]:
    """All named laws keyed by their command line name."""
    return {name: SpectralLaw.from_name(name) for name in LAW_NAMES}
