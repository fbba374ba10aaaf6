"""Bose-Einstein counting of radiation modes.

A :py:class:`QuantumHypothesis` fixes the energy exchanged per entity
(:math:`h\\nu` or :math:`h\\nu/2`) and whether the entity is a single
photon or a spin-correlated photon pair. :py:func:`compose_law` turns a
hypothesis into a :py:class:`~photon_lab.spectral_laws.SpectralLaw` via

.. math::

   u(\\nu, T) = \\rho(\\nu)\\,\\varepsilon(\\nu)\\,\\bar{n}(\\varepsilon, T).

"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from photon_lab.constants import BOLTZMANN
from photon_lab.constants import PLANCK
from photon_lab.errors import DomainError
from photon_lab.errors import TruncationError
from photon_lab.spectral_laws import SERIES_THRESHOLD
from photon_lab.spectral_laws import LawVariant
from photon_lab.spectral_laws import SpectralLaw
from photon_lab.spectral_laws import mode_density

_logger = logging.getLogger(__name__)

#: largest dropped fraction of the partition sums
TAIL_TOLERANCE = 1e-14


class EntityEnergy(enum.Enum):
    """Energy of one exchanged entity in units of :math:`h\\nu`."""

    QUANTUM = 1.0
    HALF_QUANTUM = 0.5

    def __call__(self, nu):
        return self.value * PLANCK * np.asarray(nu, dtype=float)


@dataclass(frozen=True)
class QuantumHypothesis:
    """Energy per exchange entity and entity multiplicity.

    ``classical_limit`` replaces the Bose mean energy by equipartition
    :math:`kT`, ``zero_point_offset`` adds :math:`h\\nu/2` per mode.

    """

    entity_energy: EntityEnergy = EntityEnergy.QUANTUM
    photons_per_entity: int = 1
    polarization_factor: int = 2
    classical_limit: bool = False
    zero_point_offset: bool = False
    name: Optional[str] = None

    def __post_init__(self) -> None:
        if self.photons_per_entity not in (1, 2):
            raise ValueError(
                "photons_per_entity must be 1 or 2, got "
                f"{self.photons_per_entity}"
            )
        if self.polarization_factor not in (1, 2):
            raise ValueError(
                "polarization_factor must be 1 or 2, got "
                f"{self.polarization_factor}"
            )

    @staticmethod
    def planck() -> "QuantumHypothesis":
        return QuantumHypothesis(name="planck")

    @staticmethod
    def half_quantum() -> "QuantumHypothesis":
        """Entities of energy :math:`h\\nu/2` carrying momentum
        :math:`h\\nu/c`, two polarization states.

        """
        return QuantumHypothesis(
            entity_energy=EntityEnergy.HALF_QUANTUM, name="half-quantum"
        )

    @staticmethod
    def photon_pair() -> "QuantumHypothesis":
        """Spin-zero photon pairs of energy :math:`h\\nu`; the factor 2
        counts the two photons of opposite spin in the pair.

        """
        return QuantumHypothesis(
            photons_per_entity=2, polarization_factor=1, name="pair-planck"
        )

    @staticmethod
    def equipartition() -> "QuantumHypothesis":
        return QuantumHypothesis(classical_limit=True, name="rayleigh-jeans")

    @staticmethod
    def planck_second() -> "QuantumHypothesis":
        return QuantumHypothesis(zero_point_offset=True, name="planck-second")

    @property
    def mode_multiplicity(self) -> int:
        """Modes counted per frequency state."""
        if self.photons_per_entity == 2:
            return self.photons_per_entity
        return self.polarization_factor

    @property
    def law_variant(self) -> LawVariant:
        """The named law this hypothesis reproduces."""
        if self.classical_limit:
            return LawVariant.RAYLEIGH_JEANS
        if self.zero_point_offset:
            return LawVariant.PLANCK_SECOND
        if self.entity_energy == EntityEnergy.HALF_QUANTUM:
            return LawVariant.HALF_QUANTUM
        if self.photons_per_entity == 2:
            return LawVariant.PAIR_PLANCK
        return LawVariant.PLANCK

    def density(self, nu):
        """Mode density :math:`\\rho(\\nu)` including the multiplicity."""
        if self.photons_per_entity == 2:
            return self.photons_per_entity * ModeDensity(1)(nu)
        return ModeDensity(self.polarization_factor)(nu)


@dataclass(frozen=True)
class ModeDensity:
    """:math:`\\rho(\\nu) = m \\cdot 4\\pi\\nu^2/c^3` for ``multiplicity``
    :math:`m`.

    """

    multiplicity: int = 2

    def __call__(self, nu):
        return mode_density(nu, polarizations=self.multiplicity)


def _check_positive(epsilon, temperature: float) -> None:
    if np.any(np.asarray(epsilon) <= 0):
        raise DomainError(f"entity energies must be positive, got {epsilon}")
    if not temperature > 0:
        raise DomainError(
            f"the temperature must be positive, got T={temperature}"
        )


def mean_occupancy(epsilon, temperature: float):
    """Mean Bose-Einstein occupancy :math:`1/(e^{\\varepsilon/kT} - 1)` at
    zero chemical potential.

    """
    _check_positive(epsilon, temperature)
    scalar = np.ndim(epsilon) == 0
    y = np.asarray(epsilon, dtype=float) / (BOLTZMANN * temperature)
    with np.errstate(under="ignore", divide="ignore"):
        regular = np.exp(-y) / -np.expm1(-y)
    series = 1.0 / y - 0.5 + y / 12.0
    n = np.where(y < SERIES_THRESHOLD, series, regular)
    return float(n) if scalar else n


def default_truncation(epsilon: float, temperature: float) -> int:
    """:math:`N = \\lceil 50\\,kT/\\varepsilon \\rceil + 100`"""
    return math.ceil(50 * BOLTZMANN * temperature / epsilon) + 100


def _dropped_fraction(n_terms: int, y: float) -> float:
    """Largest share of the weight sum :math:`\\sum e^{-ny}` and of the
    energy sum :math:`\\sum n e^{-ny}` lying at :math:`n \\ge N`.

    With :math:`q = e^{-y}` the shares are :math:`q^N` and
    :math:`q^{N-1}(N - (N-1)q)`.

    """
    q = math.exp(-y)
    weights = math.exp(-n_terms * y)
    energies = math.exp(-(n_terms - 1) * y) * (n_terms - (n_terms - 1) * q)
    return max(weights, energies)


def partition_average_energy(
    epsilon: float,
    temperature: float,
    truncation: Optional[int] = None,
    zero_point_offset: bool = False,
) -> float:
    """Mean energy of one mode from the explicit Boltzmann sums

    .. math::

       \\langle E \\rangle = \\frac{\\sum_{n<N} n\\varepsilon\\,e^{-n y}}
                                 {\\sum_{n<N} e^{-n y}},
       \\qquad y = \\varepsilon / kT,

    plus :math:`\\varepsilon/2` when ``zero_point_offset`` is set.
    Raises :py:class:`~photon_lab.errors.TruncationError` when the dropped
    tail exceeds :py:const:`TAIL_TOLERANCE` of either sum.

    """
    _check_positive(epsilon, temperature)
    if truncation is not None and truncation < 1:
        raise ValueError(f"truncation must be at least 1, got {truncation}")
    y = epsilon / (BOLTZMANN * temperature)
    required = default_truncation(epsilon, temperature)
    n_terms = required if truncation is None else truncation

    if _dropped_fraction(n_terms, y) > TAIL_TOLERANCE:
        while _dropped_fraction(required, y) > TAIL_TOLERANCE:
            required *= 2
        raise TruncationError(n_terms, max(required, n_terms + 1))

    levels = np.arange(n_terms, dtype=float)
    with np.errstate(under="ignore"):
        weights = np.exp(-levels * y)
    average = epsilon * math.fsum(levels * weights) / math.fsum(weights)
    _logger.debug(
        "partition sum with N=%d terms at eps/kT=%g", n_terms, y
    )
    if zero_point_offset:
        average += epsilon / 2
    return average


def compose_law(hyp: QuantumHypothesis) -> SpectralLaw:
    """Builds the spectral law implied by ``hyp``.

    The result carries the variant of the named law it reproduces, its
    values come from the composition
    :math:`\\rho(\\nu)\\,\\varepsilon\\,\\bar{n}(\\varepsilon, T)` (or
    :math:`\\rho(\\nu)\\,kT` in the classical limit).

    """

    def composed(nu: np.ndarray, temperature: float) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        density = hyp.density(nu)
        if hyp.classical_limit:
            return density * (BOLTZMANN * temperature)
        epsilon = hyp.entity_energy(nu)
        energy = np.zeros_like(nu)
        excited = epsilon > 0
        energy[excited] = epsilon[excited] * np.asarray(
            mean_occupancy(epsilon[excited], temperature)
        )
        energy[~excited] = BOLTZMANN * temperature
        u = density * energy
        if hyp.zero_point_offset:
            u = u + ModeDensity()(nu) * (PLANCK * nu / 2)
        return u

    return SpectralLaw(
        variant=hyp.law_variant,
        composed=composed,
        label=hyp.name or f"composed-{hyp.law_variant.value}",
    )
