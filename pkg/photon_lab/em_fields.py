"""Analytic electromagnetic configurations and numerical checks of the
field, energy-momentum and angular-momentum identities.

Conventions used throughout this module:

- Gaussian units, the speed of light ``c`` is a parameter of every
  configuration (default 1).
- Spacetime coordinates :math:`x^\\mu = (ct, x, y, z)` and metric
  :math:`\\eta = \\mathrm{diag}(+1, -1, -1, -1)`.
- Potentials are returned contravariant, :math:`A^\\mu = (\\phi, \\vec{A})`,
  and :math:`F_{\\mu\\nu} = \\partial_\\mu A_\\nu - \\partial_\\nu A_\\mu`, so
  that :math:`F_{0i} = E_i` and :math:`F_{ij} = -\\epsilon_{ijk} B_k`.
- Monochromatic configurations oscillate as :math:`e^{-i\\omega t}`.

Tensors are stored with the density index last, e.g. ``T[mu, 0]`` is the
density of the conserved quantity labelled by ``mu``:

- canonical :math:`T^{\\mu\\nu} = -\\frac{1}{4\\pi} F^{\\nu\\lambda}
  \\partial^\\mu A_\\lambda
  + \\frac{1}{16\\pi}\\eta^{\\mu\\nu} F_{\\alpha\\beta} F^{\\alpha\\beta}`
- symmetric :math:`E^{\\mu\\nu} = \\frac{1}{4\\pi}\\left[F^\\mu{}_\\lambda
  F^{\\lambda\\nu} + \\frac{1}{4}\\eta^{\\mu\\nu} F_{\\alpha\\beta}
  F^{\\alpha\\beta}\\right]`
- spin correction :math:`t^{\\mu\\nu} = \\frac{1}{4\\pi} F^{\\nu\\lambda}
  \\partial_\\lambda A^\\mu`, which makes :math:`E = T + t` an identity.
  Without the :math:`1/4\\pi` (the "literal" normalization) the identity
  does not close; that residual is reported as well.

"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import replace
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from scipy import special as _special

from photon_lab.constants import PLANCK
from photon_lab.constants import SPEED_OF_LIGHT
from photon_lab.errors import DomainError
from photon_lab.errors import SupportExceedsGridError
from photon_lab.errors import UndefinedRatioError
from photon_lab.errors import UnsupportedOperationError
from photon_lab.numerics import Grid4
from photon_lab.numerics import laplacian
from photon_lab.numerics import partial_derivatives
from photon_lab.numerics import random_stream
from photon_lab.numerics import spherical_hankel1
from photon_lab.numerics import spherical_harmonic
from photon_lab.runtime_choice import WORKER_THREADS
from photon_lab.util import CheckResult
from photon_lab.util import relative_difference

_logger = logging.getLogger(__name__)

#: Minkowski metric, signature (+, -, -, -)
ETA = np.diag([1.0, -1.0, -1.0, -1.0])

_FOUR_PI = 4 * math.pi

#: a compact configuration must have decayed below this fraction of its
#: peak potential on the integration boundary
BOUNDARY_DECAY = 1e-16

#: polar (Gauss-Legendre) and azimuthal (trapezoid) nodes of shell integrals
SHELL_NODES = (64, 128)

#: Gauss-Legendre nodes across the shell thickness
SHELL_RADIAL_NODES = 8

#: smallest :math:`\omega r / c` accepted by :py:func:`multipole_shell_ratio`
RADIATION_ZONE = 10.0

#: tolerance of the transversality and plane wave relations
PLANE_WAVE_TOLERANCE = 1e-12

#: tolerance of :math:`\nabla\cdot B` relative to the field scale
DIVERGENCE_TOLERANCE = 1e-6

#: tolerance of the finite difference vs closed form comparisons
FIELD_TOLERANCE = 1e-6

#: tolerance of the symmetry and trace of :math:`E^{\mu\nu}`
SYMMETRY_TOLERANCE = 1e-10

#: tolerance of :math:`E - (T + t)`
IDENTITY_TOLERANCE = 1e-8

#: tolerance of the volume integral equalities
VOLUME_TOLERANCE = 1e-6

#: tolerance of the multipole ratio relative to :math:`m/\omega`
RATIO_TOLERANCE = 1e-6

#: minimal error reduction when halving the finite difference steps
ORDER_REDUCTION = 8.0

#: residuals below this level are limited by rounding, not by the steps
ROUNDING_FLOOR = 1e-12


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.cross(a, b, axis=-1)


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sum(a * b, axis=-1)


def _norm(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=-1))


def spacetime_point(x, t: float, c: float) -> np.ndarray:
    """Joins positions ``x`` of shape ``(..., 3)`` and time ``t`` into
    coordinates :math:`(ct, x, y, z)`.

    """
    x = np.asarray(x, dtype=float)
    x0 = np.full(x.shape[:-1] + (1,), c * t)
    return np.concatenate([x0, x], axis=-1)


def _split(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    points = np.asarray(points, dtype=float)
    return points[..., 0], points[..., 1:]


def transverse_basis(direction: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Two real unit vectors :math:`e_1, e_2` with
    :math:`e_1 \\times e_2 = \\hat{k}`.

    """
    k_hat = np.asarray(direction, dtype=float)
    k_hat = k_hat / np.linalg.norm(k_hat)
    helper = np.array([0.0, 0.0, 1.0])
    if abs(k_hat @ helper) > 0.9:
        helper = np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, k_hat)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(k_hat, e1)
    return e1, e2


class FieldConfiguration:
    """Base class of the analytic configurations.

    Subclasses provide :py:meth:`potential` and, where known,
    closed-form :py:meth:`fields`.

    """

    c: float = 1.0

    #: whether the configuration oscillates at a single frequency
    monochromatic: bool = False

    def potential(self, points: np.ndarray) -> np.ndarray:
        """:math:`A^\\mu` at coordinates of shape ``(..., 4)``."""
        raise NotImplementedError

    def fields(
        self, points: np.ndarray
    ) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """Closed-form real :math:`(E, B)` or ``None``."""
        return None

    def phasors(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Complex amplitudes :math:`(\\tilde{E}, \\tilde{B})`."""
        raise UnsupportedOperationError(
            f"{type(self).__name__} is not monochromatic"
        )

    def default_grid(self) -> Grid4:
        raise NotImplementedError


@dataclass(frozen=True)
class PlaneWave(FieldConfiguration):
    """:math:`E = \\mathrm{Re}[\\tilde{E} e^{i(k\\cdot x - \\omega t)}]` with
    the Jones vector giving :math:`\\tilde{E}` in the basis of
    :py:func:`transverse_basis`.

    """

    k: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    jones: Tuple[complex, complex] = (1.0, 0.0)
    c: float = 1.0
    monochromatic = True

    def __post_init__(self) -> None:
        if np.linalg.norm(self.k) == 0:
            raise DomainError("the wave vector must not vanish")

    @property
    def wavenumber(self) -> float:
        return float(np.linalg.norm(self.k))

    @property
    def direction(self) -> np.ndarray:
        return np.asarray(self.k, dtype=float) / self.wavenumber

    @property
    def amplitude(self) -> np.ndarray:
        e1, e2 = transverse_basis(self.direction)
        return self.jones[0] * e1 + self.jones[1] * e2

    def _phase(self, points: np.ndarray) -> np.ndarray:
        x0, x = _split(points)
        psi = x @ np.asarray(self.k, dtype=float) - self.wavenumber * x0
        return np.exp(1j * psi)[..., None]

    def potential(self, points: np.ndarray) -> np.ndarray:
        vector = np.real(
            -1j * self.amplitude / self.wavenumber * self._phase(points)
        )
        return np.concatenate(
            [np.zeros(vector.shape[:-1] + (1,)), vector], axis=-1
        )

    def fields(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        e_field = np.real(self.amplitude * self._phase(points))
        return e_field, _cross(self.direction, e_field)

    def phasors(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * (x @ np.asarray(self.k, dtype=float)))[..., None]
        e_tilde = self.amplitude * phase
        return e_tilde, _cross(self.direction, e_tilde)

    def default_grid(self) -> Grid4:
        return Grid4(spacing=(1e-3 / self.wavenumber,) * 4)


@dataclass(frozen=True)
class MagneticMultipole(FieldConfiguration):
    """Outgoing magnetic (transverse electric) multipole

    .. math::

       \\tilde{E} = a\\, h_l^{(1)}(kr)\\, X_{lm}, \\qquad
       \\tilde{B} = -\\frac{i}{k}\\nabla\\times\\tilde{E},

    with :math:`X_{lm} = L Y_{lm} / \\sqrt{l(l+1)}` and the potential
    :math:`\\tilde{A} = -i\\tilde{E}/k`, :math:`\\phi = 0`.

    """

    l: int = 1
    m: int = 1
    omega: float = 1.0
    amplitude: float = 1.0
    c: float = 1.0
    monochromatic = True

    def __post_init__(self) -> None:
        if self.l < 1 or abs(self.m) > self.l:
            raise DomainError(
                f"invalid multipole indices l={self.l}, m={self.m}"
            )
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")

    @property
    def wavenumber(self) -> float:
        return self.omega / self.c

    def _angular(
        self, x: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        n = x / r[..., None]
        theta = np.arccos(np.clip(n[..., 2], -1.0, 1.0))
        phi = np.arctan2(x[..., 1], x[..., 0])
        return r, n, *self.harmonics(theta, phi)

    def harmonics(
        self, theta: np.ndarray, phi: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        """:math:`Y_{lm}` and the Cartesian components of :math:`X_{lm}`."""
        l, m = self.l, self.m
        y_lm = spherical_harmonic(l, m, theta, phi)
        l_plus = math.sqrt((l - m) * (l + m + 1)) * spherical_harmonic(
            l, m + 1, theta, phi
        )
        l_minus = math.sqrt((l + m) * (l - m + 1)) * spherical_harmonic(
            l, m - 1, theta, phi
        )
        x_lm = np.stack(
            [
                (l_plus + l_minus) / 2,
                (l_plus - l_minus) / 2j,
                m * y_lm,
            ],
            axis=-1,
        ) / math.sqrt(l * (l + 1))
        return y_lm, x_lm

    def phasors(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        r, n, y_lm, x_lm = self._angular(x)
        k, l = self.wavenumber, self.l
        kr = k * r
        h = spherical_hankel1(l, kr)
        dh = _special.spherical_jn(l, kr, derivative=True) + (
            1j * _special.spherical_yn(l, kr, derivative=True)
        )
        e_tilde = self.amplitude * h[..., None] * x_lm
        b_radial = self.amplitude * h * math.sqrt(l * (l + 1)) * y_lm / kr
        b_tangential = (
            -1j
            / k
            * self.amplitude
            * (h / r + k * dh)[..., None]
            * _cross(n, x_lm)
        )
        return e_tilde, b_radial[..., None] * n + b_tangential

    def radiation_zone_phasors(
        self, x: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Leading far-field amplitudes: :math:`\\tilde{E}`, the transverse
        :math:`\\hat{n}\\times\\tilde{E}` (order :math:`1/r`) and the radial
        magnetic field (order :math:`1/r^2`).

        """
        r, n, y_lm, x_lm = self._angular(x)
        kr = self.wavenumber * r
        f = (-1j) ** (self.l + 1) * np.exp(1j * kr) / kr
        e_tilde = self.amplitude * f[..., None] * x_lm
        b_radial = (
            self.amplitude
            * f
            * math.sqrt(self.l * (self.l + 1))
            * y_lm
            / kr
        )
        return e_tilde, _cross(n, e_tilde), b_radial[..., None] * n

    def _oscillation(self, points: np.ndarray) -> np.ndarray:
        x0, _ = _split(points)
        return np.exp(-1j * self.wavenumber * x0)[..., None]

    def potential(self, points: np.ndarray) -> np.ndarray:
        _, x = _split(points)
        e_tilde, _ = self.phasors(x)
        vector = np.real(
            -1j / self.wavenumber * e_tilde * self._oscillation(points)
        )
        return np.concatenate(
            [np.zeros(vector.shape[:-1] + (1,)), vector], axis=-1
        )

    def fields(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        _, x = _split(points)
        e_tilde, b_tilde = self.phasors(x)
        phase = self._oscillation(points)
        return np.real(e_tilde * phase), np.real(b_tilde * phase)

    def default_grid(self) -> Grid4:
        return Grid4(spacing=(1e-3 / self.wavenumber,) * 4)


@dataclass(frozen=True)
class CompactWavePacket(FieldConfiguration):
    """Gaussian packet with a frozen envelope in the radiation gauge,

    .. math::

       \\vec{A} = \\mathrm{Re}\\left[\\nabla\\times\\left(a\\, G\\,
       e^{i k\\cdot(x - x_0)}\\,\\varepsilon\\right) e^{-i\\omega t}\\right],
       \\qquad G = e^{-|x - x_0|^2 / 2w^2},

    with circular polarization :math:`\\varepsilon = (\\hat{x} + i\\sigma
    \\hat{y})/\\sqrt{2}` of helicity :math:`\\sigma`. The vector potential is
    divergence free, so :math:`\\nabla\\cdot E = 0`.

    A non-zero ``gauge_amplitude`` :math:`g` applies the gauge
    transformation with :math:`\\chi = g\\, G \\sin(k\\cdot(x - x_0) -
    \\omega t)`, i.e. :math:`\\phi' = -\\partial_0\\chi` and
    :math:`\\vec{A}' = \\vec{A} + \\nabla\\chi`.

    """

    k: Tuple[float, float, float] = (0.0, 0.0, 4.0)
    width: float = 1.0
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    amplitude: float = 1.0
    helicity: int = 1
    gauge_amplitude: float = 0.0
    c: float = 1.0

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise DomainError(f"the width must be positive, got {self.width}")
        if self.helicity not in (-1, 1):
            raise DomainError(
                f"the helicity must be +1 or -1, got {self.helicity}"
            )

    @property
    def wavenumber(self) -> float:
        return float(np.linalg.norm(self.k))

    @property
    def polarization(self) -> np.ndarray:
        return np.array([1.0, 1j * self.helicity, 0.0]) / math.sqrt(2)

    def _envelope(
        self, points: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        x0, x = _split(points)
        d = x - np.asarray(self.center, dtype=float)
        k = np.asarray(self.k, dtype=float)
        with np.errstate(under="ignore"):
            g = np.exp(-_dot(d, d) / (2 * self.width**2))
        spatial = d @ k
        return g, d, spatial, self.wavenumber * x0

    def _complex_potential(self, points: np.ndarray) -> np.ndarray:
        g, d, spatial, _ = self._envelope(points)
        q = 1j * np.asarray(self.k) - d / self.width**2
        carrier = (self.amplitude * g * np.exp(1j * spatial))[..., None]
        return carrier * _cross(q, np.broadcast_to(self.polarization, q.shape))

    def potential(self, points: np.ndarray) -> np.ndarray:
        g, d, spatial, omega_t = self._envelope(points)
        vector = np.real(
            self._complex_potential(points) * np.exp(-1j * omega_t)[..., None]
        )
        scalar = np.zeros_like(g)
        if self.gauge_amplitude:
            wave = spatial - omega_t
            ga = self.gauge_amplitude * g
            scalar = ga * self.wavenumber * np.cos(wave)
            vector = vector + ga[..., None] * (
                np.asarray(self.k) * np.cos(wave)[..., None]
                - d / self.width**2 * np.sin(wave)[..., None]
            )
        return np.concatenate([scalar[..., None], vector], axis=-1)

    def fields(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        g, d, spatial, omega_t = self._envelope(points)
        oscillation = np.exp(-1j * omega_t)[..., None]
        e_field = np.real(
            1j
            * self.wavenumber
            * self._complex_potential(points)
            * oscillation
        )
        # curl curl of a G exp(ik.d) eps
        q = 1j * np.asarray(self.k) - d / self.width**2
        eps = np.broadcast_to(self.polarization, q.shape)
        carrier = (self.amplitude * g * np.exp(1j * spatial))[..., None]
        curl_curl = carrier * (
            2 * eps / self.width**2
            + _dot(eps, q)[..., None] * q
            - _dot(q, q)[..., None] * eps
        )
        return e_field, np.real(curl_curl * oscillation)

    def default_grid(self) -> Grid4:
        """FD steps of ``width/200`` and a lattice of 80 nodes per axis
        over ``center ± 10 width``.

        """
        half = 10 * self.width
        return Grid4(
            spacing=(self.width / 200,) * 4,
            extent=tuple((x - half, x + half) for x in self.center),
            points=80,
        )


@dataclass(frozen=True)
class FieldValues:
    E: np.ndarray
    B: np.ndarray


def _fields_from_potential(
    config: FieldConfiguration, points: np.ndarray, grid: Grid4
) -> Tuple[np.ndarray, np.ndarray]:
    d_a = partial_derivatives(config.potential, points, grid)
    f_low = _field_tensor(d_a)
    return _fields_from_tensor(f_low)


def _field_tensor(d_a: np.ndarray) -> np.ndarray:
    """:math:`F_{\\mu\\nu}` from ``d_a[..., mu, nu]`` :math:`= \\partial_\\mu
    A^\\nu`.

    """
    d_a_low = d_a @ ETA
    return d_a_low - np.swapaxes(d_a_low, -1, -2)


def _fields_from_tensor(f_low: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    e_field = f_low[..., 0, 1:]
    b_field = np.stack(
        [f_low[..., 3, 2], f_low[..., 1, 3], f_low[..., 2, 1]], axis=-1
    )
    return e_field, b_field


def fields_at(
    config: FieldConfiguration,
    x,
    t: float,
    grid: Optional[Grid4] = None,
    numerical: bool = False,
) -> FieldValues:
    """Electric and magnetic field at positions ``x`` (shape ``(..., 3)``)
    and time ``t``.

    The closed form is used unless ``numerical`` is set, in which case
    :math:`F_{\\mu\\nu}` is built from finite differences of the potentials
    with the steps of ``grid`` (default: the configuration's own).

    """
    points = spacetime_point(x, t, config.c)
    if not numerical:
        closed = config.fields(points)
        if closed is not None:
            return FieldValues(*closed)
    e_field, b_field = _fields_from_potential(
        config, points, grid or config.default_grid()
    )
    return FieldValues(e_field, b_field)


@dataclass(frozen=True)
class Densities:
    """Energy density :math:`u` and momentum density :math:`g`."""

    u: np.ndarray
    g: np.ndarray


def energy_momentum_densities(
    config: FieldConfiguration, x, t: float, time_averaged: bool = False
) -> Densities:
    """:math:`u = (E^2 + B^2)/8\\pi` and :math:`g = E\\times B / 4\\pi c`.

    The time average over one period uses the complex amplitudes,
    :math:`\\bar{u} = (|\\tilde{E}|^2 + |\\tilde{B}|^2)/16\\pi` and
    :math:`\\bar{g} = \\mathrm{Re}(\\tilde{E}\\times\\tilde{B}^*)/8\\pi c`,
    and is only defined for monochromatic configurations.

    """
    if time_averaged:
        if not config.monochromatic:
            raise UnsupportedOperationError(
                f"a time average of {type(config).__name__} is undefined"
            )
        e_tilde, b_tilde = config.phasors(np.asarray(x, dtype=float))
        return Densities(
            u=(_norm(e_tilde) ** 2 + _norm(b_tilde) ** 2) / (4 * _FOUR_PI),
            g=np.real(_cross(e_tilde, np.conj(b_tilde)))
            / (2 * _FOUR_PI * config.c),
        )
    values = fields_at(config, x, t)
    return Densities(
        u=(_dot(values.E, values.E) + _dot(values.B, values.B))
        / (2 * _FOUR_PI),
        g=_cross(values.E, values.B) / (_FOUR_PI * config.c),
    )


@dataclass(frozen=True)
class TensorAtPoint:
    """Energy-momentum tensors and angular-momentum densities at one
    spacetime point.

    ``canonical_angular[l, m]`` is :math:`x^l T^{m0} - x^m T^{l0} +
    S^{lm0}` with the spin density :math:`S^{\\lambda\\mu\\nu} =
    \\frac{1}{4\\pi}(F^{\\nu\\mu}A^\\lambda - F^{\\nu\\lambda}A^\\mu)`,
    ``symmetric_angular[l, m]`` is :math:`x^l E^{m0} - x^m E^{l0}`.

    """

    point: np.ndarray
    T: np.ndarray
    E: np.ndarray
    t: np.ndarray
    u: float
    g: np.ndarray
    canonical_angular: np.ndarray
    symmetric_angular: np.ndarray

    @property
    def scale(self) -> float:
        return float(
            max(np.max(np.abs(self.E)), np.max(np.abs(self.T)), 1e-300)
        )

    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.E - self.E.T))) / self.scale

    def trace_residual(self) -> float:
        return float(abs(np.trace(ETA @ self.E))) / self.scale

    def identity_residual(self) -> float:
        """:math:`\\max|E - (T + t)|` relative to the tensor scale."""
        return float(np.max(np.abs(self.E - self.T - self.t))) / self.scale

    def literal_identity_residual(self) -> float:
        """As :py:meth:`identity_residual` with :math:`t` lacking its
        :math:`1/4\\pi`.

        """
        return (
            float(np.max(np.abs(self.E - self.T - _FOUR_PI * self.t)))
            / self.scale
        )


def _tensor_fields(
    config: FieldConfiguration, points: np.ndarray, grid: Grid4
) -> Dict[str, np.ndarray]:
    points = np.asarray(points, dtype=float)
    a_up = config.potential(points)
    d_a = partial_derivatives(config.potential, points, grid)
    f_low = _field_tensor(d_a)
    f_up = ETA @ f_low @ ETA
    invariant = np.sum(f_low * f_up, axis=(-2, -1))[..., None, None]
    d_up_a_low = ETA @ (d_a @ ETA)

    canonical = (
        -(d_up_a_low @ np.swapaxes(f_up, -1, -2)) / _FOUR_PI
        + ETA * invariant / (4 * _FOUR_PI)
    )
    symmetric = (f_up @ ETA @ f_up + ETA * invariant / 4) / _FOUR_PI
    spin_correction = np.swapaxes(f_up @ d_a, -1, -2) / _FOUR_PI

    # S^{lm0} and the angular momentum densities with density index 0
    f0 = f_up[..., 0, :]
    spin = (
        f0[..., None, :] * a_up[..., :, None]
        - f0[..., :, None] * a_up[..., None, :]
    ) / _FOUR_PI
    x = points
    orbital_t = (
        x[..., :, None] * canonical[..., None, :, 0]
        - x[..., None, :] * canonical[..., :, None, 0]
    )
    orbital_e = (
        x[..., :, None] * symmetric[..., None, :, 0]
        - x[..., None, :] * symmetric[..., :, None, 0]
    )
    return {
        "T": canonical,
        "E": symmetric,
        "t": spin_correction,
        "canonical_angular": orbital_t + spin,
        "symmetric_angular": orbital_e,
    }


def tensors_at(
    config: FieldConfiguration,
    x,
    t: float,
    grid: Optional[Grid4] = None,
) -> TensorAtPoint:
    """All tensors at a single point from the potentials and their finite
    difference derivatives.

    """
    point = spacetime_point(x, t, config.c)
    if point.ndim != 1:
        raise ValueError("tensors_at expects a single position")
    tensors = _tensor_fields(config, point, grid or config.default_grid())
    symmetric = tensors["E"]
    return TensorAtPoint(
        point=point,
        T=tensors["T"],
        E=symmetric,
        t=tensors["t"],
        u=float(symmetric[0, 0]),
        g=symmetric[1:, 0] / config.c,
        canonical_angular=tensors["canonical_angular"],
        symmetric_angular=tensors["symmetric_angular"],
    )


#: spatial index pairs (i, j) of the angular momentum components x, y, z
_ANGULAR_PAIRS = ((2, 3), (3, 1), (1, 2))


def _trapezoid_weights(axis: np.ndarray) -> np.ndarray:
    weights = np.full(len(axis), axis[1] - axis[0])
    weights[0] = weights[-1] = weights[0] / 2
    return weights


def _slab_integrals(
    config: FieldConfiguration,
    grid: Grid4,
    x0: float,
    slab: int,
) -> np.ndarray:
    xs, ys, zs = grid.axes()
    wx, wy, wz = (_trapezoid_weights(a) for a in (xs, ys, zs))
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    points = np.stack(
        [np.full_like(gx, x0), gx, gy, np.full_like(gx, zs[slab])], axis=-1
    )
    weight = (wx[:, None] * wy[None, :] * wz[slab])[..., None]
    tensors = _tensor_fields(config, points, grid)
    densities = np.concatenate(
        [
            tensors["E"][..., :, 0],
            tensors["T"][..., :, 0],
            np.stack(
                [
                    tensors["symmetric_angular"][..., i, j]
                    for i, j in _ANGULAR_PAIRS
                ],
                axis=-1,
            ),
            np.stack(
                [
                    tensors["canonical_angular"][..., i, j]
                    for i, j in _ANGULAR_PAIRS
                ],
                axis=-1,
            ),
        ],
        axis=-1,
    )
    return np.sum(densities * weight, axis=(0, 1))


def _boundary_faces(grid: Grid4, x0: float):
    """Yields coordinates and area weights of the six faces of the box."""
    axes = grid.axes()
    for normal in range(3):
        others = [a for a in range(3) if a != normal]
        u, v = np.meshgrid(axes[others[0]], axes[others[1]], indexing="ij")
        area = (
            _trapezoid_weights(axes[others[0]])[:, None]
            * _trapezoid_weights(axes[others[1]])[None, :]
        )
        for value in (axes[normal][0], axes[normal][-1]):
            points = np.empty(u.shape + (4,))
            points[..., 0] = x0
            points[..., 1 + others[0]] = u
            points[..., 1 + others[1]] = v
            points[..., 1 + normal] = value
            yield points, area


@dataclass(frozen=True)
class VolumeIntegralReport:
    """Volume integrals of the canonical and symmetric densities.

    ``boundary_flux`` estimates the surface terms dropped when the
    divergence terms separating the two tensors are integrated away.

    """

    gauge: str
    grid: Grid4
    checks: List[CheckResult]
    boundary_flux: float
    decay: float


def volume_integral_checks(
    config: CompactWavePacket,
    grid: Optional[Grid4] = None,
    t: float = 0.0,
) -> VolumeIntegralReport:
    """Compares :math:`\\int E^{\\mu 0} dV` with :math:`\\int T^{\\mu 0} dV`
    for :math:`\\mu = 0..3` and the integrated angular momenta of both
    tensors on the lattice of ``grid`` (trapezoid rule).

    Raises :py:class:`~photon_lab.errors.SupportExceedsGridError` if the
    potentials have not decayed below :py:const:`BOUNDARY_DECAY` of their
    peak on the lattice boundary.

    """
    if not isinstance(config, CompactWavePacket):
        raise UnsupportedOperationError(
            "volume integrals need a compact configuration, got "
            f"{type(config).__name__}"
        )
    grid = grid or config.default_grid()
    x0 = config.c * t

    xs, ys, zs = grid.axes()
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    center_slab = np.stack(
        [
            np.full_like(gx, x0),
            gx,
            gy,
            np.full_like(gx, config.center[2]),
        ],
        axis=-1,
    )
    peak = float(np.max(np.abs(config.potential(center_slab))))
    edge, flux = 0.0, 0.0
    for points, area in _boundary_faces(grid, x0):
        a_up = config.potential(points)
        e_field, _ = config.fields(points)
        edge = max(edge, float(np.max(np.abs(a_up))))
        radius = np.linalg.norm(points[..., 1:], axis=-1)
        flux += float(
            np.sum(
                area
                * _norm(e_field)
                * (np.abs(a_up[..., 0]) + radius * _norm(a_up[..., 1:]))
            )
        )
    decay = edge / peak if peak > 0 else 0.0
    if decay > BOUNDARY_DECAY:
        raise SupportExceedsGridError(
            f"the potential on the grid boundary is {decay:.3g} of its peak, "
            f"more than {BOUNDARY_DECAY}"
        )

    _logger.debug(
        "integrating over %d slabs on %d threads", grid.points, WORKER_THREADS
    )
    with ThreadPoolExecutor(max_workers=WORKER_THREADS) as pool:
        partial_sums = list(
            pool.map(
                lambda slab: _slab_integrals(config, grid, x0, slab),
                range(len(zs)),
            )
        )
    totals = np.zeros_like(partial_sums[0])
    for partial_sum in partial_sums:
        totals = totals + partial_sum

    sym_momentum, can_momentum = totals[0:4], totals[4:8]
    sym_angular, can_angular = totals[8:11], totals[11:14]
    energy_scale = max(abs(sym_momentum[0]), abs(can_momentum[0]))

    momentum_residual = 0.0
    if energy_scale > 0:
        momentum_residual = float(
            np.linalg.norm(sym_momentum[1:] - can_momentum[1:]) / energy_scale
        )
    checks = [
        CheckResult(
            name="energy",
            residual=relative_difference(sym_momentum[0], can_momentum[0]),
            tolerance=VOLUME_TOLERANCE,
            values={
                "symmetric": float(sym_momentum[0]),
                "canonical": float(can_momentum[0]),
            },
        ),
        CheckResult(
            name="momentum",
            residual=momentum_residual,
            tolerance=VOLUME_TOLERANCE,
            values={
                "symmetric": [float(v) for v in sym_momentum[1:]],
                "canonical": [float(v) for v in can_momentum[1:]],
            },
        ),
        CheckResult(
            name="angular-momentum",
            residual=relative_difference(sym_angular, can_angular),
            tolerance=VOLUME_TOLERANCE,
            values={
                "symmetric": [float(v) for v in sym_angular],
                "canonical": [float(v) for v in can_angular],
            },
        ),
    ]
    return VolumeIntegralReport(
        gauge="alternative" if config.gauge_amplitude else "radiation",
        grid=grid,
        checks=checks,
        boundary_flux=flux / _FOUR_PI,
        decay=decay,
    )


def order_verification(
    config: CompactWavePacket, grid: Optional[Grid4] = None
) -> List[CheckResult]:
    """Repeats :py:func:`volume_integral_checks` with halved finite
    difference steps. Each residual has to drop by at least
    :py:const:`ORDER_REDUCTION` unless it already sits at the rounding
    floor.

    """
    grid = grid or config.default_grid()
    coarse = volume_integral_checks(config, grid)
    fine = volume_integral_checks(config, grid.refined())
    results = []
    for before, after in zip(coarse.checks, fine.checks):
        rounding_limited = before.residual < ROUNDING_FLOOR
        reduction = (
            math.inf
            if after.residual == 0
            else before.residual / after.residual
        )
        results.append(
            CheckResult(
                name=f"order-{before.name}-{coarse.gauge}",
                residual=0.0
                if rounding_limited or reduction >= ORDER_REDUCTION
                else 1.0,
                tolerance=0.0,
                values={
                    "coarse": before.residual,
                    "fine": after.residual,
                    "reduction": reduction,
                    "rounding_limited": rounding_limited,
                },
            )
        )
    return results


def multipole_shell_ratio(
    l: int,
    m: int,
    omega: float,
    r: float,
    dr: float,
    c: float = 1.0,
    exact: bool = False,
    amplitude: float = 1.0,
    nodes: Tuple[int, int] = SHELL_NODES,
) -> float:
    """Ratio :math:`dJ_z/dU` (s/rad) of the time-averaged z-angular momentum
    and energy in the shell :math:`[r, r + dr]`.

    By default the leading radiation-zone fields are used: the energy from
    the order :math:`1/r` transverse fields and the angular momentum from
    their product with the order :math:`1/r^2` radial magnetic field. With
    ``exact`` the full outgoing fields are integrated, whose ratio
    approaches :math:`m/\\omega` as :math:`\\omega r/c` grows.

    """
    config = MagneticMultipole(l=l, m=m, omega=omega, amplitude=amplitude, c=c)
    if config.wavenumber * r < RADIATION_ZONE:
        raise DomainError(
            f"r={r} is outside the radiation zone, need omega*r/c >= "
            f"{RADIATION_ZONE}"
        )
    if not dr > 0:
        raise DomainError(f"the shell width must be positive, got {dr}")

    n_theta, n_phi = nodes
    cos_theta, w_theta = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    radial, w_radial = np.polynomial.legendre.leggauss(SHELL_RADIAL_NODES)
    radii = r + dr * (radial + 1) / 2
    w_radial = w_radial * dr / 2

    sin_theta = np.sqrt(1 - cos_theta**2)
    directions = np.stack(
        [
            sin_theta[:, None] * np.cos(phi)[None, :],
            sin_theta[:, None] * np.sin(phi)[None, :],
            np.broadcast_to(cos_theta[:, None], (n_theta, n_phi)),
        ],
        axis=-1,
    )
    x = radii[:, None, None, None] * directions[None, ...]
    weights = (
        w_radial[:, None, None]
        * radii[:, None, None] ** 2
        * w_theta[None, :, None]
        * (2 * math.pi / n_phi)
    )

    if exact:
        e_tilde, b_tilde = config.phasors(x)
        u = (_norm(e_tilde) ** 2 + _norm(b_tilde) ** 2) / (4 * _FOUR_PI)
    else:
        e_tilde, b_transverse, b_radial = config.radiation_zone_phasors(x)
        b_tilde = b_transverse + b_radial
        u = (_norm(e_tilde) ** 2 + _norm(b_transverse) ** 2) / (4 * _FOUR_PI)
    g = np.real(_cross(e_tilde, np.conj(b_tilde))) / (2 * _FOUR_PI * c)
    j_z = x[..., 0] * g[..., 1] - x[..., 1] * g[..., 0]

    energy = float(np.sum(weights * u))
    if energy == 0.0:
        raise UndefinedRatioError(
            f"the shell at r={r} carries no energy, dJz/dU is undefined"
        )
    return float(np.sum(weights * j_z)) / energy


@dataclass(frozen=True)
class ScaledForce:
    """A force in units of the squared charge (``unit``)."""

    vector: np.ndarray
    unit: str = "e^2"


def lorentz_force(E, B, v, c: float = 1.0) -> ScaledForce:
    """:math:`e^2[E + v\\times B/c]` for the rescaled fields
    :math:`E, B` (per unit charge squared).

    """
    e_field = np.asarray(E, dtype=float)
    b_field = np.asarray(B, dtype=float)
    velocity = np.asarray(v, dtype=float)
    if np.linalg.norm(velocity) > c:
        raise DomainError(
            f"the speed {np.linalg.norm(velocity)} exceeds c={c}"
        )
    return ScaledForce(vector=e_field + np.cross(velocity, b_field) / c)


@dataclass(frozen=True)
class PhotonKinematics:
    """SI energy (J) and momentum (kg·m/s) assigned to a plane wave."""

    energy: float
    momentum: np.ndarray

    def residual(self) -> float:
        """:math:`|E - |p|c| / E`"""
        return abs(
            self.energy - float(np.linalg.norm(self.momentum)) * SPEED_OF_LIGHT
        ) / self.energy


def photon_momentum(wave: PlaneWave, nu: float) -> PhotonKinematics:
    """Photon of frequency ``nu`` travelling along ``wave``: energy
    :math:`h\\nu` and momentum :math:`\\hbar k = (h\\nu/c)\\hat{k}`.

    """
    if not nu > 0:
        raise DomainError(f"the frequency must be positive, got {nu}")
    energy = PLANCK * nu
    return PhotonKinematics(
        energy=energy, momentum=energy / SPEED_OF_LIGHT * wave.direction
    )


def random_jones(rng: np.random.Generator) -> Tuple[complex, complex]:
    re, im = rng.normal(size=(2, 2))
    return complex(re[0], im[0]), complex(re[1], im[1])


def _random_direction(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def plane_wave_relation(waves: Sequence[PlaneWave]) -> float:
    """Largest :math:`|\\bar{u} - |\\bar{g}|c| / \\bar{u}` over ``waves``."""
    worst = 0.0
    origin = np.zeros(3)
    for wave in waves:
        dens = energy_momentum_densities(wave, origin, 0.0, time_averaged=True)
        worst = max(
            worst, abs(dens.u - np.linalg.norm(dens.g) * wave.c) / dens.u
        )
    return float(worst)


def divergence_residual(
    config: FieldConfiguration, x: np.ndarray, t: float, grid: Grid4
) -> float:
    """:math:`\\max|\\nabla\\cdot B|` over the samples ``x``, relative to the
    largest :math:`|B|` times the wavenumber.

    """
    points = spacetime_point(x, t, config.c)

    def magnetic(p: np.ndarray) -> np.ndarray:
        return config.fields(p)[1]

    d_b = partial_derivatives(magnetic, points, grid)
    divergence = d_b[..., 1, 0] + d_b[..., 2, 1] + d_b[..., 3, 2]
    scale = float(np.max(_norm(magnetic(points)))) * config.wavenumber
    return float(np.max(np.abs(divergence))) / scale


def wave_equation_residual(
    config: MagneticMultipole, x: np.ndarray, t: float, grid: Grid4
) -> float:
    """:math:`\\max|(\\nabla^2 + k^2)E_i|` over the samples, relative to
    :math:`k^2 \\max|E|`.

    """
    points = spacetime_point(x, t, config.c)

    def electric(p: np.ndarray) -> np.ndarray:
        return config.fields(p)[0]

    e_field = electric(points)
    k2 = config.wavenumber**2
    residual = laplacian(electric, points, grid) + k2 * e_field
    scale = k2 * float(np.max(np.abs(e_field)))
    return float(np.max(np.abs(residual))) / scale


def closed_form_agreement(
    config: FieldConfiguration, x: np.ndarray, t: float, grid: Grid4
) -> float:
    """Largest deviation between the closed-form fields and the fields
    derived from the potentials, relative to the field scale.

    """
    closed = fields_at(config, x, t)
    numeric = fields_at(config, x, t, grid=grid, numerical=True)
    scale = max(
        float(np.max(_norm(closed.E))), float(np.max(_norm(closed.B)))
    )
    return (
        max(
            float(np.max(np.abs(closed.E - numeric.E))),
            float(np.max(np.abs(closed.B - numeric.B))),
        )
        / scale
    )


def _multipole_samples(
    config: MagneticMultipole, rng: np.random.Generator, count: int
) -> np.ndarray:
    radii = rng.uniform(5.0, 10.0, size=count) / config.wavenumber
    return radii[:, None] * np.stack(
        [_random_direction(rng) for _ in range(count)]
    )


def run_field_checks(seed: int = 0, samples: int = 20) -> List[CheckResult]:
    """Transversality, :math:`\\nabla\\cdot B = 0`, the multipole wave
    equation, closed form vs finite differences, the time-averaged plane
    wave relation and photon kinematics on random samples.

    """
    rng = random_stream(seed)
    checks: List[CheckResult] = []

    waves = [
        PlaneWave(
            k=tuple(rng.uniform(0.5, 2.0) * _random_direction(rng)),
            jones=random_jones(rng),
        )
        for _ in range(samples)
    ]
    transversality = 0.0
    for wave in waves:
        x = rng.uniform(-5, 5, size=(8, 3))
        values = fields_at(wave, x, float(rng.uniform(0, 10)))
        scale = float(np.linalg.norm(wave.amplitude)) ** 2
        transversality = max(
            transversality,
            float(np.max(np.abs(values.E @ wave.direction)))
            / math.sqrt(scale),
            float(np.max(np.abs(values.B @ wave.direction)))
            / math.sqrt(scale),
            float(np.max(np.abs(_dot(values.E, values.B)))) / scale,
        )
    checks.append(
        CheckResult(
            "plane-wave-transversality", transversality, PLANE_WAVE_TOLERANCE
        )
    )

    jones_waves = [
        PlaneWave(k=tuple(_random_direction(rng)), jones=random_jones(rng))
        for _ in range(100)
    ]
    checks.append(
        CheckResult(
            "plane-wave-u-equals-gc",
            plane_wave_relation(jones_waves),
            PLANE_WAVE_TOLERANCE,
        )
    )

    circular = PlaneWave(jones=(1 / math.sqrt(2), 1j / math.sqrt(2)))
    linear = PlaneWave(jones=(1.0, 0.0))
    u_circular = energy_momentum_densities(circular, np.zeros(3), 0.0, True).u
    u_linear = energy_momentum_densities(linear, np.zeros(3), 0.0, True).u
    checks.append(
        CheckResult(
            "circular-vs-linear-energy",
            relative_difference(u_circular, u_linear),
            PLANE_WAVE_TOLERANCE,
            {"circular": float(u_circular), "linear": float(u_linear)},
        )
    )

    multipoles = [
        MagneticMultipole(l=l, m=m)
        for l, m in ((1, 0), (1, 1), (2, 1), (2, 2))
    ]
    packet = CompactWavePacket()
    packet_x = np.asarray(packet.center) + rng.normal(
        scale=packet.width, size=(samples, 3)
    )
    targets = [(waves[0], rng.uniform(-5, 5, size=(samples, 3)))]
    targets += [
        (mp, _multipole_samples(mp, rng, samples)) for mp in multipoles
    ]
    targets.append((packet, packet_x))
    for config, x in targets:
        name = type(config).__name__
        if isinstance(config, MagneticMultipole):
            name = f"{name}({config.l},{config.m})"
        grid = config.default_grid()
        checks.append(
            CheckResult(
                f"divergence-b-{name}",
                divergence_residual(config, x, 0.3, grid),
                DIVERGENCE_TOLERANCE,
            )
        )
        checks.append(
            CheckResult(
                f"fields-from-potentials-{name}",
                closed_form_agreement(config, x, 0.3, grid),
                FIELD_TOLERANCE,
            )
        )
        if isinstance(config, MagneticMultipole):
            checks.append(
                CheckResult(
                    f"wave-equation-{name}",
                    wave_equation_residual(config, x, 0.3, grid),
                    FIELD_TOLERANCE,
                )
            )

    nu = float(rng.uniform(1e13, 1e16))
    kinematics = photon_momentum(waves[0], nu)
    checks.append(
        CheckResult(
            "photon-kinematics",
            kinematics.residual(),
            PLANE_WAVE_TOLERANCE,
            {"nu_hz": nu, "energy_j": kinematics.energy},
        )
    )
    return checks


def run_tensor_checks(
    seed: int = 0,
    samples: int = 20,
    packet: Optional[CompactWavePacket] = None,
    grid: Optional[Grid4] = None,
    volume: bool = True,
) -> List[CheckResult]:
    """Pointwise tensor identities on plane waves and the packet, plus (if
    ``volume`` is set) the volume integral equalities in the radiation
    gauge and one alternative gauge with their order verification.

    """
    rng = random_stream(seed)
    packet = packet or CompactWavePacket()
    symmetry = trace = identity = literal = 0.0
    for _ in range(samples):
        wave = PlaneWave(
            k=tuple(_random_direction(rng)), jones=random_jones(rng)
        )
        for config, x in (
            (wave, rng.uniform(-5, 5, size=3)),
            (packet, np.asarray(packet.center) + rng.normal(size=3)),
        ):
            tensors = tensors_at(config, x, float(rng.uniform(0, 1)))
            symmetry = max(symmetry, tensors.symmetry_residual())
            trace = max(trace, tensors.trace_residual())
            identity = max(identity, tensors.identity_residual())
            literal = max(literal, tensors.literal_identity_residual())

    checks = [
        CheckResult("symmetric-tensor-symmetry", symmetry, SYMMETRY_TOLERANCE),
        CheckResult("symmetric-tensor-trace", trace, SYMMETRY_TOLERANCE),
        CheckResult(
            "canonical-plus-spin-identity", identity, IDENTITY_TOLERANCE
        ),
        CheckResult.informational("literal-spin-normalization", literal),
    ]
    if not volume:
        return checks

    gauges = (packet, replace(packet, gauge_amplitude=packet.amplitude))
    for config in gauges:
        report = volume_integral_checks(config, grid)
        for check in report.checks:
            checks.append(
                CheckResult(
                    name=f"volume-{check.name}-{report.gauge}",
                    residual=check.residual,
                    tolerance=check.tolerance,
                    values=dict(
                        check.values, boundary_flux=report.boundary_flux
                    ),
                )
            )
        checks.extend(order_verification(config, grid))
    return checks
