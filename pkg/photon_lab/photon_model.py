"""Photon constructs: the energy split of a photon, one-form fields with
their period and flux integrals, the generalized momentum and the
angular-momentum four-tensor of free particle ensembles.

One-forms :math:`a` carry momentum units; their loop integrals carry units
of action (J·s) so that a vortex of strength :math:`\\hbar` winds to
multiples of :math:`\\hbar`.

"""

import logging
import math
from dataclasses import dataclass
from dataclasses import replace
from typing import Callable
from typing import Optional
from typing import Tuple

import numpy as np

from photon_lab.constants import FINE_STRUCTURE
from photon_lab.constants import HBAR
from photon_lab.constants import PLANCK
from photon_lab.constants import SPEED_OF_LIGHT
from photon_lab.em_fields import FieldConfiguration
from photon_lab.em_fields import spacetime_point
from photon_lab.em_fields import transverse_basis
from photon_lab.errors import DomainError
from photon_lab.errors import LoopGeometryError
from photon_lab.errors import NonConvergenceError
from photon_lab.numerics import Grid4
from photon_lab.numerics import partial_derivatives

_logger = logging.getLogger(__name__)

#: Gauss-Legendre nodes per segment of the composite line and surface rules
GAUSS_NODES = 8

#: relative agreement of two successive doublings of a line integral
LOOP_REL_TOL = 1e-9

#: closest approach of a loop to a singular axis, relative to the loop size
SINGULARITY_GUARD = 1e-9

#: segment doublings before a line integral gives up
MAX_DOUBLINGS = 12

#: tolerance of the normalization of a direction
DIRECTION_TOLERANCE = 1e-12

#: finite difference step of a curl relative to the field's length scale
CURL_STEP = 1e-3

Field3 = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PhotonState:
    """A photon of frequency ``frequency`` (Hz) travelling along
    ``direction`` with helicity ``helicity``; it carries momentum
    :math:`\\hbar k` and spin :math:`\\sigma\\hbar` along :math:`\\hat{k}`.

    """

    frequency: float
    direction: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    helicity: int = 1

    def __post_init__(self) -> None:
        if not self.frequency > 0:
            raise DomainError(
                f"the frequency must be positive, got {self.frequency}"
            )
        norm = float(np.linalg.norm(self.direction))
        if abs(norm - 1.0) > DIRECTION_TOLERANCE:
            raise DomainError(
                f"the direction {self.direction} is not normalized "
                f"(norm {norm})"
            )
        if self.helicity not in (-1, 1):
            raise DomainError(
                f"the helicity must be +1 or -1, got {self.helicity}"
            )

    @property
    def energy(self) -> float:
        return PLANCK * self.frequency

    @property
    def momentum(self) -> np.ndarray:
        return self.energy / SPEED_OF_LIGHT * np.asarray(self.direction)

    @property
    def spin(self) -> np.ndarray:
        return self.helicity * HBAR * np.asarray(self.direction)


def energy_split(nu: float) -> Tuple[float, float]:
    """Returns the spin part :math:`\\hbar\\omega/2` and the translational
    part :math:`h\\nu/2` of the photon energy :math:`h\\nu`.

    Both parts are the same number, half of :math:`h\\nu`, so that they add
    up to :math:`h\\nu` without rounding.

    """
    if not nu > 0:
        raise DomainError(f"the frequency must be positive, got {nu}")
    half = PLANCK * nu / 2
    return half, half


def classical_split(
    p: float, v: float, L: float, omega: float
) -> Tuple[float, float]:
    """Kinetic :math:`pv/2` and rotational :math:`L\\omega/2` energy of a
    spinning body.

    """
    if min(p, v, L, omega) < 0:
        raise DomainError(
            f"p, v, L and omega must be non-negative, got {(p, v, L, omega)}"
        )
    return p * v / 2, L * omega / 2


@dataclass(frozen=True)
class OneFormField:
    """A one-form :math:`a(x)` in momentum units.

    Parameters:
    values: vectorized map from positions ``(..., 3)`` to ``(..., 3)``
    length_scale: size over which ``a`` varies, sets the curl step
    singular_axis: point and direction of a line on which ``a`` is
        singular, or ``None``
    name: label used in reports

    """

    values: Field3
    length_scale: float = 1.0
    singular_axis: Optional[
        Tuple[Tuple[float, float, float], Tuple[float, float, float]]
    ] = None
    name: str = "one-form"

    def __call__(self, x) -> np.ndarray:
        return self.values(np.asarray(x, dtype=float))

    def axis_distance(self, x: np.ndarray) -> np.ndarray:
        """Distance of positions ``x`` from the singular axis."""
        x = np.asarray(x, dtype=float)
        if self.singular_axis is None:
            return np.full(x.shape[:-1], np.inf)
        origin, direction = (
            np.asarray(v, dtype=float) for v in self.singular_axis
        )
        direction = direction / np.linalg.norm(direction)
        d = x - origin
        along = (d @ direction)[..., None] * direction
        return np.linalg.norm(d - along, axis=-1)

    def curl(self, x) -> np.ndarray:
        """:math:`\\nabla\\times a` by fourth order central differences."""
        step = CURL_STEP * self.length_scale
        grid = Grid4(spacing=(step,) * 4)
        points = spacetime_point(x, 0.0, 1.0)
        d_a = partial_derivatives(
            lambda p: self.values(p[..., 1:]), points, grid
        )
        return np.stack(
            [
                d_a[..., 2, 2] - d_a[..., 3, 1],
                d_a[..., 3, 0] - d_a[..., 1, 2],
                d_a[..., 1, 1] - d_a[..., 2, 0],
            ],
            axis=-1,
        )

    def curl_field(self) -> Field3:
        return self.curl


def vortex_one_form(
    strength: float = HBAR,
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> OneFormField:
    """:math:`a = \\frac{s}{2\\pi}\\nabla\\varphi` around the z-axis through
    ``center``; every loop winding once around the axis integrates to
    :math:`s`.

    """
    origin = np.asarray(center, dtype=float)

    def values(x: np.ndarray) -> np.ndarray:
        d = x - origin
        rho2 = d[..., 0] ** 2 + d[..., 1] ** 2
        factor = strength / (2 * math.pi) / rho2
        return np.stack(
            [-d[..., 1] * factor, d[..., 0] * factor, np.zeros_like(rho2)],
            axis=-1,
        )

    return OneFormField(
        values=values,
        singular_axis=(tuple(center), (0.0, 0.0, 1.0)),
        name="vortex",
    )


def gradient_one_form(
    gradient: Field3, length_scale: float = 1.0, name: str = "gradient"
) -> OneFormField:
    """Wraps the gradient of a single-valued scalar; its loop integrals
    vanish.

    """
    return OneFormField(values=gradient, length_scale=length_scale, name=name)


def gaussian_beam_one_form(
    width: float = 1.0, helicity: int = 1, strength: float = HBAR
) -> OneFormField:
    """Cross-section of a circularly polarized beam of waist ``width``
    along z,

    .. math::

       a = \\frac{\\sigma s}{2\\pi}\\,\\frac{1 - e^{-\\rho^2/w^2}}{\\rho^2}
       (-y, x, 0),

    whose curl :math:`\\frac{\\sigma s}{\\pi w^2} e^{-\\rho^2/w^2}\\hat{z}`
    carries the flux :math:`\\sigma s(1 - e^{-R^2/w^2})` through a disk of
    radius :math:`R`.

    """
    if helicity not in (-1, 1):
        raise DomainError(f"the helicity must be +1 or -1, got {helicity}")

    def values(x: np.ndarray) -> np.ndarray:
        rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
        s = rho2 / width**2
        small = s < 1e-8
        with np.errstate(divide="ignore", invalid="ignore"):
            profile = np.where(
                small,
                (1 - s / 2) / width**2,
                -np.expm1(-s) / np.where(small, 1.0, rho2),
            )
        factor = helicity * strength / (2 * math.pi) * profile
        return np.stack(
            [-x[..., 1] * factor, x[..., 0] * factor, np.zeros_like(rho2)],
            axis=-1,
        )

    return OneFormField(
        values=values, length_scale=width, name="gaussian-beam"
    )


def one_form_from_potential(
    config: FieldConfiguration, t: float = 0.0, factor: float = 1.0
) -> OneFormField:
    """Spatial part of the potential of ``config`` at time ``t`` scaled by
    ``factor`` (e.g. :math:`\\hbar/e` to turn :math:`A` into momentum
    units).

    """

    def values(x: np.ndarray) -> np.ndarray:
        return factor * config.potential(spacetime_point(x, t, config.c))[
            ..., 1:
        ]

    length = 1.0
    wavenumber = getattr(config, "wavenumber", None)
    if wavenumber:
        length = 1.0 / wavenumber
    return OneFormField(
        values=values, length_scale=length, name=type(config).__name__
    )


@dataclass(frozen=True)
class LoopPath:
    """Closed curve :math:`\\gamma(s)`, :math:`s \\in [0, 1]`, with its
    derivative :math:`\\gamma'(s)`.

    ``segments`` is the starting number of composite quadrature segments.

    """

    curve: Field3
    tangent: Field3
    scale: float
    segments: int = 16
    name: str = "loop"

    def __post_init__(self) -> None:
        gap = float(
            np.linalg.norm(
                self.curve(np.array(1.0)) - self.curve(np.array(0.0))
            )
        )
        if gap > 1e-12 * self.scale:
            raise LoopGeometryError(
                f"loop '{self.name}' does not close, end points differ by "
                f"{gap}"
            )

    def reparameterized(
        self, warp: Callable, warp_derivative: Callable
    ) -> "LoopPath":
        """The same geometric loop traversed as :math:`\\gamma(w(s))` for a
        monotone ``warp`` with :math:`w(0) = 0` and :math:`w(1) = 1`.

        """
        return replace(
            self,
            curve=lambda s: self.curve(warp(s)),
            tangent=lambda s: self.tangent(warp(s))
            * np.asarray(warp_derivative(s))[..., None],
            name=f"{self.name}-reparameterized",
        )


def circle_loop(
    radius: float,
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0),
    windings: int = 1,
    normal: Tuple[float, float, float] = (0.0, 0.0, 1.0),
) -> LoopPath:
    """Circle traversed ``windings`` times, counterclockwise seen from the
    tip of ``normal`` (negative windings run clockwise).

    """
    if not radius > 0:
        raise LoopGeometryError(f"the radius must be positive, got {radius}")
    if windings == 0:
        raise LoopGeometryError("a loop needs at least one winding")
    origin = np.asarray(center, dtype=float)
    e1, e2 = transverse_basis(normal)
    turns = 2 * math.pi * windings

    def curve(s: np.ndarray) -> np.ndarray:
        angle = turns * np.asarray(s, dtype=float)[..., None]
        return origin + radius * (np.cos(angle) * e1 + np.sin(angle) * e2)

    def tangent(s: np.ndarray) -> np.ndarray:
        angle = turns * np.asarray(s, dtype=float)[..., None]
        return turns * radius * (-np.sin(angle) * e1 + np.cos(angle) * e2)

    return LoopPath(
        curve=curve,
        tangent=tangent,
        scale=radius,
        segments=max(16, 8 * abs(windings)),
        name=f"circle(r={radius}, windings={windings})",
    )


@dataclass(frozen=True)
class LineIntegral:
    """Value of :math:`\\oint a\\cdot dl` and its natural scale
    :math:`\\oint |a\\cdot dl|`.

    """

    value: float
    scale: float
    segments: int

    def __float__(self) -> float:
        return self.value


def _gauss_rule(
    segments: int, lower: float = 0.0, upper: float = 1.0
) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_NODES)
    edges = np.linspace(lower, upper, segments + 1)
    half = (edges[1:] - edges[:-1])[:, None] / 2
    mid = (edges[1:] + edges[:-1])[:, None] / 2
    return (mid + half * nodes).ravel(), (half * weights).ravel()


def _loop_sum(
    a: OneFormField, loop: LoopPath, segments: int, guard: float
) -> Tuple[float, float]:
    s, w = _gauss_rule(segments)
    x = loop.curve(s)
    distance = float(np.min(a.axis_distance(x)))
    if distance < guard * loop.scale:
        raise LoopGeometryError(
            f"loop '{loop.name}' passes within {distance} of the singular "
            f"axis of '{a.name}'"
        )
    integrand = np.sum(a(x) * loop.tangent(s), axis=-1)
    if not np.all(np.isfinite(integrand)):
        raise LoopGeometryError(
            f"'{a.name}' is not finite on loop '{loop.name}'"
        )
    return math.fsum(w * integrand), math.fsum(w * np.abs(integrand))


def period_integral(
    a: OneFormField,
    loop: LoopPath,
    rel_tol: float = LOOP_REL_TOL,
    guard: float = SINGULARITY_GUARD,
) -> LineIntegral:
    """:math:`\\oint_\\gamma a\\cdot dl` by composite Gauss-Legendre
    quadrature in the loop parameter.

    The number of segments doubles until two successive values agree to
    ``rel_tol`` relative to the larger of the value and its scale
    :math:`\\oint|a\\cdot dl|`. Raises
    :py:class:`~photon_lab.errors.LoopGeometryError` if the loop comes
    closer than ``guard`` times its size to the singular axis of ``a``.

    """
    segments = loop.segments
    value, scale = _loop_sum(a, loop, segments, guard)
    for _ in range(MAX_DOUBLINGS):
        segments *= 2
        refined, scale = _loop_sum(a, loop, segments, guard)
        if abs(refined - value) <= rel_tol * max(abs(refined), scale):
            _logger.debug(
                "period integral of %s over %s converged with %d segments",
                a.name,
                loop.name,
                segments,
            )
            return LineIntegral(value=refined, scale=scale, segments=segments)
        value = refined
    raise NonConvergenceError(
        f"period integral of '{a.name}' over '{loop.name}' did not converge "
        f"with {segments} segments",
        value=value,
        tolerance=rel_tol,
    )


@dataclass(frozen=True)
class SurfacePatch:
    """Parameterized surface :math:`S(u, v)` on a rectangle of parameters,
    oriented by :math:`\\partial_u S \\times \\partial_v S`.

    """

    point: Callable[[np.ndarray, np.ndarray], np.ndarray]
    du: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dv: Callable[[np.ndarray, np.ndarray], np.ndarray]
    u_range: Tuple[float, float]
    v_range: Tuple[float, float]
    boundary: Optional[LoopPath] = None
    segments: Tuple[int, int] = (8, 16)
    name: str = "surface"


def disk_patch(
    radius: float,
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0),
    normal: Tuple[float, float, float] = (0.0, 0.0, 1.0),
) -> SurfacePatch:
    """Flat disk with normal ``normal``; its boundary is the matching
    :py:func:`circle_loop`.

    """
    origin = np.asarray(center, dtype=float)
    e1, e2 = transverse_basis(normal)

    def radial(angle: np.ndarray) -> np.ndarray:
        return np.cos(angle)[..., None] * e1 + np.sin(angle)[..., None] * e2

    def azimuthal(angle: np.ndarray) -> np.ndarray:
        return -np.sin(angle)[..., None] * e1 + np.cos(angle)[..., None] * e2

    return SurfacePatch(
        point=lambda rho, angle: origin + rho[..., None] * radial(angle),
        du=lambda rho, angle: radial(angle),
        dv=lambda rho, angle: rho[..., None] * azimuthal(angle),
        u_range=(0.0, radius),
        v_range=(0.0, 2 * math.pi),
        boundary=circle_loop(radius, center=center, normal=normal),
        name=f"disk(r={radius})",
    )


def flux_integral(b: Field3, surface: SurfacePatch) -> float:
    """Oriented flux :math:`\\int_S b\\cdot dS` by a tensor-product
    composite Gauss-Legendre rule over the patch parameters.

    For a field in units of :math:`\\hbar` per area the result is an
    angular momentum; it is reported as a plain number.

    """
    u, wu = _gauss_rule(surface.segments[0], *surface.u_range)
    v, wv = _gauss_rule(surface.segments[1], *surface.v_range)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    normal = np.cross(surface.du(uu, vv), surface.dv(uu, vv), axis=-1)
    integrand = np.sum(b(surface.point(uu, vv)) * normal, axis=-1)
    return math.fsum((wu[:, None] * wv[None, :] * integrand).ravel())


def generalized_momentum(p, a) -> np.ndarray:
    """:math:`p - \\alpha a` with the fine-structure constant
    :math:`\\alpha`.

    """
    return np.asarray(p, dtype=float) - FINE_STRUCTURE * np.asarray(
        a, dtype=float
    )


@dataclass(frozen=True)
class ParticleEnsemble:
    """Free particles at time ``time`` (s): positions (m), momenta
    (kg·m/s) and energies (J), one row per particle. ``masses`` (kg) are
    optional; without them the particles are massless.

    """

    positions: np.ndarray
    momenta: np.ndarray
    energies: np.ndarray
    time: float = 0.0
    masses: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        for attr, promote in (
            ("positions", np.atleast_2d),
            ("momenta", np.atleast_2d),
            ("energies", np.atleast_1d),
        ):
            value = np.asarray(getattr(self, attr), dtype=float)
            object.__setattr__(self, attr, promote(value))
        if self.positions.shape != self.momenta.shape or (
            self.positions.shape[:-1] != self.energies.shape
        ):
            raise ValueError(
                f"inconsistent shapes {self.positions.shape}, "
                f"{self.momenta.shape}, {self.energies.shape}"
            )
        pc = np.linalg.norm(self.momenta, axis=-1) * SPEED_OF_LIGHT
        rest = np.zeros_like(pc)
        if self.masses is not None:
            rest = np.asarray(self.masses, dtype=float) * SPEED_OF_LIGHT**2
        expected = np.hypot(pc, rest)
        if np.any(np.abs(self.energies - expected) > 1e-9 * expected):
            raise DomainError(
                "energies are inconsistent with the momenta and masses: "
                f"{self.energies} vs {expected}"
            )

    @property
    def velocities(self) -> np.ndarray:
        return self.momenta * (SPEED_OF_LIGHT**2 / self.energies)[:, None]

    def advance(self, dt: float) -> "ParticleEnsemble":
        """Free flight over ``dt`` seconds."""
        return replace(
            self,
            positions=self.positions + self.velocities * dt,
            time=self.time + dt,
        )


def ensemble_angular_tensor(ens: ParticleEnsemble) -> np.ndarray:
    """:math:`M^{\\mu\\nu} = \\sum (x^\\mu p^\\nu - x^\\nu p^\\mu)` with
    :math:`x^0 = ct` and :math:`p^0 = E/c`.

    The spatial block holds the total orbital angular momentum,
    :math:`M^{0i} = c\\sum(t p^i - E x^i / c^2)`.

    """
    n = len(ens.energies)
    x = np.concatenate(
        [np.full((n, 1), SPEED_OF_LIGHT * ens.time), ens.positions], axis=-1
    )
    p = np.concatenate(
        [(ens.energies / SPEED_OF_LIGHT)[:, None], ens.momenta], axis=-1
    )
    m = np.einsum("ni,nj->ij", x, p)
    return m - m.T
