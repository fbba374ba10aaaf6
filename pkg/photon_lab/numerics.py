"""Numerical building blocks: adaptive quadrature on finite and
semi-infinite intervals, maximization of unimodal functions, fourth order
finite differences, spherical harmonics and seeded random streams.

Everything in here is a pure function of its arguments.

"""

import logging
import math
from dataclasses import dataclass
from dataclasses import replace
from typing import Callable
from typing import List
from typing import Tuple

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy import special as _special

from photon_lab.errors import NonConvergenceError
from photon_lab.errors import NoInteriorPeakError

_logger = logging.getLogger(__name__)

#: default relative tolerance of :py:func:`integrate`
DEFAULT_REL_TOL = 1e-10

#: default absolute tolerance of :py:func:`integrate`
DEFAULT_ABS_TOL = 1e-14

#: default upper bound of adaptive subdivisions
DEFAULT_MAX_SUBDIVISIONS = 200

#: name of the bit generator behind :py:func:`random_stream`
GENERATOR_NAME = "PCG64"

#: coefficients of the fourth order first derivative stencil at offsets
#: -2h, -h, +h, +2h (to be divided by 12h)
_FIRST_DERIVATIVE_STENCIL = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_FIRST_DERIVATIVE_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])

#: coefficients of the fourth order second derivative stencil at offsets
#: -2h, -h, 0, +h, +2h (to be divided by 12h²)
_SECOND_DERIVATIVE_STENCIL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_SECOND_DERIVATIVE_OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])


@dataclass(frozen=True)
class Quadrature:
    """Tolerances of an adaptive quadrature."""

    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError(
                "quadrature tolerances must be positive, got "
                f"rel_tol={self.rel_tol}, abs_tol={self.abs_tol}"
            )
        if self.max_subdivisions < 1:
            raise ValueError(
                "max_subdivisions must be at least 1, got "
                f"{self.max_subdivisions}"
            )

    def tolerance_for(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float


@dataclass(frozen=True)
class Peak:
    """Location and value of an interior maximum."""

    location: float
    value: float


@dataclass(frozen=True)
class Grid4:
    """Finite difference steps and integration lattice in spacetime.

    The coordinates are :math:`x^\\mu = (ct, x, y, z)`. ``spacing`` holds
    the finite difference step along each of the four axes, ``extent`` the
    three spatial intervals of the integration box and ``points`` the
    number of lattice nodes per spatial axis. The finite difference order
    is fixed to 4.

    """

    spacing: Tuple[float, float, float, float]
    extent: Tuple[
        Tuple[float, float], Tuple[float, float], Tuple[float, float]
    ] = ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))
    points: int = 64
    order: int = 4

    def __post_init__(self) -> None:
        if len(self.spacing) != 4:
            raise ValueError(
                f"expected 4 finite difference steps, got {self.spacing}"
            )
        if any(h <= 0 for h in self.spacing):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if len(self.extent) != 3 or any(
            lo >= hi for lo, hi in self.extent
        ):
            raise ValueError(f"invalid spatial extent {self.extent}")
        if self.points < 3:
            raise ValueError(
                f"the lattice needs at least 3 points, got {self.points}"
            )
        if self.order != 4:
            raise ValueError(
                "only fourth order differences are supported, got "
                f"{self.order}"
            )

    def refined(self) -> "Grid4":
        """Returns a copy with all finite difference steps halved."""
        return replace(self, spacing=tuple(h / 2 for h in self.spacing))

    def axes(self) -> List[np.ndarray]:
        """The lattice nodes along x, y and z (boundaries included)."""
        return [np.linspace(lo, hi, self.points) for lo, hi in self.extent]


def _map_semi_infinite(
    f: Callable[[float], float], lower: float
) -> Callable[[float], float]:
    # x = lower - ln(1 - t), dx = dt / (1 - t)
    def mapped(t: float) -> float:
        one_minus_t = 1.0 - t
        if one_minus_t <= 0.0:
            return 0.0
        return f(lower - math.log1p(-t)) / one_minus_t

    return mapped


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    q: Quadrature = Quadrature(),
) -> QuadratureResult:
    """Integrates ``f`` from ``lower`` to ``upper`` adaptively.

    ``upper`` may be :py:data:`math.inf`, in which case the ray is mapped
    onto :math:`[0, 1)` via :math:`x = lower - \\ln(1 - t)`. The reported
    error is guaranteed to be at most ``max(abs_tol, rel_tol·|value|)``,
    otherwise :py:class:`~photon_lab.errors.NonConvergenceError` is raised.

    """
    if math.isinf(lower):
        raise ValueError("the lower integration bound must be finite")
    if upper < lower:
        raise ValueError(
            f"integration bounds out of order: [{lower}, {upper}]"
        )
    if upper == lower:
        return QuadratureResult(0.0, 0.0)

    if math.isinf(upper):
        integrand = _map_semi_infinite(f, lower)
        a, b = 0.0, 1.0
    else:
        integrand = f
        a, b = lower, upper

    res = _integrate.quad(
        integrand,
        a,
        b,
        epsabs=q.abs_tol,
        epsrel=q.rel_tol,
        limit=q.max_subdivisions,
        full_output=1,
    )
    value, error, info = res[0], res[1], res[2]
    _logger.debug(
        "quadrature on [%s, %s]: %d evaluations, %d subintervals",
        lower,
        upper,
        info["neval"],
        info["last"],
    )

    tolerance = q.tolerance_for(value)
    if not math.isfinite(value) or error > tolerance:
        raise NonConvergenceError(
            f"quadrature on [{lower}, {upper}] did not converge: value "
            f"{value}, error estimate {error} > tolerance {tolerance}",
            value=value,
            error=error,
            tolerance=tolerance,
        )
    if len(res) > 3:
        _logger.warning(
            "quadrature on [%s, %s] flagged by QUADPACK but within "
            "tolerance: %s",
            lower,
            upper,
            res[3],
        )
    return QuadratureResult(value=value, error=error)


def central_difference(
    f: Callable[[float], float], x: float, step: float
) -> float:
    """Fourth order central difference approximation of :math:`f'(x)`."""
    return (
        f(x - 2 * step) - 8 * f(x - step) + 8 * f(x + step) - f(x + 2 * step)
    ) / (12 * step)


def find_maximum(
    f: Callable[[float], float],
    bracket: Tuple[float, float],
    rel_tol: float = 1e-10,
) -> Peak:
    """Locates the interior maximum of the unimodal function ``f`` on
    ``bracket``.

    A bounded Brent search gives a first estimate, which is refined by
    root-finding on the fourth order derivative estimate until the location
    is accurate to ``rel_tol``. A maximum that sits on a bracket end point
    (i.e. a monotone ``f``) raises
    :py:class:`~photon_lab.errors.NoInteriorPeakError`.

    """
    lo, hi = bracket
    if not lo < hi:
        raise ValueError(f"invalid bracket {bracket}")
    width = hi - lo

    coarse = _optimize.minimize_scalar(
        lambda x: -f(x),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-9 * width},
    )
    x0 = float(coarse.x)
    if min(x0 - lo, hi - x0) < 1e-6 * width:
        raise NoInteriorPeakError(
            f"the maximum on [{lo}, {hi}] lies at the boundary x={x0}"
        )

    step = 1e-3 * max(abs(x0), 1e-3 * width)

    def slope(x: float) -> float:
        return central_difference(f, x, step)

    half = 1e-4 * width
    while True:
        left = max(lo + 2 * step, x0 - half)
        right = min(hi - 2 * step, x0 + half)
        if slope(left) > 0 > slope(right):
            break
        if left <= lo + 2 * step and right >= hi - 2 * step:
            raise NonConvergenceError(
                f"no sign change of the derivative around x={x0} on "
                f"[{lo}, {hi}]"
            )
        half *= 2
    _logger.debug("refining the maximum on [%s, %s]", left, right)

    location = _optimize.brentq(
        slope, left, right, xtol=1e-2 * rel_tol * max(abs(x0), 1e-12 * width)
    )
    return Peak(location=location, value=f(location))


def _stencil_points(
    points: np.ndarray, steps: np.ndarray, offsets: np.ndarray
) -> np.ndarray:
    # shape (..., len(offsets), 4 directions, 4 coordinates)
    shifts = offsets[:, None, None] * np.diag(steps)[None, :, :]
    return points[..., None, None, :] + shifts


def partial_derivatives(
    field: Callable[[np.ndarray], np.ndarray],
    point: np.ndarray,
    grid: Grid4,
) -> np.ndarray:
    """Evaluates all four first partial derivatives of ``field`` at
    ``point`` with fourth order central differences.

    Parameters:
    field: vectorized function mapping coordinates of shape ``(..., 4)`` to
        values of shape ``(..., *C)``
    point: coordinates of shape ``(..., 4)``
    grid: provides the steps along the four axes

    The result has shape ``(..., 4, *C)`` and holds :math:`\\partial_\\mu`
    along the axis after the batch axes.

    """
    point = np.asarray(point, dtype=float)
    steps = np.asarray(grid.spacing, dtype=float)
    values = np.asarray(
        field(_stencil_points(point, steps, _FIRST_DERIVATIVE_OFFSETS))
    )
    batch = point.ndim - 1
    values = np.moveaxis(values, batch, 0)
    deriv = np.tensordot(_FIRST_DERIVATIVE_STENCIL, values, axes=1)
    n_components = deriv.ndim - batch - 1
    return deriv / steps.reshape((4,) + (1,) * n_components)


def laplacian(
    field: Callable[[np.ndarray], np.ndarray],
    point: np.ndarray,
    grid: Grid4,
) -> np.ndarray:
    """Spatial Laplacian :math:`\\nabla^2` of ``field`` at ``point`` with
    fourth order central differences. Shapes as in
    :py:func:`partial_derivatives`, without the derivative axis.

    """
    point = np.asarray(point, dtype=float)
    steps = np.asarray(grid.spacing, dtype=float)
    values = np.asarray(
        field(_stencil_points(point, steps, _SECOND_DERIVATIVE_OFFSETS))
    )
    batch = point.ndim - 1
    values = np.moveaxis(values, batch, 0)
    second = np.tensordot(_SECOND_DERIVATIVE_STENCIL, values, axes=1)
    n_components = second.ndim - batch - 1
    second = second / (steps**2).reshape((4,) + (1,) * n_components)
    # drop the time axis, sum over x, y, z
    return np.take(second, [1, 2, 3], axis=batch).sum(axis=batch)


def spherical_harmonic(
    l: int, m: int, theta: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """Orthonormal spherical harmonic :math:`Y_{lm}(\\theta, \\phi)` with the
    Condon-Shortley phase, :math:`\\theta` being the polar angle.

    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if abs(m) > l:
        return np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
    if hasattr(_special, "sph_harm_y"):
        return _special.sph_harm_y(l, m, theta, phi)
    # scipy < 1.15 swaps the angle and the index order
    return _special.sph_harm(m, l, phi, theta)


def spherical_hankel1(l: int, z: np.ndarray) -> np.ndarray:
    """Spherical Hankel function of the first kind :math:`h_l^{(1)}(z)`."""
    return _special.spherical_jn(l, z) + 1j * _special.spherical_yn(l, z)


def random_stream(seed: int) -> np.random.Generator:
    """Returns a reproducible :py:class:`numpy.random.Generator` backed by
    :py:const:`GENERATOR_NAME` for ``seed``.

    """
    return np.random.Generator(np.random.PCG64(seed))


def spawn_streams(seed: int, count: int) -> List[np.random.Generator]:
    """Derives ``count`` statistically independent streams from ``seed``."""
    return [
        np.random.Generator(np.random.PCG64(child))
        for child in np.random.SeedSequence(seed).spawn(count)
    ]
