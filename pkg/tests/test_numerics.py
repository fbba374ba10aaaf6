"""Tests of the numerical building blocks: quadrature, maximization,
finite differences, spherical harmonics and random streams.

"""

import math

import numpy as np
import pytest
from scipy import optimize

from photon_lab.errors import NoInteriorPeakError
from photon_lab.errors import NonConvergenceError
from photon_lab.numerics import Grid4
from photon_lab.numerics import Quadrature
from photon_lab.numerics import central_difference
from photon_lab.numerics import find_maximum
from photon_lab.numerics import integrate
from photon_lab.numerics import laplacian
from photon_lab.numerics import partial_derivatives
from photon_lab.numerics import random_stream
from photon_lab.numerics import spawn_streams
from photon_lab.numerics import spherical_harmonic


def _planck_integrand(x: float) -> float:
    if x == 0.0:
        return 0.0
    return x**3 / math.expm1(x)


def test_integrate_planck_moment():
    """The Planck moment :math:`\\int_0^\\infty x^3/(e^x - 1)dx` equals
    :math:`\\pi^4/15`.

    """
    result = integrate(_planck_integrand, 0.0, math.inf)
    assert result.value == pytest.approx(math.pi**4 / 15, rel=1e-10)
    assert result.error <= Quadrature().tolerance_for(result.value)


@pytest.mark.parametrize(
    "coefficients",
    [(0.0, 1.0), (1.0, -2.0, 3.0), (0.5, 0.0, 0.0, 0.0, 0.0, 7.0)],
)
def test_integrate_polynomials_exactly(coefficients):
    """Polynomials up to degree 5 are integrated exactly on a finite
    interval.

    """
    poly = np.polynomial.Polynomial(coefficients)
    exact = poly.integ()(1.5) - poly.integ()(-0.5)
    result = integrate(lambda x: float(poly(x)), -0.5, 1.5)
    assert result.value == pytest.approx(exact, rel=1e-13)


def test_integrate_unit_interval():
    assert integrate(lambda x: x, 0.0, 1.0).value == pytest.approx(
        0.5, rel=1e-14
    )


@pytest.mark.parametrize("n", range(6))
def test_integrate_gamma_moments(n):
    """:math:`\\int_0^\\infty x^n e^{-x} dx = n!` on the semi-infinite
    ray.

    """
    result = integrate(lambda x: x**n * math.exp(-x), 0.0, math.inf)
    assert result.value == pytest.approx(math.factorial(n), rel=1e-10)


def test_integrate_empty_interval():
    result = integrate(math.exp, 2.0, 2.0)
    assert result.value == 0.0 and result.error == 0.0


def test_integrate_rejects_bad_bounds():
    with pytest.raises(ValueError):
        integrate(math.exp, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(math.exp, -math.inf, 0.0)


def test_integrate_reports_non_convergence():
    """A strongly oscillating integrand without room for subdivisions
    fails loudly instead of returning an inaccurate value.

    """
    with pytest.raises(NonConvergenceError) as exc_info:
        integrate(
            lambda x: math.sin(50 * x),
            0.0,
            10.0,
            Quadrature(max_subdivisions=1),
        )
    assert exc_info.value.error > exc_info.value.tolerance


@pytest.mark.parametrize(
    "kwargs",
    [{"rel_tol": 0.0}, {"abs_tol": -1.0}, {"max_subdivisions": 0}],
)
def test_quadrature_validation(kwargs):
    with pytest.raises(ValueError):
        Quadrature(**kwargs)


def test_find_maximum_planck_peak():
    """The maximum of :math:`x^3/(e^x - 1)` solves
    :math:`3(1 - e^{-x}) = x`.

    """
    oracle = optimize.brentq(
        lambda x: 3 * (1 - math.exp(-x)) - x, 1.0, 5.0, xtol=1e-15
    )
    peak = find_maximum(_planck_integrand, (1e-3, 50.0))
    assert oracle == pytest.approx(2.821439, abs=1e-6)
    assert peak.location == pytest.approx(oracle, rel=1e-10)


@pytest.mark.parametrize(
    "func,bracket,location",
    [
        (lambda x: -((x - 1) ** 2), (0.0, 2.0), 1.0),
        (lambda x: x**2 * math.exp(-x), (0.0, 10.0), 2.0),
    ],
)
def test_find_maximum_simple(func, bracket, location):
    peak = find_maximum(func, bracket)
    assert peak.location == pytest.approx(location, rel=1e-10)
    assert peak.value == pytest.approx(func(location), rel=1e-12)


def test_find_maximum_monotone():
    with pytest.raises(NoInteriorPeakError):
        find_maximum(lambda x: x, (0.0, 1.0))


def test_partial_derivative_of_square():
    grid = Grid4(spacing=(1e-3,) * 4)
    d = partial_derivatives(
        lambda p: p[..., 1] ** 2, np.array([0.0, 3.0, 0.0, 0.0]), grid
    )
    assert d[1] == pytest.approx(6.0, rel=1e-10)
    assert np.all(np.abs(d[[0, 2, 3]]) < 1e-9)


def test_partial_derivative_in_time():
    omega = 2.5
    grid = Grid4(spacing=(1e-3,) * 4)
    d = partial_derivatives(
        lambda p: np.sin(omega * p[..., 0]), np.zeros(4), grid
    )
    assert d[0] == pytest.approx(omega, rel=1e-10)


def test_partial_derivatives_vector_field_batches():
    """Batches of points and vector valued fields keep the derivative axis
    right after the batch axes.

    """
    grid = Grid4(spacing=(1e-3,) * 4)
    points = np.array([[0.0, 1.0, 2.0, 3.0], [1.0, -1.0, 0.5, 2.0]])

    def field(p):
        return np.stack([p[..., 1] * p[..., 2], p[..., 3] ** 2], axis=-1)

    d = partial_derivatives(field, points, grid)
    assert d.shape == (2, 4, 2)
    np.testing.assert_allclose(d[:, 1, 0], points[:, 2], rtol=1e-9)
    np.testing.assert_allclose(d[:, 2, 0], points[:, 1], rtol=1e-9)
    np.testing.assert_allclose(d[:, 3, 1], 2 * points[:, 3], rtol=1e-9)


def test_finite_difference_order():
    """Halving the step reduces the error of the derivative of
    :math:`\\sin(kx)` about sixteen-fold.

    """
    k, x = 1.3, 0.4
    point = np.array([0.0, x, 0.0, 0.0])
    errors = []
    for h in (0.05, 0.025):
        d = partial_derivatives(
            lambda p: np.sin(k * p[..., 1]), point, Grid4(spacing=(h,) * 4)
        )
        errors.append(abs(d[1] - k * math.cos(k * x)))
    assert errors[1] / errors[0] == pytest.approx(1 / 16, rel=0.05)


def test_central_difference():
    assert central_difference(math.exp, 0.5, 1e-3) == pytest.approx(
        math.exp(0.5), rel=1e-10
    )


def test_laplacian_of_quadratic():
    grid = Grid4(spacing=(1e-2,) * 4)
    value = laplacian(
        lambda p: p[..., 0] ** 2 + p[..., 1] ** 2 + 2 * p[..., 3] ** 2,
        np.array([0.3, 1.0, 2.0, -1.0]),
        grid,
    )
    assert value == pytest.approx(6.0, rel=1e-9)


def test_grid_validation_and_refinement():
    with pytest.raises(ValueError):
        Grid4(spacing=(1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        Grid4(spacing=(1.0, 0.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        Grid4(spacing=(1.0,) * 4, order=2)
    grid = Grid4(spacing=(0.2, 0.4, 0.4, 0.4), points=5)
    assert grid.refined().spacing == (0.1, 0.2, 0.2, 0.2)
    assert grid.refined().points == 5
    axes = grid.axes()
    assert len(axes) == 3
    np.testing.assert_allclose(axes[0], [-1.0, -0.5, 0.0, 0.5, 1.0])


def test_spherical_harmonic_values():
    theta = np.array([0.3, 1.1, 2.5])
    phi = np.array([0.0, 1.0, -2.0])
    np.testing.assert_allclose(
        spherical_harmonic(0, 0, theta, phi), 0.5 / math.sqrt(math.pi)
    )
    np.testing.assert_allclose(
        spherical_harmonic(1, 0, theta, phi),
        math.sqrt(3 / (4 * math.pi)) * np.cos(theta),
        atol=1e-15,
    )
    # Condon-Shortley phase
    np.testing.assert_allclose(
        spherical_harmonic(1, 1, theta, phi),
        -math.sqrt(3 / (8 * math.pi)) * np.sin(theta) * np.exp(1j * phi),
        atol=1e-15,
    )
    assert not np.any(spherical_harmonic(1, 2, theta, phi))


def test_random_stream_is_reproducible():
    first = random_stream(42).random(5)
    second = random_stream(42).random(5)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, random_stream(43).random(5))


def test_spawned_streams_differ_and_repeat():
    streams = spawn_streams(7, 3)
    draws = [s.random(4) for s in streams]
    assert not np.array_equal(draws[0], draws[1])
    again = [s.random(4) for s in spawn_streams(7, 3)]
    for a, b in zip(draws, again):
        assert np.array_equal(a, b)
