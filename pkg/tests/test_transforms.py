import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fgkit import special
from fgkit.errors import ConvergenceDomain, DomainError, IntegerMWithoutEpsilonFlag, NegativeArgument
from fgkit.kernels import (CoefficientSequence, elementary_laplace, make_elementary_triplet,
                           make_exponential_kernel)
from fgkit.transforms import (abel_inverse_hyperboloid, abel_inverse_sphere, circle_fourier_coeffs,
                              d2_fourier, d2_laplace, d2_reconstruct, fourier_laplace_contour,
                              fourier_legendre_coeffs, laplace_transform, mellin_coefficient,
                              power_series_reconstruct, radon_abel_complex, radon_abel_forward,
                              radon_abel_sphere, reconstruct_perikernel, reconstruct_sphere_kernel,
                              reconstruct_volterra_kernel, spherical_laplace, watson_sum)
from conftest import rel

one = lambda v: np.ones_like(np.asarray(v, dtype=float))
W = np.array([0.5, 1.0, 2.0])


def test_abel_of_constant_closed_forms():
    assert np.max(np.abs(radon_abel_forward(one, W, d=3) - 2 * (1 - np.exp(-W)))) < 1e-13
    ref4 = 2 * np.pi * np.exp(-W) * (np.cosh(W) - 1)
    assert np.max(np.abs(radon_abel_forward(one, W, d=4) - ref4)) < 1e-13


def test_abel_rejects_negative_w():
    with pytest.raises(NegativeArgument):
        radon_abel_forward(one, -0.5, d=3)


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_complex_ray_agrees_with_real_forms(d):
    fz = lambda z: z ** 2 + 1j * z
    a = radon_abel_complex(fz, d, 1j * W)
    b = radon_abel_forward(lambda v: fz(np.cosh(v)), W, d=d)
    t = np.array([0.3, 1.0, 2.0])
    c = radon_abel_complex(fz, d, t)
    e = radon_abel_sphere(lambda u: fz(np.cos(u)), t, d=d)
    assert np.max(np.abs(a - b)) < 1e-10
    assert np.max(np.abs(c - e)) < 1e-10


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_hyperboloid_round_trip(d):
    K = make_exponential_kernel(d, 1.5)
    v = np.array([0.1, 1.0, 3.0])
    r = abel_inverse_hyperboloid(lambda w: radon_abel_forward(K, w), d, v)
    assert np.max(np.abs(r - K(v))) < 1e-7


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_sphere_round_trip(d):
    sf = lambda u: np.exp(np.cos(u)) + np.cos(u) ** 2
    u = np.array([0.2, 1.0, 2.9])
    r = abel_inverse_sphere(lambda t: radon_abel_sphere(sf, t, d=d), d, u)
    assert np.max(np.abs(r - sf(u))) < 1e-7


def test_laplace_transform_closed_forms():
    lam = 1 + 0.5j
    assert abs(laplace_transform(lambda v: np.exp(-3 * v), lam, m=-3) - 1 / (lam + 3)) < 1e-12
    assert abs(laplace_transform(one, lam, mu=0.7, m=0) - np.exp(-0.7 * lam) / lam) < 1e-12
    with pytest.raises(ConvergenceDomain):
        laplace_transform(one, -0.5, m=0)


@pytest.mark.parametrize("d,l0,lam", [(3, 0.3, 2.0), (4, 0.25, 1.5), (5, 0.3, 1.0), (6, 0.25, 2.5)])
def test_spherical_laplace_of_elementary_jump(d, l0, lam):
    T = make_elementary_triplet(d, l0)
    assert rel(spherical_laplace(T.volterra, lam), elementary_laplace(d, l0)(lam)) < 1e-10


@pytest.mark.parametrize("d", [3, 4])
def test_spherical_laplace_routes_agree(d):
    K = make_exponential_kernel(d, 2.0, mu=0.3)
    lam = np.array([0.5, 1.5 + 1j])
    a = spherical_laplace(K, lam, route="composed")
    b = spherical_laplace(K, lam, route="direct")
    assert np.max(np.abs(a - b)) < 1e-10


def test_watson_sum_closed_form():
    Ft = lambda l: 1 / (l + 3)

    def closed(th):
        q = cmath.exp(-1j * th)
        return cmath.exp(3j * th) * (-cmath.log(1 - q) - q - q ** 2 / 2 - q ** 3 / 3) / (2 * math.pi)

    for th in (1.0, 2 + 0.5j):
        assert rel(watson_sum(Ft, 0.5, th), closed(th)) < 1e-9


def test_contour_transform_of_exponential():
    assert abs(fourier_laplace_contour(lambda t: np.exp(-1j * t), 2)) < 1e-10


@pytest.mark.parametrize("d", [3, 4])
def test_fourier_legendre_interpolates_laplace(d):
    T = make_elementary_triplet(d, 0.3)
    c = fourier_legendre_coeffs(T, 8)
    E = elementary_laplace(d, 0.3)
    for ell in range(1, 9):
        assert rel(c[ell], E(ell)) < 1e-9


def test_circle_coefficients():
    c = circle_fourier_coeffs(lambda u: np.cos(2 * u), [-2, 0, 2])
    assert abs(c[2] - math.pi) < 1e-12 and abs(c[0]) < 1e-12


def test_d2_pair():
    assert abs(d2_laplace(make_exponential_kernel(2, 2.0), 1.0) - 1 / 3) < 1e-12
    for v in (0.5, 1.0, 2.0):
        assert abs(d2_reconstruct(lambda l: 1 / (l + 2), 0.0, "volterra", v) - math.exp(-2 * v)) < 1e-6
    c = d2_fourier(lambda u: np.cos(u), [1])
    assert abs(c[1] - math.pi) < 1e-12


def test_sphere_series_plain_summation():
    # f(x) = sum_l h_3(l)/(4 pi) r^l P_l(x): the Poisson kernel (1 - r^2)/(4 pi (1 - 2 r x + r^2)^{3/2})
    r = 0.5
    coeffs = CoefficientSequence({}, "N", generator=lambda l: r ** l)
    x = 0.3
    ref = (1 - r * r) / (4 * math.pi * (1 - 2 * r * x + r * r) ** 1.5)
    assert rel(reconstruct_sphere_kernel(coeffs, 3, x), ref) < 1e-10


def test_reconstruct_volterra_from_elementary_transform():
    E = elementary_laplace(4, 0.3)
    v = 0.5
    got = reconstruct_volterra_kernel(E, 4, 0.8, v)
    assert rel(got, special.delta_psi_v(4, 0.3, v)) < 1e-6


def test_reconstruct_rejects_line_left_of_half_plane():
    with pytest.raises(ConvergenceDomain):
        reconstruct_volterra_kernel(elementary_laplace(4, 0.3), 4, 0.1, 1.0)


def test_perikernel_integer_m_needs_flag():
    with pytest.raises(IntegerMWithoutEpsilonFlag):
        reconstruct_perikernel(elementary_laplace(3, -0.5), None, 3, 0.0, -0.5)


def test_mellin_pair():
    assert rel(mellin_coefficient(lambda z: 2 * np.pi * np.ones_like(z), 1.5, 2.0), 2 ** -1.5 / 1.5) < 1e-10
    a = lambda l: 2.0 ** (-l) / l
    val = power_series_reconstruct(a, 0.5, CoefficientSequence({0: 0.0}, "N"), -1.0)
    assert rel(val, -math.log(1.5)) < 1e-9


@given(st.floats(0.1, 2.5))
def test_abel_forward_is_linear(a):
    f = lambda v: np.exp(-a * np.asarray(v))
    g = lambda v: np.cos(np.asarray(v))
    lhs = radon_abel_forward(lambda v: f(v) + 2 * g(v), 1.3, d=4)
    rhs = radon_abel_forward(f, 1.3, d=4) + 2 * radon_abel_forward(g, 1.3, d=4)
    assert abs(lhs - rhs) < 1e-11


def test_d_below_3_rejected():
    with pytest.raises(DomainError):
        spherical_laplace(make_exponential_kernel(2, 1.0), 1.0)


@pytest.mark.parametrize("d", [4, 5, 6])
def test_xi_elements_annihilated_but_not_l0(d):
    beta = (d - 2) / 2
    xi = lambda ell: (lambda t: np.exp(1j * beta * t) * np.cos((ell + beta) * t - beta * np.pi))
    u = np.array([0.4, 1.3, 2.2])
    for ell in range(-int(beta), 0):
        assert np.max(np.abs(abel_inverse_sphere(xi(ell), d, u, check_symmetry=False))) < 1e-9
    assert np.max(np.abs(abel_inverse_sphere(xi(0), d, u, check_symmetry=False))) > 1e-3
