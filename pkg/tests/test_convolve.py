import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fgkit.convolve import convolution_kernel, line_convolve, multiplicative_convolve, volterra_convolve
from fgkit.errors import ContourHitsCut, DomainError
from fgkit.kernels import make_exponential_kernel
from fgkit.transforms import radon_abel_forward, spherical_laplace


@pytest.fixture(params=[3, 4])
def pair(request):
    d = request.param
    return make_exponential_kernel(d, 2.0), make_exponential_kernel(d, 3.0, mu=0.3)


def test_commutative(pair):
    f1, f2 = pair
    a = volterra_convolve(f1, f2, 1.3)
    b = volterra_convolve(f2, f1, 1.3)
    assert abs(a - b) <= 1e-9 * abs(a)


def test_support_starts_at_mu_sum(pair):
    f1, f2 = pair
    assert volterra_convolve(f1, f2, 0.29) == 0
    assert abs(volterra_convolve(f1, f2, 0.35)) > 0


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        volterra_convolve(make_exponential_kernel(3, 2.0), make_exponential_kernel(4, 2.0), 1.0)


def test_full_output_error_estimate(pair):
    f1, f2 = pair
    val, err = volterra_convolve(f1, f2, 1.0, full_output=True)
    assert 0 <= err < 1e-8 * max(1.0, abs(val))


def test_factorization_d4():
    f1, f2 = make_exponential_kernel(4, 2.0), make_exponential_kernel(4, 3.0, mu=0.3)
    C = convolution_kernel(f1, f2).kernel
    lam = 1.5
    lhs = spherical_laplace(C, lam, route="direct")
    rhs = spherical_laplace(f1, lam) * spherical_laplace(f2, lam)
    assert abs(lhs - rhs) <= 1e-6 * abs(rhs)


def test_transmutation_d3():
    f1, f2 = make_exponential_kernel(3, 2.0), make_exponential_kernel(3, 3.0, mu=0.3)
    C = convolution_kernel(f1, f2).kernel
    w = 1.0
    lhs = radon_abel_forward(C, w)
    rhs = line_convolve(lambda x: radon_abel_forward(f1, x), lambda x: radon_abel_forward(f2, x), w)
    assert abs(lhs - rhs) <= 1e-6 * max(1.0, abs(rhs))


@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.1, 4.0))
def test_line_convolution_of_exponentials(a, b, w):
    got = line_convolve(lambda t: np.exp(-a * t), lambda t: np.exp(-b * t), w)
    ref = w * math.exp(-a * w) if abs(a - b) < 1e-9 else (math.exp(-a * w) - math.exp(-b * w)) / (b - a)
    assert abs(got - ref) < 1e-12


def test_multiplicative_hadamard_product():
    S1 = lambda z: 1 / (1 - z / 2)
    S2 = lambda z: 1 / (1 - z / 3)
    assert abs(multiplicative_convolve(S1, S2, 3.0, 2.0, 3.0) - 2.0) < 1e-12
    assert abs(multiplicative_convolve(S1, S2, 2 + 1j, 2.0, 3.0) - 1 / (1 - (2 + 1j) / 6)) < 1e-12
    with pytest.raises(ContourHitsCut):
        multiplicative_convolve(S1, S2, 7.0, 2.0, 3.0)
