import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fgkit.errors import PoleAtNonPositiveInteger, TailBoundViolated
from fgkit.numerics import (QuadratureSpec, Singularity, cheb_derivative, cheb_fit, gamma,
                            integrate_finite, integrate_semi_infinite, log_gamma)


def test_finite_exponential():
    assert abs(integrate_finite(np.exp, [0.0, 2.0]) - (math.e ** 2 - 1)) < 1e-12


def test_reversed_interval_flips_sign():
    a = integrate_finite(np.cos, [0.0, 1.0])
    b = integrate_finite(np.cos, [1.0, 0.0])
    assert abs(a + b) < 1e-15


def test_endpoint_singularity_removed():
    f = lambda t: t ** -0.5 * (1 + t)
    val = integrate_finite(f, [0.0, 1.0], endpoint_singularity=Singularity(-0.5, "a"))
    assert abs(val - (2 + 2 / 3)) < 1e-12


def test_batched_integrand():
    f = lambda t: np.stack([t, t ** 2, np.exp(1j * t)], axis=-1)
    val = integrate_finite(f, [0.0, 1.0])
    assert np.allclose(val, [0.5, 1 / 3, (np.exp(1j) - 1) / 1j], atol=1e-14)


def test_full_output_reports_error():
    res = integrate_finite(np.sin, [0.0, 3.0], full_output=True)
    assert abs(res.value - (1 - math.cos(3.0))) < 1e-13
    assert res.error >= 0 and res.panels >= 1


def test_semi_infinite_damped_cosine():
    val = integrate_semi_infinite(lambda t: np.exp(-2 * t) * np.cos(t), 0.0, decay_rate=2.0)
    assert abs(val - 0.4) < 1e-12


def test_semi_infinite_requires_rate():
    with pytest.raises(ValueError):
        integrate_semi_infinite(np.exp, 0.0)


def test_semi_infinite_detects_growth():
    with pytest.raises(TailBoundViolated):
        integrate_semi_infinite(lambda t: np.exp(0.5 * t), 0.0, decay_rate=1.0)


def test_spec_rejects_nonpositive_tolerance():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=9))
def test_polynomials_integrate_exactly(coeffs):
    exact = sum(c / (k + 1) for k, c in enumerate(coeffs))
    val = integrate_finite(lambda t: np.polyval(coeffs[::-1], t), [0.0, 1.0])
    assert abs(val - exact) <= 1e-12 * max(1.0, sum(abs(c) for c in coeffs))


def test_chebyshev_derivative():
    p = cheb_fit(np.sin, (0.0, 2.0))
    dp = cheb_derivative(p, 2)
    x = np.linspace(0.1, 1.9, 7)
    assert np.max(np.abs(dp(x) + np.sin(x))) < 1e-9


def test_log_gamma_oracle(oracles):
    for e in oracles["log_gamma"]:
        assert abs(log_gamma(complex(*e["z"])) - complex(*e["value"])) < 1e-12


@given(st.complex_numbers(max_magnitude=6).filter(lambda z: abs(z.imag) > 0.1))
def test_gamma_reflection(z):
    lhs = gamma(z) * gamma(1 - z)
    rhs = math.pi / np.sin(math.pi * z)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_gamma_pole():
    with pytest.raises(PoleAtNonPositiveInteger):
        log_gamma(-3.0)
