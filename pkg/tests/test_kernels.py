import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fgkit import kernels, special
from fgkit.errors import DomainError, MissingCoefficient, SymmetryViolation
from fgkit.kernels import (CoefficientSequence, GrowthClass, HalfPlaneFunction, VolterraKernel,
                           elementary_laplace, kernel_from_json, load_kernel, make_elementary_triplet,
                           make_exponential_kernel, truncation_polynomial)


def test_elementary_laplace_rational_form():
    # -sin(0.3 pi) (1/(2-0.3) + 1/(2+0.3+1))
    ref = -math.sin(0.3 * math.pi) * (1 / 1.7 + 1 / 3.3)
    assert abs(elementary_laplace(3, 0.3)(2.0) - ref) < 1e-15
    assert abs(ref + 0.7210490) < 1e-6


@given(st.floats(0.6, 6.0))
def test_elementary_laplace_even_d_sign(lam):
    ref = -math.sin(0.25 * math.pi) * (1 / (lam - 0.25) - 1 / (lam + 0.25 + 2))
    assert abs(elementary_laplace(4, 0.25)(lam) - ref) < 1e-13


def test_half_plane_rejects_left_evaluation():
    with pytest.raises(DomainError):
        elementary_laplace(3, 0.3)(0.1)


def test_triplet_is_consistent():
    T = make_elementary_triplet(3, 0.3)
    u = np.array([0.4, 1.0, 2.5])
    assert np.allclose(T.sphere(u), special.psi(3, 0.3, np.cos(u)), atol=1e-14)
    assert T.d == 3 and T.growth.m == pytest.approx(0.3)


def test_triplet_rejects_low_degree():
    with pytest.raises(DomainError):
        make_elementary_triplet(4, -1.5)


def test_exponential_kernel_support_and_taper():
    K = make_exponential_kernel(3, 2.0, mu=0.5, taper_order=2)
    assert K(0.4) == 0
    assert K(1.0) == pytest.approx(math.exp(-2.0) * 0.25)
    with pytest.raises(DomainError):
        make_exponential_kernel(3, -1.0)


def test_growth_validation():
    with pytest.raises(DomainError):
        VolterraKernel(lambda v: np.exp(2 * v), GrowthClass(0.0), 3)
    with pytest.raises(DomainError):
        GrowthClass(0.0, mu=-1.0)


def test_coefficient_sequence_lookup():
    c = CoefficientSequence({0: 1.0}, "N", generator=lambda l: 1.0 / (l + 1))
    assert c[0] == 1 and c[3] == 0.25
    with pytest.raises(MissingCoefficient):
        CoefficientSequence({0: 1.0}, "N")[2]
    with pytest.raises(DomainError):
        CoefficientSequence({-1: 1.0}, "N")


def test_circle_symmetry_check():
    good = CoefficientSequence({1: 2.0, -2: -2.0, 0: 1.0, -1: -1.0}, "Z")
    assert good.check_symmetry(3) == 0
    with pytest.raises(SymmetryViolation):
        CoefficientSequence({1: 2.0, -2: 2.0}, "Z").check_symmetry(3)


def test_truncation_polynomial():
    c = CoefficientSequence({0: 2.0, 1: 3.0}, "N")
    poly = truncation_polynomial(3, 1.5, c)
    z = 0.4
    ref = (2.0 * 1 + 3.0 * 3 * z) / (4 * math.pi)
    assert abs(poly(z) - ref) < 1e-15
    assert truncation_polynomial(3, -0.5, CoefficientSequence())(z) == 0
    with pytest.raises(MissingCoefficient):
        truncation_polynomial(3, 2.5, c)


def test_json_kernels(tmp_path):
    assert isinstance(kernel_from_json({"type": "elementary", "d": 3, "lambda0": 0.3}), kernels.InvariantTriplet)
    K = kernel_from_json('{"type": "exponential", "d": 4, "a": 2}')
    assert K(1.0) == pytest.approx(math.exp(-2.0))
    C = kernel_from_json({"type": "constant", "d": 3, "value": 2.5})
    assert C(7.0) == 2.5
    path = tmp_path / "k.json"
    path.write_text(json.dumps({"type": "exponential", "d": 3, "a": 1.5}))
    assert load_kernel(str(path))(0.0) == 1
    with pytest.raises(DomainError):
        kernel_from_json({"type": "nope", "d": 3})
    with pytest.raises(DomainError):
        kernel_from_json({"d": 3})


def test_tabulated_kernel_vanishes_past_last_sample():
    v = np.linspace(0.0, 2.0, 40)
    doc = {"type": "tabulated", "d": 3, "points": [[t, math.exp(-t)] for t in v]}
    K = kernel_from_json(doc)
    assert abs(K(1.234) - math.exp(-1.234)) < 1e-10
    assert K(2.5) == 0
