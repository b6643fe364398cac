import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from fgkit import special
from fgkit.appendix_ops import (OperatorH0, SmallH0, apply_H0, check_abel_differential_identity,
                                check_exponential_eigen_identity)
from fgkit.errors import DomainError, PreconditionDeclarationMissing


@pytest.mark.parametrize("d", range(3, 10))
def test_factor_count(d):
    expected = (d - 2) // 2 if d % 2 == 0 else (d - 1) // 2
    assert OperatorH0(d).factor_count == expected


@pytest.mark.parametrize("d", range(3, 9))
@given(lam=st.complex_numbers(max_magnitude=4))
def test_symbol_on_exponential_is_small_h0(d, lam):
    s = lam + (d - 2) / 2
    h0 = SmallH0(d)(lam)
    assert abs(OperatorH0(d).symbol(s) - h0) <= 1e-9 * max(1.0, abs(h0))
    assert abs(SmallH0(d).symmetric_partner(lam) - h0) <= 1e-9 * max(1.0, abs(h0))


def test_d3_is_first_derivative():
    lam, v = 0.7, 0.4
    assert abs(apply_H0(3, f"exp({lam + 0.5}*v)", v) - (lam + 0.5) * math.exp((lam + 0.5) * v)) < 1e-12


@pytest.mark.parametrize("d", [4, 6])
def test_cosh_eigenfunction_even_d(d):
    lam, v = 0.3, 0.5
    a = lam + (d - 2) / 2
    got = apply_H0(d, f"cosh({a}*v)", v)
    assert abs(got - special.h0_d(d, lam) * math.cosh(a * v)) < 1e-10


@pytest.mark.parametrize("d", [3, 5, 7])
def test_sinh_to_cosh_odd_d(d):
    lam, v = 0.3, 0.8
    a = lam + (d - 2) / 2
    got = apply_H0(d, sp.sinh(a * sp.Symbol("v")), v)
    assert abs(got - special.h0_d(d, lam) * math.cosh(a * v)) < 1e-10


def test_proxy_route_matches_symbolic():
    v = 0.4
    a = apply_H0(5, "exp(1.2*v)", v)
    b = apply_H0(5, lambda t: np.exp(1.2 * np.asarray(t)), v)
    assert abs(a - b) < 1e-8 * abs(a)


def test_operator_needs_d3():
    with pytest.raises(DomainError):
        OperatorH0(2)


@pytest.mark.parametrize("args", [
    (4, "cosh(1.5*v)", 0.7, "forward"),
    (3, "sinh(0.8*v)", 1.0, "forward"),
    (5, "exp(-2.5*v)", 0.6, "tail"),
    (4, "exp(-2.5*v)", 0.6, "tail"),
    (6, "cosh(1.1*v)", 0.8, "forward"),
    (5, "sinh(0.9*v)", 0.8, "forward"),
    (3, "exp(-2*v)", 0.8, "tail"),
])
def test_abel_differential_identities(args):
    r = check_abel_differential_identity(*args, conditions_declared=True)
    assert r["residual"] <= 1e-8


def test_declaration_required():
    with pytest.raises(PreconditionDeclarationMissing):
        check_abel_differential_identity(4, "cosh(v)", 0.5, "forward")


@pytest.mark.parametrize("d,lam,v", [(4, 1, 0.7), (3, 0.5 + 0.3j, 1.0), (5, -0.2, 0.9), (6, 1.3, 0.6),
                                     (5, 0.7, 0.5), (4, -0.3, 0.7), (3, -0.4, 0.6)])
def test_exponential_eigen_identities(d, lam, v):
    assert check_exponential_eigen_identity(d, lam, v)["residual"] <= 1e-8
