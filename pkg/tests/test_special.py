import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import eval_gegenbauer

from fgkit import special
from fgkit.errors import CutViolation, DomainError
from conftest import rel

lam_st = st.complex_numbers(max_magnitude=3).filter(lambda z: z.real > -0.9)


def test_sphere_areas():
    assert special.omega(3) == pytest.approx(4 * math.pi, rel=1e-15)
    assert special.omega(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert special.omega(4) == pytest.approx(2 * math.pi ** 2, rel=1e-15)


@given(st.integers(0, 40))
def test_h3_is_2l_plus_1(ell):
    assert special.h_d(3, ell) == 2 * ell + 1


@given(st.integers(3, 9), st.complex_numbers(max_magnitude=5))
def test_h0_reflection_and_ratio(d, lam):
    h0 = special.h0_d(d, lam)
    assert abs(h0 - (-1) ** d * special.h0_d(d, -lam - d + 2)) <= 1e-9 * max(1.0, abs(h0))
    assert abs(special.h_d(d, lam) - 2 * h0 / math.factorial(d - 2)) <= 1e-9 * max(1.0, abs(h0))


def test_P_against_hypergeometric_oracle(oracles):
    for e in oracles["legendre_P"]:
        got = special.legendre_P(e["d"], complex(*e["lam"]), complex(*e["z"]))
        assert rel(got, complex(*e["value"])) < 1e-10, e


def test_Q_against_hypergeometric_oracle(oracles):
    for e in oracles["legendre_Q"]:
        got = special.legendre_Q(e["d"], complex(*e["lam"]), complex(*e["z"]))
        assert rel(got, complex(*e["value"])) < 1e-10, e


@pytest.mark.parametrize("d", [3, 4, 5, 7])
@given(ell=st.integers(0, 12), x=st.floats(-1, 1))
def test_gegenbauer_normalised(d, ell, x):
    beta = (d - 2) / 2
    ref = eval_gegenbauer(ell, beta, x) / eval_gegenbauer(ell, beta, 1.0)
    assert abs(special.gegenbauer_P(d, ell, x) - ref) < 1e-11


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_psi_at_integers_is_a_polynomial(d):
    z = np.array([-0.5, 0.3, 0.9, -2 + 0.5j])
    for ell in range(4):
        ref = (-1) ** ell * math.pi / special.omega(d) * special.h_d(d, ell) * special.legendre_P(d, ell, z)
        assert np.max(np.abs(special.psi(d, ell, z) - ref)) < 1e-10


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_psi_degree_reflection(d):
    lam = 0.4 + 0.1j
    assert abs(special.psi(d, lam, -0.3) - special.psi(d, -lam - d + 2, -0.3)) < 1e-10


@pytest.mark.parametrize("d,lam,x", [(3, 0.3, 1.543), (4, 0.25 + 0.4j, 3.0), (5, -0.6, 1.2), (6, 0.3, 1.543)])
def test_delta_psi_is_the_jump(d, lam, x):
    eps = 1e-7
    jump = 1j * (special.psi(d, lam, x - 1j * eps) - special.psi(d, lam, x + 1j * eps))
    assert rel(special.delta_psi(d, lam, x), jump) < 1e-5


def test_delta_psi_v_matches_x_form():
    v = 0.9
    assert rel(special.delta_psi_v(3, 0.3, v), special.delta_psi(3, 0.3, math.cosh(v))) < 1e-12


@pytest.mark.parametrize("d", [3, 5])
def test_PQ_relation_odd_d(d):
    r = special.legendre_relation_PQ(d, 0.3, 2.0)
    assert rel(r["lhs"], r["rhs"]) < 1e-8


def test_PQ_relation_rejects_even_d():
    with pytest.raises(DomainError):
        special.legendre_relation_PQ(4, 0.3, 2.0)


def test_residual_R_needs_side_on_segment():
    with pytest.raises(CutViolation):
        special.residual_R(3, 0.3, 0.2)
    up = special.residual_R(3, 0.3, 0.2, side=1)
    a, b = (special.residual_R(3, 0.3, 0.2 + e * 1j) for e in (0.02, 0.01))
    assert rel(up, 2 * b - a) < 1e-3


def test_elementary_jump_d3_closed_form():
    w = 0.7
    ref = -2 * math.exp(-0.5 * w) * math.cosh(0.8 * w) * math.sin(0.3 * math.pi)
    assert abs(special.elementary_jump(3, 0.3, w) - ref) < 1e-15


def test_classical_Q_reduction(oracles):
    for e in oracles["classical_Q"]:
        assert rel(special.legendre_Q(3, e["ell"], e["x"]), e["value"] / math.pi) < 1e-8
