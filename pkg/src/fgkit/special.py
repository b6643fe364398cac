"""Special functions in dimension d.

Conventions: ``alpha = lam + (d - 2)/2`` is the shifted degree that appears
in every exponential, ``c_d = omega(d-2)/omega(d-1)``, and ``p = (d - 4)/2``
is the power carried by the Abel weights.
"""
from __future__ import annotations

import math
import threading
from functools import lru_cache

import numpy as np
import sympy as sp

from .errors import (
    BranchViolation,
    ConvergenceDomain,
    CutViolation,
    DomainError,
    PoleProximity,
)
from .numerics import DEFAULT_SPEC, QuadratureSpec, Singularity, integrate_finite

__all__ = [
    "omega", "sphere_ratio", "h_d", "h0_d", "gegenbauer_P", "legendre_P",
    "legendre_Q", "legendre_Q_v", "legendre_Q_weighted_v", "legendre_Q_continued", "psi", "delta_psi", "delta_psi_v", "residual_R",
    "elementary_jump", "legendre_relation_PQ",
]


def _check_d(d, minimum=3):
    if int(d) != d or d < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {d}")
    return int(d)


def omega(d: int) -> float:
    """Area of the unit sphere S^{d-1}."""
    d = _check_d(d, 1)
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def sphere_ratio(d: int) -> float:
    """omega(d-2)/omega(d-1), the normalisation of the Legendre integrals."""
    d = _check_d(d)
    return math.gamma((d - 1) / 2.0) / (math.sqrt(math.pi) * math.gamma((d - 2) / 2.0))


def h_d(d: int, lam):
    """Dimensional factor (2 lam + d - 2) (lam+1)...(lam+d-3) / (d-2)!."""
    d = _check_d(d)
    lam = np.asarray(lam, dtype=complex)
    out = 2.0 * lam + d - 2
    for j in range(1, d - 2):
        out = out * (lam + j)
    out = out / math.factorial(d - 2)
    return out if out.ndim else complex(out)


def h0_d(d: int, lam):
    """(lam + (d-2)/2) (lam+1)...(lam+d-3); equals (d-2)! h_d / 2."""
    d = _check_d(d)
    lam = np.asarray(lam, dtype=complex)
    out = lam + (d - 2) / 2.0
    for j in range(1, d - 2):
        out = out * (lam + j)
    return out if out.ndim else complex(out)


def gegenbauer_P(d: int, ell: int, x):
    """Ultraspherical polynomial normalised by P(1) = 1, by three-term recurrence."""
    d = _check_d(d)
    if int(ell) != ell or ell < 0:
        raise DomainError("degree must be a non-negative integer")
    x = np.asarray(x)
    x = x.astype(complex if np.iscomplexobj(x) else float)
    beta = (d - 2) / 2.0
    prev = np.ones_like(x)
    if ell == 0:
        return prev if prev.ndim else prev.item()
    cur = x.copy()
    for n in range(1, int(ell)):
        prev, cur = cur, ((2 * n + 2 * beta) * x * cur - n * prev) / (n + 2 * beta)
    return cur if cur.ndim else cur.item()


# ---------------------------------------------------------------------------
# first kind

def _as_complex_array(z):
    z = np.asarray(z, dtype=complex)
    return z, z.ndim == 0


def legendre_P(d: int, lam, z, branch: str = "fundamental", spec: QuadratureSpec = DEFAULT_SPEC):
    """P^(d)_lam(z) on the fundamental sheet C minus (-inf, -1].

    Real z in (-1, 1] use the angular form
    P = 2 c_d sin(t)^{-(d-3)} int_0^t cos(alpha s) [2(cos s - cos t)]^p ds, z = cos t.
    Everything else uses the ray from 1 to z, parametrised by phi in [0, pi/2]
    with cos s = 1 - (1 - z) sin^2 phi, which turns the integral into
    4 2^p c_d (1+z)^{-(d-3)/2} int cos(alpha s) cos^{d-3}phi (2 - (1-z) sin^2 phi)^{-1/2} dphi.
    """
    d = _check_d(d)
    if branch != "fundamental":
        raise BranchViolation("only the fundamental sheet is implemented")
    z, scalar = _as_complex_array(z)
    flat = z.ravel()
    if np.any((flat.imag == 0) & (flat.real <= -1)):
        raise BranchViolation("z lies on the cut (-inf, -1]")
    lam = complex(lam)
    out = np.empty(flat.shape, dtype=complex)
    real_seg = (flat.imag == 0) & (flat.real > -1) & (flat.real <= 1)
    if real_seg.any():
        out[real_seg] = _legendre_P_angular(d, lam, flat.real[real_seg], spec)
    if (~real_seg).any():
        out[~real_seg] = _legendre_P_ray(d, lam, flat[~real_seg], spec)
    out = out.reshape(z.shape)
    return complex(out) if scalar else out


def _legendre_P_angular(d, lam, x, spec):
    alpha = lam + (d - 2) / 2.0
    p = (d - 4) / 2.0
    c = sphere_ratio(d)
    theta = np.arccos(np.clip(x, -1.0, 1.0))
    res = np.ones(x.shape, dtype=complex)
    mask = theta > 0
    if not mask.any():
        return res
    th = theta[mask]

    def f(s):
        tau = s[:, None] * th[None, :]
        w = 4.0 * np.sin(0.5 * (th + tau)) * np.sin(0.5 * (th - tau))
        return np.cos(alpha * tau) * w ** p

    sing = Singularity(p, "b") if d % 2 == 1 else None
    integral = integrate_finite(f, [0.0, 1.0], spec, endpoint_singularity=sing)
    res[mask] = 2.0 * c * th * np.sin(th) ** (-(d - 3)) * integral
    return res


def _legendre_P_ray(d, lam, z, spec, one_minus_z=None):
    alpha = lam + (d - 2) / 2.0
    c = sphere_ratio(d)
    omz = 1.0 - z if one_minus_z is None else one_minus_z
    root = np.sqrt(omz / 2.0)

    def f(phi):
        s = np.sin(phi)[:, None]
        tau = 2.0 * np.arcsin(s * root[None, :])
        lin = 2.0 - omz[None, :] * s * s
        return np.cos(alpha * tau) * np.cos(phi)[:, None] ** (d - 3) / np.sqrt(lin)

    integral = integrate_finite(f, [0.0, 0.5 * np.pi], spec)
    return 4.0 * 2.0 ** ((d - 4) / 2.0) * c * (1.0 + z) ** (-(d - 3) / 2.0) * integral


# ---------------------------------------------------------------------------
# second kind
#
# With z = cosh v and y = exp(-(w - v)) the defining integral over w in
# [v, inf) becomes
#   Q = c_d sinh(v)^{-(d-3)} e^{-(lam+1) v} int_0^1 y^lam (1-y)^p (1-q y)^p dy,
# q = e^{-2v}.  The sinh prefactor never meets a vanishing integral, so z near
# 1 needs no special care, and complex z off (-inf, 1] works unchanged.

def _q_setup(d, z):
    z, scalar = _as_complex_array(z)
    flat = z.ravel()
    if np.any((flat.imag == 0) & (flat.real <= 1)):
        raise DomainError("legendre_Q needs z off (-inf, 1]")
    v = np.arccosh(flat)
    v = np.where(v.real < 0, -v, v)
    return z, scalar, flat, v


def _one_minus_qy(y, q, omq):
    # 1 - q y = (1 - y) + y (1 - q), exact when both q and y approach 1
    return (1.0 - y) + y * omq[None, :]


def _q_upper(d, lam, q, spec, lo, omq=None):
    """int_lo^1 y^lam (1-y)^p (1-qy)^p dy with 1 - y = s^2, so that both
    small factors are formed exactly and the integrand is 2 s^{d-3} times a
    smooth function."""
    p = (d - 4) / 2.0
    omq = 1.0 - q if omq is None else omq

    def f(s):
        ss = s[:, None]
        s2 = ss * ss
        return 2.0 * (1.0 - s2) ** lam * ss ** (d - 3) * (s2 + (1.0 - s2) * omq[None, :]) ** p

    return integrate_finite(f, [0.0, math.sqrt(1.0 - lo)], spec)


def legendre_Q(d: int, lam, z, spec: QuadratureSpec = DEFAULT_SPEC):
    """Q^(d)_lam(z) for Re lam > -1 and z off (-inf, 1] (real z = cosh v > 1 in the usual case)."""
    d = _check_d(d)
    lam = complex(lam)
    if not lam.real > -1:
        raise ConvergenceDomain("legendre_Q requires Re(lam) > -1; see legendre_Q_continued")
    z, scalar, flat, v = _q_setup(d, z)
    out = _q_of_v(d, lam, v, spec).reshape(z.shape)
    return complex(out) if scalar else out


def legendre_Q_v(d: int, lam, v, spec: QuadratureSpec = DEFAULT_SPEC, continued: bool = False):
    """Q^(d)_lam(cosh v) for v > 0, exact even when cosh v rounds to 1."""
    d = _check_d(d)
    lam = complex(lam)
    v = np.asarray(v, dtype=complex)
    scalar = v.ndim == 0
    flat = v.ravel()
    if np.any(flat.real <= 0):
        raise DomainError("legendre_Q_v needs v > 0")
    if continued:
        out = _q_continued_of_v(d, lam, flat, spec, 60)
    else:
        if not lam.real > -1:
            raise ConvergenceDomain("legendre_Q requires Re(lam) > -1")
        out = _q_of_v(d, lam, flat, spec)
    out = out.reshape(v.shape)
    return complex(out) if scalar else out


def _q_integral(d, lam, v, spec):
    q = np.exp(-2.0 * v)
    omq = -np.expm1(-2.0 * v)
    p = (d - 4) / 2.0

    def f(y):
        yy = y[:, None]
        return yy ** lam * (1.0 - yy) ** p * _one_minus_qy(yy, q, omq) ** p

    sing = Singularity(lam.real, "a") if lam.real < 0 else None
    lower = integrate_finite(f, [0.0, 0.5], spec, endpoint_singularity=sing)
    return lower + _q_upper(d, lam, q, spec, 0.5, omq)


def _q_of_v(d, lam, v, spec):
    return sphere_ratio(d) * np.sinh(v) ** (-(d - 3)) * np.exp(-(lam + 1.0) * v) * _q_integral(d, lam, v, spec)


def legendre_Q_weighted_v(d: int, lam, v, spec: QuadratureSpec = DEFAULT_SPEC):
    """Q^(d)_lam(cosh v) sinh(v)^{d-2}, free of overflow for large v."""
    d = _check_d(d)
    lam = complex(lam)
    if not lam.real > -1:
        raise ConvergenceDomain("legendre_Q requires Re(lam) > -1")
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    flat = v.ravel()
    if np.any(flat <= 0):
        raise DomainError("legendre_Q_weighted_v needs v > 0")
    # sinh(v) e^{-(lam+1) v} = (1 - e^{-2v}) e^{-lam v} / 2
    pre = 0.5 * (-np.expm1(-2.0 * flat)) * np.exp(-lam * flat)
    out = sphere_ratio(d) * pre * _q_integral(d, lam, flat.astype(complex), spec)
    out = out.reshape(v.shape)
    return complex(out) if scalar else out


def _binom_series(p, n):
    """Coefficients of (1 - y)^p up to y^n."""
    c = np.empty(n + 1)
    c[0] = 1.0
    for j in range(1, n + 1):
        c[j] = c[j - 1] * (j - 1 - p) / j
    return c


def legendre_Q_continued(d: int, lam, z, spec: QuadratureSpec = DEFAULT_SPEC, terms: int = 60):
    """Meromorphic continuation of Q^(d)_lam to every lam except -1, -2, ...

    The piece of the y-integral over [0, 1/4] is integrated term by term from
    the Taylor series of (1-y)^p (1-qy)^p, which converges like 4^{-j} and
    continues analytically in lam; the rest is a regular integral.
    """
    d = _check_d(d)
    lam = complex(lam)
    if lam.imag == 0 and lam.real <= -1 and lam.real == math.floor(lam.real):
        raise ConvergenceDomain(f"Q continuation has a pole at lam = {lam.real:g}")
    z, scalar, flat, v = _q_setup(d, z)
    out = _q_continued_of_v(d, lam, v, spec, terms).reshape(z.shape)
    return complex(out) if scalar else out


def _q_continued_of_v(d, lam, v, spec, terms):
    q = np.exp(-2.0 * v)
    p = (d - 4) / 2.0
    b = _binom_series(p, terms)
    j = np.arange(terms + 1)
    qpow = q[:, None] ** j[None, :]
    gcoef = np.array([np.convolve(b, b * qp)[: terms + 1] for qp in qpow])
    y0 = 0.25
    lower = (gcoef * (y0 ** (lam + j + 1.0) / (lam + j + 1.0))[None, :]).sum(axis=1)
    upper = _q_upper(d, lam, q, spec, y0, -np.expm1(-2.0 * v))
    return sphere_ratio(d) * np.sinh(v) ** (-(d - 3)) * np.exp(-(lam + 1.0) * v) * (lower + upper)


def legendre_relation_PQ(d: int, lam, x, spec: QuadratureSpec = DEFAULT_SPEC) -> dict:
    """Both sides of P_lam = (-1)^((d+1)/2) tan(pi lam) [Q_lam - Q_{-lam-d+2}] for odd d."""
    d = _check_d(d)
    if d % 2 == 0:
        raise DomainError("the P/Q functional relation is stated for odd d")
    lam = complex(lam)
    if abs(np.cos(np.pi * lam)) < 1e-8:
        raise PoleProximity("tan(pi lam) has a pole at this degree")
    lhs = legendre_P(d, lam, x, spec=spec)
    sign = (-1) ** ((d + 1) // 2)
    rhs = sign * np.tan(np.pi * lam) * (
        legendre_Q_continued(d, lam, x, spec) - legendre_Q_continued(d, -lam - d + 2, x, spec))
    return {"lhs": lhs, "rhs": complex(rhs) if np.ndim(rhs) == 0 else rhs}


# ---------------------------------------------------------------------------
# symbolic derivative tables for odd d

_TABLE_LOCK = threading.Lock()


@lru_cache(maxsize=None)
def _derivative_table(kind: str, k: int):
    """Numeric callables F_j(a, t), j = 0..k.

    kind "cos":  F_0 = cos(a (pi - t)), F_{j+1} = -F_j'(t)/sin t   (d/dx, x = cos t)
    kind "cosh": F_0 = cosh(a t),       F_{j+1} =  F_j'(t)/sinh t  (d/dx, x = cosh t)
    """
    with _TABLE_LOCK:
        a, t = sp.symbols("a t")
        if kind == "cos":
            expr = sp.cos(a * (sp.pi - t))
            step = lambda e: sp.together(-sp.diff(e, t) / sp.sin(t))
        else:
            expr = sp.cosh(a * t)
            step = lambda e: sp.together(sp.diff(e, t) / sp.sinh(t))
        funcs = []
        for _ in range(k + 1):
            funcs.append(sp.lambdify((a, t), expr, modules="numpy"))
            expr = step(expr)
        return tuple(funcs)


def _sqrt_power_derivative(m: int) -> float:
    """d^m/du^m u^{1/2} = coefficient * u^{1/2 - m}."""
    c = 1.0
    for i in range(m):
        c *= 0.5 - i
    return c


def psi(d: int, lam, z, spec: QuadratureSpec = DEFAULT_SPEC):
    """Elementary perikernel Psi^(d)_lam(z) on the cut plane C minus [1, inf).

    Even d: (pi/omega_d) h_d(lam) P_lam(-z).
    Odd d, with k = (d-1)/2 and S = (1-z)^{1/2}:
        Psi = sqrt(2) (-1/(2 pi))^k d^k/dz^k [ S(z) I(z) ],
        I(z) = int_0^1 E(1 + r (z-1)) (1-r)^{-1/2} dr,  E(cos t) = cos(alpha (pi - t)),
    the k-th derivative being distributed by Leibniz over S and the ray
    integral, whose x-derivatives of E come from the symbolic table.
    """
    d = _check_d(d)
    lam = complex(lam)
    z, scalar = _as_complex_array(z)
    flat = z.ravel()
    if np.any((flat.imag == 0) & (flat.real >= 1)):
        raise CutViolation("psi is defined off the cut [1, inf)")
    if d % 2 == 0:
        out = (np.pi / omega(d)) * h_d(d, lam) * legendre_P(d, lam, -flat, spec=spec)
    else:
        out = _psi_odd(d, lam, flat, spec)
    out = np.asarray(out).reshape(z.shape)
    return complex(out) if scalar else out


def _psi_odd(d, lam, zeta, spec):
    k = (d - 1) // 2
    alpha = lam + (d - 2) / 2.0
    table = _derivative_table("cos", k)
    root = np.sqrt((1.0 - zeta) / 2.0)

    def f(phi):
        s = np.sin(phi)[:, None]
        tau = 2.0 * np.arcsin(s * root[None, :])
        rho = s * s
        cols = [rho ** j * table[j](alpha, tau) * (2.0 * s) for j in range(k + 1)]
        return np.stack(cols, axis=-1)

    ints = integrate_finite(f, [0.0, 0.5 * np.pi], spec)
    one_minus = 1.0 - zeta
    total = np.zeros(zeta.shape, dtype=complex)
    for j in range(k + 1):
        m = k - j
        ds = (-1) ** m * _sqrt_power_derivative(m) * one_minus ** (0.5 - m)
        total += math.comb(k, j) * ds * ints[..., j]
    return math.sqrt(2.0) * (-1.0 / (2.0 * np.pi)) ** k * total


def delta_psi(d: int, lam, x, spec: QuadratureSpec = DEFAULT_SPEC):
    """Jump of Psi^(d)_lam across [1, inf), at x = cosh v.

    Even d: -(2 pi/omega_d) sin(pi lam) h_d(lam) [P_lam + 2 (-1)^{d/2} Q_lam].
    Odd d:  -4 sin(pi lam) (1/(2 pi))^k d^k/dx^k [ T(x) K(x) ],  T = ((x-1)/2)^{1/2},
            K(x) = int_0^1 cosh(alpha w(x')) (1-r)^{-1/2} dr,  x' = cosh w = 1 + r (x - 1).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 1):
        raise DomainError("delta_psi needs x = cosh v >= 1")
    v = np.arccosh(x)
    return _delta_psi(d, lam, v, x - 1.0, spec)


def delta_psi_v(d: int, lam, v, spec: QuadratureSpec = DEFAULT_SPEC):
    """delta_psi at x = cosh v, computed from v so that small v keeps full precision."""
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise DomainError("delta_psi_v needs v >= 0")
    return _delta_psi(d, lam, v, 2.0 * np.sinh(0.5 * v) ** 2, spec)


def _delta_psi(d, lam, v, xm1, spec):
    d = _check_d(d)
    lam = complex(lam)
    scalar = v.ndim == 0
    shape = v.shape
    v = v.ravel()
    xm1 = np.asarray(xm1, dtype=float).ravel()
    s = np.sin(np.pi * lam)
    if lam.imag == 0 and lam.real == round(lam.real):
        out = np.zeros(v.shape, dtype=complex)
        return complex(out[0]) if scalar else out.reshape(shape)
    out = np.full(v.shape, complex(np.inf), dtype=complex)
    inner = xm1 > 0
    if inner.any():
        vi, xi = v[inner], xm1[inner]
        if d % 2 == 0:
            pv = _legendre_P_ray(d, lam, (1.0 + xi).astype(complex), spec, one_minus_z=(-xi).astype(complex))
            qv = _q_continued_of_v(d, lam, vi.astype(complex), spec, 60)
            out[inner] = -(2.0 * np.pi / omega(d)) * s * h_d(d, lam) * (pv + 2.0 * (-1) ** (d // 2) * qv)
        else:
            out[inner] = _delta_psi_odd(d, lam, xi, spec) * s
    return complex(out[0]) if scalar else out.reshape(shape)


def _delta_psi_odd(d, lam, xm1, spec):
    k = (d - 1) // 2
    alpha = lam + (d - 2) / 2.0
    table = _derivative_table("cosh", k)
    root = np.sqrt(xm1 / 2.0)

    def f(phi):
        s = np.sin(phi)[:, None]
        w = 2.0 * np.arcsinh(s * root[None, :])
        rho = s * s
        cols = [rho ** j * table[j](alpha, w) * (2.0 * s) for j in range(k + 1)]
        return np.stack(cols, axis=-1)

    ints = integrate_finite(f, [0.0, 0.5 * np.pi], spec)
    total = np.zeros(xm1.shape, dtype=complex)
    for j in range(k + 1):
        m = k - j
        dt = _sqrt_power_derivative(m) * xm1 ** (0.5 - m) / math.sqrt(2.0)
        total += math.comb(k, j) * dt * ints[..., j]
    return -4.0 * (1.0 / (2.0 * np.pi)) ** k * total


# ---------------------------------------------------------------------------

def _sqrt_cut_positive(w):
    """Square root with its cut on [0, inf): i * sqrt(-w)."""
    return 1j * np.sqrt(-w)


def residual_R(d: int, lam, z, spec: QuadratureSpec = DEFAULT_SPEC, side: int | None = None):
    """Residual function R^(d)_lam(z) for odd d, analytic on C minus [-1, inf).

    Differentiating under the integral sign,
    R = (2k-1)!! int_{-pi}^{pi} e^{i alpha t} sin t [2(z + cos t)]^{-(2k+1)/2} dt.
    Real z in (-1, 1) is accepted with ``side=+1/-1``, giving the boundary
    value from above/below by pushing the t-path off the real axis.
    """
    d = _check_d(d)
    if d % 2 == 0:
        raise DomainError("residual_R is defined for odd d")
    lam = complex(lam)
    z, scalar = _as_complex_array(z)
    flat = z.ravel()
    on_cut = (flat.imag == 0) & (flat.real >= -1)
    if np.any(on_cut & (flat.real >= 1)) or np.any(on_cut & (flat.real == -1)):
        raise CutViolation("residual_R is singular on [1, inf) and at -1")
    if on_cut.any() and side not in (1, -1):
        raise CutViolation("z on (-1, 1): pass side=+1 or -1 for a boundary value")
    k = (d - 1) // 2
    alpha = lam + (d - 2) / 2.0
    dfact = 1.0
    for i in range(1, 2 * k, 2):
        dfact *= i
    delta = 0.0 if not on_cut.any() else 0.5 * side

    def f(t):
        tc = t - 1j * delta * np.sin(t)
        jac = 1.0 - 1j * delta * np.cos(t)
        w = 2.0 * (flat[None, :] + np.cos(tc)[:, None])
        root = _sqrt_cut_positive(w)
        return (np.exp(1j * alpha * tc) * np.sin(tc) * jac)[:, None] * root ** (-(2 * k + 1))

    out = dfact * integrate_finite(f, [-np.pi, np.pi], spec, points=[0.0])
    out = np.asarray(out).reshape(z.shape)
    return complex(out) if scalar else out


def elementary_jump(d: int, lam0, w):
    """Jump of the Abel image of Psi^(d)_{lam0} at w >= 0."""
    d = _check_d(d, 2)
    lam0 = complex(lam0)
    w = np.asarray(w, dtype=float)
    beta = (d - 2) / 2.0
    hyp = np.sinh if d % 2 == 0 else np.cosh
    out = -2.0 * np.exp(-beta * w) * hyp((lam0 + beta) * w) * np.sin(np.pi * lam0)
    return out if out.ndim else complex(out)
