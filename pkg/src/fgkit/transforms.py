"""Transforms between the three legs of a triplet, F~(lam) and coefficient sequences.

Abel integrals with the weight [2(cosh w - cosh v)]^p are written with
v = w - (w - mu) r^2, which turns the weight times dv into r^{d-3} times a
smooth factor, so odd and even d are handled by the same regular quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import special
from .errors import (
    ContourDivergence,
    ConvergenceDomain,
    DegreeOverflow,
    DomainError,
    InsufficientSmoothness,
    IntegerMWithoutEpsilonFlag,
    NegativeArgument,
    NonConvergence,
    ProxyRangeExceeded,
    RayHitsCut,
    SeriesDivergence,
    SlowDecay,
    SymmetryViolation,
    TailBoundViolated,
)
from .kernels import (
    AnalyticFunction1D,
    CoefficientSequence,
    HalfPlaneFunction,
    InvariantTriplet,
    SphereKernel,
    VolterraKernel,
    truncation_polynomial,
)
from .numerics import (
    DEFAULT_SPEC,
    QuadratureSpec,
    Singularity,
    cheb_derivative,
    cheb_fit,
    integrate_finite,
    integrate_semi_infinite,
)

__all__ = [
    "ContourSpec", "radon_abel_forward", "radon_abel_complex", "radon_abel_sphere",
    "abel_inverse_hyperboloid", "abel_inverse_sphere", "laplace_transform",
    "fourier_laplace_contour", "spherical_laplace", "fourier_legendre_coeffs",
    "circle_fourier_coeffs", "reconstruct_sphere_kernel", "reconstruct_volterra_kernel",
    "reconstruct_perikernel", "d2_laplace", "d2_fourier", "d2_reconstruct",
    "mellin_coefficient", "power_series_reconstruct", "watson_sum",
]


@dataclass(frozen=True)
class ContourSpec:
    """Vertical line Re lam = sigma, or the rectangle path gamma_a."""

    kind: str = "rectangle"
    sigma: float = 0.0
    a: float = math.pi
    nu_truncation: float = 50.0

    def __post_init__(self):
        if self.kind not in ("rectangle", "vertical"):
            raise DomainError("contour kind must be 'rectangle' or 'vertical'")
        if self.kind == "rectangle" and not 0 < self.a < 2 * math.pi:
            raise DomainError("rectangle half-width a must lie in (0, 2 pi)")
        if not self.nu_truncation > 0:
            raise DomainError("nu_truncation must be > 0")


def _vec(f):
    if isinstance(f, (VolterraKernel, SphereKernel, AnalyticFunction1D)):
        return f
    return AnalyticFunction1D.wrap(f)


def _out(arr, scalar):
    arr = np.asarray(arr, dtype=complex)
    return complex(arr.reshape(-1)[0]) if scalar else arr


def _sinhc(x):
    """sinh(x)/x, exact near 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 6.0, np.sinh(xs) / xs)


def _sinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, np.sin(xs) / xs)


# ---------------------------------------------------------------------------
# Abel transforms

def _abel_core(f, d, w, lower, hyperbolic, spec):
    """int_lower^w f(v) [2(ch w - ch v)]^p sh v dv for a vector of w > lower.

    (ch, sh) is (cosh, sinh) or (cos, sin).  With v = w - L r^2, L = w - lower,
    ch w - ch v = 2 sh((w+v)/2) sh(L r^2/2), so the integrand is r^{d-3}
    times a factor regular in r.
    """
    p = (d - 4) / 2.0
    L = w - lower
    sh = np.sinh if hyperbolic else np.sin
    shc = _sinhc if hyperbolic else _sinc

    def g(r):
        rr = r[:, None]
        v = w[None, :] - L[None, :] * rr * rr
        half = 0.5 * L[None, :] * rr * rr
        core = 4.0 * sh(0.5 * (w[None, :] + v)) * 0.5 * L[None, :] * shc(half)
        return (np.asarray(f(v), dtype=complex) * sh(v) * core ** p
                * 2.0 * L[None, :] * rr ** (d - 3))

    return integrate_finite(g, [0.0, 1.0], spec)


def radon_abel_forward(F, w, spec: QuadratureSpec = DEFAULT_SPEC, d: Optional[int] = None,
                       use_closed_form: bool = False):
    """Abel image f_hat(w) = omega_{d-2} e^{-beta w} int_0^w f(v) [2(cosh w - cosh v)]^p sinh v dv."""
    if isinstance(F, VolterraKernel):
        d = F.d if d is None else d
        mu = F.growth.mu
    else:
        if d is None:
            raise DomainError("pass d for a bare jump function")
        mu = 0.0
    if d < 3:
        raise DomainError("radon_abel_forward needs d >= 3")
    w = np.asarray(w, dtype=float)
    scalar = w.ndim == 0
    flat = w.ravel()
    if np.any(flat < 0):
        raise NegativeArgument("Abel transform is defined for w >= 0")
    if use_closed_form and isinstance(F, VolterraKernel) and F.abel is not None:
        return _out(np.asarray(F.abel(flat), dtype=complex).reshape(w.shape), scalar)
    f = _vec(F)
    out = np.zeros(flat.shape, dtype=complex)
    live = flat > mu
    if live.any():
        wl = flat[live]
        beta = (d - 2) / 2.0
        integral = _abel_core(f, d, wl, mu, True, spec)
        out[live] = special.omega(d - 2) * np.exp(-beta * wl) * integral
    return _out(out.reshape(w.shape), scalar)


def _ray_factor(d, tau):
    beta = (d - 2) / 2.0
    return 0.5 * special.omega(d - 2) * np.exp(1j * beta * tau) * (-2j * np.sin(tau / 2.0)) ** (d - 2)


def radon_abel_complex(perikernel, d: int, tau, spec: QuadratureSpec = DEFAULT_SPEC,
                       cut_start: Optional[float] = None):
    """Ray form (omega_{d-2}/2) e^{i beta tau} (-2i sin(tau/2))^{d-2} int_0^1 f(1 + s(cos tau - 1)) (1-s)^p ds.

    ``cut_start`` is the left end of the perikernel cut on the real axis
    (cosh mu for a triplet); None means the perikernel has no cut.
    """
    if isinstance(perikernel, InvariantTriplet):
        if cut_start is None:
            cut_start = math.cosh(perikernel.growth.mu)
        perikernel = perikernel.perikernel
    f = _vec(perikernel)
    tau = np.asarray(tau, dtype=complex)
    scalar = tau.ndim == 0
    flat = tau.ravel()
    c = np.cos(flat)
    if cut_start is not None:
        on_axis = np.abs(c.imag) <= 1e-14 * max(1.0, float(np.max(np.abs(c))))
        if np.any(on_axis & (c.real >= cut_start)):
            raise RayHitsCut("ray from 1 to cos(tau) meets the cut")
    p = (d - 4) / 2.0

    def g(s):
        ss = s[:, None]
        return np.asarray(f(1.0 + ss * (c[None, :] - 1.0)), dtype=complex) * (1.0 - ss) ** p

    sing = Singularity(p, "b") if d % 2 == 1 else None
    integral = integrate_finite(g, [0.0, 1.0], spec, endpoint_singularity=sing)
    return _out((_ray_factor(d, flat) * integral).reshape(tau.shape), scalar)


def radon_abel_sphere(sphere, t, spec: QuadratureSpec = DEFAULT_SPEC, d: Optional[int] = None):
    """Sphere Abel image: (-+i)^{d-2} omega_{d-2} e^{i beta t} int_0^{|t|} f(u)[2(cos u - cos t)]^p sin u du.

    The sign is -i for t >= 0 and +i for t < 0; t is reduced to [-pi, pi].
    """
    if isinstance(sphere, InvariantTriplet):
        sphere = sphere.sphere
    if isinstance(sphere, SphereKernel):
        d = sphere.d if d is None else d
    if d is None:
        raise DomainError("pass d for a bare sphere function")
    f = _vec(sphere)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    flat = np.mod(t.ravel() + np.pi, 2 * np.pi) - np.pi
    out = np.zeros(flat.shape, dtype=complex)
    live = flat != 0
    if live.any():
        tl = flat[live]
        a = np.abs(tl)
        beta = (d - 2) / 2.0
        integral = _abel_core(f, d, a, np.zeros_like(a), False, spec)
        unit = np.where(tl >= 0, -1j, 1j) ** (d - 2)
        out[live] = unit * special.omega(d - 2) * np.exp(1j * beta * tl) * integral
    return _out(out.reshape(t.shape), scalar)


# ---------------------------------------------------------------------------
# inverse Abel transforms on Chebyshev proxies

def _proxy_derivative(g, interval, x, order, spec):
    """order-th derivative at x of a Chebyshev proxy of g on interval."""
    probe = np.asarray(g(np.linspace(interval[0], interval[1], 5)), dtype=complex)
    scale = float(np.max(np.abs(probe))) if probe.size else 0.0
    if scale == 0.0:
        scale = 1.0
    try:
        proxy = cheb_fit(g, interval, spec, tol=max(spec.abs_tol, 1e-14 * scale), max_degree=512)
    except DegreeOverflow as exc:
        raise InsufficientSmoothness(f"proxy did not resolve the transform: {exc}") from exc
    return complex(cheb_derivative(proxy, order)(x))


def _hyperbolic_interval(x, x_mu):
    r = 0.5 * (x - max(1.0, x_mu))
    if r < 1e-9 * x:
        raise ProxyRangeExceeded("point too close to the threshold cosh(mu) for a proxy")
    return (x - r, x + r)


def abel_inverse_hyperboloid(fhat, d: int, v, spec: QuadratureSpec = DEFAULT_SPEC,
                             mu: float = 0.0, smoothness_order: Optional[int] = None):
    """Recover f(v) from its Abel image f_hat(w), w >= mu.

    Even d: (1/2pi)^n (d/dx)^n [e^{beta w} f_hat(w)],  x = cosh w, n = (d-2)/2.
    Odd d:  2 (1/2pi)^k (d/dx)^k A(x),  A(x) = int_0^{sqrt(2(x-1))} g(x - s^2/2) ds,
    g(cosh w) = e^{beta w} f_hat(w); with s = sqrt(2(x-1)) sin(phi) the inner
    integral is regular.  Derivatives are taken on a proxy centred at x.
    """
    if d < 3:
        raise DomainError("abel_inverse_hyperboloid needs d >= 3")
    need = (d - 1) // 2 if d % 2 else (d - 2) // 2
    if smoothness_order is not None and smoothness_order < need:
        raise InsufficientSmoothness(f"need {need} derivatives, kernel declares {smoothness_order}")
    f = _vec(fhat)
    beta = (d - 2) / 2.0
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    out = np.zeros(v.size, dtype=complex)
    x_mu = math.cosh(mu)

    def g_of_w(w):
        return np.exp(beta * w) * np.asarray(f(w), dtype=complex)

    for i, vi in enumerate(v.ravel()):
        if vi <= 0:
            raise NegativeArgument("abel_inverse_hyperboloid needs v > 0")
        if vi <= mu:
            continue
        x = math.cosh(vi)
        interval = _hyperbolic_interval(x, x_mu)
        if d % 2 == 0:
            n = (d - 2) // 2

            def G(xx):
                return g_of_w(np.arccosh(xx))

            out[i] = (1.0 / (2 * np.pi)) ** n * _proxy_derivative(G, interval, x, n, spec)
        else:
            k = (d - 1) // 2

            def A(xx, _mu=mu):
                xx = np.asarray(xx, dtype=float)
                half = np.sqrt((xx - 1.0) / 2.0)
                top = np.arccos(np.clip(np.sinh(_mu / 2.0) / half, -1.0, 1.0)) if _mu > 0 else np.full(xx.shape, 0.5 * np.pi)
                # phi runs over [0, top(x)]; rescale to a fixed [0, 1] panel.

                def h(sv):
                    phi = sv[:, None] * top[None, :]
                    w = 2.0 * np.arcsinh(half[None, :] * np.cos(phi))
                    return g_of_w(w) * np.cos(phi) * top[None, :]

                return 2.0 * half * integrate_finite(h, [0.0, 1.0], spec)

            out[i] = 2.0 * (1.0 / (2 * np.pi)) ** k * _proxy_derivative(A, interval, x, k, spec)
    return _out(out.reshape(v.shape), scalar)


def _check_sphere_symmetry(f, d, tol=1e-8):
    t = np.linspace(0.3, 2.9, 8)
    a = np.asarray(f(-t), dtype=complex)
    b = (-1) ** d * np.exp(-1j * (d - 2) * t) * np.asarray(f(t), dtype=complex)
    err = np.abs(a - b) / np.maximum(1.0, np.abs(b))
    if np.max(err) > tol:
        raise SymmetryViolation(f"Abel image breaks the sphere symmetry by {np.max(err):.3e}")


def abel_inverse_sphere(fhat, d: int, u, spec: QuadratureSpec = DEFAULT_SPEC,
                        check_symmetry: bool = True):
    """Recover f(u), u in (0, pi), from a sphere Abel image f_hat(t).

    Even d: (1/2pi)^n (d/dx)^n [e^{-i beta t} f_hat(t)],  x = cos t.
    Odd d:  -2 (1/2pi)^k (d/dx)^k B(x),  B(x) = i int_0^{sqrt(2(1-x))} G(x + s^2/2) ds,
    G(cos t) = e^{-i beta t} f_hat(t).
    """
    if d < 3:
        raise DomainError("abel_inverse_sphere needs d >= 3")
    f = _vec(fhat)
    if check_symmetry:
        _check_sphere_symmetry(f, d)
    beta = (d - 2) / 2.0
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    out = np.zeros(u.size, dtype=complex)

    def G_of_t(t):
        return np.exp(-1j * beta * t) * np.asarray(f(t), dtype=complex)

    for i, ui in enumerate(u.ravel()):
        if not 0 < ui < np.pi:
            raise DomainError("abel_inverse_sphere needs u in (0, pi)")
        x = math.cos(ui)
        r = 0.5 * (1.0 - x)
        interval = (max(-1.0, x - r), x + r)
        if d % 2 == 0:
            n = (d - 2) // 2
            val = _proxy_derivative(lambda xx: G_of_t(np.arccos(np.clip(xx, -1.0, 1.0))), interval, x, n, spec)
            out[i] = (1.0 / (2 * np.pi)) ** n * val
        else:
            k = (d - 1) // 2

            def B(xx):
                xx = np.asarray(xx, dtype=float)
                half = np.sqrt((1.0 - xx) / 2.0)

                def h(phi):
                    t = 2.0 * np.arcsin(half[None, :] * np.cos(phi)[:, None])
                    return G_of_t(t) * np.cos(phi)[:, None]

                return 1j * 2.0 * half * integrate_finite(h, [0.0, 0.5 * np.pi], spec)

            out[i] = -2.0 * (1.0 / (2 * np.pi)) ** k * _proxy_derivative(B, interval, x, k, spec)
    return _out(out.reshape(u.shape), scalar)


# ---------------------------------------------------------------------------
# Laplace-type transforms

def _growth_of(jump, mu, m):
    if isinstance(jump, VolterraKernel):
        mu = jump.growth.mu if mu is None else mu
        m = jump.growth.m if m is None else m
    if m is None:
        raise DomainError("growth order m is required for a bare jump function")
    return (0.0 if mu is None else float(mu)), float(m)


def laplace_transform(jump, lam, spec: QuadratureSpec = DEFAULT_SPEC, mu: Optional[float] = None,
                      m: Optional[float] = None, endpoint_singularity: Optional[Singularity] = None):
    """F~(lam) = int_mu^inf e^{-lam v} f(v) dv; lam may be an array sharing one Re lam."""
    mu, m = _growth_of(jump, mu, m)
    f = _vec(jump)
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    flat = lam.ravel()
    rate = float(np.min(flat.real)) - m
    if not rate > 0:
        raise ConvergenceDomain(f"Laplace transform needs Re(lam) > m = {m}")

    def g(v):
        return np.exp(-np.multiply.outer(v, flat)) * np.asarray(f(v), dtype=complex)[:, None]

    out = integrate_semi_infinite(g, mu, spec, decay_rate=rate, endpoint_singularity=endpoint_singularity)
    return _out(np.asarray(out).reshape(lam.shape), scalar)


def spherical_laplace(F: VolterraKernel, lam, route: str = "composed", spec: QuadratureSpec = DEFAULT_SPEC,
                      use_closed_form: bool = True):
    """Spherical Laplace transform of a Volterra kernel.

    composed: Laplace transform of the Abel image (the kernel's closed-form
    image when it carries one and ``use_closed_form`` is set);
    direct: omega_{d-1} int_mu^inf f(v) Q_lam(cosh v) sinh(v)^{d-2} dv.
    """
    if not isinstance(F, VolterraKernel):
        raise DomainError("spherical_laplace expects a VolterraKernel")
    d = F.d
    if d < 3:
        raise DomainError("use d2_laplace for d = 2")
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    flat = lam.ravel()
    mu, m = F.growth.mu, F.growth.m
    bound = max(m, -1.0)
    if not np.all(flat.real > bound):
        raise ConvergenceDomain(f"spherical Laplace transform needs Re(lam) > max(m, -1) = {bound}")
    if route == "composed":
        if use_closed_form and F.abel is not None:
            fhat = F.abel
        else:
            fhat = lambda w: radon_abel_forward(F, w, spec)
        out = laplace_transform(fhat, flat, spec, mu=mu, m=m)
    elif route == "direct":
        rate = float(np.min(flat.real)) - m
        vals = []
        for lv in flat:
            def g(v, lv=lv):
                v = np.asarray(v, dtype=float)
                return np.asarray(F(v), dtype=complex) * special.legendre_Q_weighted_v(d, lv, v, spec)
            vals.append(integrate_semi_infinite(g, mu, spec, decay_rate=rate))
        out = special.omega(d - 1) * np.array(vals, dtype=complex)
    else:
        raise DomainError("route must be 'composed' or 'direct'")
    return _out(np.asarray(out).reshape(lam.shape), scalar)


def fourier_laplace_contour(f, lam, contour: ContourSpec = ContourSpec(), spec: QuadratureSpec = DEFAULT_SPEC,
                            m: float = 0.0, cut_points=(0.0,)):
    """int over gamma_a of e^{i lam theta} f(theta) d theta.

    gamma_a runs down the line Re theta = -a from +i inf, along [-a, a] and up
    Re theta = a.  The vertical branches combine into
    i int_0^inf [e^{i lam (a+iy)} f(a+iy) - e^{i lam (-a+iy)} f(-a+iy)] dy,
    which vanishes identically for integer lam when a = pi.
    """
    if contour.kind != "rectangle":
        raise DomainError("fourier_laplace_contour integrates over a rectangle path")
    lam = complex(lam)
    if lam.real < m:
        raise ConvergenceDomain(f"contour transform needs Re(lam) >= m = {m}")
    fv = _vec(f)
    a = contour.a
    pts = [c for c in cut_points if -a < c < a]

    def hor(t):
        return np.exp(1j * lam * t) * np.asarray(fv(t.astype(complex)), dtype=complex)

    total = integrate_finite(hor, [-a, a], spec, points=pts)
    integer = lam.imag == 0 and lam.real == round(lam.real)
    if not (integer and a == math.pi):
        rate = lam.real - m
        if not rate > 0:
            raise ContourDivergence("vertical branches need Re(lam) > m")

        def vert(y):
            zp = a + 1j * y
            zm = -a + 1j * y
            return 1j * (np.exp(1j * lam * zp) * np.asarray(fv(zp), dtype=complex)
                         - np.exp(1j * lam * zm) * np.asarray(fv(zm), dtype=complex))

        try:
            total = total + integrate_semi_infinite(vert, 0.0, spec, decay_rate=rate)
        except (TailBoundViolated, NonConvergence) as exc:
            raise ContourDivergence(f"vertical branches do not converge: {exc}") from exc
    return complex(total)


def watson_sum(Ftilde, m: float, theta, spec: QuadratureSpec = DEFAULT_SPEC):
    """(1/2pi) sum_{l > m} F~(l) e^{-i l theta} resummed as a line integral.

    h(theta) = -(1/4pi) int F~(m+i nu) e^{-i(m+i nu)(theta - pi)} / sin(pi(m+i nu)) d nu,
    valid for 0 < Re theta < 2 pi, where the integrand decays like
    exp(-(pi - |Re theta - pi|) |nu|).
    """
    if float(m) == round(float(m)):
        raise IntegerMWithoutEpsilonFlag("the line Re lam = m must avoid the integers")
    theta = complex(theta)
    u = theta.real
    if not 0 < u < 2 * math.pi:
        raise DomainError("watson_sum needs 0 < Re(theta) < 2 pi")
    F = Ftilde if callable(Ftilde) else None
    rate = math.pi - abs(u - math.pi)

    def g(nu):
        out = 0.0
        for sgn in (1.0, -1.0):
            lam = m + 1j * sgn * nu
            out = out + (np.asarray(F(lam), dtype=complex) * np.exp(-1j * lam * (theta - math.pi))
                         / np.sin(np.pi * lam))
        return out

    return -complex(integrate_semi_infinite(g, 0.0, spec, decay_rate=rate)) / (4.0 * math.pi)


# ---------------------------------------------------------------------------
# coefficient sequences

def _gegenbauer_table(d, L, x):
    """P^(d)_l(x) for l = 0..L as columns."""
    beta = (d - 2) / 2.0
    x = np.asarray(x)
    out = np.empty(x.shape + (L + 1,), dtype=complex if np.iscomplexobj(x) else float)
    out[..., 0] = 1.0
    if L >= 1:
        out[..., 1] = x
    for n in range(1, L):
        out[..., n + 1] = ((2 * n + 2 * beta) * x * out[..., n] - n * out[..., n - 1]) / (n + 2 * beta)
    return out


def fourier_legendre_coeffs(sphere, ell_max: int, spec: QuadratureSpec = DEFAULT_SPEC,
                            d: Optional[int] = None) -> CoefficientSequence:
    """[f]_l = omega_{d-1} int_0^pi f(u) P^(d)_l(cos u) sin(u)^{d-2} du, l = 0..ell_max."""
    if isinstance(sphere, InvariantTriplet):
        sphere = sphere.sphere
    if isinstance(sphere, SphereKernel):
        d = sphere.d if d is None else d
    if d is None or d < 3:
        raise DomainError("fourier_legendre_coeffs needs d >= 3")
    if ell_max < 0:
        raise DomainError("ell_max must be >= 0")
    f = _vec(sphere)

    def g(u):
        vals = np.asarray(f(u), dtype=complex) * np.sin(u) ** (d - 2)
        return vals[:, None] * _gegenbauer_table(d, ell_max, np.cos(u))

    c = special.omega(d - 1) * np.atleast_1d(integrate_finite(g, [0.0, np.pi], spec))
    return CoefficientSequence({ell: c[ell] for ell in range(ell_max + 1)}, "N")


def circle_fourier_coeffs(f, ells, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientSequence:
    """[f]_l = int_{-pi}^{pi} e^{i l u} f(u) du for l in ``ells``."""
    ells = np.array(sorted(set(int(e) for e in ells)), dtype=int)
    if ells.size == 0:
        return CoefficientSequence({}, "Z")
    fv = _vec(f)

    def g(u):
        return np.asarray(fv(u), dtype=complex)[:, None] * np.exp(1j * np.multiply.outer(u, ells))

    c = np.atleast_1d(integrate_finite(g, [-np.pi, np.pi], spec, points=[0.0]))
    return CoefficientSequence({int(e): c[i] for i, e in enumerate(ells)}, "Z")


# ---------------------------------------------------------------------------
# series and line integrals used by the reconstructions

def _wynn(seq):
    """Wynn epsilon extrapolation of a sequence of partial sums; returns the last even-column estimate."""
    s = [complex(x) for x in seq]
    n = len(s)
    prev = [0.0] * (n + 1)
    cur = list(s)
    best = s[-1]
    for k in range(1, n):
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            if diff == 0:
                return cur[i + 1] if k % 2 == 1 else best
            nxt.append(prev[i + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        if k % 2 == 0 and cur:
            best = cur[-1]
    return best


def _line_integral(g, spec: QuadratureSpec, tol: float, nu0: float, freq: Optional[float] = None,
                   nu_max: float = 2.0e4, points=()):
    """int_{-inf}^{inf} g(nu) d nu for a vectorised g with algebraic decay.

    [-nu0, nu0] first, then symmetric outer panels: doubling when no
    oscillation frequency is known, half periods pi/freq otherwise, in which
    case the partial sums are also Wynn-accelerated.
    """
    brk = sorted({-nu0, nu0, *[p for p in points if -nu0 < p < nu0]})
    total = complex(integrate_finite(g, [brk[0], brk[-1]], spec, points=brk[1:-1]))
    lo = nu0
    sums = [total]
    quiet = 0
    width = nu0 if not freq else math.pi / freq
    while True:
        hi = lo + width
        piece = complex(integrate_finite(g, [lo, hi], spec)) + complex(integrate_finite(g, [-hi, -lo], spec))
        total += piece
        sums.append(total)
        scale = max(1.0, abs(total))
        quiet = quiet + 1 if abs(piece) < tol * scale else 0
        if quiet >= 3:
            return total
        if freq and len(sums) >= 12:
            e1, e2 = _wynn(sums[-10:]), _wynn(sums[-11:-1])
            if abs(e1 - e2) < tol * scale:
                return e1
        if hi >= nu_max:
            raise SlowDecay(f"nu-integrand still contributes {abs(piece):.3e} at |nu| = {hi:.3g}",
                            partial=total, error=abs(piece))
        lo = hi
        if not freq:
            width = hi


def _sequence_terms(coeffs: CoefficientSequence, d, x, L, form, spec):
    ells = np.arange(L + 1)
    c = np.array([coeffs[e] if coeffs.has(e) else 0.0 for e in ells], dtype=complex)
    if form == "legendre":
        return c * special.h_d(d, ells) * _gegenbauer_table(d, L, np.asarray(float(x)))[...] / special.omega(d)
    vals = np.array([special.psi(d, e, complex(x), spec) if c[e] != 0 else 0.0 for e in ells], dtype=complex)
    return (-1.0) ** ells * c * vals / np.pi


def reconstruct_sphere_kernel(coeffs: CoefficientSequence, d: int, x: float, form: str = "legendre",
                              spec: QuadratureSpec = DEFAULT_SPEC, summation: str = "plain",
                              max_terms: int = 20000):
    """f(x) = (1/omega_d) sum c_l h_d(l) P_l(x), or (1/pi) sum (-1)^l c_l Psi_l(x).

    ``summation="abel"`` evaluates sum c_l ... r^l at r = 1 - 2^-j and
    extrapolates polynomially to r = 1; this sums the slowly convergent
    series of kernels singular at x = 1.
    """
    if form not in ("legendre", "psi"):
        raise DomainError("form must be 'legendre' or 'psi'")
    if not -1.0 <= x <= 1.0:
        raise DomainError("sphere reconstruction needs x in [-1, 1]")
    if coeffs.finite:
        L = max(coeffs.support(), default=-1)
        if L < 0:
            return 0j
        return complex(np.sum(_sequence_terms(coeffs, d, x, L, form, spec)))
    if summation == "plain":
        L = 64
        while True:
            terms = _sequence_terms(coeffs, d, x, L, form, spec)
            mags = np.abs(terms)
            partial = np.cumsum(terms)
            tol = spec.abs_tol * max(1.0, abs(partial[-1]))
            small = mags < tol
            run = np.convolve(small.astype(int), np.ones(3, dtype=int), "valid") == 3
            if run.any():
                stop = int(np.argmax(run)) + 2
                return complex(partial[stop])
            if mags[-16:].max() > 0.5 * mags[-48:-32].max():
                raise SeriesDivergence(f"terms not decaying beyond l = {L} (|term| ~ {mags[-1]:.3e})")
            L *= 2
            if L > max_terms:
                raise SeriesDivergence(f"series not converged after {max_terms} terms")
    if summation != "abel":
        raise DomainError("summation must be 'plain' or 'abel'")
    hs = 2.0 ** -np.arange(3, 10)
    L = int(40.0 / hs[-1]) + 1
    if L > max_terms:
        L = max_terms
    terms = _sequence_terms(coeffs, d, x, L, form, spec)
    ells = np.arange(L + 1)
    vals = np.array([np.sum(terms * (1.0 - h) ** ells) for h in hs])
    # Neville extrapolation to h = 0
    table = list(vals)
    for k in range(1, len(hs)):
        table = [(hs[i + k] * table[i] - hs[i] * table[i + 1]) / (hs[i + k] - hs[i])
                 for i in range(len(table) - 1)]
    return complex(table[0])


def _ratio_sin(lam, eps_shift=0.0):
    return 1.0 / np.sin(np.pi * (lam - eps_shift))


def _delta_psi_over_sin(d, lam, v, spec):
    lam = complex(lam)
    s = np.sin(np.pi * lam)
    if abs(s) > 1e-3:
        return special.delta_psi_v(d, lam, v, spec) / s
    # near an integer the ratio is regular; evaluate on a small circle around lam
    r = 1e-2
    pts = lam + r * np.exp(2j * np.pi * np.arange(8) / 8)
    vals = [special.delta_psi_v(d, p, v, spec) / np.sin(np.pi * p) for p in pts]
    return complex(np.mean(vals))


def _evaluate_ftilde(Ft, lam):
    if isinstance(Ft, HalfPlaneFunction):
        return np.asarray(Ft.eval(lam), dtype=complex)
    return np.asarray(Ft(lam), dtype=complex)


def reconstruct_volterra_kernel(Ftilde, d: int, m: float, v, form: Optional[str] = None,
                                spec: QuadratureSpec = DEFAULT_SPEC, nu_truncation: float = 20.0,
                                tol: float = 1e-9):
    """Jump f(v) from F~ on the line Re lam = m.

    legendre:  (1/omega_d) int F~(m+i nu) h_d(m+i nu) P_{m+i nu}(cosh v) d nu;
    delta_psi: -(1/2pi) int F~(m+i nu) Delta Psi_{m+i nu}(cosh v) / sin(pi(m+i nu)) d nu.
    """
    if d < 3:
        raise DomainError("use d2_reconstruct for d = 2")
    form = form or ("legendre" if d % 2 == 0 else "delta_psi")
    if isinstance(Ftilde, HalfPlaneFunction) and m < Ftilde.m - 1e-12:
        raise ConvergenceDomain(f"line Re lam = {m} lies left of the analyticity half-plane")
    if form == "legendre" and d % 2 == 1 and not m > min(-1.0, -(d - 3) / 2.0):
        raise ConvergenceDomain("the Legendre form for odd d needs m > min(-1, -(d-3)/2)")
    v = float(v)
    if not v > 0:
        raise NegativeArgument("reconstruction needs v > 0")
    x = math.cosh(v)

    if form == "legendre":
        def g(nu):
            lam = m + 1j * nu
            P = np.array([special.legendre_P(d, l, x, spec=spec) for l in lam], dtype=complex)
            return _evaluate_ftilde(Ftilde, lam) * special.h_d(d, lam) * P / special.omega(d)
    elif form == "delta_psi":
        def g(nu):
            lam = m + 1j * nu
            r = np.array([_delta_psi_over_sin(d, l, v, spec) for l in lam], dtype=complex)
            return -_evaluate_ftilde(Ftilde, lam) * r / (2.0 * np.pi)
    else:
        raise DomainError("form must be 'legendre' or 'delta_psi'")
    return _line_integral(g, spec, tol, nu_truncation, freq=v)


def _richardson_eps(fun, eps=(1e-4, 1e-5, 1e-6)):
    """Extrapolate fun(eps) to eps -> 0 assuming an expansion in integer powers of eps."""
    e = np.array(eps, dtype=float)
    vals = np.array([fun(x) for x in e], dtype=complex)
    table = list(vals)
    for k in range(1, len(e)):
        table = [(e[i + k] * table[i] - e[i] * table[i + 1]) / (e[i + k] - e[i])
                 for i in range(len(table) - 1)]
    return complex(table[0])


def reconstruct_perikernel(Ftilde, coeffs_below_m: Optional[CoefficientSequence], d: int, m: float, z,
                           form: Optional[str] = None, spec: QuadratureSpec = DEFAULT_SPEC,
                           nu_truncation: float = 20.0, tol: float = 1e-9,
                           epsilon_prescription: bool = False):
    """F(z) = -(1/2pi) int F~(m+i nu) Psi_{m+i nu}(z) / sin(pi(m+i nu)) d nu + truncation polynomial.

    The legendre form uses -(1/(2 omega_d)) h_d P_{m+i nu}(-z).  For integer m
    the limit sin(pi(m - eps + i nu)), eps -> 0+, must be requested through
    ``epsilon_prescription``; it is Richardson-extrapolated from
    eps in {1e-4, 1e-5, 1e-6}.
    """
    if d < 2:
        raise DomainError("dimension must be >= 2")
    if d == 2:
        return d2_reconstruct(Ftilde, m, "perikernel", z, coeffs=coeffs_below_m, spec=spec,
                              nu_truncation=nu_truncation, tol=tol, epsilon_prescription=epsilon_prescription)
    form = form or ("legendre" if d % 2 == 0 else "psi")
    z = complex(z)
    if z.imag == 0 and z.real >= 1:
        raise DomainError("z must lie off the cut [1, inf)")
    integer_m = float(m) == round(float(m))
    if integer_m and not epsilon_prescription:
        raise IntegerMWithoutEpsilonFlag("integer m needs epsilon_prescription=True")
    if form == "psi":
        kernel = lambda lam: special.psi(d, lam, z, spec) / (2.0 * np.pi)
    elif form == "legendre":
        kernel = lambda lam: special.h_d(d, lam) * special.legendre_P(d, lam, -z, spec=spec) / (2.0 * special.omega(d))
    else:
        raise DomainError("form must be 'psi' or 'legendre'")

    def integral(eps):
        def g(nu):
            lam = m + 1j * nu
            kv = np.array([kernel(l) for l in lam], dtype=complex)
            return -_evaluate_ftilde(Ftilde, lam) * kv / np.sin(np.pi * (lam - eps))
        pts = [0.0] if eps == 0 else [-10 * eps, -eps, 0.0, eps, 10 * eps]
        return _line_integral(g, spec, tol, nu_truncation, freq=freq, points=pts)

    # near the cut the integrand oscillates in nu with frequency |Im arccos z|
    osc = abs(np.arccos(z).imag)
    freq = osc if osc > 0.05 else None
    value = _richardson_eps(integral) if integer_m else integral(0.0)
    if coeffs_below_m is not None:
        value += truncation_polynomial(d, m, coeffs_below_m)(z)
    elif m > 0:
        raise DomainError("coefficients below m are required when m > 0")
    return complex(value)


# ---------------------------------------------------------------------------
# d = 2

def d2_laplace(F, lam, spec: QuadratureSpec = DEFAULT_SPEC):
    """d = 2 transform; with zeta = cosh v it is the plain Laplace transform of the jump."""
    if isinstance(F, VolterraKernel) and F.d != 2:
        raise DomainError("d2_laplace expects a d = 2 kernel")
    return laplace_transform(F, lam, spec)


def d2_fourier(f, ells, spec: QuadratureSpec = DEFAULT_SPEC) -> CoefficientSequence:
    """[f]_l = [f]_{-l} = int_{-pi}^{pi} cos(l u) f(cos u) du."""
    fv = _vec(f)
    ells = sorted({abs(int(e)) for e in ells})
    if not ells:
        return CoefficientSequence({}, "Z")
    arr = np.array(ells)

    def g(u):
        return np.asarray(fv(u), dtype=complex)[:, None] * np.cos(np.multiply.outer(u, arr))

    c = np.atleast_1d(integrate_finite(g, [-np.pi, np.pi], spec, points=[0.0]))
    entries = {}
    for i, e in enumerate(ells):
        entries[e] = c[i]
        entries[-e] = c[i]
    return CoefficientSequence(entries, "Z")


def d2_reconstruct(Ftilde, m: float, target: str, point, coeffs: Optional[CoefficientSequence] = None,
                   spec: QuadratureSpec = DEFAULT_SPEC, nu_truncation: float = 20.0, tol: float = 1e-9,
                   epsilon_prescription: bool = False):
    """d = 2 inversion: target "sphere" (Fourier series in cos l u), "volterra"
    ((1/pi) int F~(m+i nu) cosh((m+i nu) v) d nu) or "perikernel"."""
    if target == "sphere":
        if coeffs is None:
            raise DomainError("sphere reconstruction needs the coefficient sequence")
        u = float(point)
        total = 0j
        for ell in coeffs.support():
            total += coeffs[ell] * math.cos(ell * u)
        return total / (2.0 * math.pi)
    if target == "volterra":
        v = float(point)
        if not v > 0:
            raise NegativeArgument("reconstruction needs v > 0")

        def g(nu):
            lam = m + 1j * nu
            return _evaluate_ftilde(Ftilde, lam) * np.cosh(lam * v) / np.pi

        return _line_integral(g, spec, tol, nu_truncation, freq=v)
    if target == "perikernel":
        theta = complex(point)
        integer_m = float(m) == round(float(m))
        if integer_m and not epsilon_prescription:
            raise IntegerMWithoutEpsilonFlag("integer m needs epsilon_prescription=True")

        def integral(eps):
            def g(nu):
                lam = m + 1j * nu
                return -(_evaluate_ftilde(Ftilde, lam) * np.cos(lam * (theta - np.pi))
                         / np.sin(np.pi * (lam - eps))) / (2.0 * np.pi)
            pts = [0.0] if eps == 0 else [-10 * eps, -eps, 0.0, eps, 10 * eps]
            return _line_integral(g, spec, tol, nu_truncation, points=pts)

        value = _richardson_eps(integral) if integer_m else integral(0.0)
        if coeffs is not None:
            for ell in range(-math.ceil(m), math.ceil(m) + 1):
                if abs(ell) < m:
                    value += coeffs[ell] * np.cos(ell * theta) / (2.0 * math.pi)
        elif m > 0:
            raise DomainError("coefficients with |l| < m are required when m > 0")
        return complex(value)
    raise DomainError("target must be 'sphere', 'volterra' or 'perikernel'")


# ---------------------------------------------------------------------------
# power series

def mellin_coefficient(s, lam, alpha: float, spec: QuadratureSpec = DEFAULT_SPEC, m: float = 0.0):
    """a(lam) = (1/2pi) int_alpha^inf s(zeta) zeta^{-lam-1} d zeta, with zeta = alpha e^t."""
    lam = complex(lam)
    if not lam.real > m:
        raise ConvergenceDomain(f"Mellin coefficient needs Re(lam) > m = {m}")
    if not alpha > 0:
        raise DomainError("cut start alpha must be > 0")
    sv = _vec(s)

    def g(t):
        return np.asarray(sv(alpha * np.exp(t)), dtype=complex) * np.exp(-lam * t)

    return complex(alpha ** (-lam) * integrate_semi_infinite(g, 0.0, spec, decay_rate=lam.real - m) / (2 * np.pi))


def power_series_reconstruct(a, m: float, below_m_coeffs: Optional[CoefficientSequence], zeta,
                             spec: QuadratureSpec = DEFAULT_SPEC):
    """S(zeta) = sum_{0<=l<m} a_l zeta^l - (1/2) int a(m+i nu) (-zeta)^{m+i nu} / sin(pi(m+i nu)) d nu."""
    zeta = complex(zeta)
    if zeta == 0:
        return complex(below_m_coeffs[0]) if below_m_coeffs is not None and below_m_coeffs.has(0) else 0j
    if float(m) == round(float(m)):
        raise IntegerMWithoutEpsilonFlag("choose a non-integer m for the power-series line")
    phase = abs(np.angle(-zeta))
    rate = math.pi - phase
    if not rate > 0:
        raise ConvergenceDomain("zeta lies on the positive real axis")
    log_mz = np.log(-zeta)

    def g(nu):
        out = 0.0
        for sgn in (1.0, -1.0):
            lam = m + 1j * sgn * nu
            out = out + _evaluate_ftilde(a, lam) * np.exp(lam * log_mz) / np.sin(np.pi * lam)
        return out

    value = -0.5 * complex(integrate_semi_infinite(g, 0.0, spec, decay_rate=rate))
    for ell in range(0, math.ceil(m)):
        if ell < m:
            if below_m_coeffs is None or not below_m_coeffs.has(ell):
                raise DomainError(f"coefficient a_{ell} is required")
            value += below_m_coeffs[ell] * zeta ** ell
    return value
