"""Quadrature, Chebyshev proxies and the complex log-gamma function.

Every integrator here accepts vectorised integrands: ``f`` receives a 1-D
array of abscissae and returns an array whose leading axis matches it.  Extra
trailing axes are allowed, so one adaptive pass can integrate a whole batch of
related integrands on a shared panel decomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.fft import dct

from .errors import (
    DegreeOverflow,
    InvalidSingularity,
    NonConvergence,
    PoleAtNonPositiveInteger,
    TailBoundViolated,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 4000
    tail_decay_rate: Optional[float] = None
    max_truncation_point: float = 400.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if self.tail_decay_rate is not None and not self.tail_decay_rate > 0:
            raise ValueError("tail_decay_rate must be positive")

    def with_(self, **kw) -> "QuadratureSpec":
        return replace(self, **kw)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class Singularity:
    """Algebraic endpoint weight ``|t - endpoint|**exponent`` carried by the integrand."""

    exponent: float
    endpoint: str = "a"  # "a" (left) or "b" (right)


# Kronrod 15 / Gauss 7 pair on [-1, 1].
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
W_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1:7:2] = _WG[:3]
W_GAUSS[7] = _WG[3]
W_GAUSS[9:15:2] = _WG[:3][::-1]


@dataclass
class QuadResult:
    value: np.ndarray | complex
    error: float
    panels: int


def _gk_panels(f, a, b):
    """Apply the 15-point pair to every panel [a_i, b_i] in one call to f.

    The error estimate follows the usual QUADPACK rescaling of |K15 - G7|,
    which is far less pessimistic than the raw difference on smooth panels.
    """
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    vals = np.asarray(f(t))
    if vals.ndim == 0:
        vals = np.broadcast_to(vals, t.shape)
    vals = vals.reshape((a.size, 15, -1))
    if not np.all(np.isfinite(vals)):
        bad = ~np.isfinite(vals).all(axis=2)
        raise NonConvergence(f"integrand returned non-finite values near t={t.reshape(a.size, 15)[bad][:3]}")
    h = half[:, None]
    k = np.einsum("j,pjc->pc", W_KRONROD, vals) * h
    g = np.einsum("j,pjc->pc", W_GAUSS, vals) * h
    ah = np.abs(h)
    resabs = np.einsum("j,pjc->pc", W_KRONROD, np.abs(vals)) * ah
    mean = (k / (2 * h))[:, None, :]
    resasc = np.einsum("j,pjc->pc", W_KRONROD, np.abs(vals - mean)) * ah
    diff = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * diff / resasc) ** 1.5), diff)
    floor = 50.0 * _EPS * resabs
    err = np.where(err < floor, floor, err)
    return k, err.max(axis=1), resabs.max(axis=1)


def _adaptive(f, breaks, spec: QuadratureSpec):
    """Globally adaptive bisection; only freshly created panels are evaluated."""
    breaks = np.asarray(breaks, dtype=float)
    total_len = abs(breaks[-1] - breaks[0])
    if total_len == 0.0:
        probe = np.asarray(f(np.array([breaks[0]])))
        return QuadResult(np.zeros(probe.shape[1:], dtype=complex) if probe.ndim > 1 else 0.0, 0.0, 0)
    a = breaks[:-1].copy()
    b = breaks[1:].copy()
    shape = np.asarray(f(np.array([0.5 * (a[0] + b[0])]))).shape[1:]
    k, err, resabs = _gk_panels(f, a, b)
    while True:
        total = k.sum(axis=0)
        scale = np.max(np.abs(total))
        tol = max(spec.abs_tol, spec.rel_tol * scale)
        eff = np.where(err <= 50.0 * _EPS * resabs, 0.0, err)
        esum = eff.sum()
        if esum <= tol:
            return QuadResult(total.reshape(shape), float(err.sum()), a.size)
        idx = np.nonzero(eff >= 0.1 * eff.max())[0]
        n_split = idx.size
        if a.size + n_split > spec.max_subdivisions:
            raise NonConvergence(
                f"subdivision budget {spec.max_subdivisions} exhausted "
                f"(error estimate {esum:.3e}, target {tol:.3e})",
                partial=total.reshape(shape), error=float(esum))
        keep = np.ones(a.size, dtype=bool)
        keep[idx] = False
        sa, sb = a[idx], b[idx]
        m = 0.5 * (sa + sb)
        na = np.concatenate([sa, m])
        nb = np.concatenate([m, sb])
        nk, nerr, nres = _gk_panels(f, na, nb)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        k = np.concatenate([k[keep], nk])
        err = np.concatenate([err[keep], nerr])
        resabs = np.concatenate([resabs[keep], nres])


def _substituted(f, a, b, sing: Singularity):
    """Return (g, s_lo, s_hi) so that int_a^b f dt = int_{s_lo}^{s_hi} g ds with g bounded."""
    alpha = float(sing.exponent)
    if not alpha > -1.0:
        raise InvalidSingularity(f"singular exponent {alpha} must exceed -1")
    p = alpha + 1.0
    inv = 1.0 / p
    length = b - a
    # keep t representably away from the endpoint; the bounded integrand makes
    # the clipped sliver negligible
    floor = 4.0 * _EPS * max(abs(a), abs(b), length)
    if sing.endpoint == "a":
        def g(s):
            t = a + np.maximum(s ** inv, floor)
            return _scale_rows(f(t), inv * s ** (inv - 1.0))
        return g, 0.0, length ** p
    if sing.endpoint == "b":
        def g(s):
            t = b - np.maximum(s ** inv, floor)
            return _scale_rows(f(t), inv * s ** (inv - 1.0))
        return g, 0.0, length ** p
    raise InvalidSingularity(f"unknown endpoint {sing.endpoint!r}")


def _scale_rows(vals, w):
    vals = np.asarray(vals)
    if vals.ndim > 1:
        return vals * w.reshape((-1,) + (1,) * (vals.ndim - 1))
    return vals * w


def integrate_finite(
    f: Callable[[np.ndarray], np.ndarray],
    interval: Sequence[float],
    spec: QuadratureSpec = DEFAULT_SPEC,
    endpoint_singularity: Optional[Singularity] = None,
    points: Optional[Sequence[float]] = None,
    full_output: bool = False,
):
    """Adaptive Gauss-Kronrod integral of ``f`` over ``interval``.

    A declared endpoint weight ``(t - endpoint)**alpha`` is removed exactly by
    the substitution ``s = |t - endpoint|**(alpha + 1)``, so the rule only ever
    sees a bounded integrand.  ``points`` are interior breakpoints.
    """
    a, b = float(interval[0]), float(interval[1])
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
        if endpoint_singularity is not None:
            endpoint_singularity = Singularity(
                endpoint_singularity.exponent, "b" if endpoint_singularity.endpoint == "a" else "a")
    if endpoint_singularity is not None and endpoint_singularity.exponent != 0.0:
        if points:
            raise InvalidSingularity("breakpoints cannot be combined with a declared singularity")
        g, lo, hi = _substituted(f, a, b, endpoint_singularity)
        res = _adaptive(g, [lo, hi], spec)
    else:
        brk = [a]
        if points is not None:
            brk += sorted(float(p) for p in points if a < p < b)
        brk.append(b)
        res = _adaptive(f, brk, spec)
    res.value = sign * res.value
    if full_output:
        return res
    v = res.value
    return complex(v) if np.ndim(v) == 0 else v


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    lower: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    decay_rate: Optional[float] = None,
    endpoint_singularity: Optional[Singularity] = None,
    full_output: bool = False,
):
    """Integral over ``[lower, inf)`` by doubling panels with a geometric tail bound.

    The caller states a rate ``r`` with ``|f(t)| <= C exp(-r t)`` eventually,
    either through ``decay_rate`` or ``spec.tail_decay_rate``.  After each panel
    the remaining tail is bounded by ``max|f|`` near the panel end divided by
    ``r``; integration stops once that falls below the tolerance.
    """
    r = decay_rate if decay_rate is not None else spec.tail_decay_rate
    if r is None or not r > 0:
        raise ValueError("a positive tail decay rate is required for semi-infinite integrals")
    h = min(1.0, 2.0 / r)
    lo = float(lower)
    hi = lo + h
    total = None
    err = 0.0
    panels = 0
    history = []
    first = True
    while True:
        sing = endpoint_singularity if first else None
        res = integrate_finite(f, [lo, hi], spec, endpoint_singularity=sing, full_output=True)
        first = False
        total = res.value if total is None else total + res.value
        err += res.error
        panels += res.panels
        piece = float(np.max(np.abs(res.value)))
        history.append(piece)
        probe = np.asarray(f(np.linspace(hi - 0.25 * (hi - lo), hi, 4)))
        tail = float(np.max(np.abs(probe))) / r
        scale = float(np.max(np.abs(total)))
        tol = max(spec.abs_tol, spec.rel_tol * scale)
        if tail <= tol:
            break
        if len(history) >= 5 and all(
                history[-i] > 1.5 * history[-i - 1] for i in range(1, 4)) and history[-1] > tol:
            raise TailBoundViolated(
                f"panel contributions grow beyond t={hi:.3g}; declared decay rate {r} is not honoured",
                partial=total, error=err)
        if hi >= spec.max_truncation_point:
            raise TailBoundViolated(
                f"tail bound {tail:.3e} still above {tol:.3e} at truncation point {hi:.3g}",
                partial=total, error=err)
        lo, hi = hi, min(hi + 2.0 * (hi - lo), spec.max_truncation_point)
    if full_output:
        return QuadResult(total, err + tail, panels)
    return complex(total) if np.ndim(total) == 0 else total


# ---------------------------------------------------------------------------
# Chebyshev proxies

@dataclass(frozen=True)
class ChebyshevProxy:
    interval: tuple
    coefficients: np.ndarray = field(repr=False)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def _map(self, x):
        a, b = self.interval
        return (2.0 * np.asarray(x, dtype=complex if np.iscomplexobj(x) else float) - (a + b)) / (b - a)

    def __call__(self, x):
        s = self._map(x)
        c = self.coefficients
        b1 = np.zeros_like(s, dtype=complex)
        b2 = np.zeros_like(b1)
        for ck in c[:0:-1]:
            b1, b2 = 2.0 * s * b1 - b2 + ck, b1
        out = s * b1 - b2 + c[0]
        return out if np.ndim(out) else complex(out)


def chebyshev_points(n: int, interval=(-1.0, 1.0)) -> np.ndarray:
    a, b = interval
    x = np.cos(np.pi * np.arange(n + 1) / n)
    return 0.5 * (a + b) + 0.5 * (b - a) * x


def _coeffs_from_values(vals: np.ndarray) -> np.ndarray:
    n = vals.shape[0] - 1
    c = dct(vals.real, type=1, axis=0) / n
    if np.iscomplexobj(vals):
        c = c + 1j * dct(vals.imag, type=1, axis=0) / n
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def cheb_fit(
    f: Callable[[np.ndarray], np.ndarray],
    interval: Sequence[float],
    spec: QuadratureSpec = DEFAULT_SPEC,
    tol: Optional[float] = None,
    min_degree: int = 16,
    max_degree: int = 1024,
) -> ChebyshevProxy:
    """Adaptive Chebyshev interpolant of ``f`` on ``interval``.

    The degree doubles until the trailing coefficients drop below ``tol``
    (``spec.abs_tol`` by default).  Samples of ``f`` that are themselves only
    accurate to some noise level make the coefficient tail plateau; such a
    plateau is accepted when it sits far below the leading coefficients.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    tol = spec.abs_tol if tol is None else tol
    n = max(4, min_degree)
    prev_tail = None
    while True:
        x = chebyshev_points(n, (a, b))
        vals = np.asarray(f(x), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise DegreeOverflow("function returned non-finite samples")
        c = _coeffs_from_values(vals)
        scale = float(np.max(np.abs(c)))
        tail = float(np.max(np.abs(c[-4:])))
        if tail <= max(tol, 8 * _EPS * scale):
            return ChebyshevProxy((a, b), _chop(c, max(tol, 4 * _EPS * scale)))
        if prev_tail is not None and n >= 64 and tail > 0.1 * prev_tail and tail < 1e-8 * scale:
            return ChebyshevProxy((a, b), _chop(c, 2 * tail))
        prev_tail = tail
        n *= 2
        if n > max_degree:
            raise DegreeOverflow(
                f"Chebyshev tail {tail:.3e} above {tol:.3e} at degree {n // 2}")


def _chop(c, tol):
    big = np.nonzero(np.abs(c) > tol)[0]
    last = int(big[-1]) if big.size else 0
    return c[: max(last + 1, 1)].copy()


def cheb_derivative(p: ChebyshevProxy, order: int = 1) -> ChebyshevProxy:
    """Exact derivative of the proxy polynomial."""
    if order < 0:
        raise ValueError("order must be non-negative")
    c = np.asarray(p.coefficients, dtype=complex)
    a, b = p.interval
    for _ in range(order):
        n = len(c) - 1
        if n == 0:
            c = np.zeros(1, dtype=complex)
            continue
        d = np.zeros(n, dtype=complex)
        for k in range(n, 0, -1):
            d[k - 1] = 2 * k * c[k] + (d[k + 1] if k + 1 < n else 0.0)
        d[0] *= 0.5
        c = d * (2.0 / (b - a))
    return ChebyshevProxy(p.interval, c)


# ---------------------------------------------------------------------------
# log Gamma (Lanczos, g = 7, nine terms)

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log_gamma(z: complex) -> complex:
    z = z - 1.0
    x = _LANCZOS[0]
    for i in range(1, 9):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z: complex) -> complex:
    """log sin(pi z), continuous in z with the branch of the principal loggamma reflection."""
    return np.log(np.sin(np.pi * z))


def log_gamma(z) -> complex:
    """Principal branch of log Gamma(z) for complex z."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {z.real:g}")
    if z.real >= 0.5:
        return complex(_lanczos_log_gamma(z))
    val = math.log(math.pi) - _log_sin_pi(z) - _lanczos_log_gamma(1.0 - z)
    # The reflection formula is only correct modulo 2 pi i; pick the multiple
    # that continues the principal branch from the right half-plane.
    k = math.floor(0.5 * z.real + 0.25)
    if z.imag >= 0:
        val += 2j * math.pi * k
    else:
        val -= 2j * math.pi * k
    return complex(val)


def gamma(z) -> complex:
    return complex(np.exp(log_gamma(z)))
