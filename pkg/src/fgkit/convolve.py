"""Volterra composition on the hyperboloid, on the half-line, and for power series."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import special
from .errors import ContourHitsCut, DomainError, NonConvergence, SingularBoundary
from .kernels import GrowthClass, VolterraKernel
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_finite

__all__ = [
    "ConvolutionResult",
    "volterra_convolve",
    "convolution_kernel",
    "line_convolve",
    "multiplicative_convolve",
]


def _jump_of(f):
    if isinstance(f, VolterraKernel):
        return f, f.growth.mu
    raise DomainError("volterra_convolve expects VolterraKernel operands")


def volterra_convolve(f1: VolterraKernel, f2: VolterraKernel, v: float,
                      spec: QuadratureSpec = DEFAULT_SPEC, full_output: bool = False):
    """(f1 <> f2)(v) as an iterated integral.

    With x' = cosh v', x'' = cosh v'' the integrand is
    omega_{d-2} (sinh v)^{3-d} f1(v'') f2(v') Lambda^{(d-4)/2} dx' dx'', and for
    fixed v'' the quadratic Lambda factors as (c_- - x')(c_+ - x'),
    c_pm = cosh(v pm v'').  The inner variable is v' = L - (L - mu2) t^2,
    L = v - v'', which absorbs the square-root zero at v' = L for d = 3; the
    outer variable v'' = mu1 + W (1 - cos pi s)/2 does the same at both ends.
    """
    _jump_of(f1)
    _jump_of(f2)
    if f1.d != f2.d:
        raise DomainError("operands must share the dimension")
    d = f1.d
    if d < 3:
        raise DomainError("use line_convolve for d = 2")
    mu1, mu2 = f1.growth.mu, f2.growth.mu
    v = float(v)
    width = v - mu1 - mu2
    if width <= 0:
        return (0j, 0.0) if full_output else 0j
    p = (d - 4) / 2.0

    def inner(vpp):
        # vpp: outer nodes, shape (n,)
        L = v - vpp
        span = L - mu2

        def g(t):
            tt = t[:, None]
            vp = L[None, :] - span[None, :] * tt * tt
            lo = 2.0 * np.sinh(0.5 * (L[None, :] + vp)) * np.sinh(0.5 * span[None, :] * tt * tt)
            hi = 2.0 * np.sinh(0.5 * (v + vpp[None, :] + vp)) * np.sinh(0.5 * (v + vpp[None, :] - vp))
            if p == 0:
                lam = 1.0
            elif d == 3:
                # t / sqrt(sinh(span t^2 / 2)) stays finite as t -> 0
                sh = np.sinh(0.5 * span[None, :] * tt * tt)
                ratio = np.where(tt > 0, tt / np.sqrt(np.where(sh > 0, sh, 1.0)),
                                 np.sqrt(2.0 / np.where(span > 0, span, 1.0))[None, :])
                lam = ratio / np.sqrt(2.0 * np.sinh(0.5 * (L[None, :] + vp)) * hi)
                return (np.asarray(f2(vp.ravel()), dtype=complex).reshape(vp.shape)
                        * np.sinh(vp) * lam * 2.0 * span[None, :])
            else:
                lam = (lo * hi) ** p
            jac = 2.0 * span[None, :] * tt
            return np.asarray(f2(vp.ravel()), dtype=complex).reshape(vp.shape) * np.sinh(vp) * lam * jac

        return np.atleast_1d(integrate_finite(g, [0.0, 1.0], spec))

    def outer(s):
        vpp = mu1 + 0.5 * width * (1.0 - np.cos(np.pi * s))
        jac = 0.5 * width * np.pi * np.sin(np.pi * s)
        return np.asarray(f1(vpp), dtype=complex) * np.sinh(vpp) * jac * inner(vpp)

    try:
        res = integrate_finite(outer, [0.0, 1.0], spec, full_output=True)
        val, err = res.value, res.error
    except NonConvergence as exc:
        if d == 3:
            raise SingularBoundary(f"boundary substitution did not converge at v = {v}: {exc}",
                                   partial=exc.partial, error=exc.error) from exc
        raise
    scale = special.omega(d - 2) / np.sinh(v) ** (d - 3)
    val = complex(val) * scale
    return (val, abs(err) * scale) if full_output else val


@dataclass(frozen=True)
class ConvolutionResult:
    """Composition f1 <> f2 as a kernel, with its operands recorded."""

    kernel: VolterraKernel
    provenance: tuple
    quadrature_report: dict = field(default_factory=dict)


def convolution_kernel(f1: VolterraKernel, f2: VolterraKernel,
                       spec: QuadratureSpec = DEFAULT_SPEC) -> ConvolutionResult:
    """Wrap f1 <> f2 as a VolterraKernel supported from mu1 + mu2."""
    report: dict = {"max_error": 0.0}

    def jump(v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.empty(v.shape, dtype=complex)
        for i, x in enumerate(v.ravel()):
            val, err = volterra_convolve(f1, f2, x, spec, full_output=True)
            out.flat[i] = val
            report["max_error"] = max(report["max_error"], err)
        return out

    growth = GrowthClass(max(f1.growth.m, f2.growth.m), f1.growth.mu + f2.growth.mu)
    kernel = VolterraKernel(jump, growth, f1.d, label=f"({f1.label})<>({f2.label})", validate=False)
    return ConvolutionResult(kernel, (f1.label, f2.label), report)


def line_convolve(g1: Callable, g2: Callable, w: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """(g1 <> g2)(w) = int_0^w g1(w - w') g2(w') dw' for functions on [0, inf)."""
    w = float(w)
    if w <= 0:
        return 0j

    def f(t):
        return np.asarray(g1(w - t), dtype=complex) * np.asarray(g2(t), dtype=complex)

    return complex(integrate_finite(f, [0.0, w], spec))


def multiplicative_convolve(S1: Callable, S2: Callable, zeta, alpha1: float, alpha2: float,
                            radius: Optional[float] = None, tol: float = 1e-13, max_nodes: int = 1 << 16):
    """(1/2 pi i) oint S1(zeta/z) S2(z) dz/z over |z| = radius.

    The circle must satisfy |zeta|/alpha1 < radius < alpha2; by default the
    geometric mean of the two bounds.  Trapezoidal rule, doubled until stable.
    """
    zeta = complex(zeta)
    lo, hi = abs(zeta) / alpha1, alpha2
    if not lo < hi:
        raise ContourHitsCut(f"|zeta| = {abs(zeta):.6g} must be below alpha1*alpha2 = {alpha1 * alpha2:.6g}")
    if radius is None:
        radius = math.sqrt(lo * hi) if lo > 0 else 0.5 * hi
    if not lo < radius < hi:
        raise ContourHitsCut(f"radius {radius} outside ({lo:.6g}, {hi:.6g})")

    def mean(n):
        z = radius * np.exp(2j * np.pi * np.arange(n) / n)
        return complex(np.mean(np.asarray(S1(zeta / z), dtype=complex) * np.asarray(S2(z), dtype=complex)))

    n = 32
    prev = mean(n)
    while n < max_nodes:
        n *= 2
        cur = mean(n)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise NonConvergence("trapezoidal rule on the circle did not settle", partial=prev)
