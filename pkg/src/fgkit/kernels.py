"""Invariant triplets, Volterra and sphere kernels, half-plane functions.

A kernel is carried as a vectorised callable plus metadata.  The perikernel
is a function of the complex coordinate z = cos(theta), the sphere part a
function of the real angle u, and the Volterra part a function of v >= 0 with
cosh v the hyperboloid coordinate.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from . import special
from .errors import (
    ConvergenceDomain,
    DomainError,
    MissingCoefficient,
    ProxyRangeExceeded,
    SymmetryViolation,
)
from .numerics import ChebyshevProxy

__all__ = [
    "AnalyticFunction1D", "GrowthClass", "VolterraKernel", "SphereKernel",
    "InvariantTriplet", "HalfPlaneFunction", "CoefficientSequence",
    "make_elementary_triplet", "make_exponential_kernel", "elementary_laplace",
    "truncation_polynomial", "kernel_from_json", "load_kernel",
]


@dataclass(frozen=True)
class AnalyticFunction1D:
    """Complex function of one variable, evaluated elementwise on arrays."""

    func: Callable
    name: str = ""
    vectorized: bool = True

    def __call__(self, x):
        arr = np.asarray(x)
        if self.vectorized:
            out = np.asarray(self.func(arr), dtype=complex)
            if out.shape != arr.shape:
                out = np.broadcast_to(out, arr.shape).astype(complex)
        else:
            out = np.array([complex(self.func(t)) for t in arr.ravel()], dtype=complex).reshape(arr.shape)
        return complex(out) if out.ndim == 0 else out

    @classmethod
    def wrap(cls, f, name: str = "") -> "AnalyticFunction1D":
        if isinstance(f, cls):
            return f
        return cls(f, name or getattr(f, "__name__", ""))


@dataclass(frozen=True)
class GrowthClass:
    """Moderate-growth order m and cut threshold mu.

    Transforms that need m > -1 check it themselves against the requested
    degree, so a kernel decaying faster than e^{-v} may state its true order.
    """

    m: float
    mu: float = 0.0
    smoothness_order: int = 1 << 30

    def __post_init__(self):
        if not math.isfinite(self.m):
            raise DomainError("growth order m must be finite")
        if not self.mu >= 0:
            raise DomainError("cut threshold mu must be >= 0")
        if self.smoothness_order < 0:
            raise DomainError("smoothness_order must be >= 0")


@dataclass(frozen=True)
class VolterraKernel:
    """Jump f(v) of a perikernel, supported on [mu, inf).

    ``abel`` optionally holds the closed-form Abel image w -> f_hat(w); it is
    used by the composed spherical Laplace route when the jump itself is too
    singular at v = 0 for a direct Abel quadrature.
    """

    jump: AnalyticFunction1D
    growth: GrowthClass
    d: int
    abel: Optional[Callable] = None
    label: str = ""
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "jump", AnalyticFunction1D.wrap(self.jump))
        if int(self.d) != self.d or self.d < 2:
            raise DomainError("dimension must be an integer >= 2")
        if self.validate:
            self._check_growth()

    def _check_growth(self):
        # e^{-m v}|f| must not grow exponentially: compare v = 16 against v = 32
        # with a small slack in the exponent.
        m = self.growth.m + 0.05
        mu = self.growth.mu
        vs = mu + np.array([16.0, 32.0])
        vals = np.abs(np.asarray(self(vs))) * np.exp(-m * vs)
        if np.all(np.isfinite(vals)) and vals[1] > 1e3 * max(vals[0], 1e-300) and vals[1] > 1e-200:
            raise DomainError(f"jump grows faster than e^(m v) with m = {self.growth.m}")

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        inside = v >= self.growth.mu
        out = np.zeros(v.shape, dtype=complex)
        if inside.any():
            out[inside] = np.asarray(self.jump(v[inside]), dtype=complex)
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SphereKernel:
    """Sphere restriction u -> f(cos u), u in [0, pi]."""

    values: AnalyticFunction1D
    d: int

    def __post_init__(self):
        object.__setattr__(self, "values", AnalyticFunction1D.wrap(self.values))

    def __call__(self, u):
        return self.values(np.abs(np.asarray(u, dtype=float)))


@dataclass(frozen=True)
class HalfPlaneFunction:
    """F~(lam), analytic for Re lam > m."""

    eval: Callable
    m: float
    decay_order: int = 0
    nu_integrable: bool = False

    def __call__(self, lam):
        lam_arr = np.asarray(lam, dtype=complex)
        if np.any(lam_arr.real < self.m - 1e-12):
            raise ConvergenceDomain(f"evaluation at Re(lam) < m = {self.m}")
        out = np.asarray(self.eval(lam_arr), dtype=complex)
        return complex(out) if out.ndim == 0 else out

    @property
    def integrable(self) -> bool:
        return self.nu_integrable or self.decay_order >= 1


@dataclass(frozen=True)
class CoefficientSequence:
    """Coefficients indexed by l in Z (circle) or N (sphere); explicit entries win over the generator."""

    entries: Mapping[int, complex] = field(default_factory=dict)
    index_domain: str = "N"
    generator: Optional[Callable[[int], complex]] = None

    def __post_init__(self):
        if self.index_domain not in ("N", "Z"):
            raise DomainError("index_domain must be 'N' or 'Z'")
        if self.index_domain == "N" and any(k < 0 for k in self.entries):
            raise DomainError("sphere sequences are indexed by l >= 0")
        object.__setattr__(self, "entries", {int(k): complex(v) for k, v in self.entries.items()})

    def __getitem__(self, ell: int) -> complex:
        ell = int(ell)
        if ell in self.entries:
            return self.entries[ell]
        if self.generator is not None and (self.index_domain == "Z" or ell >= 0):
            return complex(self.generator(ell))
        raise MissingCoefficient(f"coefficient l = {ell} not available")

    def has(self, ell: int) -> bool:
        return int(ell) in self.entries or (self.generator is not None and (self.index_domain == "Z" or ell >= 0))

    @property
    def finite(self) -> bool:
        return self.generator is None

    def support(self) -> list[int]:
        return sorted(self.entries)

    def array(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self[ell] for ell in range(lo, hi + 1)], dtype=complex)

    def check_symmetry(self, d: int, tol: float = 1e-9) -> float:
        """Largest |c_l - (-1)^d c_{-(l+d-2)}| over stored index pairs."""
        if self.index_domain != "Z":
            raise DomainError("the reflection symmetry concerns Z-indexed sequences")
        worst = 0.0
        for ell, c in self.entries.items():
            mirror = -(ell + d - 2)
            if mirror in self.entries:
                worst = max(worst, abs(c - (-1) ** d * self.entries[mirror]))
        if worst > tol:
            raise SymmetryViolation(f"coefficient reflection broken by {worst:.3e}")
        return worst


@dataclass(frozen=True)
class InvariantTriplet:
    """Perikernel, sphere restriction and jump, validated at construction."""

    perikernel: AnalyticFunction1D
    sphere: SphereKernel
    volterra: VolterraKernel
    growth: GrowthClass
    validate: bool = True
    samples: int = 16
    tol: float = 1e-10
    jump_tol: float = 1e-6
    jump_samples: int = 0

    def __post_init__(self):
        object.__setattr__(self, "perikernel", AnalyticFunction1D.wrap(self.perikernel))
        if self.validate:
            self._check_sphere()
            if self.jump_samples:
                self._check_jump()

    @property
    def d(self) -> int:
        return self.volterra.d

    def _check_sphere(self):
        u = np.linspace(0.15, math.pi - 0.15, self.samples)
        a = np.asarray(self.sphere(u))
        b = np.asarray(self.perikernel(np.cos(u).astype(complex)))
        err = np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))
        if err > self.tol:
            raise DomainError(f"sphere part differs from the perikernel on [-1, 1] by {err:.3e}")

    def _check_jump(self):
        # i[F(x - i eps) - F(x + i eps)], Richardson-extrapolated in eps.
        v = self.growth.mu + np.linspace(0.4, 2.0, self.jump_samples)
        x = np.cosh(v)
        est = []
        for eps in (2e-3, 1e-3):
            lo = np.asarray(self.perikernel(x - 1j * eps))
            hi = np.asarray(self.perikernel(x + 1j * eps))
            est.append(1j * (lo - hi))
        jump = 2 * est[1] - est[0]
        ref = np.asarray(self.volterra(v))
        err = np.max(np.abs(jump - ref) / np.maximum(1.0, np.abs(ref)))
        if err > self.jump_tol:
            raise DomainError(f"volterra part is not the jump of the perikernel (error {err:.3e})")


# ---------------------------------------------------------------------------
# built-in kernels

def elementary_laplace(d: int, lam0) -> HalfPlaneFunction:
    """Closed-form transform of the elementary jump: rational in lam."""
    lam0 = complex(lam0)
    sign = -1.0 if d % 2 == 0 else 1.0
    s = np.sin(np.pi * lam0)

    def f(lam):
        return -s * (1.0 / (lam - lam0) + sign / (lam + lam0 + d - 2))

    return HalfPlaneFunction(f, m=lam0.real, decay_order=2 if d % 2 == 0 else 1)


def make_elementary_triplet(d: int, lam0, validate: bool = True) -> InvariantTriplet:
    """Triplet of the elementary perikernel Psi^(d)_{lam0}."""
    d = int(d)
    if d < 3:
        raise DomainError("elementary triplets need d >= 3")
    lam0 = complex(lam0)
    if lam0.real < -(d - 2) / 2.0:
        raise DomainError(f"Re(lam0) must be >= -(d-2)/2 = {-(d - 2) / 2.0}")
    peri = AnalyticFunction1D(lambda z: special.psi(d, lam0, z), f"psi[{d},{lam0}]")
    sphere = SphereKernel(AnalyticFunction1D(lambda u: special.psi(d, lam0, np.cos(u).astype(complex))), d)
    growth = GrowthClass(m=lam0.real, mu=0.0)
    jump = VolterraKernel(
        AnalyticFunction1D(lambda v: special.delta_psi_v(d, lam0, v), f"delta_psi[{d},{lam0}]"),
        growth, d, abel=lambda w: special.elementary_jump(d, lam0, w),
        label=f"elementary d={d} lam0={lam0}", validate=False)
    return InvariantTriplet(peri, sphere, jump, growth, validate=validate)


def make_exponential_kernel(d: int, a: float, mu: float = 0.0, taper_order: int = 0,
                            eps: float = 1e-3) -> VolterraKernel:
    """f(v) = e^{-a v} (v - mu)^n on v >= mu; growth order m = -a + eps."""
    if not a > 0:
        raise DomainError("decay rate a must be > 0")
    if taper_order < 0 or int(taper_order) != taper_order:
        raise DomainError("taper_order must be a non-negative integer")
    n = int(taper_order)

    def f(v):
        return np.exp(-a * v) * (v - mu) ** n

    return VolterraKernel(AnalyticFunction1D(f, f"exp[{a},{mu},{n}]"),
                          GrowthClass(m=-a + eps, mu=mu), d,
                          label=f"exponential a={a} mu={mu} taper={n}")


def truncation_polynomial(d: int, m: float, coeffs: CoefficientSequence) -> Callable:
    """z -> (1/omega_d) sum_{0 <= l < m} c_l h_d(l) P_l(z); zero when m <= 0."""
    ells = [ell for ell in range(0, max(0, math.ceil(m))) if ell < m]
    terms = []
    for ell in ells:
        if not coeffs.has(ell):
            raise MissingCoefficient(f"truncation polynomial needs coefficient l = {ell}")
        terms.append((ell, coeffs[ell] * special.h_d(d, ell) / special.omega(d)))

    def poly(z):
        z = np.asarray(z)
        out = np.zeros(z.shape, dtype=complex)
        for ell, c in terms:
            out = out + c * special.gegenbauer_P(d, ell, z)
        return complex(out) if out.ndim == 0 else out

    return poly


# ---------------------------------------------------------------------------
# JSON kernels

def _tabulated(d, doc):
    pts = np.asarray(doc["points"], dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3) or len(pts) < 2:
        raise DomainError("tabulated kernel needs [[v, re], ...] or [[v, re, im], ...] rows")
    v = pts[:, 0]
    val = pts[:, 1] + (1j * pts[:, 2] if pts.shape[1] == 3 else 0.0)
    lo, hi = float(v.min()), float(v.max())
    deg = int(doc.get("degree", min(len(v) - 1, 48)))
    t = (2.0 * v - (lo + hi)) / (hi - lo)
    coef = (np.polynomial.chebyshev.chebfit(t, val.real, deg)
            + 1j * np.polynomial.chebyshev.chebfit(t, val.imag, deg))
    proxy = ChebyshevProxy((lo, hi), coef)
    mu = float(doc.get("mu", lo))

    def f(x):
        x = np.asarray(x, dtype=float)
        if np.any(x > hi + 1e-12):
            raise ProxyRangeExceeded(f"tabulated kernel sampled only up to v = {hi}")
        return proxy(np.clip(x, lo, hi))

    # The tabulated support ends at the last sample; beyond it the kernel is zero.
    def jump(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        inside = x <= hi
        out[inside] = f(x[inside])
        return out

    m = float(doc.get("m", 0.0))
    return VolterraKernel(AnalyticFunction1D(jump, "tabulated"), GrowthClass(m=m, mu=mu), d,
                          label="tabulated", validate=False)


def kernel_from_json(doc) -> VolterraKernel | InvariantTriplet:
    """Build a kernel from {"type": "elementary" | "exponential" | "constant" | "tabulated", "d": int, ...}."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict) or "type" not in doc or "d" not in doc:
        raise DomainError('kernel JSON needs "type" and "d"')
    kind, d = doc["type"], int(doc["d"])
    if kind == "elementary":
        lam0 = doc.get("lambda0", doc.get("lam0"))
        if lam0 is None:
            raise DomainError('elementary kernel needs "lambda0"')
        if isinstance(lam0, list):
            lam0 = complex(lam0[0], lam0[1])
        return make_elementary_triplet(d, lam0)
    if kind == "exponential":
        return make_exponential_kernel(d, float(doc["a"]), float(doc.get("mu", 0.0)),
                                       int(doc.get("taper_order", 0)))
    if kind == "constant":
        c = complex(*doc["value"]) if isinstance(doc.get("value"), list) else complex(doc.get("value", 1.0))
        mu = float(doc.get("mu", 0.0))
        return VolterraKernel(AnalyticFunction1D(lambda v: np.full(np.shape(v), c), f"const[{c}]"),
                              GrowthClass(m=0.0, mu=mu), d, label=f"constant {c}", validate=False)
    if kind == "tabulated":
        return _tabulated(d, doc)
    raise DomainError(f"unknown kernel type {kind!r}")


def load_kernel(source: str):
    """Kernel from inline JSON text or from a file path."""
    text = source.strip()
    if not text.startswith("{"):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    return kernel_from_json(json.loads(text))
