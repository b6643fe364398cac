"""Identity-suite runner: named check families, structured reports, bit-stable serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import special
from .errors import DomainError, IoError
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_finite, integrate_semi_infinite

__all__ = [
    "FAMILIES",
    "CheckCase",
    "SuiteReport",
    "SuiteConfig",
    "ConfigError",
    "default_config",
    "load_config",
    "build_cases",
    "run_suite",
    "emit_report",
    "dumps_report",
    "parse_report",
    "residual",
]

FAMILIES = (
    "fg_interpolation",
    "prop27",
    "abel_roundtrip",
    "convolution_factorization",
    "appendix",
    "legendre_reduction_d3",
    "reconstruction_roundtrip",
    "symmetry",
    "xi_annihilation",
    "mellin",
)

CSV_FIELDS = ("id", "family", "residual", "tolerance", "passed", "runtime_ms")


class ConfigError(DomainError):
    """Suite configuration is malformed."""


def residual(lhs, rhs) -> float:
    lhs, rhs = complex(lhs), complex(rhs)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def _cstr(z) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


@dataclass
class CheckCase:
    id: str
    family: str
    parameters: dict
    tolerance: float
    residual: float = float("nan")
    passed: bool = False
    runtime_ms: float = 0.0
    error: str = ""

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance of {self.id} must be > 0")


@dataclass
class SuiteReport:
    cases: List[CheckCase] = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    @property
    def summary(self) -> dict:
        passed = sum(1 for c in self.cases if c.passed)
        return {"passed": passed, "failed": len(self.cases) - passed}

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)


# ---------------------------------------------------------------------------
# check implementations; each returns the residual

def _rational_laplace_identity(p, spec):
    d, lam0, lam = p["d"], p["lambda0"], complex(p["lambda"])
    c = 2.0 * math.cos(math.pi * d / 2.0) if d % 2 == 0 else 0.0

    def f(v):
        v = np.asarray(v, dtype=float)
        left = special.legendre_P(d, lam0, np.cosh(v), spec=spec)
        if c:
            left = left + c * special.legendre_Q_v(d, lam0, v, spec)
        return left * special.legendre_Q_weighted_v(d, lam, v, spec)

    integral = complex(integrate_finite(f, [0.0, 1.0], spec)) + complex(
        integrate_semi_infinite(f, 1.0, spec, decay_rate=(lam - lam0).real))
    lhs = 2.0 * math.pi * special.omega(d - 1) / special.omega(d) * complex(special.h_d(d, lam0)) * integral
    rhs = (2 * lam0 + d - 2) / ((lam - lam0) * (lam + lam0 + d - 2))
    return abs(lhs - rhs) / abs(rhs)


def _dispersion_perikernel(kernel):
    """Perikernel with the given decaying jump: (1/2pi) int f(v) sinh v / (cosh v - z) dv."""
    mu = kernel.growth.mu
    rate = -kernel.growth.m - 0.5

    def peri(z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()

        def f(v):
            return (kernel(v) * np.sinh(v))[:, None] / (np.cosh(v)[:, None] - flat[None, :]) / (2 * np.pi)

        out = np.atleast_1d(integrate_semi_infinite(f, mu, decay_rate=rate))
        return out.reshape(z.shape) if z.ndim else complex(out[0])

    return peri


def _dispersion_sphere(kernel):
    peri = _dispersion_perikernel(kernel)
    return lambda u: peri(np.cos(np.asarray(u, dtype=float)))


def _fg_interpolation(p, spec):
    from .kernels import elementary_laplace, make_elementary_triplet, make_exponential_kernel
    from .transforms import fourier_legendre_coeffs, spherical_laplace

    d = p["d"]
    if p["kernel"] == "elementary":
        lam0 = p["lambda0"]
        sphere = make_elementary_triplet(d, lam0).sphere
        Ft = elementary_laplace(d, lam0)
        lo = math.ceil(lam0) + 1
        transform = lambda ells: np.array([Ft(float(l)) for l in ells])
    else:
        K = make_exponential_kernel(d, p["a"], mu=p["mu"], taper_order=p["taper"])
        sphere = _dispersion_sphere(K)
        lo = max(0, math.ceil(K.growth.m) + 1)
        transform = lambda ells: np.asarray(spherical_laplace(K, np.asarray(ells, dtype=float), spec=spec))
    ells = np.arange(lo, 9)
    coeffs = fourier_legendre_coeffs(sphere, 8, spec, d=d)
    exact = transform(ells)
    return max(abs(coeffs[int(l)] - e) / abs(e) for l, e in zip(ells, exact))


def _smooth_kernel(d):
    from .kernels import make_exponential_kernel

    return make_exponential_kernel(d, 2.0, mu=0.0, taper_order=0)


def _abel_roundtrip(p, spec):
    from .kernels import GrowthClass, VolterraKernel
    from .transforms import abel_inverse_hyperboloid, radon_abel_forward

    d = p["d"]
    if p["kernel"] == "constant":
        K = VolterraKernel(lambda v: np.ones_like(np.asarray(v, dtype=float)), GrowthClass(0.0), d)
    else:
        K = _smooth_kernel(d)
    fhat = lambda w: radon_abel_forward(K, w, spec)
    vs = np.linspace(0.1, 3.0, p.get("points", 7))
    return max(abs(complex(abel_inverse_hyperboloid(fhat, d, v, spec)) - complex(K(v))) for v in vs)


def _convolution(p, spec):
    from .convolve import convolution_kernel, line_convolve
    from .kernels import make_exponential_kernel
    from .transforms import radon_abel_forward, spherical_laplace

    d = p["d"]
    f1 = make_exponential_kernel(d, 2.0)
    f2 = make_exponential_kernel(d, 3.0, mu=0.3)
    C = convolution_kernel(f1, f2, spec).kernel
    if p["law"] == "factorization":
        lam = complex(p["lambda"])
        lhs = spherical_laplace(C, lam, route="direct", spec=spec)
        rhs = spherical_laplace(f1, lam, spec=spec) * spherical_laplace(f2, lam, spec=spec)
        return abs(lhs - rhs) / abs(rhs)
    w = p["w"]
    lhs = radon_abel_forward(C, w, spec)
    rhs = line_convolve(lambda x: radon_abel_forward(f1, x, spec), lambda x: radon_abel_forward(f2, x, spec), w, spec)
    return residual(lhs, rhs)


def _appendix(p, spec):
    from .appendix_ops import apply_H0, check_abel_differential_identity, check_exponential_eigen_identity

    kind = p["kind"]
    if kind == "differential":
        return check_abel_differential_identity(p["d"], p["g"], p["v"], p["direction"],
                                                conditions_declared=True, spec=spec)["residual"]
    if kind == "exponential":
        return check_exponential_eigen_identity(p["d"], complex(p["lambda"]), p["v"], spec)["residual"]
    d, lam, v = p["d"], complex(p["lambda"]), p["v"]
    a = lam + (d - 2) / 2.0
    h0 = complex(special.h0_d(d, lam))
    if kind == "eigen_plus":
        return residual(apply_H0(d, f"exp(({a.real}+{a.imag}*I)*v)", v), h0 * np.exp(a * v))
    return residual(apply_H0(d, f"exp(-({a.real}+{a.imag}*I)*v)", v), (-1) ** d * h0 * np.exp(-a * v))


def _legendre_classical(p, spec):
    from scipy.special import eval_legendre

    if p["kind"] == "P":
        x = p["x"]
        worst = 0.0
        prev, cur = 1.0, x
        for ell in range(0, 11):
            rec = 1.0 if ell == 0 else cur
            if ell >= 2:
                prev, cur = cur, ((2 * ell - 1) * x * cur - (ell - 1) * prev) / ell
                rec = cur
            val = complex(special.legendre_P(3, ell, x, spec=spec))
            worst = max(worst, abs(val - rec), abs(val - eval_legendre(ell, x)))
        return worst
    z = complex(p["z"])
    q0 = 0.5 * np.log((z + 1) / (z - 1))
    qs = [q0, z * q0 - 1]
    for ell in range(1, 4):
        qs.append(((2 * ell + 1) * z * qs[ell] - ell * qs[ell - 1]) / (ell + 1))
    return max(residual(special.legendre_Q(3, ell, z, spec), qs[ell] / np.pi) for ell in range(5))


def _reconstruction(p, spec):
    from .kernels import CoefficientSequence, elementary_laplace, make_elementary_triplet, make_exponential_kernel
    from .transforms import (d2_reconstruct, fourier_legendre_coeffs, reconstruct_sphere_kernel,
                             reconstruct_volterra_kernel, spherical_laplace)

    kind = p["kind"]
    if kind == "volterra":
        K = make_exponential_kernel(3, 3.0, mu=0.5, taper_order=4)
        Ft = lambda lam: spherical_laplace(K, lam, spec=spec)
        v = p["v"]
        return abs(reconstruct_volterra_kernel(Ft, 3, 0.0, v, form="legendre", spec=spec) - K(v))
    if kind == "d2":
        v = p["v"]
        return abs(d2_reconstruct(lambda lam: 1.0 / (lam + 2.0), 0.0, "volterra", v, spec=spec) - math.exp(-2 * v))
    E = elementary_laplace(3, 0.3)
    c0 = fourier_legendre_coeffs(make_elementary_triplet(3, 0.3), 0, spec)[0]
    coeffs = CoefficientSequence({0: c0}, "N", generator=lambda l: E(l) if l >= 1 else c0)
    x = p["x"]
    return abs(reconstruct_sphere_kernel(coeffs, 3, x, spec=spec, summation="abel") - special.psi(3, 0.3, x, spec))


def _symmetry(p, spec):
    from .kernels import make_exponential_kernel
    from .transforms import radon_abel_complex, radon_abel_sphere

    kind, d = p["kind"], p["d"]
    lams = [0.3, 1.7, -0.4 + 0.6j, 2.5 - 1.2j, 0.9 + 2j, -0.2, 3.1, 1.1 + 0.3j]
    worst = 0.0
    if kind == "h_d":
        for lam in lams:
            worst = max(worst, residual(special.h_d(d, lam), (-1) ** d * special.h_d(d, -lam - d + 2)))
    elif kind == "psi":
        for lam, z in zip(lams, [-0.5, 0.3, -2.0, 0.2 + 0.5j, -0.9, 0.7 - 0.2j, -3 + 1j, 0.0]):
            worst = max(worst, residual(special.psi(d, lam, z, spec), special.psi(d, -lam - d + 2, z, spec)))
    elif kind == "residual_R":
        for lam, z in zip(lams, [-2.0, -1.5 + 0.5j, -3.0, 0.5 + 0.5j, -1.2 - 0.3j, 2 + 1j, -5.0, 0.3j]):
            worst = max(worst, residual(special.residual_R(d, lam, z, spec),
                                        -special.residual_R(d, -lam - d + 2, z, spec)))
    elif kind == "abel_complex":
        K = make_exponential_kernel(d, 3.0, mu=0.5, taper_order=4)
        peri = _dispersion_perikernel(K)
        for tau in [0.4, 1.1, 2.0, 2.9, 0.7 + 0.3j, 1.5 - 0.4j, 2.4 + 0.2j, 0.2 - 0.1j]:
            a = radon_abel_complex(peri, d, -tau, spec, cut_start=math.cosh(0.5))
            b = (-1) ** d * np.exp(-1j * (d - 2) * tau) * radon_abel_complex(peri, d, tau, spec,
                                                                           cut_start=math.cosh(0.5))
            worst = max(worst, residual(a, b))
    elif kind == "abel_sphere":
        K = make_exponential_kernel(d, 3.0, mu=0.5, taper_order=4)
        sphere = _dispersion_sphere(K)
        for t in [0.3, 0.8, 1.2, 1.7, 2.1, 2.6, 3.0, 0.05]:
            a = radon_abel_sphere(sphere, -t, spec, d=d)
            b = (-1) ** d * np.exp(-1j * (d - 2) * t) * radon_abel_sphere(sphere, t, spec, d=d)
            worst = max(worst, residual(a, b))
    else:
        raise ConfigError(f"unknown symmetry kind {kind}")
    return worst


def _xi(p, spec):
    from .transforms import abel_inverse_sphere

    d = p["d"]
    beta = (d - 2) / 2.0
    ells = [l for l in range(-int(beta), 0)]
    bs = [1.0 + 0.5 * i for i in range(len(ells))]

    def fhat(t):
        t = np.asarray(t, dtype=float)
        tot = sum(b * np.cos((l + beta) * t - beta * np.pi) for b, l in zip(bs, ells))
        return np.exp(1j * beta * t) * tot

    scale = sum(abs(b) for b in bs)
    return max(abs(complex(abel_inverse_sphere(fhat, d, u, spec))) for u in (0.4, 1.3, 2.2)) / scale


def _mellin(p, spec):
    from .convolve import multiplicative_convolve
    from .kernels import CoefficientSequence
    from .transforms import mellin_coefficient, power_series_reconstruct

    kind = p["kind"]
    if kind == "coefficient":
        lam = complex(p["lambda"])
        val = mellin_coefficient(lambda z: 2 * np.pi * np.ones_like(z), lam, 2.0, spec)
        return residual(val, 2.0 ** (-lam) / lam)
    if kind == "reconstruct":
        zeta = complex(p["zeta"])
        val = power_series_reconstruct(lambda lam: 2.0 ** (-lam) / lam, 0.5, CoefficientSequence({0: 0.0}, "N"),
                                       zeta, spec)
        return residual(val, -np.log(1 - zeta / 2))
    zeta = complex(p["zeta"])
    geo = lambda z: 1.0 / (1.0 - np.asarray(z) / 4.0)
    return residual(multiplicative_convolve(geo, geo, zeta, 4.0, 4.0), 1.0 / (1.0 - zeta / 16.0))


_RUNNERS: Dict[str, Callable] = {
    "prop27": _rational_laplace_identity,
    "fg_interpolation": _fg_interpolation,
    "abel_roundtrip": _abel_roundtrip,
    "convolution_factorization": _convolution,
    "appendix": _appendix,
    "legendre_reduction_d3": _legendre_classical,
    "reconstruction_roundtrip": _reconstruction,
    "symmetry": _symmetry,
    "xi_annihilation": _xi,
    "mellin": _mellin,
}

_DEFAULT_TOL = {
    "prop27": 1e-6,
    "fg_interpolation": 1e-7,
    "abel_roundtrip": 1e-6,
    "convolution_factorization": 1e-5,
    "appendix": 1e-8,
    "legendre_reduction_d3": 1e-8,
    "reconstruction_roundtrip": 1e-4,
    "symmetry": 1e-9,
    "xi_annihilation": 1e-9,
    "mellin": 1e-8,
}


# ---------------------------------------------------------------------------
# configuration

@dataclass
class SuiteConfig:
    families: List[str] = field(default_factory=lambda: list(FAMILIES))
    grids: dict = field(default_factory=dict)
    quadrature: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    workers: Optional[int] = None

    def __post_init__(self):
        unknown = [f for f in self.families if f not in FAMILIES]
        if unknown:
            raise ConfigError(f"unknown families: {unknown}")
        for fam, tol in self.tolerances.items():
            if fam not in FAMILIES:
                raise ConfigError(f"tolerance for unknown family {fam}")
            if not (isinstance(tol, (int, float)) and tol > 0):
                raise ConfigError(f"tolerance for {fam} must be > 0")

    def spec(self) -> QuadratureSpec:
        try:
            return DEFAULT_SPEC.with_(**self.quadrature) if self.quadrature else DEFAULT_SPEC
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad quadrature override: {exc}") from exc


def default_config() -> SuiteConfig:
    return SuiteConfig()


def load_config(source) -> SuiteConfig:
    """Parse a suite configuration from a dict, JSON text or a path."""
    if isinstance(source, SuiteConfig):
        return source
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        try:
            if os.path.exists(text):
                with open(text, encoding="utf-8") as fh:
                    text = fh.read()
            doc = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    tolerances = dict(doc.get("tolerances", {}))
    if "tolerance" in doc:
        tol = doc["tolerance"]
        if not (isinstance(tol, (int, float)) and tol > 0):
            raise ConfigError("tolerance must be > 0")
        tolerances = {f: tol for f in FAMILIES} | tolerances
    return SuiteConfig(
        families=list(doc.get("families", FAMILIES)),
        grids=dict(doc.get("grids", {})),
        quadrature=dict(doc.get("quadrature", {})),
        tolerances=tolerances,
        workers=doc.get("workers"),
    )


def _grid(cfg, key, default):
    vals = cfg.grids.get(key, default)
    return list(vals)


def build_cases(cfg: SuiteConfig) -> List[CheckCase]:
    cases: List[CheckCase] = []

    def add(family, cid, **params):
        tol = cfg.tolerances.get(family, _DEFAULT_TOL[family])
        cases.append(CheckCase(f"{family}/{cid}", family, params, float(tol)))

    fams = set(cfg.families)
    if "prop27" in fams:
        for d in _grid(cfg, "d", [3, 4, 5]):
            for l0 in _grid(cfg, "lambda0", [0.25, 0.3]):
                for lam in _grid(cfg, "lambda", [1.0, 1.5, 2.5]):
                    add("prop27", f"d{d}-l0{l0}-l{lam}", d=d, lambda0=l0, **{"lambda": lam})
    if "fg_interpolation" in fams:
        for d in (3, 4):
            for l0 in _grid(cfg, "lambda0", [0.3]):
                add("fg_interpolation", f"elementary-d{d}-l0{l0}", d=d, kernel="elementary", lambda0=l0)
            add("fg_interpolation", f"tapered-d{d}", d=d, kernel="tapered", a=3.0, mu=0.5, taper=4)
    if "abel_roundtrip" in fams:
        for d in (3, 4, 5, 6):
            add("abel_roundtrip", f"smooth-d{d}", d=d, kernel="smooth")
        cfg_tol = cfg.tolerances.get("abel_roundtrip")
        tol = cfg_tol if cfg_tol is not None else 1e-10
        cases.append(CheckCase("abel_roundtrip/constant-d4", "abel_roundtrip", {"d": 4, "kernel": "constant"}, tol))
    if "convolution_factorization" in fams:
        for d in (3, 4):
            for lam in ("1.5", "2+1j"):
                add("convolution_factorization", f"factor-d{d}-l{lam}", d=d, law="factorization", **{"lambda": lam})
            for w in (0.5, 1.0, 2.0):
                add("convolution_factorization", f"transmute-d{d}-w{w}", d=d, law="transmutation", w=w)
    if "appendix" in fams:
        add("appendix", "differential-forward-d4", kind="differential", d=4, g="cosh(1.5*v)", v=0.7, direction="forward")
        add("appendix", "differential-forward-d3", kind="differential", d=3, g="sinh(0.8*v)", v=1.0, direction="forward")
        add("appendix", "differential-tail-d5", kind="differential", d=5, g="exp(-2.5*v)", v=0.6, direction="tail")
        add("appendix", "exponential-tail-d4", kind="exponential", d=4, v=0.7, **{"lambda": "1"})
        add("appendix", "exponential-tail-d3", kind="exponential", d=3, v=1.0, **{"lambda": "0.5+0.3j"})
        add("appendix", "exponential-forward-d5", kind="exponential", d=5, v=0.9, **{"lambda": "-0.2"})
        for d in (3, 4, 5, 6):
            for lam in ("0.3", "1", "2+1j"):
                for v in (0.5, 1.5):
                    add("appendix", f"eigen-d{d}-l{lam}-v{v}", kind="eigen_plus", d=d, v=v, **{"lambda": lam})
                    add("appendix", f"eigen-minus-d{d}-l{lam}-v{v}", kind="eigen_minus", d=d, v=v, **{"lambda": lam})
    if "legendre_reduction_d3" in fams:
        for x in (-0.9, -0.3, 0.4, 0.95):
            tol = cfg.tolerances.get("legendre_reduction_d3", 1e-10)
            cases.append(CheckCase(f"legendre_reduction_d3/P-x{x}", "legendre_reduction_d3",
                                   {"kind": "P", "x": x}, min(tol, 1e-10)))
        for z in ("1.5", "2", "3", "2+1j"):
            add("legendre_reduction_d3", f"Q-z{z}", kind="Q", z=z)
    if "reconstruction_roundtrip" in fams:
        for v in (0.8, 1.2, 2.0):
            add("reconstruction_roundtrip", f"volterra-d3-v{v}", kind="volterra", v=v)
        for v in (0.5, 1.0, 2.0):
            add("reconstruction_roundtrip", f"d2-v{v}", kind="d2", v=v)
        for x in (-1.0, -0.5, 0.0, 0.5, 0.9):
            tol = cfg.tolerances.get("reconstruction_roundtrip", 1e-5)
            cases.append(CheckCase(f"reconstruction_roundtrip/psi-series-x{x}", "reconstruction_roundtrip",
                                   {"kind": "psi_series", "x": x}, min(tol, 1e-5)))
    if "symmetry" in fams:
        for d in (3, 4, 5):
            for kind in ("h_d", "psi", "abel_complex", "abel_sphere"):
                add("symmetry", f"{kind}-d{d}", kind=kind, d=d)
        for d in (3, 5):
            add("symmetry", f"residual_R-d{d}", kind="residual_R", d=d)
    if "xi_annihilation" in fams:
        for d in (4, 5, 6):
            add("xi_annihilation", f"d{d}", d=d)
    if "mellin" in fams:
        for lam in ("3", "1.5+2j"):
            add("mellin", f"coefficient-l{lam}", kind="coefficient", **{"lambda": lam})
        for zeta in ("-1", "0.5+1j"):
            add("mellin", f"reconstruct-z{zeta}", kind="reconstruct", zeta=zeta)
        add("mellin", "multiplicative-z3", kind="multiplicative", zeta="3")
    cases.sort(key=lambda c: c.id)
    return cases


def _execute(args):
    case, spec = args
    t0 = time.perf_counter()
    try:
        res = float(_RUNNERS[case.family](case.parameters, spec))
        case.residual = res
        case.passed = bool(math.isfinite(res) and res <= case.tolerance)
    except Exception as exc:  # a failing case is a report entry, not a crash
        case.residual = float("nan")
        case.passed = False
        case.error = f"{type(exc).__name__}: {exc}"
    case.runtime_ms = (time.perf_counter() - t0) * 1e3
    return case


def _workers(cfg: SuiteConfig) -> int:
    if cfg.workers is not None:
        return max(1, int(cfg.workers))
    try:
        return max(1, int(os.environ.get("FG_WORKERS", "1")))
    except ValueError:
        return 1


def run_suite(selection=None, spec: Optional[QuadratureSpec] = None) -> SuiteReport:
    """Run the selected check families and return a report ordered by case id."""
    cfg = default_config() if selection is None else load_config(selection)
    spec = spec or cfg.spec()
    cases = build_cases(cfg)
    workers = _workers(cfg)
    jobs = [(c, spec) for c in cases]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_execute, jobs))
    else:
        done = [_execute(j) for j in jobs]
    done.sort(key=lambda c: c.id)
    env = {
        "families": sorted(set(cfg.families)),
        "quadrature": {"rel_tol": spec.rel_tol, "abs_tol": spec.abs_tol,
                       "max_subdivisions": spec.max_subdivisions},
        "workers": workers,
    }
    return SuiteReport(done, env)


# ---------------------------------------------------------------------------
# serialization

def _num(x) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _encode(obj) -> str:
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, complex):
        return json.dumps(_cstr(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _case_dict(c: CheckCase) -> dict:
    return {"id": c.id, "family": c.family, "parameters": dict(sorted(c.parameters.items())),
            "residual": c.residual, "tolerance": c.tolerance, "passed": c.passed,
            "runtime_ms": c.runtime_ms, "error": c.error}


def dumps_report(report: SuiteReport, format: str = "json") -> str:
    if format == "json":
        doc = {"cases": [_case_dict(c) for c in report.cases], "summary": report.summary,
               "environment": report.environment}
        return _encode(doc) + "\n"
    if format == "csv":
        lines = [",".join(CSV_FIELDS)]
        for c in report.cases:
            row = [c.id, c.family, _num(c.residual).strip('"'), _num(c.tolerance),
                   "true" if c.passed else "false", _num(c.runtime_ms)]
            buf = io.StringIO()
            csv.writer(buf, lineterminator="").writerow(row)
            lines.append(buf.getvalue())
        return "\n".join(lines) + "\n"
    raise DomainError("format must be 'json' or 'csv'")


def emit_report(report: SuiteReport, format: str, path) -> None:
    """Write the report; floats carry 17 significant digits, fields a fixed order."""
    text = dumps_report(report, format)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write report to {path}: {exc}") from exc


def parse_report(text: str, format: str = "json") -> SuiteReport:
    """Inverse of dumps_report (csv keeps only the tabulated fields)."""
    if format == "json":
        doc = json.loads(text)
        cases = [CheckCase(c["id"], c["family"], c["parameters"], float(c["tolerance"]),
                           float(c["residual"]), bool(c["passed"]), float(c["runtime_ms"]), c.get("error", ""))
                 for c in doc["cases"]]
        return SuiteReport(cases, doc.get("environment", {}))
    if format == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        cases = [CheckCase(r["id"], r["family"], {}, float(r["tolerance"]), float(r["residual"]),
                           r["passed"] == "true", float(r["runtime_ms"])) for r in rows]
        return SuiteReport(cases, {})
    raise DomainError("format must be 'json' or 'csv'")
