"""Operator calculus behind the Abel inversion: Delta_d, D_d, H0_d and the identities they satisfy.

Identities are evaluated with both sides computed independently: the left by
Chebyshev-proxy differentiation in x = cosh v (where (1/sinh v) d/dv = d/dx),
the right by quadrature of H0_d g against the Abel weight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import sympy as sp

from . import special
from .errors import ConvergenceDomain, DomainError, PreconditionDeclarationMissing
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_finite, integrate_semi_infinite

__all__ = [
    "OperatorH0",
    "SmallH0",
    "apply_H0",
    "check_abel_differential_identity",
    "check_exponential_eigen_identity",
]

_V = sp.Symbol("v")


@dataclass(frozen=True)
class SmallH0:
    """h0_d(lam) = (lam + (d-2)/2) Gamma(lam + d - 2) / Gamma(lam + 1)."""

    d: int

    def __call__(self, lam):
        return special.h0_d(self.d, lam)

    def symmetric_partner(self, lam):
        """(-1)^d h0_d(-lam - d + 2), equal to h0_d(lam)."""
        return (-1) ** self.d * special.h0_d(self.d, -np.asarray(lam) - self.d + 2)


@dataclass(frozen=True)
class OperatorH0:
    """H0_d as a product of factors D^2 - c^2 (and a lone D for odd d), D = d/dv."""

    d: int

    def __post_init__(self):
        if self.d < 3:
            raise DomainError("H0_d is defined for d >= 3")

    @property
    def shifts(self) -> tuple:
        """The constants c of the second-order factors D^2 - c^2."""
        if self.d % 2 == 0:
            return tuple(float(j) for j in range((self.d - 4) // 2 + 1))
        return tuple(j + 0.5 for j in range((self.d - 5) // 2 + 1)) if self.d >= 5 else ()

    @property
    def first_order(self) -> bool:
        return self.d % 2 == 1

    @property
    def factor_count(self) -> int:
        return len(self.shifts) + (1 if self.first_order else 0)

    def polynomial(self) -> np.ndarray:
        """Coefficients of H0_d as a polynomial in D, highest power first."""
        poly = np.array([1.0])
        for c in self.shifts:
            poly = np.polymul(poly, [1.0, 0.0, -c * c])
        if self.first_order:
            poly = np.polymul(poly, [1.0, 0.0])
        return poly

    def symbol(self, s):
        """Value on e^{s v}: H0_d e^{s v} = symbol(s) e^{s v}."""
        return np.polyval(self.polynomial(), s)


def _as_sympy(g):
    if isinstance(g, sp.Expr):
        return g
    if isinstance(g, str):
        return sp.sympify(g, locals={"v": _V})
    return None


def _h0_symbolic(d, expr):
    op = OperatorH0(d)
    out = 0
    coeffs = op.polynomial()[::-1]
    for power, c in enumerate(coeffs):
        if c != 0:
            out += sp.Float(c) * sp.diff(expr, _V, power)
    return out


def _lambdify(expr):
    f = sp.lambdify(_V, expr, modules="numpy")

    def call(v):
        v = np.asarray(v, dtype=float)
        return np.broadcast_to(np.asarray(f(v), dtype=complex), v.shape).copy()

    return call


def apply_H0(d: int, g: Union[Callable, str, sp.Expr], v, spec: QuadratureSpec = DEFAULT_SPEC,
             half_width: float = 0.25):
    """(H0_d g)(v).

    A sympy expression (or string in ``v``) is differentiated exactly;
    a plain callable is differentiated on a Chebyshev proxy around v.
    """
    expr = _as_sympy(g)
    if expr is not None:
        res = _lambdify(_h0_symbolic(d, expr))(np.atleast_1d(v))
        return complex(res[0]) if np.ndim(v) == 0 else res
    from .transforms import _proxy_derivative

    op = OperatorH0(d)
    coeffs = op.polynomial()[::-1]

    def one(x):
        interval = (x - half_width, x + half_width)
        fv = lambda t: np.asarray(g(t), dtype=complex)
        return sum(c * _proxy_derivative(fv, interval, x, k, spec) for k, c in enumerate(coeffs) if c != 0)

    vs = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.array([one(x) for x in vs], dtype=complex)
    return complex(out[0]) if np.ndim(v) == 0 else out


# ---------------------------------------------------------------------------
# weighted Abel integrals

def _forward_integral(h, v, p, spec):
    """int_0^v h(w) [2(cosh v - cosh w)]^p dw with w = v (1 - t^2)."""
    if v <= 0:
        return 0j

    def f(t):
        w = v * (1.0 - t * t)
        sh = np.sinh(0.5 * v * t * t)
        base = 4.0 * np.sinh(0.5 * (v + w)) * sh
        if p == -0.5:
            # t / sqrt(sinh(v t^2 / 2)) -> sqrt(2 / v) as t -> 0
            ratio = np.where(t > 0, t / np.sqrt(np.where(sh > 0, sh, 1.0)), math.sqrt(2.0 / v))
            weight = ratio / np.sqrt(4.0 * np.sinh(0.5 * (v + w)))
            return np.asarray(h(w), dtype=complex) * weight * 2.0 * v
        return np.asarray(h(w), dtype=complex) * base ** p * 2.0 * v * t

    return complex(integrate_finite(f, [0.0, 1.0], spec))


def _tail_integral(h, v, p, rate, spec):
    """int_v^inf h(w) [2(cosh w - cosh v)]^p dw with w = v + s^2; |h| ~ e^{-rate w}."""
    if not rate - p > 0:
        raise ConvergenceDomain("tail integral diverges for this growth")

    def f(s):
        w = v + s * s
        sh = np.sinh(0.5 * s * s)
        if p == -0.5:
            ratio = np.where(s > 0, s / np.sqrt(np.where(sh > 0, sh, 1.0)), math.sqrt(2.0))
            return np.asarray(h(w), dtype=complex) * ratio / np.sqrt(4.0 * np.sinh(0.5 * (v + w))) * 2.0
        return np.asarray(h(w), dtype=complex) * (4.0 * np.sinh(0.5 * (v + w)) * sh) ** p * 2.0 * s

    return complex(integrate_semi_infinite(f, 0.0, spec, decay_rate=rate - p))


def _x_derivative(G, v, order, spec, half_width=0.2):
    """order-th derivative in x = cosh v of G(arccosh x), at x = cosh v."""
    from .transforms import _proxy_derivative

    x = math.cosh(v)
    r = min(half_width * (x - 1.0), half_width)
    if order == 0:
        return complex(G(v))

    def g(xs):
        return np.array([G(float(np.arccosh(t))) for t in np.atleast_1d(xs)], dtype=complex)

    return _proxy_derivative(g, (x - r, x + r), x, order, spec)


def _residual(lhs, rhs):
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def _growth_rate(expr):
    """Exponential decay rate of a sympy expression in v, estimated from v = 20, 40."""
    f = _lambdify(expr)
    a, b = np.abs(f(np.array([20.0, 40.0])))
    if a == 0 or b == 0:
        return 50.0
    return float(math.log(a / b) / 20.0)


def check_abel_differential_identity(d: int, g: Union[str, sp.Expr], v: float, direction: str,
                                     conditions_declared: bool = False,
                                     spec: QuadratureSpec = DEFAULT_SPEC) -> dict:
    """Evaluate both sides of the Abel differential identity for H0_d.

    direction="forward" integrates over [0, v], "tail" over [v, inf).  The
    boundary hypotheses on g (vanishing odd or even derivatives at 0 for
    forward, exponential integrability for tail) are analytic conditions the
    caller must assert through ``conditions_declared``.
    """
    if not conditions_declared:
        raise PreconditionDeclarationMissing("declare that g meets the boundary conditions of the identity")
    if direction not in ("forward", "tail"):
        raise DomainError("direction must be 'forward' or 'tail'")
    if d < 3:
        raise DomainError("the identity needs d >= 3")
    expr = _as_sympy(g)
    if expr is None:
        raise DomainError("g must be a sympy expression (or string) in v")
    gfun = _lambdify(expr)
    hfun = _lambdify(_h0_symbolic(d, expr))
    p = (d - 4) / 2.0
    v = float(v)
    forward = direction == "forward"
    rate = None if forward else _growth_rate(expr)
    if not forward and not rate > (d - 2) / 2.0:
        raise ConvergenceDomain("g e^{(d-2)v/2} must be integrable on the tail")

    def weighted(h, q, at):
        return _forward_integral(h, at, q, spec) if forward else _tail_integral(h, at, q, rate, spec)

    if d % 2 == 0:
        n = (d - 2) // 2
        const = 1.0 / (2.0 ** ((d - 4) // 2) * math.factorial((d - 4) // 2))
        if not forward:
            const *= (-1) ** n
        lhs = _x_derivative(lambda t: gfun(np.array([t]))[0], v, n, spec)
    else:
        k = (d - 1) // 2
        const = 2.0 ** ((d - 3) / 2.0) * math.gamma((d - 1) / 2.0) / math.gamma(d - 2)
        if not forward:
            const *= (-1) ** ((d - 3) // 2)
        inner = lambda at: weighted(lambda w: gfun(w) * np.sinh(w), -0.5, at)
        lhs = _x_derivative(inner, v, k, spec)
    rhs = const / math.sinh(v) ** (d - 3) * weighted(hfun, p, v)
    return {"lhs": lhs, "rhs": rhs, "residual": _residual(lhs, rhs)}


def check_exponential_eigen_identity(d: int, lam, v: float, spec: QuadratureSpec = DEFAULT_SPEC) -> dict:
    """Both sides of the exponential eigen-identities.

    Re lam > 0 uses the decaying exponential on [v, inf); otherwise the
    cosh (d even) / sinh (d odd) form on [0, v], which holds for every lam.
    """
    if d < 3:
        raise DomainError("the identity needs d >= 3")
    lam = complex(lam)
    a = lam + (d - 2) / 2.0
    v = float(v)
    p = (d - 4) / 2.0
    h0 = special.h0_d(d, lam)
    tail = lam.real > 0
    if tail:
        rate = a.real - max(p, 0.0)
        if not rate > 0:
            raise ConvergenceDomain("decaying exponential identity needs Re(lam) > 0")
        e = lambda w: np.exp(-a * np.asarray(w))
        rhs_int = _tail_integral(e, v, p, a.real, spec)
        if d % 2 == 0:
            n = (d - 2) // 2
            const = (-1) ** n / (2.0 ** ((d - 4) // 2) * math.factorial((d - 4) // 2))
            lhs = _x_derivative(lambda t: complex(np.exp(-a * t)), v, n, spec)
        else:
            k = (d - 1) // 2
            const = -((-2.0) ** ((d - 3) // 2)) * math.gamma((d - 1) / 2.0) / math.gamma(d - 2)
            inner = lambda at: _tail_integral(lambda w: e(w) * np.sinh(w), at, -0.5, a.real - 1.0, spec)
            lhs = _x_derivative(inner, v, k, spec)
    else:
        c = lambda w: np.cosh(a * np.asarray(w))
        rhs_int = _forward_integral(c, v, p, spec)
        if d % 2 == 0:
            n = (d - 2) // 2
            const = 1.0 / (2.0 ** ((d - 4) // 2) * math.factorial((d - 4) // 2))
            lhs = _x_derivative(lambda t: complex(np.cosh(a * t)), v, n, spec)
        else:
            k = (d - 1) // 2
            const = 2.0 ** ((d - 3) / 2.0) * math.gamma((d - 1) / 2.0) / math.gamma(d - 2)
            inner = lambda at: _forward_integral(lambda w: np.sinh(a * np.asarray(w)) * np.sinh(w), at, -0.5, spec)
            lhs = _x_derivative(inner, v, k, spec)
    rhs = const * h0 / math.sinh(v) ** (d - 3) * rhs_int
    return {"lhs": lhs, "rhs": rhs, "residual": _residual(lhs, rhs)}
