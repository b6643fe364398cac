"""Command-line front end: ``fgkit eval``, ``fgkit transform`` and ``fgkit verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels, special, transforms, verify
from .errors import DomainError, FGError, NonConvergence
from .numerics import DEFAULT_SPEC, QuadratureSpec

EVAL_FUNCTIONS = ("P", "Q", "psi", "delta_psi", "h_d", "omega")
TRANSFORM_KINDS = ("laplace", "spherical-laplace", "abel", "abel-inverse", "fourier-legendre", "reconstruct")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    kernel: Optional[str] = None
    format: str = "csv"
    quadrature: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in ("eval", "transform", "verify"):
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.subcommand == "transform" and not self.kernel:
            raise UsageError("transform needs --kernel")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be json or csv")

    def spec(self) -> QuadratureSpec:
        return DEFAULT_SPEC.with_(**self.quadrature) if self.quadrature else DEFAULT_SPEC


def parse_complex(text: str) -> complex:
    """Parse "re", "re+imi", "re-imi", "imi" or "i" into a complex number."""
    s = text.strip().replace(" ", "")
    if not s:
        raise UsageError("empty number")
    if s[-1] in "ij":
        body = s[:-1]
        # split at the last sign that is not an exponent sign
        cut = max((k for k, ch in enumerate(body) if ch in "+-" and (k == 0 or body[k - 1] not in "eE")),
                  default=-1)
        re_part, im_part = (body[:cut], body[cut:]) if cut > 0 else ("", body)
        if im_part in ("", "+", "-"):
            im_part += "1"
        try:
            return complex(float(re_part) if re_part else 0.0, float(im_part))
        except ValueError:
            raise UsageError(f"cannot parse complex number {text!r}") from None
    try:
        return complex(float(s), 0.0)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_grid(text: str) -> np.ndarray:
    """"a:b:n" -> n equispaced points from a to b; a bare number is a one-point grid."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid must look like a:b:n, got {text!r}") from None
    if n <= 0:
        raise UsageError("empty grid")
    return np.linspace(a, b, n)


def _fmt(x: float) -> str:
    x = float(x)
    return "0" if x == 0 else f"{x:.15g}"


def format_value(z) -> str:
    z = complex(z)
    return f"{_fmt(z.real)} {_fmt(z.imag)}"


# ---------------------------------------------------------------------------
# eval

def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def cmd_eval(args, spec: QuadratureSpec) -> str:
    fn, d = args.fn, args.d
    if fn == "omega":
        return repr(float(special.omega(_need(d, "--d"))))
    d = _need(d, "--d")
    lam_text = args.lam if args.lam is not None else args.lambda0
    lam = parse_complex(_need(lam_text, "--lambda"))
    if fn == "h_d":
        return format_value(special.h_d(d, lam))
    x = parse_complex(_need(args.x, "--x"))
    if fn == "P":
        if lam.imag == 0 and lam.real == int(lam.real) and lam.real >= 0 and x.imag == 0 and abs(x.real) <= 1:
            val = special.gegenbauer_P(d, int(lam.real), x.real)
        else:
            val = special.legendre_P(d, lam, x, spec=spec)
    elif fn == "Q":
        val = special.legendre_Q(d, lam, x, spec=spec)
    elif fn == "psi":
        val = special.psi(d, lam, x, spec=spec)
    else:
        if x.imag != 0:
            raise DomainError("delta_psi takes a real argument x >= 1")
        val = special.delta_psi(d, lam, x.real, spec=spec)
    return format_value(val)


# ---------------------------------------------------------------------------
# transform

def _kernel(args):
    text = args.kernel.strip()
    try:
        doc = json.loads(text) if text.startswith("{") else json.load(open(text, encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read kernel: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"kernel JSON invalid: {exc}") from None
    if isinstance(doc, dict) and "d" not in doc and args.d is not None:
        doc["d"] = args.d
    try:
        return kernels.kernel_from_json(doc), doc
    except KeyError as exc:
        raise UsageError(f"kernel JSON missing field {exc}") from None


def _volterra(k):
    return k.volterra if isinstance(k, kernels.InvariantTriplet) else k


def _transform_values(kind, k, doc, grid, args, spec):
    F = _volterra(k)
    d = F.d
    if kind == "laplace":
        return transforms.laplace_transform(F, grid.astype(complex), spec)
    if kind == "spherical-laplace":
        return transforms.spherical_laplace(F, grid.astype(complex), spec=spec)
    if kind == "abel":
        return transforms.radon_abel_forward(F, grid, spec)
    if kind == "abel-inverse":
        return np.array([transforms.abel_inverse_hyperboloid(F, d, v, spec, mu=F.growth.mu) for v in grid])
    if kind == "fourier-legendre":
        if not isinstance(k, kernels.InvariantTriplet):
            raise DomainError("fourier-legendre needs a kernel with a sphere restriction (type elementary)")
        ells = np.rint(grid).astype(int)
        if np.any(ells < 0):
            raise DomainError("fourier-legendre degrees must be >= 0")
        c = transforms.fourier_legendre_coeffs(k, int(ells.max()), spec)
        return np.array([c[int(l)] for l in ells])
    if isinstance(k, kernels.InvariantTriplet):
        Ft = kernels.elementary_laplace(d, complex(doc.get("lambda0", doc.get("lam0"))))
        m0 = Ft.m
    else:
        Ft = lambda lam: transforms.spherical_laplace(F, lam, spec=spec)
        m0 = F.growth.m
    m = parse_complex(args.lam).real if args.lam is not None else max(m0, -1.0) + 0.5
    return np.array([transforms.reconstruct_volterra_kernel(Ft, d, m, v, spec=spec) for v in grid])


def cmd_transform(args, spec: QuadratureSpec) -> str:
    if args.grid is None:
        raise UsageError("transform needs --grid")
    grid = parse_grid(args.grid)
    k, doc = _kernel(args)
    vals = np.atleast_1d(np.asarray(_transform_values(args.kind, k, doc, grid, args, spec), dtype=complex))
    # a posteriori error: the same transform at a looser tolerance
    loose = spec.with_(rel_tol=min(1e-6, spec.rel_tol * 1e3))
    ref = np.atleast_1d(np.asarray(_transform_values(args.kind, k, doc, grid, args, loose), dtype=complex))
    err = np.abs(vals - ref)
    rows = [(float(g), complex(v), float(e)) for g, v, e in zip(grid, vals, err)]
    if args.format == "json":
        body = [{"x": g, "re": v.real, "im": v.imag, "error": e} for g, v, e in rows]
        return json.dumps({"transform": args.kind, "rows": body})
    lines = ["x,re,im,error"] + [f"{g:.17g},{_fmt(v.real)},{_fmt(v.imag)},{e:.3g}" for g, v, e in rows]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    source = args.config
    if source is None:
        doc: dict = {}
    else:
        try:
            doc = json.loads(open(source, encoding="utf-8").read()) if not source.strip().startswith("{") \
                else json.loads(source)
        except (OSError, json.JSONDecodeError) as exc:
            raise verify.ConfigError(f"cannot read configuration: {exc}") from None
    if args.tol is not None:
        doc["tolerance"] = args.tol
    if args.family:
        doc["families"] = args.family
    cfg = verify.load_config(doc)
    report = verify.run_suite(cfg)
    if args.out:
        verify.emit_report(report, args.format, args.out)
    else:
        sys.stdout.write(verify.dumps_report(report, args.format))
        sys.stdout.write("\n")
    s = report.summary
    print(f"{s['passed']} passed, {s['failed']} failed", file=sys.stderr)
    for c in report.cases:
        if not c.passed:
            print(f"FAIL {c.id} residual={c.residual:.3e} tol={c.tolerance:.1e} {c.error}".rstrip(), file=sys.stderr)
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fgkit", description="Sphere, hyperboloid and half-plane transforms.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--d", type=int)
        sp.add_argument("--lambda", dest="lam", help='degree, e.g. "2" or "0.5+1i"')
        sp.add_argument("--lambda0")
        sp.add_argument("--x", help="argument, real or complex")
        sp.add_argument("--tol", type=float, help="quadrature relative tolerance")

    e = sub.add_parser("eval", help="evaluate a special function")
    e.add_argument("--fn", required=True, choices=EVAL_FUNCTIONS)
    common(e)

    t = sub.add_parser("transform", help="tabulate a transform of a kernel")
    t.add_argument("kind", choices=TRANSFORM_KINDS)
    t.add_argument("--kernel", required=True, help="kernel JSON text or file")
    t.add_argument("--grid", help='"a:b:n"')
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.add_argument("--out")
    common(t)

    v = sub.add_parser("verify", help="run the identity suite")
    v.add_argument("config", nargs="?", help="suite configuration JSON (file or text)")
    v.add_argument("--family", action="append", help="restrict to a family (repeatable)")
    v.add_argument("--format", choices=("csv", "json"), default="json")
    v.add_argument("--out")
    v.add_argument("--tol", type=float, help="override every case tolerance")
    return p


def _write(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.subcommand == "verify":
            return cmd_verify(args)
        quad = {"rel_tol": args.tol} if args.tol is not None else {}
        cfg = CliConfig(args.subcommand, getattr(args, "kernel", None), getattr(args, "format", "csv"), quad)
        spec = cfg.spec()
        if args.subcommand == "eval":
            _write(cmd_eval(args, spec), None)
        else:
            _write(cmd_transform(args, spec), args.out)
        return 0
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonConvergence as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return 2
    except (FGError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
