"""Run the identity suite and write a report.

    python3 scripts/run_verify.py                       # default config, JSON to stdout
    python3 scripts/run_verify.py --family mellin --format csv --out report.csv
    FG_WORKERS=4 python3 scripts/run_verify.py config.json
"""
import argparse
import sys
import time

from fgkit import verify


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config", nargs="?", help="suite configuration JSON file")
    ap.add_argument("--family", action="append")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--out")
    args = ap.parse_args()

    cfg = verify.load_config(args.config) if args.config else verify.default_config()
    if args.family:
        cfg = verify.SuiteConfig(args.family, cfg.grids, cfg.quadrature, cfg.tolerances, cfg.workers)
    t0 = time.perf_counter()
    report = verify.run_suite(cfg)
    elapsed = time.perf_counter() - t0
    if args.out:
        verify.emit_report(report, args.format, args.out)
    else:
        sys.stdout.write(verify.dumps_report(report, args.format))
    for c in report.cases:
        mark = "ok  " if c.passed else "FAIL"
        print(f"{mark} {c.id:48s} {c.residual:.2e} (tol {c.tolerance:.0e}) {c.error}", file=sys.stderr)
    print(f"{report.summary} in {elapsed:.1f} s", file=sys.stderr)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
