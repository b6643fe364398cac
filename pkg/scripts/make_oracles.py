"""Regenerate tests/data/oracles.json from mpmath alone (no fgkit import).

The file is frozen: tests compare against it, so rerun this only when the
oracle definitions themselves change.
"""
import json
import pathlib

import mpmath as mp

mp.mp.dps = 40
OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "oracles.json"


def c(z):
    z = mp.mpc(z)
    return [float(z.real), float(z.imag)]


def P(d, lam, z):
    return mp.hyp2f1(-lam, lam + d - 2, mp.mpf(d - 1) / 2, (1 - z) / 2, zeroprec=400)


def Q(d, lam, z):
    v = mp.acosh(z)
    q = mp.exp(-2 * v)
    p = mp.mpf(d - 4) / 2
    k = mp.gamma(mp.mpf(d - 1) / 2) / (mp.sqrt(mp.pi) * mp.gamma(mp.mpf(d - 2) / 2))
    return k * mp.sinh(v) ** (-(d - 3)) * mp.exp(-(lam + 1) * v) * mp.beta(lam + 1, p + 1) * mp.hyp2f1(-p, lam + 1, lam + p + 2, q)


def main():
    data = {"log_gamma": [], "legendre_P": [], "legendre_Q": [], "classical_Q": []}
    for z in (0.5, 1.0, 3.7, 10.25, 0.3 + 2j, -2.5 + 0.5j, -7.3 - 4j, 1e-3 + 1e-3j, 25 + 30j):
        data["log_gamma"].append({"z": c(z), "value": c(mp.loggamma(mp.mpc(z)))})
    for d in (3, 4, 5, 6):
        for lam in (0.3, 2.0, -0.7 + 0.4j, 1.5 + 2j):
            for z in (0.5, -0.9, 0.99, 2.5, -0.5 + 0.3j, 3 - 2j, 1.0001):
                val = P(d, mp.mpc(lam), mp.mpc(z))
                data["legendre_P"].append({"d": d, "lam": c(lam), "z": c(z), "value": c(val)})
        for lam in (0.3, 1.5, 0.25 + 0.5j, 4.0):
            for z in (1.2, 2.5, 7.0, 2 + 1j, -3 + 0.5j):
                val = Q(d, mp.mpc(lam), mp.mpc(z))
                data["legendre_Q"].append({"d": d, "lam": c(lam), "z": c(z), "value": c(val)})
    for ell in range(0, 11):
        for x in (1.1, 1.5, 3.0, 10.0):
            data["classical_Q"].append({"ell": ell, "x": x, "value": float(mp.legenq(ell, 0, x, type=3).real)})
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
