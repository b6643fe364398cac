"""Walk once around the correspondence for a tapered exponential kernel in d = 3.

jump f(v)  ->  F~(lam) by the spherical Laplace transform
F~ at integers  ==  Fourier-Legendre coefficients of the sphere restriction
F~ on a vertical line  ->  f(v) again
"""
import math

import numpy as np

from fgkit import special
from fgkit.kernels import make_exponential_kernel
from fgkit.numerics import integrate_semi_infinite
from fgkit.transforms import fourier_legendre_coeffs, reconstruct_volterra_kernel, spherical_laplace

d = 3
K = make_exponential_kernel(d, 3.0, mu=0.5, taper_order=4)


def sphere(u):
    # sphere restriction from the dispersion integral of the jump
    x = np.cos(np.asarray(u, dtype=float)).ravel()
    f = lambda v: (K(v) * np.sinh(v))[:, None] / (np.cosh(v)[:, None] - x[None, :]) / (2 * math.pi)
    return np.atleast_1d(integrate_semi_infinite(f, 0.5, decay_rate=2.0)).reshape(np.shape(u))


Ft = lambda lam: spherical_laplace(K, lam)
coeffs = fourier_legendre_coeffs(sphere, 6, d=d)
print(" l   Fourier-Legendre        F~(l)")
for ell in range(1, 7):
    print(f"{ell:2d}   {coeffs[ell].real: .12e}   {Ft(float(ell)).real: .12e}")

print("\n v    reconstructed f(v)      f(v)")
for v in (0.8, 1.5):
    got = reconstruct_volterra_kernel(Ft, d, 0.0, v, form="legendre")
    print(f"{v:.1f}   {got.real: .12e}   {K(v).real: .12e}")

print("\nomega_3 =", special.omega(3), " h_3(4) =", special.h_d(3, 4).real)
