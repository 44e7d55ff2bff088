"""Closed-form sanity checks on a single nucleon.

Reproduces the three analytic touchstones of the collapse-noise model:
the point-mass force spectral density, the cubic-in-time free-expansion
spread, and the heating rate of a hydrogen-scale mass, all at the
conventional parameter values lambda = 1e-16 1/s, rC = 1e-7 m.
"""

import numpy as np

from cslbounds import (CONSTANTS, GRW_LAMBDA, GRW_RC, CollapseParams, Point,
                       csl_force_spectrum, free_expansion_spread,
                       heating_rate)

p = CollapseParams(GRW_LAMBDA, GRW_RC)
nucleon = Point(CONSTANTS.m0)

closed = CONSTANTS.hbar ** 2 * GRW_LAMBDA / (2.0 * GRW_RC ** 2)
quad = float(csl_force_spectrum(nucleon, p, method="quadrature"))
print(f"force PSD, closed form : {closed:.6e} N^2 s")
print(f"force PSD, quadrature  : {quad:.6e} N^2 s")
print(f"relative difference    : {abs(quad - closed) / closed:.2e}")

print()
for t in (0.1, 1.0, 10.0):
    spread = free_expansion_spread(p, t)
    print(f"free-expansion spread at t = {t:5.1f} s : {spread:.4e} m^2")
ratio = free_expansion_spread(p, 10.0) / free_expansion_spread(p, 1.0)
print(f"decade ratio {ratio:.1f} confirms the t^3 law")

print()
rate = heating_rate(nucleon, p)
print(f"heating rate of a free nucleon: {rate:.3e} K per year")

# the spectrum is exactly linear in lambda and quadratic in mass
s1 = float(csl_force_spectrum(Point(10.0 * CONSTANTS.m0), p))
print(f"10x mass raises the PSD by {s1 / closed:.1f} (expected 100)")
