"""Layered test masses tighten the bound near the layer thickness.

At equal total mass, a stack of alternating dense/light layers couples
more strongly to the collapse noise than a homogeneous block when the
correlation length is comparable to the layer thickness, so its
exclusion bound is strictly tighter there.
"""

import numpy as np

from cslbounds import (Cuboid, ExperimentRecord, Multilayer,
                       lambda_upper_bound)

d = 1e-7          # layer thickness, m
stack = Multilayer(layer_count=20, d1=d, d2=d, rho1=19300.0, rho2=100.0,
                   Lx=2e-6, Ly=2e-6)
block = Cuboid(stack.total_mass, 2e-6, 2e-6, stack.stack_thickness)
print(f"total mass {stack.total_mass:.3e} kg, stack of 20 x {d:.0e} m")

def record(geometry):
    return ExperimentRecord(name="demo", geometry=geometry, channel="force",
                            budget=1e-37, band=(1e3, 1e4))

print(f"{'rC/d':>6} {'multilayer':>12} {'cuboid':>12} {'ratio':>7}")
for factor in (1.0 / 3.0, 0.5, 1.0, 2.0, 3.0, 10.0):
    rC = factor * d
    l_ml, _ = lambda_upper_bound(record(stack), rC)
    l_cu, _ = lambda_upper_bound(record(block), rC)
    print(f"{factor:6.2f} {l_ml:12.3e} {l_cu:12.3e} {l_ml / l_cu:7.3f}")
print("ratios below 1 mean the layered mass excludes more parameter space")
