"""Exclusion curve of a micron sphere: the characteristic V shape.

A force-noise budget on a sphere bounds the collapse rate at every
correlation length. The bound is weakest (largest) at small and large
rC and tightest when rC is comparable to the sphere radius, giving the
V-shaped curve on log-log axes. Writes exclusion_v_shape.svg.
"""

import numpy as np

from cslbounds import ExperimentRecord, Sphere, exclusion_scan
from cslbounds.svgplot import LogLogPlot

R = 1e-6
record = ExperimentRecord(
    name="micron sphere, 1e-37 N^2 s budget",
    geometry=Sphere(1e-11, R),
    channel="force",
    budget=1e-37,
    band=(1e3, 1e4),
)

grid = np.logspace(-8.5, -4.0, 80)
curve = exclusion_scan(record, grid, workers=4)

i = int(np.argmin(curve.lambda_ub))
print(f"tightest bound lambda <= {curve.lambda_ub[i]:.3e} 1/s "
      f"at rC = {curve.rCs[i]:.2e} m (sphere radius {R:.0e} m)")

plot = LogLogPlot(xlabel="rC [m]", ylabel="lambda upper bound [1/s]",
                  title="excluded collapse parameters")
plot.add_shaded_above(curve.rCs, curve.lambda_ub, record.name)
with open("exclusion_v_shape.svg", "w") as fh:
    fh.write(plot.render())
print("wrote exclusion_v_shape.svg")
