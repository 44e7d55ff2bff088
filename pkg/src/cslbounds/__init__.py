"""Collapse-model force noise spectra and experimental exclusion bounds.

The package computes the force, torque and displacement noise that a
mass-proportional stochastic collapse process would add to a mechanical
sensor, and inverts measured noise budgets into upper bounds on the
collapse rate as a function of the correlation length.
"""

__version__ = "0.1.0"

from .constants import CONSTANTS, GRW_LAMBDA, GRW_RC, PhysicalConstants
from .cslnoise import (CollapseParams, ColoredNoiseModel, SpectralValue,
                       apply_colored_filter, csl_force_spectrum,
                       csl_force_spectrum_two_body, csl_temperature_shift,
                       csl_temperature_shift_rot, csl_torque_spectrum,
                       free_expansion_spread, heating_rate)
from .exclusion import (DegenerateBound, ExclusionCurve, ExperimentRecord,
                        combine_exclusions, default_rc_grid, exclusion_scan,
                        lambda_upper_bound)
from .geometry import (Cuboid, Cylinder, MassGeometry, Multilayer, Point,
                       PointLattice, Sphere, TwoBody, TwoBodyFormFactorError,
                       form_factor, form_factor_angular_derivative)
from .optomech import (NoiseSpectrum, NonPositiveDamping, OptomechConfig,
                       SimConfig, SimulationResult, UnstableStep,
                       displacement_dns, high_temperature_limit_check,
                       read_trajectories, simulate_langevin,
                       write_trajectories)
from .quadrature import (NonConvergence, QuadratureSpec, integrate_1d,
                         integrate_k3)

__all__ = [
    "__version__",
    "CONSTANTS", "GRW_LAMBDA", "GRW_RC", "PhysicalConstants",
    "CollapseParams", "ColoredNoiseModel", "SpectralValue",
    "apply_colored_filter", "csl_force_spectrum",
    "csl_force_spectrum_two_body", "csl_temperature_shift",
    "csl_temperature_shift_rot", "csl_torque_spectrum",
    "free_expansion_spread", "heating_rate",
    "DegenerateBound", "ExclusionCurve", "ExperimentRecord",
    "combine_exclusions", "default_rc_grid", "exclusion_scan",
    "lambda_upper_bound",
    "Cuboid", "Cylinder", "MassGeometry", "Multilayer", "Point",
    "PointLattice", "Sphere", "TwoBody", "TwoBodyFormFactorError",
    "form_factor", "form_factor_angular_derivative",
    "NoiseSpectrum", "NonPositiveDamping", "OptomechConfig", "SimConfig",
    "SimulationResult", "UnstableStep", "displacement_dns",
    "high_temperature_limit_check", "read_trajectories",
    "simulate_langevin", "write_trajectories",
    "NonConvergence", "QuadratureSpec", "integrate_1d", "integrate_k3",
]
