"""Inversion of experimental noise budgets into collapse-parameter bounds.

Every CSL spectral quantity is exactly linear in the collapse rate, so an
experiment whose unexplained noise budget is B constrains

    lambda_ub(rC) = B / S(rC; lambda = 1)

for PSD budgets, and via the temperature-shift relation for thermometric
budgets.  Scanning rC on a log grid yields the exclusion curve; the
pointwise minimum over experiments is the combined bound.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import CONSTANTS
from .cslnoise import (CollapseParams, ColoredNoiseModel, apply_colored_filter,
                       csl_force_spectrum, csl_force_spectrum_two_body,
                       csl_torque_spectrum)
from .geometry import MassGeometry, TwoBody
from .quadrature import NonConvergence, QuadratureSpec

__all__ = [
    "ExperimentRecord", "ExclusionCurve", "DegenerateBound",
    "lambda_upper_bound", "exclusion_scan", "combine_exclusions",
    "default_rc_grid",
]

CHANNELS = ("force", "force_two_body", "torque", "temperature_shift")


class DegenerateBound(RuntimeError):
    """The CSL response vanishes for this geometry/channel at this rC;
    the experiment places no bound."""


@dataclass(frozen=True)
class ExperimentRecord:
    """One experiment's geometry, readout channel and noise budget.

    budget units: N^2 s (force channels), N^2 m^2 s (torque) or K
    (temperature_shift).  For temperature_shift budgets supply the
    mechanical (m, gamma) pair, or d_phi for a rotational readout.
    band is the analysis band [omega_lo, omega_hi] in rad/s; colored
    filters are evaluated at its midpoint.
    """

    name: str
    geometry: MassGeometry
    channel: str
    budget: float
    band: tuple
    colored: Optional[ColoredNoiseModel] = None
    m: Optional[float] = None
    gamma: Optional[float] = None
    d_phi: Optional[float] = None

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        lo, hi = self.band
        if not (0 <= lo <= hi):
            raise ValueError("band must satisfy 0 <= lo <= hi")
        two_body = isinstance(self.geometry, TwoBody)
        if two_body != (self.channel == "force_two_body"):
            raise ValueError("TwoBody geometry and the force_two_body "
                             "channel must be used together")
        if self.channel == "temperature_shift":
            rotational = self.d_phi is not None
            mechanical = self.m is not None and self.gamma is not None
            if rotational == mechanical:
                raise ValueError("temperature_shift budgets need either "
                                 "(m, gamma) or d_phi, not both")

    @property
    def band_midpoint(self):
        return 0.5 * (self.band[0] + self.band[1])


@dataclass(frozen=True)
class ExclusionCurve:
    """lambda upper bound per rC grid point.

    Degenerate points (no bound) carry NaN in lambda_ub; the status list
    says why ("ok", "degenerate", "nonconvergent").
    """

    rCs: np.ndarray
    lambda_ub: np.ndarray
    errors: np.ndarray
    status: tuple
    experiment: str

    def __post_init__(self):
        rCs = np.asarray(self.rCs, dtype=float)
        lam = np.asarray(self.lambda_ub, dtype=float)
        err = np.asarray(self.errors, dtype=float)
        if not (rCs.shape == lam.shape == err.shape) or rCs.ndim != 1:
            raise ValueError("grid arrays must be equal-length 1D")
        ok = np.array([s == "ok" for s in self.status])
        if np.any(~np.isfinite(lam[ok])) or np.any(lam[ok] <= 0):
            raise ValueError("valid bounds must be positive and finite")
        object.__setattr__(self, "rCs", rCs)
        object.__setattr__(self, "lambda_ub", lam)
        object.__setattr__(self, "errors", err)
        object.__setattr__(self, "status", tuple(self.status))


def default_rc_grid(rc_min=1e-9, rc_max=1e-3, per_decade=50):
    """Log-spaced rC grid bracketing the conventional rC = 1e-7 m."""
    decades = np.log10(rc_max / rc_min)
    n = max(2, int(round(decades * per_decade)) + 1)
    return np.logspace(np.log10(rc_min), np.log10(rc_max), n)


def _unit_spectrum(rec, rC, spec, consts):
    """Channel spectral quantity at lambda = 1, colored filter applied at
    the band midpoint.  Returns (value, quadrature error)."""
    p = CollapseParams(1.0, rC)
    if rec.channel == "force_two_body":
        s = csl_force_spectrum_two_body(rec.geometry, p, spec, consts)
    elif rec.channel == "torque" or (
            rec.channel == "temperature_shift" and rec.d_phi is not None):
        s = csl_torque_spectrum(rec.geometry, p, spec, consts)
    else:
        s = csl_force_spectrum(rec.geometry, p, spec, consts)
    err = getattr(s, "error", 0.0)
    if rec.colored is not None:
        f = float(rec.colored.filter(rec.band_midpoint))
        return float(s) * f, err * f
    return float(s), err


def lambda_upper_bound(rec, rC, spec=None, consts=CONSTANTS):
    """Largest collapse rate compatible with the budget at this rC.

    Returns (lambda_ub, relative quadrature error).  Raises
    DegenerateBound when the unit-rate response underflows (for example
    the torque channel on a sphere).
    """
    if spec is None:
        spec = QuadratureSpec()
    s_unit, err = _unit_spectrum(rec, rC, spec, consts)
    if not np.isfinite(s_unit) or s_unit <= 0 or (err > 0 and err >= s_unit):
        raise DegenerateBound(
            f"{rec.name}: no resolvable CSL response at rC = {rC:g} m")

    if rec.channel == "temperature_shift":
        if rec.d_phi is not None:
            lam = rec.budget * 2.0 * consts.kB * rec.d_phi / s_unit
        else:
            lam = rec.budget * 2.0 * rec.m * rec.gamma * consts.kB / s_unit
    else:
        lam = rec.budget / s_unit
    if not np.isfinite(lam) or lam <= 0:
        raise DegenerateBound(
            f"{rec.name}: bound not finite at rC = {rC:g} m")
    return lam, err / s_unit


def _scan_point(args):
    rec, rC, spec, consts = args
    try:
        lam, rel_err = lambda_upper_bound(rec, rC, spec, consts)
        return lam, rel_err, "ok"
    except DegenerateBound:
        return np.nan, np.nan, "degenerate"
    except NonConvergence as exc:
        return np.nan, float(exc.error), "nonconvergent"


def exclusion_scan(rec, rCs=None, spec=None, consts=CONSTANTS, workers=1):
    """Map lambda_upper_bound over an rC grid.

    Per-point failures are recorded in the curve status and the scan
    continues; partial curves are valid outputs.  workers > 1 evaluates
    grid points in parallel processes; results are merged by index, so
    the output does not depend on the worker count.
    """
    if rCs is None:
        rCs = default_rc_grid()
    rCs = np.asarray(rCs, dtype=float)
    if rCs.size < 2:
        raise ValueError("grid needs at least 2 points")
    if np.any(np.diff(rCs) <= 0):
        raise ValueError("grid must be increasing")
    if spec is None:
        spec = QuadratureSpec()

    jobs = [(rec, rC, spec, consts) for rC in rCs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_point, jobs, chunksize=4))
    else:
        results = [_scan_point(job) for job in jobs]

    lam = np.array([r[0] for r in results])
    err = np.array([r[1] for r in results])
    status = tuple(r[2] for r in results)
    return ExclusionCurve(rCs, lam, err, status, rec.name)


def combine_exclusions(curves):
    """Pointwise minimum bound over experiments sharing an rC grid."""
    if not curves:
        raise ValueError("need at least one curve")
    base = curves[0]
    for c in curves[1:]:
        if c.rCs.shape != base.rCs.shape or not np.allclose(c.rCs, base.rCs):
            raise ValueError("curves must share the rC grid")
    stacked = np.vstack([c.lambda_ub for c in curves])
    errs = np.vstack([c.errors for c in curves])
    with np.errstate(invalid="ignore"):
        all_nan = np.all(np.isnan(stacked), axis=0)
        lam = np.where(all_nan, np.nan, np.nanmin(stacked, axis=0))
        idx = np.where(all_nan, 0, np.nanargmin(
            np.where(np.isnan(stacked), np.inf, stacked), axis=0))
    err = errs[idx, np.arange(base.rCs.size)]
    status = tuple("degenerate" if bad else "ok" for bad in all_nan)
    err = np.where(all_nan, np.nan, err)
    name = "min(" + ", ".join(c.experiment for c in curves) + ")"
    return ExclusionCurve(base.rCs, lam, err, status, name)
