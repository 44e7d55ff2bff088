"""Rigid-body mass distributions and their Fourier-space form factors.

Every geometry is centered at its center of mass and evaluates

    mu_tilde(k) = integral mu(x) e^{i k . x} dx

so that mu_tilde(0) equals the total mass.  The angular-derivative
combination k_y d/dk_z - k_z d/dk_y of mu_tilde, which drives the
rotational noise about the x axis, is available analytically for the
shapes with closed-form transforms and by central differences otherwise.

All evaluators are pure and accept vectorized k components.
"""

from dataclasses import dataclass, field

import numpy as np

from .special import sinc, sinc_prime, jinc, jinc_prime, sphere_kernel

__all__ = [
    "MassGeometry", "Point", "Sphere", "Cuboid", "Cylinder", "Multilayer",
    "PointLattice", "TwoBody", "TwoBodyFormFactorError",
    "form_factor", "form_factor_angular_derivative",
]

_AXES = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}


class TwoBodyFormFactorError(TypeError):
    """A scalar form factor was requested for a TwoBody geometry.

    The pair needs the phase-factor kernel applied in the noise module;
    asking for a single transform here is a misuse.
    """


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("axis vector must be nonzero")
    return v / n


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be strictly positive, got {value}")


class MassGeometry:
    """Base class; concrete shapes are the dataclasses below."""

    @property
    def total_mass(self):
        raise NotImplementedError

    @property
    def largest_dimension(self):
        """Largest linear extent; 0 for point-like bodies.  Used to size
        oscillation-aware quadrature panels."""
        raise NotImplementedError


@dataclass(frozen=True)
class Point(MassGeometry):
    m: float

    def __post_init__(self):
        _check_positive(m=self.m)

    @property
    def total_mass(self):
        return self.m

    @property
    def largest_dimension(self):
        return 0.0


@dataclass(frozen=True)
class Sphere(MassGeometry):
    m: float
    R: float

    def __post_init__(self):
        _check_positive(m=self.m, R=self.R)

    @property
    def total_mass(self):
        return self.m

    @property
    def largest_dimension(self):
        return 2.0 * self.R


@dataclass(frozen=True)
class Cuboid(MassGeometry):
    m: float
    Lx: float
    Ly: float
    Lz: float

    def __post_init__(self):
        _check_positive(m=self.m, Lx=self.Lx, Ly=self.Ly, Lz=self.Lz)

    @property
    def total_mass(self):
        return self.m

    @property
    def largest_dimension(self):
        return max(self.Lx, self.Ly, self.Lz)


@dataclass(frozen=True)
class Cylinder(MassGeometry):
    """Solid cylinder; axis is a unit vector (default z)."""

    m: float
    R: float
    L: float
    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        _check_positive(m=self.m, R=self.R, L=self.L)
        object.__setattr__(self, "axis", tuple(_unit(self.axis)))

    @property
    def axis_vector(self):
        return np.asarray(self.axis)

    @property
    def total_mass(self):
        return self.m

    @property
    def largest_dimension(self):
        return max(2.0 * self.R, self.L)


@dataclass(frozen=True)
class Multilayer(MassGeometry):
    """Stack of alternating full-density slabs, material 1 first.

    layer_count is the total number of slabs; odd-indexed slabs (0-based
    even positions) are material 1.  Cross-section Lx x Ly is normal to
    the stacking axis, which must be a principal axis ('x', 'y' or 'z').
    """

    layer_count: int
    d1: float
    d2: float
    rho1: float
    rho2: float
    Lx: float
    Ly: float
    stacking_axis: str = "z"

    def __post_init__(self):
        if self.layer_count < 1:
            raise ValueError("layer_count must be >= 1")
        _check_positive(d1=self.d1, d2=self.d2, rho1=self.rho1,
                        rho2=self.rho2, Lx=self.Lx, Ly=self.Ly)
        if self.stacking_axis not in _AXES:
            raise ValueError("stacking_axis must be one of 'x', 'y', 'z'")

    def layers(self):
        """(thickness, density, center-offset along stack) per slab,
        with the stack shifted so the center of mass sits at 0."""
        ds = np.array([self.d1 if i % 2 == 0 else self.d2
                       for i in range(self.layer_count)])
        rhos = np.array([self.rho1 if i % 2 == 0 else self.rho2
                         for i in range(self.layer_count)])
        edges = np.concatenate([[0.0], np.cumsum(ds)])
        centers = 0.5 * (edges[:-1] + edges[1:])
        masses = rhos * ds   # per unit cross-section
        com = np.sum(masses * centers) / np.sum(masses)
        return ds, rhos, centers - com

    @property
    def total_mass(self):
        ds, rhos, _ = self.layers()
        return float(np.sum(rhos * ds) * self.Lx * self.Ly)

    @property
    def stack_thickness(self):
        ds, _, _ = self.layers()
        return float(np.sum(ds))

    @property
    def largest_dimension(self):
        return max(self.Lx, self.Ly, self.stack_thickness)


@dataclass(frozen=True)
class PointLattice(MassGeometry):
    """Discrete mass points: positions (N, 3) in meters, masses (N,) kg."""

    positions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        m = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if pos.shape != (m.size, 3):
            raise ValueError("positions must be (N, 3) matching N masses")
        if np.any(m <= 0):
            raise ValueError("masses must be strictly positive")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "masses", m)

    @property
    def total_mass(self):
        return float(np.sum(self.masses))

    @property
    def largest_dimension(self):
        if len(self.masses) < 2:
            return 0.0
        span = self.positions.max(axis=0) - self.positions.min(axis=0)
        return float(np.max(span))


@dataclass(frozen=True)
class TwoBody(MassGeometry):
    """Two identical units separated by a along x; depth exactly 1."""

    unit: MassGeometry
    a: float

    def __post_init__(self):
        if isinstance(self.unit, TwoBody):
            raise ValueError("TwoBody cannot nest another TwoBody")
        if self.a < 0:
            raise ValueError("separation a must be nonnegative")

    @property
    def total_mass(self):
        return 2.0 * self.unit.total_mass

    @property
    def largest_dimension(self):
        return self.unit.largest_dimension + self.a


def _cylinder_components(g, kx, ky, kz):
    """(k_parallel, k_perp) of k relative to the cylinder axis."""
    n = g.axis_vector
    kpar = kx * n[0] + ky * n[1] + kz * n[2]
    k2 = kx * kx + ky * ky + kz * kz
    kperp = np.sqrt(np.maximum(k2 - kpar * kpar, 0.0))
    return kpar, kperp


def multilayer_stack_transform(g, ks):
    """Complex 1D transform of the stack profile along the stacking axis,
    per unit cross-section area: sum_l rho_l d_l sinc(k d_l/2) e^{i k c_l}."""
    ks = np.asarray(ks, dtype=float)
    ds, rhos, centers = g.layers()
    out = np.zeros(ks.shape, dtype=complex)
    for d, rho, c in zip(ds, rhos, centers):
        out += rho * d * sinc(ks * d / 2.0) * np.exp(1j * ks * c)
    return out


def form_factor(g, k):
    """Fourier transform of the mass density at wavevector k.

    k: array-like of shape (..., 3), 1/m.  Returns a complex array of
    shape (...); mu_tilde(0) is the total mass.
    """
    k = np.asarray(k, dtype=float)
    if k.shape[-1] != 3:
        raise ValueError("k must have shape (..., 3)")
    if not np.all(np.isfinite(k)):
        raise ValueError("k must be finite")
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]

    if isinstance(g, Point):
        return np.full(kx.shape, g.m, dtype=complex)
    if isinstance(g, Sphere):
        u = g.R * np.sqrt(kx * kx + ky * ky + kz * kz)
        return (g.m * sphere_kernel(u)).astype(complex)
    if isinstance(g, Cuboid):
        val = g.m * sinc(kx * g.Lx / 2.0) * sinc(ky * g.Ly / 2.0) \
            * sinc(kz * g.Lz / 2.0)
        return val.astype(complex)
    if isinstance(g, Cylinder):
        kpar, kperp = _cylinder_components(g, kx, ky, kz)
        val = g.m * jinc(kperp * g.R) * sinc(kpar * g.L / 2.0)
        return val.astype(complex)
    if isinstance(g, Multilayer):
        n = g.stacking_axis
        comp = {"x": kx, "y": ky, "z": kz}
        ks = comp[n]
        others = [a for a in "xyz" if a != n]
        lengths = {others[0]: g.Lx, others[1]: g.Ly}
        cross = g.Lx * g.Ly
        val = multilayer_stack_transform(g, ks) * cross
        for a in others:
            val = val * sinc(comp[a] * lengths[a] / 2.0)
        return val
    if isinstance(g, PointLattice):
        phase = (kx[..., None] * g.positions[:, 0]
                 + ky[..., None] * g.positions[:, 1]
                 + kz[..., None] * g.positions[:, 2])
        return np.sum(g.masses * np.exp(1j * phase), axis=-1)
    if isinstance(g, TwoBody):
        raise TwoBodyFormFactorError(
            "TwoBody has no scalar form factor; evaluate the unit and apply "
            "the separation kernel in the noise module")
    raise TypeError(f"unsupported geometry {type(g).__name__}")


def _angular_derivative_analytic(g, kx, ky, kz):
    if isinstance(g, (Point, Sphere)):
        # mu_tilde depends on |k| only; the angular derivative vanishes
        return np.zeros(np.broadcast(kx, ky, kz).shape, dtype=complex)
    if isinstance(g, Cuboid):
        sx = sinc(kx * g.Lx / 2.0)
        sy = sinc(ky * g.Ly / 2.0)
        sz = sinc(kz * g.Lz / 2.0)
        dsy = (g.Ly / 2.0) * sinc_prime(ky * g.Ly / 2.0)
        dsz = (g.Lz / 2.0) * sinc_prime(kz * g.Lz / 2.0)
        return (g.m * sx * (ky * sy * dsz - kz * dsy * sz)).astype(complex)
    if isinstance(g, Cylinder):
        n = g.axis_vector
        if not np.allclose(np.abs(n), [0.0, 0.0, 1.0]):
            return None   # analytic form assumes principal-axis alignment
        kperp = np.sqrt(kx * kx + ky * ky)
        f = jinc(kperp * g.R)
        fp = g.R * jinc_prime(kperp * g.R)
        gz = sinc(kz * g.L / 2.0)
        gp = (g.L / 2.0) * sinc_prime(kz * g.L / 2.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(kperp > 0, ky / np.where(kperp > 0, kperp, 1.0), 0.0)
        # ky f g' - kz (ky/kperp) f' g ; the second term -> 0 as kperp -> 0
        val = g.m * (ky * f * gp - kz * ratio * fp * gz)
        return val.astype(complex)
    if isinstance(g, PointLattice):
        y = g.positions[:, 1]
        z = g.positions[:, 2]
        phase = (kx[..., None] * g.positions[:, 0]
                 + ky[..., None] * y + kz[..., None] * z)
        lever = ky[..., None] * z - kz[..., None] * y
        return np.sum(g.masses * 1j * lever * np.exp(1j * phase), axis=-1)
    return None


def form_factor_angular_derivative(g, k, rc_hint=None):
    """k_y d/dk_z mu_tilde - k_z d/dk_y mu_tilde, for rotation about x.

    Analytic for Sphere, Cuboid, z-aligned Cylinder and PointLattice;
    otherwise central finite differences with step
    h = 1e-6 * max(|k|, 1/rc_hint).
    """
    k = np.asarray(k, dtype=float)
    if k.shape[-1] != 3:
        raise ValueError("k must have shape (..., 3)")
    kx, ky, kz = k[..., 0], k[..., 1], k[..., 2]

    analytic = _angular_derivative_analytic(g, kx, ky, kz)
    if analytic is not None:
        return analytic

    kmag = np.sqrt(kx * kx + ky * ky + kz * kz)
    floor = 1.0 / rc_hint if rc_hint else 0.0
    h = 1e-6 * np.maximum(kmag, floor)
    h = np.where(h > 0, h, 1e-6)

    def shifted(dy, dz):
        kk = np.stack([kx, ky + dy, kz + dz], axis=-1)
        return form_factor(g, kk)

    dmu_dz = (shifted(0.0, h) - shifted(0.0, -h)) / (2.0 * h)
    dmu_dy = (shifted(h, 0.0) - shifted(-h, 0.0)) / (2.0 * h)
    return ky * dmu_dz - kz * dmu_dy
