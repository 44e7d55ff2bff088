"""Collapse-noise spectra against closed forms, pair-sum oracles and
scaling laws."""

import math

import numpy as np
import pytest

from cslbounds import (CONSTANTS, GRW_LAMBDA, GRW_RC, CollapseParams,
                       ColoredNoiseModel, Cuboid, Cylinder, Multilayer,
                       Point, PointLattice, QuadratureSpec, Sphere, TwoBody,
                       apply_colored_filter, csl_force_spectrum,
                       csl_force_spectrum_two_body, csl_temperature_shift,
                       csl_temperature_shift_rot, csl_torque_spectrum,
                       free_expansion_spread, heating_rate)
from cslbounds.cslnoise import (force_pair_kernel_sum, torque_pair_kernel_sum,
                                two_body_pair_kernel_sum)

GRW = CollapseParams(GRW_LAMBDA, GRW_RC)


def cuboid_lattice(g, n):
    """Midpoint-rule point lattice filling a cuboid, an independent
    discretization oracle for the continuum spectra."""
    cs = []
    for L in (g.Lx, g.Ly, g.Lz):
        e = np.linspace(-L / 2.0, L / 2.0, n + 1)
        cs.append(0.5 * (e[:-1] + e[1:]))
    X, Y, Z = np.meshgrid(*cs, indexing="ij")
    pos = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)
    masses = np.full(pos.shape[0], g.m / pos.shape[0])
    return PointLattice(pos, masses)


def test_point_mass_closed_form():
    s = csl_force_spectrum(Point(CONSTANTS.m0), GRW)
    assert float(s) == pytest.approx(5.560608586053407e-71, rel=1e-14)
    # and the quadrature route reproduces it
    q = csl_force_spectrum(Point(CONSTANTS.m0), GRW, method="quadrature")
    assert float(q) == pytest.approx(float(s), rel=1e-6)


def test_pair_kernel_reproduces_single_point():
    pos = np.zeros((1, 3))
    m = np.array([CONSTANTS.m0])
    ksum = force_pair_kernel_sum(pos, m, GRW_RC)
    val = CONSTANTS.hbar ** 2 * GRW_LAMBDA / CONSTANTS.m0 ** 2 * ksum
    assert val == pytest.approx(5.560608586053407e-71, rel=1e-14)


def test_pair_kernel_two_points_hand_formula():
    # two equal points separated by d along x:
    # sum = m^2 [2 * 1/(2rC^2) + 2 * (1/(2rC^2))(1 - d^2/(2rC^2)) e^{-d^2/4rC^2}]
    rC = 1e-7
    d = 1.3e-7
    m = 2.5e-20
    pos = np.array([[0.0, 0.0, 0.0], [d, 0.0, 0.0]])
    got = force_pair_kernel_sum(pos, np.array([m, m]), rC)
    diag = 2.0 * m * m / (2.0 * rC ** 2)
    cross = 2.0 * m * m * (1.0 / (2.0 * rC ** 2)) \
        * (1.0 - d * d / (2.0 * rC ** 2)) * math.exp(-d * d / (4.0 * rC ** 2))
    assert got == pytest.approx(diag + cross, rel=1e-13)


def test_torque_kernel_two_points_hand_formula():
    # two points offset along y at heights +-z0: kernel terms
    # z_i z_j (1/2rC^2 - d_y^2/4rC^4) for d_z = 0
    rC = 1e-7
    m = 1e-20
    z0 = 5e-8
    dy = 8e-8
    pos = np.array([[0.0, 0.0, z0], [0.0, dy, z0]])
    got = torque_pair_kernel_sum(pos, np.array([m, m]), rC)
    diag = 2.0 * m * m * z0 * z0 * (1.0 / (2.0 * rC ** 2))
    cross = 2.0 * m * m * z0 * z0 \
        * (1.0 / (2.0 * rC ** 2) - dy * dy / (4.0 * rC ** 4)) \
        * math.exp(-dy * dy / (4.0 * rC ** 2))
    assert got == pytest.approx(diag + cross, rel=1e-13)


def test_sphere_coherent_limit():
    # rC >> R: the sphere responds as a point of the same mass
    m = 1e-12
    R = 5e-7
    for factor in (100.0, 1000.0):
        p = CollapseParams(GRW_LAMBDA, factor * R)
        s_sphere = float(csl_force_spectrum(Sphere(m, R), p))
        s_point = float(csl_force_spectrum(Point(m), p))
        assert abs(s_sphere - s_point) / s_point < 1e-2


def test_mass_squared_scaling():
    p = CollapseParams(GRW_LAMBDA, 2e-7)
    base = float(csl_force_spectrum(Sphere(1e-13, 5e-7), p))
    for factor in (2.0, 10.0, 100.0):
        s = float(csl_force_spectrum(Sphere(factor * 1e-13, 5e-7), p))
        assert s == pytest.approx(factor ** 2 * base, rel=2e-6)


def test_lambda_linearity():
    g = Cuboid(1e-12, 1e-6, 2e-6, 0.5e-6)
    s1 = float(csl_force_spectrum(g, CollapseParams(1e-16, 1e-7)))
    s9 = float(csl_force_spectrum(g, CollapseParams(9e-16, 1e-7)))
    assert s9 == pytest.approx(9.0 * s1, rel=1e-12)
    assert float(csl_force_spectrum(g, CollapseParams(0.0, 1e-7))) == 0.0


@pytest.mark.parametrize("g", [
    Cuboid(1e-12, 1.2e-6, 0.8e-6, 0.6e-6),
    Cylinder(1e-13, 2e-7, 1e-6),
    Cylinder(1e-13, 2e-7, 1e-6, axis=(1.0, 0.0, 0.0)),
])
def test_continuum_vs_lattice_oracle(g):
    """Midpoint lattices must converge to the continuum value."""
    p = CollapseParams(GRW_LAMBDA, 1.5e-7)
    want = float(csl_force_spectrum(g, p))
    if isinstance(g, Cylinder):
        lat = cylinder_lattice(g, 20)
    else:
        lat = cuboid_lattice(g, 20)
    got = float(csl_force_spectrum(lat, p))
    assert abs(got - want) / want < 1e-2


def cylinder_lattice(g, n):
    """Cylindrical-grid point lattice, mass-weighted by cell volume."""
    re = np.linspace(0.0, g.R, n + 1)
    rc_ = 0.5 * (re[:-1] + re[1:])
    phis = (np.arange(2 * n) + 0.5) * (2.0 * np.pi / (2 * n))
    ze = np.linspace(-g.L / 2.0, g.L / 2.0, n + 1)
    zc = 0.5 * (ze[:-1] + ze[1:])
    Rg, Pg, Zg = np.meshgrid(rc_, phis, zc, indexing="ij")
    w = (Rg * (re[1] - re[0]) * (phis[1] - phis[0])
         * (ze[1] - ze[0])).ravel()
    local = np.stack([(Rg * np.cos(Pg)).ravel(), (Rg * np.sin(Pg)).ravel(),
                      Zg.ravel()], axis=-1)
    # rotate local z onto the cylinder axis
    n_ax = g.axis_vector
    if np.allclose(n_ax, [0.0, 0.0, 1.0]):
        pos = local
    else:
        v = np.cross([0.0, 0.0, 1.0], n_ax)
        s = np.linalg.norm(v)
        c = float(np.dot([0.0, 0.0, 1.0], n_ax))
        vx = np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]],
                       [-v[1], v[0], 0.0]])
        rot = np.eye(3) + vx + vx @ vx * ((1.0 - c) / s ** 2)
        pos = local @ rot.T
    masses = g.m * w / np.sum(w)
    return PointLattice(pos, masses)


def test_lattice_convergence_order():
    # halving the cell size must shrink the error by at least ~2x
    g = Cuboid(1e-12, 1e-6, 1e-6, 1e-6)
    p = CollapseParams(GRW_LAMBDA, 1.5e-7)
    want = float(csl_force_spectrum(g, p))
    errs = []
    for n in (8, 16):
        got = float(csl_force_spectrum(cuboid_lattice(g, n), p))
        errs.append(abs(got - want) / want)
    assert errs[1] < errs[0] / 2.0


def test_two_body_limits():
    unit = Point(1e-15)
    p = CollapseParams(GRW_LAMBDA, GRW_RC)
    s_single = float(csl_force_spectrum(unit, p))
    assert float(csl_force_spectrum_two_body(TwoBody(unit, 0.0), p)) == 0.0
    far = float(csl_force_spectrum_two_body(TwoBody(unit, 1e-3), p))
    assert far == pytest.approx(s_single, rel=1e-9)
    near = float(csl_force_spectrum_two_body(TwoBody(unit, 1e-9), p))
    assert near < 1e-3 * s_single


def test_two_body_point_kernel_hand_value():
    # integrand weight (1 - cos a k_x): for a point pair the closed form
    # is (m/m0)^2 hbar^2 lam / (2 rC^2) * (1 - (1 - a^2/2rC^2) e^{-a^2/4rC^2})
    a = GRW_RC
    p = CollapseParams(GRW_LAMBDA, GRW_RC)
    got = float(csl_force_spectrum_two_body(TwoBody(Point(CONSTANTS.m0), a),
                                            p))
    x = a * a / (GRW_RC * GRW_RC)
    want = CONSTANTS.hbar ** 2 * GRW_LAMBDA / (2.0 * GRW_RC ** 2) \
        * (1.0 - (1.0 - x / 2.0) * math.exp(-x / 4.0))
    assert got == pytest.approx(want, rel=1e-12)


def test_two_body_cuboid_matches_quadrature_route():
    unit = Cuboid(1e-12, 1e-6, 1e-6, 1e-6)
    p = CollapseParams(GRW_LAMBDA, 3e-7)
    for a in (5e-7, 2e-6, 1e-5):
        closed = float(csl_force_spectrum_two_body(TwoBody(unit, a), p))
        # oracle: lattice pair-kernel with the separation applied
        lat = cuboid_lattice(unit, 14)
        ksum = two_body_pair_kernel_sum(lat.positions, lat.masses, p.rC, a)
        oracle = CONSTANTS.hbar ** 2 * p.lam / CONSTANTS.m0 ** 2 * ksum
        assert closed == pytest.approx(oracle, rel=2e-2)


def test_torque_exact_zeros():
    p = CollapseParams(GRW_LAMBDA, 1.5e-7)
    assert float(csl_torque_spectrum(Sphere(1e-12, 5e-7), p)) == 0.0
    spinning = Cylinder(1e-13, 2e-7, 1e-6, axis=(1.0, 0.0, 0.0))
    assert float(csl_torque_spectrum(spinning, p)) == 0.0


def test_torque_cylinder_vs_lattice_oracle():
    g = Cylinder(1e-13, 2e-7, 1e-6)
    p = CollapseParams(GRW_LAMBDA, 1.5e-7)
    want = float(csl_torque_spectrum(g, p))
    lat = cylinder_lattice(g, 20)
    got = float(csl_torque_spectrum(lat, p))
    assert abs(got - want) / want < 2e-2


def test_torque_cuboid_vs_lattice_oracle():
    g = Cuboid(1e-12, 1.0e-6, 0.7e-6, 0.4e-6)
    p = CollapseParams(GRW_LAMBDA, 1.5e-7)
    want = float(csl_torque_spectrum(g, p))
    got = float(csl_torque_spectrum(cuboid_lattice(g, 18), p))
    assert abs(got - want) / want < 2e-2


def test_colored_filter_properties():
    white = ColoredNoiseModel("white")
    assert white.filter(0.0) == 1.0
    assert white.filter(1e12) == 1.0

    lor = ColoredNoiseModel("lorentzian_cutoff", omega_c=1e4)
    assert lor.filter(0.0) == 1.0
    assert lor.filter(1e4) == pytest.approx(0.5, rel=1e-14)
    assert lor.filter(1e8) < 1e-7
    # monotone decreasing in |omega|
    ws = np.logspace(0, 9, 50)
    fs = lor.filter(ws)
    assert np.all(np.diff(fs) < 0)

    s = apply_colored_filter(2.0, lor, np.array([0.0, 1e4]))
    assert s[0] == pytest.approx(2.0)
    assert s[1] == pytest.approx(1.0)
    assert apply_colored_filter(2.0, None, 1e4) == 2.0

    with pytest.raises(ValueError):
        ColoredNoiseModel("pink")
    with pytest.raises(ValueError):
        ColoredNoiseModel("lorentzian_cutoff")


def test_temperature_shift_value_and_validation():
    s = 1.7554433359650133e-43   # sphere m = 1e-12 kg, R = 0.5 um at GRW
    got = csl_temperature_shift(s, 1e-12, 0.1)
    assert got == pytest.approx(s / (2.0 * 1e-12 * 0.1 * CONSTANTS.kB),
                                rel=1e-14)
    assert got == pytest.approx(6.357312162486675e-08, rel=1e-12)
    with pytest.raises(ValueError):
        csl_temperature_shift(s, 1e-12, 0.0)
    rot = csl_temperature_shift_rot(1e-50, 1e-3)
    assert rot == pytest.approx(1e-50 / (2.0 * CONSTANTS.kB * 1e-3),
                                rel=1e-14)


def test_free_expansion_spread():
    qm = 3e-18
    got = free_expansion_spread(GRW, 1.0, qm_term=qm)
    extra = GRW_LAMBDA * CONSTANTS.hbar ** 2 \
        / (2.0 * CONSTANTS.m0 ** 2 * GRW_RC ** 2)
    assert got == pytest.approx(qm + extra, rel=1e-14)
    # cubic in time
    r = free_expansion_spread(GRW, 2.0) / free_expansion_spread(GRW, 1.0)
    assert r == pytest.approx(8.0, rel=1e-14)


def test_heating_rate_hydrogen_scale():
    rate = heating_rate(Point(CONSTANTS.m0), GRW)
    assert rate == pytest.approx(7.598812437525786e-14, rel=1e-10)


def test_spectral_value_carries_error():
    s = csl_force_spectrum(Sphere(1e-12, 5e-7), GRW)
    assert float(s) > 0
    assert s.error >= 0
    assert s.error < 1e-4 * float(s)
