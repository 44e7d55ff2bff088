"""Analytic displacement spectrum limits and the Langevin Monte Carlo."""

import numpy as np
import pytest

from cslbounds import (CONSTANTS, GRW_LAMBDA, GRW_RC, CollapseParams,
                       NonPositiveDamping, OptomechConfig, Point, SimConfig,
                       Sphere, UnstableStep, displacement_dns,
                       high_temperature_limit_check, read_trajectories,
                       simulate_langevin, write_trajectories)
from cslbounds.optomech import thermal_force_term

GRW = CollapseParams(GRW_LAMBDA, GRW_RC)
SPHERE = Sphere(1e-12, 5e-7)


def lorentzian_cfg(**overrides):
    params = dict(m=1e-12, omega_m=2.0 * np.pi * 3e3,
                  gamma_m=2.0 * np.pi * 200.0, T=0.1)
    params.update(overrides)
    return OptomechConfig(**params)


def test_chi_zero_reduces_to_thermal_plus_csl():
    """With no optical coupling the spectrum is exactly the mechanical
    susceptibility driven by thermal + collapse force noise."""
    cfg = lorentzian_cfg()
    omegas = np.logspace(2, 6, 300)
    got = displacement_dns(cfg, GRW, SPHERE, omegas)

    s_csl = displacement_dns(cfg, GRW, SPHERE, omegas,
                             components=True)[1]["csl"]
    d2 = (cfg.omega_m ** 2 - omegas ** 2) ** 2 \
        + cfg.gamma_m ** 2 * omegas ** 2
    want = thermal_force_term(cfg, omegas) / (cfg.m ** 2 * d2) \
        + s_csl
    assert np.max(np.abs(got.values - want) / want) < 1e-12


def test_backaction_zero_without_drive():
    cfg = lorentzian_cfg()
    omegas = np.logspace(2, 6, 50)
    _, parts = displacement_dns(cfg, GRW, SPHERE, omegas, components=True)
    assert np.all(parts["backaction"] == 0.0)


def test_csl_additivity():
    """The collapse term adds linearly: S(lam) - S(0) scales with lam."""
    cfg = lorentzian_cfg()
    omegas = np.logspace(2, 6, 120)
    s0 = displacement_dns(cfg, CollapseParams(0.0, GRW_RC), SPHERE,
                          omegas).values
    s1 = displacement_dns(cfg, GRW, SPHERE, omegas).values
    s3 = displacement_dns(cfg, CollapseParams(3.0 * GRW_LAMBDA, GRW_RC),
                          SPHERE, omegas).values
    assert np.allclose(s3 - s0, 3.0 * (s1 - s0), rtol=1e-12)


def test_optical_spring_changes_resonance():
    cfg = lorentzian_cfg(kappa=1e5, Delta=2.0 * np.pi * 3e3, chi=1e14,
                         alpha_sq=1e6)
    omegas = np.linspace(1e3, 1e5, 20001)
    bare = displacement_dns(lorentzian_cfg(), CollapseParams(0.0, GRW_RC),
                            SPHERE, omegas).values
    driven = displacement_dns(cfg, CollapseParams(0.0, GRW_RC), SPHERE,
                              omegas).values
    # peak must move and the backaction term must be strictly positive
    assert omegas[np.argmax(driven)] != omegas[np.argmax(bare)]
    _, parts = displacement_dns(cfg, CollapseParams(0.0, GRW_RC), SPHERE,
                                omegas, components=True)
    assert np.all(parts["backaction"] > 0)


def test_anti_damping_raises():
    cfg = lorentzian_cfg(gamma_m=1e-6, kappa=1e4,
                         Delta=-2.0 * np.pi * 3e3, chi=1e15, alpha_sq=1e8)
    omegas = np.linspace(1e3, 1e5, 500)
    with pytest.raises(NonPositiveDamping):
        displacement_dns(cfg, GRW, SPHERE, omegas)


def test_high_temperature_limit():
    cfg = lorentzian_cfg(T=10.0)
    omega = 2.0 * np.pi * 3e3
    exact, limit = high_temperature_limit_check(cfg, GRW, SPHERE, omega)
    assert exact == pytest.approx(limit, rel=1e-5)
    with pytest.raises(ValueError):
        high_temperature_limit_check(lorentzian_cfg(T=1e-6), GRW, SPHERE,
                                     2.0 * np.pi * 1e9)


def test_thermal_term_zero_temperature():
    cfg = lorentzian_cfg(T=0.0)
    omegas = np.array([-1e4, 0.0, 1e4])
    got = thermal_force_term(cfg, omegas)
    want = CONSTANTS.hbar * cfg.m * cfg.gamma_m * np.abs(omegas)
    assert np.allclose(got, want, rtol=1e-14)


def test_equipartition():
    """Long thermal trajectories must satisfy <x^2> = kB T / m omega_m^2."""
    cfg = lorentzian_cfg(T=0.1)
    p0 = CollapseParams(0.0, GRW_RC)
    sim = SimConfig(dt=1.5e-6, steps=131072, trajectories=24, seed=42)
    res = simulate_langevin(cfg, p0, SPHERE, sim, estimate_spectrum=False)
    tail = res.xs[:, res.xs.shape[1] // 3:]
    got = np.mean(tail ** 2)
    want = CONSTANTS.kB * cfg.T / (cfg.m * cfg.omega_m ** 2)
    # ~tens of correlation times per trajectory, 24 trajectories
    assert got == pytest.approx(want, rel=0.1)


def test_monte_carlo_matches_analytic_spectrum():
    """Welch average over many trajectories against the analytic curve,
    compared on log-spaced smoothed sub-bands."""
    cfg = lorentzian_cfg(T=0.1)
    p0 = CollapseParams(0.0, GRW_RC)
    sim = SimConfig(dt=1.5e-6, steps=65536, trajectories=200, seed=7)
    res = simulate_langevin(cfg, p0, SPHERE, sim, nperseg=32768)
    om = res.spectrum.omegas
    got = res.spectrum.values
    want = displacement_dns(cfg, p0, SPHERE, om).values

    lo = cfg.omega_m / 5.0
    hi = cfg.omega_m * 5.0
    edges = np.logspace(np.log10(lo), np.log10(hi), 13)
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (om >= a) & (om < b)
        assert np.any(sel)
        ratio = np.mean(got[sel]) / np.mean(want[sel])
        assert abs(ratio - 1.0) < 0.1


def test_spectrum_variance_normalization():
    """Integral of the estimated spectrum over omega/2pi must reproduce
    the time-domain variance (double-sided convention)."""
    cfg = lorentzian_cfg(T=0.1)
    sim = SimConfig(dt=1.5e-6, steps=131072, trajectories=16, seed=3)
    res = simulate_langevin(cfg, CollapseParams(0.0, GRW_RC), SPHERE, sim,
                            nperseg=16384)
    var_t = np.mean(res.xs[:, res.xs.shape[1] // 3:] ** 2)
    # double-sided: <x^2> = 2 * int_0^inf S dw / 2pi
    var_f = 2.0 * np.trapezoid(res.spectrum.values,
                               res.spectrum.omegas) / (2.0 * np.pi)
    assert var_f == pytest.approx(var_t, rel=0.05)


def test_determinism_and_trajectory_streams():
    cfg = lorentzian_cfg()
    sim = SimConfig(dt=1.5e-6, steps=4096, trajectories=3, seed=99)
    a = simulate_langevin(cfg, GRW, SPHERE, sim, estimate_spectrum=False)
    b = simulate_langevin(cfg, GRW, SPHERE, sim, estimate_spectrum=False)
    assert np.array_equal(a.xs, b.xs)
    # distinct per-trajectory streams
    assert not np.array_equal(a.xs[0], a.xs[1])


def test_unstable_step_raises():
    # gamma dt > 2 makes the explicit damping update divergent while the
    # oscillation itself stays resolved
    cfg = lorentzian_cfg(gamma_m=1e6)
    sim = SimConfig(dt=5e-6, steps=20000, trajectories=1, seed=1)
    with pytest.raises(UnstableStep), np.errstate(over="ignore",
                                                  invalid="ignore"):
        simulate_langevin(cfg, GRW, SPHERE, sim, estimate_spectrum=False)


def test_resolution_validation():
    cfg = lorentzian_cfg()
    with pytest.raises(ValueError):
        simulate_langevin(cfg, GRW, SPHERE,
                          SimConfig(dt=1e-3, steps=100, trajectories=1))


def test_trajectory_roundtrip(tmp_path):
    cfg = lorentzian_cfg()
    sim = SimConfig(dt=1.5e-6, steps=2048, trajectories=2, seed=5)
    res = simulate_langevin(cfg, GRW, SPHERE, sim, estimate_spectrum=False)
    path = tmp_path / "traj.bin"
    write_trajectories(path, res, config_text="sample config")
    times, xs, ps, meta = read_trajectories(path)
    assert np.array_equal(times, res.times)
    assert np.array_equal(xs, res.xs)
    assert np.array_equal(ps, res.ps)
    assert meta["seed"] == 5
    assert meta["dt"] == pytest.approx(1.5e-6)

    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"\x00" * 100)
    with pytest.raises(ValueError):
        read_trajectories(bad)
