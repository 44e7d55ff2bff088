"""Adaptive Gauss-Kronrod integrator against known integrals."""

import math

import numpy as np
import pytest

from cslbounds.quadrature import (NonConvergence, QuadratureSpec,
                                  integrate_1d, integrate_k3)


def test_polynomial_is_exact():
    val, err = integrate_1d(lambda x: 3.0 * x ** 2, 0.0, 2.0)
    assert val == pytest.approx(8.0, rel=1e-14)
    assert err <= 1e-12


def test_gaussian_moment_1d():
    # int_0^inf x^2 e^{-x^2} dx = sqrt(pi)/4, truncated at 10
    val, _ = integrate_1d(lambda x: x * x * np.exp(-x * x), 0.0, 10.0,
                          rel_tol=1e-10)
    assert val == pytest.approx(math.sqrt(math.pi) / 4.0, rel=1e-10)


def test_oscillatory_with_panel_cap():
    # int_0^2pi sin^2(50 x) dx = pi; needs the panel width cap
    val, _ = integrate_1d(lambda x: np.sin(50.0 * x) ** 2, 0.0,
                          2.0 * math.pi, rel_tol=1e-9,
                          max_panel_width=math.pi / 50.0)
    assert val == pytest.approx(math.pi, rel=1e-9)


def test_zero_integrand_returns_zero():
    val, err = integrate_1d(lambda x: np.zeros_like(x), 0.0, 1.0)
    assert val == 0.0
    assert err == 0.0


def test_linearity_in_integrand():
    f = lambda x: np.exp(-x) * np.cos(3.0 * x)
    v1, _ = integrate_1d(f, 0.0, 5.0, rel_tol=1e-10)
    v7, _ = integrate_1d(lambda x: 7.0 * f(x), 0.0, 5.0, rel_tol=1e-10)
    assert v7 == pytest.approx(7.0 * v1, rel=2e-10)


def test_nonconvergence_raises_with_estimate():
    # integrable singularity with a tiny evaluation budget
    f = lambda x: 1.0 / np.sqrt(np.abs(x - 0.3) + 1e-300)
    with pytest.raises(NonConvergence) as exc:
        integrate_1d(f, 0.0, 1.0, rel_tol=1e-12, max_evals=500)
    assert math.isfinite(exc.value.estimate)
    assert exc.value.error > 0


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=-1e-6)
    with pytest.raises(ValueError):
        QuadratureSpec(cutoff_factor=2.0)


def test_k3_isotropic_gaussian_moment():
    # int d^3k e^{-k^2 rC^2} k_x^2 with angular average k^2/3:
    # = (1/3) * 4pi int k^4 e^{-k^2 rC^2} dk = pi^{3/2} / (2 rC^5)
    rC = 0.7
    f = lambda k: (k * k / 3.0) * np.exp(-(k * rC) ** 2)
    val, _ = integrate_k3(f, rC, symmetry="isotropic")
    assert val == pytest.approx(math.pi ** 1.5 / (2.0 * rC ** 5), rel=1e-6)


def test_k3_symmetry_routes_agree():
    # same integrand through the axial and general 3D routes
    rC = 1.0
    want = math.pi ** 1.5 / (2.0 * rC ** 5)

    def f_axial(kperp, kpar):
        k2 = kperp * kperp + kpar * kpar
        return np.exp(-k2 * rC * rC) * kpar * kpar

    val_ax, _ = integrate_k3(f_axial, rC, symmetry="axial")
    assert val_ax == pytest.approx(want, rel=1e-6)

    def f3(kx, ky, kz):
        k2 = kx * kx + ky * ky + kz * kz
        return np.exp(-k2 * rC * rC) * kx * kx

    val_3d, _ = integrate_k3(f3, rC, symmetry="none")
    assert val_3d == pytest.approx(want, rel=1e-5)


def test_k3_cutoff_insensitivity():
    rC = 0.5
    f = lambda k: (k * k / 3.0) * np.exp(-(k * rC) ** 2)
    v8, _ = integrate_k3(f, rC, QuadratureSpec(cutoff_factor=8.0),
                         symmetry="isotropic")
    v16, _ = integrate_k3(f, rC, QuadratureSpec(cutoff_factor=16.0),
                          symmetry="isotropic")
    assert abs(v16 - v8) / v8 < 1e-10


def test_determinism():
    f = lambda x: np.sin(x) * np.exp(-0.1 * x)
    a = integrate_1d(f, 0.0, 30.0, rel_tol=1e-9)
    b = integrate_1d(f, 0.0, 30.0, rel_tol=1e-9)
    assert a == b
