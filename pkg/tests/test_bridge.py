"""Windowed transforms, wave solver, elliptic slope, decay check."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import random_stiffness

from surfimp import (
    CflViolation,
    DirectionPair,
    MaterialParams,
    Medium1D,
    TimeSeries,
    ValidationError,
    bridge_check,
    build_symbol,
    chi1,
    elliptic_slope,
    factor_eigen,
    finite_laplace,
    from_isotropic,
    halfspace_dn_action,
    impedance,
    simulate_wave_1d,
    solve_wave_1d,
)


def test_chi1_closed_form():
    # windowed transform of t^2 over [0, 10] at tau = 1
    want = 2.0 - 122.0 * np.exp(-10.0)
    assert chi1(1.0, 10.0) == pytest.approx(want, abs=1e-14)
    # quadrature cross-check at another point
    from scipy.integrate import quad
    val, _ = quad(lambda t: t * t * np.exp(-2.0 * t), 0.0, 5.0,
                  epsabs=1e-14, epsrel=1e-14)
    assert chi1(2.0, 5.0) == pytest.approx(val, abs=1e-12)


def test_finite_laplace_constant():
    tau, T = 1.5, 2.0
    ts = TimeSeries.sampled(lambda t: np.ones_like(t), dt=T / 2048, n=2049)
    want = (1.0 - np.exp(-tau * T)) / tau
    assert finite_laplace(ts, tau) == pytest.approx(want, abs=1e-6)


def test_timeseries_validation():
    with pytest.raises(ValidationError):
        TimeSeries(dt=-0.1, values=np.zeros(4))
    with pytest.raises(ValidationError):
        TimeSeries(dt=0.1, values=np.zeros(1))


def test_dn_action_isotropic_shear():
    mat = MaterialParams(from_isotropic(1.0, 1.0), rho=1.0)
    psi = np.array([1.0, 0.0, 0.0])
    out = halfspace_dn_action(mat, np.array([0.0, 1.0]), 0.7, psi)
    np.testing.assert_allclose(out, [np.sqrt(2.0), 0.0, 0.0], atol=1e-10)
    # scale invariance in the depth parameter
    out2 = halfspace_dn_action(mat, np.array([0.0, 1.0]), 2.3, psi)
    np.testing.assert_allclose(out, out2, atol=1e-12)


def test_dn_action_matches_decaying_solution(rng):
    # independent check: build the decaying solution v(y) = e^{i S0 y/h} psi
    # explicitly and read off its boundary traction -(h D v'(0) + i R^T v(0))
    # with a fourth order difference for v'(0)
    c = random_stiffness(rng)
    mat = MaterialParams(c, rho=1.3)
    xi = rng.standard_normal(2)
    pair = DirectionPair(n=np.array([0.0, 0.0, 1.0]),
                         m=np.array([xi[0], xi[1], 0.0]))
    st = build_symbol(c, pair)
    fact = factor_eigen(st, 1.3)
    h = 0.8
    psi = rng.standard_normal(3) + 1j * rng.standard_normal(3)

    def v(y: float) -> np.ndarray:
        return expm(1j * fact.s0 * y / h) @ psi

    step = 1e-3
    vp0 = (-v(2 * step) + 8 * v(step) - 8 * v(-step) + v(-2 * step)) / (12 * step)
    traction = -(h * st.d @ vp0 + 1j * st.r.T @ v(0.0))
    want = impedance(st, 1.3).z @ psi
    np.testing.assert_allclose(traction, want, atol=1e-6)
    got = halfspace_dn_action(mat, xi, h, psi)
    np.testing.assert_allclose(got, want, atol=1e-8)


def test_traction_against_dalembert():
    # homogeneous string, c = 2: before any reflection the boundary
    # traction is -rho c f'(t)
    med = Medium1D.homogeneous(rho=2.0, kappa=8.0, L=50.0)
    T = 4.0
    f = TimeSeries.sampled(lambda t: np.exp(-40.0 * (t - 1.5) ** 2),
                           dt=T / 512, n=513)
    tr = solve_wave_1d(med, f, cells=4000)
    ts = tr.times
    fprime = -80.0 * (ts - 1.5) * np.exp(-40.0 * (ts - 1.5) ** 2)
    want = -2.0 * 2.0 * fprime
    err = np.abs(tr.values - want).max() / np.abs(want).max()
    assert err < 5e-3


def test_cfl_guard():
    med = Medium1D.homogeneous(rho=1.0, kappa=4.0, L=10.0)   # c = 2
    f = TimeSeries.sampled(lambda t: t, dt=0.1, n=11)
    with pytest.raises(CflViolation):
        solve_wave_1d(med, f, cells=100, dt=0.09, refine=False)
    tr = solve_wave_1d(med, f, cells=100, dt=0.09, refine=True)
    assert tr.dt <= 0.045 + 1e-12


def test_piecewise_medium_lookup():
    med = Medium1D(edges=np.array([0.0, 1.0, 3.0]),
                   rho_vals=np.array([1.0, 2.0]),
                   kappa_vals=np.array([4.0, 1.0]))
    assert med.L == pytest.approx(3.0)
    assert med.rho_at(0.5) == pytest.approx(1.0)
    assert med.rho_at(2.0) == pytest.approx(2.0)
    assert med.kappa_at(0.5) == pytest.approx(4.0)
    assert med.cmax == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        Medium1D(edges=np.array([0.0, 1.0]), rho_vals=np.array([-1.0]),
                 kappa_vals=np.array([1.0]))


def test_energy_identity_second_order():
    med = Medium1D.homogeneous(rho=1.0, kappa=1.0, L=10.0)
    T = 3.0
    errs = []
    for cells in (400, 800):
        f = TimeSeries.sampled(lambda t: np.sin(np.pi * t / T) ** 2 * t,
                               dt=T / 256, n=257)
        run = simulate_wave_1d(med, f, cells=cells)
        tr = run.traction
        fprime = np.gradient(run.boundary.values, tr.dt)
        nkeep = int(round(run.energy_time / tr.dt)) + 1
        work = 2.0 * np.trapezoid(-tr.values[:nkeep] * fprime[:nkeep],
                                  dx=tr.dt)
        errs.append(abs(run.energy - work))
    order = np.log2(errs[0] / errs[1])
    assert order > 1.9


def test_elliptic_slope_homogeneous():
    # kappa w'(0) = -kappa tau coth(tau L) for constant coefficients
    med = Medium1D.homogeneous(rho=1.0, kappa=2.0, L=8.0)
    tau = 1.5
    tau_eff = tau * np.sqrt(1.0 / 2.0)   # sqrt(rho / kappa) scaling
    want = -2.0 * tau_eff / np.tanh(tau_eff * 8.0)
    got = elliptic_slope(med, tau, cells=2000)
    assert got == pytest.approx(want, rel=1e-5)


def test_bridge_check_decays():
    med = Medium1D.homogeneous(rho=1.0, kappa=1.0, L=12.0)
    rep = bridge_check(med, 2.0, [2.0, 4.0, 6.0], cells=1200)
    assert rep.ok
    assert rep.gaps[0] > rep.gaps[1] > rep.gaps[2]
    with pytest.raises(ValidationError):
        bridge_check(med, 2.0, [2.0, 4.0], cells=400)
    with pytest.raises(ValidationError):
        bridge_check(med, -1.0, [2.0, 4.0, 6.0], cells=400)
