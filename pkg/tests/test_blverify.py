import numpy as np
import pytest
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from robinsim.analytic1d import RobinParams1D, density
from robinsim.blverify import (
    PropagatorInput,
    apply_propagator_1d,
    boundary_derivative_check,
    flux_integral,
)
from robinsim.errors import ConfigError
from robinsim.fpe import FpeConfig, _apply_tridiag, _banded, _operator_1d

P_STD = float(np.sqrt(np.pi))


def _grid(dt, L, sigma=1.0):
    dx = np.sqrt(sigma * dt) / 20.0
    return np.arange(0.0, L + dx / 2.0, dx)


def test_input_validation():
    x = _grid(1e-3, 1.0)
    p = np.ones_like(x)
    with pytest.raises(ConfigError, match="uniform"):
        PropagatorInput(x=np.array([0.0, 0.1, 0.15]), p=np.ones(3), sigma=1.0, P=0.0, dt=1.0)
    with pytest.raises(ConfigError, match="start at the boundary"):
        PropagatorInput(x=x + 0.5, p=p, sigma=1.0, P=0.0, dt=1e-3)
    with pytest.raises(ConfigError, match="too coarse"):
        PropagatorInput(x=np.linspace(0.0, 1.0, 101), p=np.ones(101), sigma=1.0, P=0.0, dt=1e-3)
    with pytest.raises(ConfigError, match="nonnegative"):
        PropagatorInput(x=x, p=p - 2.0, sigma=1.0, P=0.0, dt=1e-3)
    with pytest.raises(ConfigError, match="exceeds 1"):
        PropagatorInput(x=x, p=p, sigma=1.0, P=40.0, dt=1e-3)


def test_free_space_propagation():
    # symmetric bump far from the wall: one step equals exact heat spreading
    dt = 1e-3
    x = _grid(dt, 4.0)
    w0 = 0.1
    p = np.exp(-((x - 2.0) ** 2) / (2 * w0 * w0)) / np.sqrt(2 * np.pi * w0 * w0)
    out = apply_propagator_1d(PropagatorInput(x=x, p=p, sigma=1.0, P=0.0, dt=dt))
    var = w0 * w0 + 2.0 * dt
    exact = np.exp(-((x - 2.0) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
    assert np.max(np.abs(out - exact)) < 1e-8


def test_reflecting_conserves_mass():
    dt = 1e-3
    x = _grid(dt, 4.0)
    p = np.exp(-((x - 1.0) ** 2) / 0.08) / np.sqrt(0.08 * np.pi)
    out = apply_propagator_1d(PropagatorInput(x=x, p=p, sigma=1.0, P=0.0, dt=dt))
    assert abs(np.trapezoid(out, x) - np.trapezoid(p, x)) < 1e-8
    assert np.min(out) >= 0.0  # positivity


def test_advance_tracks_closed_form():
    # one step from the exact density lands on the exact density at t + dt:
    # O(dt) in the interior, O(sqrt(dt)) inside the boundary layer where the
    # scheme flattens the profile
    params = RobinParams1D(sigma=1.0, kappa=1.0, x0=1.0)
    for dt in (1e-3, 1e-4):
        x = _grid(dt, 8.0)
        p = np.clip(density(x, 1.0, params), 0.0, None)
        out = apply_propagator_1d(PropagatorInput(x=x, p=p, sigma=1.0, P=P_STD, dt=dt))
        err = np.abs(out - density(x, 1.0 + dt, params))
        interior = x > 5.0 * np.sqrt(dt)
        assert np.max(err[interior]) < 2.0 * dt
        assert np.max(err) < 0.1 * np.sqrt(dt)


def test_mass_loss_equals_flux_times_dt():
    params = RobinParams1D(sigma=1.0, kappa=1.0, x0=1.0)
    for dt in (1e-3, 1e-4):
        x = _grid(dt, 8.0)
        p = np.clip(density(x, 1.0, params), 0.0, None)
        inp = PropagatorInput(x=x, p=p, sigma=1.0, P=P_STD, dt=dt)
        out = apply_propagator_1d(inp)
        dm = np.trapezoid(out, x) - np.trapezoid(p, x)
        assert dm < 0.0
        assert abs(dm + flux_integral(inp) * dt) < dt ** 1.5


def test_interior_agrees_with_crank_nicolson_step():
    # away from the wall, one propagator application and one CN step of the
    # matching grid operator agree to far better than dt^2
    dt = 1e-3
    dx = np.sqrt(dt) / 20.0
    params = RobinParams1D(sigma=1.0, kappa=1.0, x0=1.0)
    x = np.arange(0.0, 8.0 + dx / 2.0, dx)
    p = np.clip(density(x, 1.0, params), 0.0, None)
    out = apply_propagator_1d(PropagatorInput(x=x, p=p, sigma=1.0, P=P_STD, dt=dt))

    M = int(round(8.0 / dx))
    xc = (np.arange(M) + 0.5) * dx
    cfg = FpeConfig(dim=1, kappa=1.0, x0=1.0, T=1.0, dx=dx, sigma=1.0)
    lower, diag, upper, _ = _operator_1d(cfg, xc, dx)
    u0 = density(xc, 1.0, params)
    rhs = _apply_tridiag(lower, diag, upper, u0) * (dt / 2.0) + u0
    u1 = solve_banded((1, 1), _banded(lower, diag, upper, -dt / 2.0, 1.0), rhs)

    probe = np.linspace(0.5, 3.0, 400)
    diff = CubicSpline(x, out)(probe) - CubicSpline(xc, u1)(probe)
    assert np.max(np.abs(diff)) < dt * dt


def test_flux_constant_profile_recovers_kappa():
    # P sqrt(sigma) c int erfc = kappa c; quadrature-exact
    dt = 1e-4
    for sigma, c in ((1.0, 1.0), (4.0, 0.37), (0.25, 2.0)):
        x = _grid(dt, 0.5, sigma)
        inp = PropagatorInput(x=x, p=np.full(x.size, c), sigma=sigma, P=P_STD, dt=dt)
        kappa = P_STD * np.sqrt(sigma) / np.sqrt(np.pi)
        assert flux_integral(inp) == pytest.approx(kappa * c, abs=1e-8)


def test_flux_zero_when_reflecting():
    dt = 1e-4
    x = _grid(dt, 0.5)
    inp = PropagatorInput(x=x, p=np.ones_like(x), sigma=1.0, P=0.0, dt=dt)
    assert flux_integral(inp) == 0.0


def test_flux_from_sampled_boundary_layer(fine1d_result, std_params):
    # empirical near-wall profile from the dt=1e-4 ensemble: the flux integral
    # recovers kappa times the true wall density within 10%
    edges = fine1d_result.bin_edges
    fine = edges[:241]  # the 5e-4-wide bins covering [0, 0.12]
    counts = fine1d_result.counts[:240]
    dens = counts / (fine1d_result.n_total * np.diff(fine))
    inp = PropagatorInput(x=fine[:-1], p=dens, sigma=1.0, P=P_STD, dt=1e-4)
    flux = flux_integral(inp)
    expected = 1.0 * float(density(0.0, 1.0, std_params))  # kappa = 1
    assert flux == pytest.approx(expected, rel=0.10)


def test_wall_slope_prediction_flat_input():
    # flat density: predicted slope P / sqrt(4 pi); measured within 5%
    dt = 1e-4
    x = _grid(dt, 0.5)
    report = boundary_derivative_check(
        PropagatorInput(x=x, p=np.ones_like(x), sigma=1.0, P=P_STD, dt=dt)
    )
    assert report["predicted"] == pytest.approx(0.5, abs=1e-15)
    assert abs(report["ratio"] - 1.0) < 0.05


def test_wall_slope_scales_linearly_in_P():
    dt = 1e-4
    x = _grid(dt, 0.5)
    flat = np.ones_like(x)
    r1 = boundary_derivative_check(PropagatorInput(x=x, p=flat, sigma=1.0, P=0.5 * P_STD, dt=dt))
    r2 = boundary_derivative_check(PropagatorInput(x=x, p=flat, sigma=1.0, P=P_STD, dt=dt))
    assert r2["measured"] / r1["measured"] == pytest.approx(2.0, rel=0.02)


def test_wall_slope_vanishes_when_reflecting():
    # P=0 output is even about the wall: slope tiny relative to the interior
    dt = 1e-4
    x = _grid(dt, 1.0)
    p = np.exp(-((x - 0.15) ** 2) / 0.005)
    report = boundary_derivative_check(PropagatorInput(x=x, p=p, sigma=1.0, P=0.0, dt=dt))
    assert np.isnan(report["ratio"])
    assert abs(report["measured"]) < 1e-3 * report["interior_max_slope"]
