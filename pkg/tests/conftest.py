"""Shared fixtures. The heavy ensemble/PDE runs are session-scoped so each
expensive computation happens once; everything runs at the library's default
seed, so every number asserted downstream is reproducible bit for bit.
"""

import numpy as np
import pytest

from robinsim.analytic1d import RobinParams1D, survival_analytic
from robinsim.blverify import PropagatorInput, apply_propagator_1d
from robinsim.coefficients import HalfSpaceModel, constant_model_1d
from robinsim.euler1d import (
    Boundary1D,
    SimConfig1D,
    default_bin_edges,
    run_ensemble_1d,
)
from robinsim.eulernd import BoundarySpecNd, SimConfigNd, kappa_to_P_nd, run_ensemble_nd
from robinsim.fpe import FpeConfig, solve_fpe_2d

from reference_values import P_STD, SIGMA_2D, X0_2D


@pytest.fixture(scope="session")
def std_params():
    """sigma = kappa = x0 = 1, no drift: the workhorse 1D configuration."""
    return RobinParams1D(sigma=1.0, kappa=1.0, x0=1.0, drift=0.0)


@pytest.fixture(scope="session")
def std_survival(std_params):
    return survival_analytic(1.0, std_params)


@pytest.fixture(scope="session")
def table1_results():
    """1D survival runs at n=1e6 for dt in {1e-1, 1e-2, 1e-3}."""
    model = constant_model_1d(sigma=1.0, drift=0.0)
    out = {}
    for dt in (1e-1, 1e-2, 1e-3):
        cfg = SimConfig1D(
            model=model, boundary=Boundary1D(P=P_STD), x0=1.0, T=1.0, dt=dt, n=1_000_000
        )
        out[dt] = run_ensemble_1d(cfg)
    return out


@pytest.fixture(scope="session")
def reflecting_config():
    model = constant_model_1d(sigma=1.0, drift=-1.0)
    return SimConfig1D(
        model=model,
        boundary=Boundary1D(P=0.0),
        x0=1.0,
        T=1.0,
        dt=1e-2,
        n=10_000_000,
    )


@pytest.fixture(scope="session")
def reflecting_result(reflecting_config):
    """Pure-reflection run with drift toward the wall: n=1e7, dt=1e-2."""
    return run_ensemble_1d(reflecting_config)


@pytest.fixture(scope="session")
def reflecting_exact_law(reflecting_config):
    """The exact time-T law of the reflected scheme, by iterating its one-step
    kernel (drifted Gaussian plus mirror image) on a fine grid; noise-free
    reference for what the histogram estimates."""
    cfg = reflecting_config
    sigma, a, dt = 1.0, -1.0, cfg.dt
    dx = 0.005  # == sqrt(sigma*dt)/20, the propagator's resolution bound
    x = np.arange(0.0, 12.0 + dx / 2, dx)
    sd = np.sqrt(2.0 * sigma * dt)
    # after one step from the point mass at x0 the law is an explicit
    # reflected Gaussian; further steps apply the kernel numerically
    q = np.exp(-((x - cfg.x0 - a * dt) ** 2) / (2 * sd * sd))
    q += np.exp(-((x + cfg.x0 + a * dt) ** 2) / (2 * sd * sd))
    q /= sd * np.sqrt(2.0 * np.pi)
    for _ in range(cfg.n_steps - 1):
        q = apply_propagator_1d(
            PropagatorInput(x=x, p=q, sigma=sigma, drift=a, P=0.0, dt=dt)
        )
    edges = default_bin_edges(cfg)
    width = edges[1] - edges[0]
    binned = np.empty(edges.size - 1)
    for i in range(binned.size):
        sel = (x >= edges[i] - 1e-12) & (x <= edges[i + 1] + 1e-12)
        binned[i] = np.trapezoid(q[sel], x[sel]) / width
    return {"x": x, "q": q, "edges": edges, "binned": binned}


@pytest.fixture(scope="session")
def fine1d_result():
    """Small-step 1D run (dt=1e-4) with a hybrid histogram: 5e-4-wide bins
    across the boundary layer, 0.07-wide bins beyond it."""
    fine = np.linspace(0.0, 0.12, 241)
    coarse = np.linspace(0.12, 7.0, 99)
    edges = np.concatenate([fine, coarse[1:]])
    model = constant_model_1d(sigma=1.0, drift=0.0)
    cfg = SimConfig1D(
        model=model,
        boundary=Boundary1D(P=P_STD),
        x0=1.0,
        T=1.0,
        dt=1e-4,
        n=1_000_000,
        bin_edges=edges,
        checkpoints=(0.25, 0.5, 0.75),
    )
    return run_ensemble_1d(cfg)


def _nd_config(drift, rule, dt, n):
    model = HalfSpaceModel(
        sigma=SIGMA_2D, drift=None if drift is None else np.asarray(drift, float)
    )
    return SimConfigNd(
        model=model,
        boundary=BoundarySpecNd(P=kappa_to_P_nd(1.0, SIGMA_2D), rule=rule),
        x0=X0_2D,
        T=0.5,
        dt=dt,
        n=n,
        x_edges=np.linspace(0.0, 3.0, 201),
        y_edges=np.linspace(-3.0, 3.0, 201),
    )


@pytest.fixture(scope="session")
def nd_conormal():
    return run_ensemble_nd(_nd_config(None, "conormal", 1e-3, 1_000_000))


@pytest.fixture(scope="session")
def nd_normal():
    return run_ensemble_nd(_nd_config(None, "normal", 1e-3, 1_000_000))


@pytest.fixture(scope="session")
def nd_drift():
    return run_ensemble_nd(_nd_config((-1.0, 0.0), "conormal", 1e-3, 1_000_000))


@pytest.fixture(scope="session")
def nd_fine():
    return run_ensemble_nd(_nd_config(None, "conormal", 1e-4, 500_000))


def _fpe2d(drift, ic="exact", dx=0.02):
    return solve_fpe_2d(
        FpeConfig(
            dim=2,
            sigma=SIGMA_2D,
            drift=None if drift is None else np.asarray(drift, float),
            kappa=1.0,
            x0=X0_2D,
            T=0.5,
            dx=dx,
            ic=ic,
        )
    )


@pytest.fixture(scope="session")
def fpe2d_aniso():
    """Anisotropic half-space reference solution, dx=0.02."""
    return _fpe2d(None)


@pytest.fixture(scope="session")
def fpe2d_drift():
    return _fpe2d((-1.0, 0.0))


