"""Closed-form densities for constant-coefficient diffusion on x >= 0 with a
radiation (partially reflecting) boundary at x = 0.

The boundary condition is sigma p_x - (a + kappa) p = 0 at x = 0; kappa = 0 is
perfectly reflecting, kappa -> inf approaches perfectly absorbing. Initial
condition is a point mass at x0 > 0.

All exp * erfc products are evaluated through erfcx to avoid overflow for large
kappa or small t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erfcx

from .errors import ConfigError

__all__ = [
    "RobinParams1D",
    "bryan_density",
    "drift_density",
    "density",
    "density_dx",
    "survival_analytic",
]


@dataclass(frozen=True)
class RobinParams1D:
    """Constant coefficients for the half-line radiation-boundary problem."""

    sigma: float
    kappa: float
    x0: float
    drift: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.kappa < 0.0:
            raise ConfigError(f"kappa must be nonnegative, got {self.kappa}")
        if not self.x0 > 0.0:
            raise ConfigError(f"x0 must be positive, got {self.x0}")


def _gauss(u: np.ndarray, var2: float) -> np.ndarray:
    # exp(-u^2 / (2 var2)) / sqrt(2 pi var2) with var2 = 2 sigma t
    return np.exp(-u * u / (2.0 * var2)) / np.sqrt(2.0 * np.pi * var2)


def bryan_density(x, t: float, params: RobinParams1D) -> np.ndarray:
    """Density at time t for zero drift: image sum minus a boundary sink term."""
    if not t > 0.0:
        raise ConfigError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    sigma, kappa, x0 = params.sigma, params.kappa, params.x0
    var2 = 2.0 * sigma * t
    s = x + x0
    root = np.sqrt(4.0 * sigma * t)
    # sink = (kappa/sigma) exp(kappa (s + kappa t)/sigma) erfc((s + 2 kappa t)/root),
    # rewritten through erfcx: the remaining exponent is -s^2/(4 sigma t)
    sink = (kappa / sigma) * erfcx((s + 2.0 * kappa * t) / root) * np.exp(
        -s * s / (4.0 * sigma * t)
    )
    return _gauss(x - x0, var2) + _gauss(s, var2) - sink


def drift_density(x, t: float, params: RobinParams1D) -> np.ndarray:
    """Density at time t for constant drift a; reduces to bryan_density at a = 0."""
    if not t > 0.0:
        raise ConfigError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    sigma, kappa, x0, a = params.sigma, params.kappa, params.x0, params.drift
    var2 = 2.0 * sigma * t
    c = 2.0 * kappa + a
    root = np.sqrt(4.0 * sigma * t)
    arg = (x + x0 + c * t) / root
    # full sink prefactor exponent minus arg^2 collapses to
    # -((x + x0 + a t)^2 - 4 a x t) / (4 sigma t), which never overflows
    expo = -((x + x0 + a * t) ** 2 - 4.0 * a * x * t) / (4.0 * sigma * t)
    sink = (c / (2.0 * sigma)) * erfcx(arg) * np.exp(expo)
    image = np.exp(-a * x0 / sigma) * _gauss(x + x0 - a * t, var2)
    return _gauss(x - x0 - a * t, var2) + image - sink


def density(x, t: float, params: RobinParams1D) -> np.ndarray:
    """General constant-coefficient density (drift allowed)."""
    return drift_density(x, t, params)


def density_dx(x, t: float, params: RobinParams1D) -> np.ndarray:
    """Exact spatial derivative of density; satisfies
    sigma p_x = (a + kappa) p at x = 0."""
    if not t > 0.0:
        raise ConfigError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    sigma, kappa, x0, a = params.sigma, params.kappa, params.x0, params.drift
    var2 = 2.0 * sigma * t
    c = 2.0 * kappa + a
    root = np.sqrt(4.0 * sigma * t)
    arg = (x + x0 + c * t) / root
    expo = -((x + x0 + a * t) ** 2 - 4.0 * a * x * t) / (4.0 * sigma * t)
    sink = (c / (2.0 * sigma)) * erfcx(arg) * np.exp(expo)
    u1 = x - x0 - a * t
    u2 = x + x0 - a * t
    g1 = _gauss(u1, var2)
    g2 = np.exp(-a * x0 / sigma) * _gauss(u2, var2)
    # d/dx of the sink: (a + kappa)/sigma times the sink itself, minus the erfc
    # derivative, whose exponential combines with the prefactor into exp(expo)
    d_sink = (a + kappa) / sigma * sink - (c / sigma) * np.exp(expo) / np.sqrt(
        4.0 * np.pi * sigma * t
    )
    return -u1 / var2 * g1 - u2 / var2 * g2 - d_sink


def survival_analytic(t: float, params: RobinParams1D) -> float:
    """Survival probability: adaptive quadrature of the density over the half-line."""
    if not t > 0.0:
        raise ConfigError(f"t must be positive, got {t}")
    sigma, x0, a = params.sigma, params.x0, params.drift
    upper = max(x0 + a * t, x0, 0.0) + 12.0 * np.sqrt(sigma * t)
    val, _ = quad(
        lambda u: float(drift_density(u, t, params)),
        0.0,
        upper,
        epsabs=1e-10,
        epsrel=1e-10,
        limit=200,
    )
    return float(val)
