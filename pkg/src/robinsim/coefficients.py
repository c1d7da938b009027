"""Drift and diffusion coefficient models.

1D models bundle scalar fields a(x, t) and sigma(x, t); half-space models bundle a
drift field with a constant SPD diffusion tensor and its factor B (sigma = B B^T).
Built-in field families are registered by name so configs can reference them; custom
families can be added via register_family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError

# central-difference step for sigma_x when a family has no closed-form slope
_FD_STEP = 1e-6


@dataclass(frozen=True)
class ConstantField:
    """Field with a single value everywhere."""

    value: float

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape, self.value)


@dataclass(frozen=True)
class LinearField:
    """Field intercept + slope * x, time-independent."""

    intercept: float
    slope: float

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        return self.intercept + self.slope * x


_FAMILIES: dict[str, Callable[..., object]] = {
    "constant": lambda *p: ConstantField(*p),
    "linear": lambda *p: LinearField(*p),
}


def register_family(name: str, ctor: Callable[..., object]) -> None:
    """Register a field family constructor under a config-visible name."""
    if not name or not isinstance(name, str):
        raise ConfigError("family name must be a non-empty string")
    _FAMILIES[name] = ctor


def make_field(family: str, params: Sequence[float]):
    if family not in _FAMILIES:
        raise ConfigError(
            f"unknown coefficient family {family!r}; registered: {sorted(_FAMILIES)}"
        )
    try:
        return _FAMILIES[family](*params)
    except TypeError as exc:
        raise ConfigError(f"bad parameter count for family {family!r}: {exc}") from exc


def _validate_sigma_field(sigma) -> None:
    # built-in families are checked structurally; custom fields are probed at run time
    if isinstance(sigma, ConstantField):
        if not sigma.value > 0.0:
            raise ConfigError(f"sigma must be positive, got {sigma.value}")
    elif isinstance(sigma, LinearField):
        # must stay positive on the half-line x >= 0
        if not sigma.intercept > 0.0 or sigma.slope < 0.0:
            raise ConfigError(
                "linear sigma requires intercept > 0 and slope >= 0 on the half-line, "
                f"got intercept={sigma.intercept}, slope={sigma.slope}"
            )


@dataclass(frozen=True)
class CoefficientModel1D:
    """Scalar drift and diffusion fields on the half-line x >= 0."""

    drift: Callable
    sigma: Callable

    def __post_init__(self):
        _validate_sigma_field(self.sigma)

    @property
    def is_constant(self) -> bool:
        return isinstance(self.drift, ConstantField) and isinstance(
            self.sigma, ConstantField
        )


def constant_model_1d(drift: float, sigma: float) -> CoefficientModel1D:
    return CoefficientModel1D(drift=ConstantField(drift), sigma=ConstantField(sigma))


def eval_drift(model: CoefficientModel1D, x, t):
    return np.asarray(model.drift(x, t), dtype=float)


def eval_sigma(model: CoefficientModel1D, x, t):
    return np.asarray(model.sigma(x, t), dtype=float)


def sigma_dx(model: CoefficientModel1D, x, t):
    """d sigma / dx; exact for the built-in families, central difference otherwise."""
    if isinstance(model.sigma, ConstantField):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape)
    if isinstance(model.sigma, LinearField):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape, model.sigma.slope)
    x = np.asarray(x, dtype=float)
    h = _FD_STEP
    return (np.asarray(model.sigma(x + h, t), float)
            - np.asarray(model.sigma(x - h, t), float)) / (2.0 * h)


def factor_diffusion(sigma: np.ndarray, method: str = "cholesky") -> np.ndarray:
    """Factor an SPD tensor as sigma = B B^T.

    method="cholesky" gives the lower-triangular factor, method="sqrtm" the
    symmetric PSD square root.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ConfigError(f"diffusion tensor must be square, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-12):
        raise ConfigError("diffusion tensor must be symmetric")
    if method == "cholesky":
        try:
            return np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError as exc:
            raise ConfigError(f"diffusion tensor is not positive definite: {exc}") from exc
    if method == "sqrtm":
        w, v = np.linalg.eigh(sigma)
        if np.min(w) <= 0.0:
            raise ConfigError(
                f"diffusion tensor is not positive definite (min eigenvalue {np.min(w):g})"
            )
        return (v * np.sqrt(w)) @ v.T
    raise ConfigError(f"unknown factorization method {method!r}")


@dataclass(frozen=True, eq=False)
class HalfSpaceModel:
    """Constant SPD diffusion tensor with drift field on the half-space x1 > 0.

    drift may be a constant vector or a callable a(x, t) -> (m, d) array for
    x of shape (m, d).
    """

    sigma: np.ndarray
    drift: object = None  # None = zero drift, ndarray = constant, callable otherwise
    factor_method: str = "cholesky"
    B: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        object.__setattr__(self, "sigma", sigma)
        B = factor_diffusion(sigma, self.factor_method)
        if not np.allclose(B @ B.T, sigma, rtol=0.0, atol=1e-12):
            raise ConfigError("diffusion factor check B B^T = sigma failed")
        object.__setattr__(self, "B", B)
        drift = self.drift
        if drift is not None and not callable(drift):
            drift = np.asarray(drift, dtype=float)
            if drift.shape != (self.dim,):
                raise ConfigError(
                    f"constant drift must have shape ({self.dim},), got {drift.shape}"
                )
            object.__setattr__(self, "drift", drift)

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    @property
    def sigma_n(self) -> float:
        """Normal diffusion coefficient n^T sigma n for the boundary normal e1."""
        return float(self.sigma[0, 0])

    def eval_drift(self, x: np.ndarray, t: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.drift is None:
            return np.zeros(x.shape)
        if callable(self.drift):
            return np.asarray(self.drift(x, t), dtype=float)
        return np.broadcast_to(self.drift, x.shape)
