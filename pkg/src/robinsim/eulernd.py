"""Euler scheme on the half-space x1 > 0 with a partially reflecting boundary.

Proposals use a factor B of the diffusion tensor, x' = x + a(x,t) dt +
sqrt(2 dt) B z. A proposal with x'_1 < 0 terminates with probability
P sqrt(dt), with P evaluated at the normal projection (0, x'_2, ..., x'_d);
otherwise it is reflected along a direction v with v_1 > 0, which maps x'_1 to
-x'_1 exactly and shifts the tangential components by -2 x'_1 v_k / v_1.
Reflecting along the co-normal v = sigma n / |sigma n| realizes the radiation
condition kappa = P sqrt(sigma_n) / sqrt(pi) with sigma_n = n^T sigma n;
reflecting along the normal is only equivalent when n is an eigenvector of
sigma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._ensemble import DEFAULT_SEED, block_count, block_rng, map_blocks
from .coefficients import HalfSpaceModel
from .errors import ConfigError, NumericError
from .euler1d import _check_step_grid

__all__ = [
    "BoundarySpecNd",
    "SimConfigNd",
    "EnsembleResultNd",
    "kappa_to_P_nd",
    "conormal_direction",
    "reflect_oblique",
    "step_nd",
    "run_ensemble_nd",
]


def kappa_to_P_nd(kappa: float, sigma: np.ndarray) -> float:
    """Termination amplitude for radiation coefficient kappa on the face x1 = 0."""
    sigma = np.asarray(sigma, dtype=float)
    if kappa < 0.0:
        raise ConfigError(f"kappa must be nonnegative, got {kappa}")
    sigma_n = float(sigma[0, 0])
    if not sigma_n > 0.0:
        raise ConfigError(f"normal diffusion sigma_n must be positive, got {sigma_n}")
    return kappa * np.sqrt(np.pi) / np.sqrt(sigma_n)


def conormal_direction(sigma: np.ndarray) -> np.ndarray:
    """Unit co-normal sigma n / |sigma n| for the inward normal n = e1."""
    sigma = np.asarray(sigma, dtype=float)
    v = sigma[:, 0].astype(float)
    norm = np.linalg.norm(v)
    if not norm > 0.0:
        raise ConfigError("sigma n vanishes; no co-normal direction")
    v = v / norm
    if not v[0] > 0.0:
        raise ConfigError(f"co-normal has v1 = {v[0]:g} <= 0; sigma is not admissible")
    return v


def reflect_oblique(x_prime: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Reflect crossed proposals (x'_1 < 0) along v: x'' = x' - (2 x'_1 / v_1) v.

    The first component is assigned exactly -x'_1. Accepts a single point (d,)
    or a batch (m, d).
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ConfigError(f"reflection direction must be a vector, got shape {v.shape}")
    if v[0] == 0.0:
        raise ConfigError("reflection direction has v1 = 0")
    x_prime = np.asarray(x_prime, dtype=float)
    single = x_prime.ndim == 1
    xb = np.atleast_2d(x_prime)
    x1 = xb[:, 0].copy()
    out = xb - (2.0 * x1 / v[0])[:, None] * v[None, :]
    out[:, 0] = -x1
    return out[0] if single else out


@dataclass(frozen=True, eq=False)
class BoundarySpecNd:
    """Termination amplitude (constant or field over boundary points) plus a
    reflection rule: co-normal (default), normal, or a custom direction."""

    P: float | Callable = 0.0
    rule: str = "conormal"
    v: np.ndarray | None = None

    def __post_init__(self):
        if self.rule not in ("conormal", "normal", "custom"):
            raise ConfigError(f"unknown reflection rule {self.rule!r}")
        if self.rule == "custom":
            if self.v is None:
                raise ConfigError("custom reflection rule requires a direction v")
            v = np.asarray(self.v, dtype=float)
            norm = np.linalg.norm(v)
            if not norm > 0.0:
                raise ConfigError("custom reflection direction must be nonzero")
            v = v / norm
            if not v[0] > 0.0:
                raise ConfigError(f"reflection direction needs v1 > 0, got v1 = {v[0]:g}")
            object.__setattr__(self, "v", v)
        elif self.v is not None:
            raise ConfigError(f"rule {self.rule!r} does not take an explicit direction")
        if not callable(self.P) and self.P < 0.0:
            raise ConfigError(f"P must be nonnegative, got {self.P}")

    def direction(self, model: HalfSpaceModel) -> np.ndarray:
        if self.rule == "conormal":
            return conormal_direction(model.sigma)
        if self.rule == "normal":
            v = np.zeros(model.dim)
            v[0] = 1.0
            return v
        return np.asarray(self.v, dtype=float)

    def eval_P(self, y_boundary: np.ndarray) -> np.ndarray:
        """Termination amplitude at boundary points of shape (m, d) with first
        coordinate zero."""
        if callable(self.P):
            return np.asarray(self.P(y_boundary), dtype=float)
        return np.full(y_boundary.shape[0], float(self.P))


@dataclass(frozen=True, eq=False)
class SimConfigNd:
    model: HalfSpaceModel
    boundary: BoundarySpecNd
    x0: np.ndarray
    T: float
    dt: float
    n: int
    seed: int = DEFAULT_SEED
    x_edges: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 3.0, 201))
    y_edges: np.ndarray = field(default_factory=lambda: np.linspace(-3.0, 3.0, 201))
    joint: bool = True

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float)
        if x0.shape != (self.model.dim,):
            raise ConfigError(
                f"x0 must have shape ({self.model.dim},), got {x0.shape}"
            )
        if not x0[0] > 0.0:
            raise ConfigError(f"x0 must start inside the half-space, got x0[0] = {x0[0]}")
        object.__setattr__(self, "x0", x0)
        if not self.T > 0.0 or not self.dt > 0.0:
            raise ConfigError(f"T and dt must be positive, got T={self.T}, dt={self.dt}")
        if self.n < 1:
            raise ConfigError(f"n must be at least 1, got {self.n}")
        _check_step_grid(self.T, self.dt)
        if not callable(self.boundary.P):
            if self.boundary.P * np.sqrt(self.dt) > 1.0:
                raise ConfigError(
                    f"P sqrt(dt) = {self.boundary.P * np.sqrt(self.dt):g} exceeds 1"
                )
        for name in ("x_edges", "y_edges"):
            edges = np.asarray(getattr(self, name), dtype=float)
            if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
                raise ConfigError(f"{name} must be a strictly increasing 1D array")
            object.__setattr__(self, name, edges)
        if self.model.dim < 2:
            raise ConfigError("half-space engine needs dimension >= 2")

    @property
    def n_steps(self) -> int:
        return _check_step_grid(self.T, self.dt)


@dataclass(frozen=True, eq=False)
class EnsembleResultNd:
    n_total: int
    n_survived: int
    x_edges: np.ndarray
    y_edges: np.ndarray
    x_counts: np.ndarray
    y_counts: np.ndarray
    joint_counts: np.ndarray | None
    x_overflow: int
    y_overflow: int
    dt: float
    T: float
    seed: int

    @property
    def n_terminated(self) -> int:
        return self.n_total - self.n_survived

    @property
    def p_hat(self) -> float:
        return self.n_survived / self.n_total

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return float(np.sqrt(p * (1.0 - p) / self.n_total))


def step_nd(
    x: np.ndarray,
    t: float,
    model: HalfSpaceModel,
    boundary: BoundarySpecNd,
    dt: float,
    z: np.ndarray,
    u: float | None = None,
) -> np.ndarray | None:
    """Single-point reference step; returns the new position or None."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    a = model.eval_drift(x[None, :], t)[0]
    xp = x + a * dt + np.sqrt(2.0 * dt) * (model.B @ z)
    if xp[0] >= 0.0:
        return xp
    yb = xp.copy()
    yb[0] = 0.0
    P = float(boundary.eval_P(yb[None, :])[0])
    if P > 0.0:
        if u is None:
            raise ConfigError("crossing with P > 0 requires a uniform draw u")
        if u < P * np.sqrt(dt):
            return None
    return reflect_oblique(xp, boundary.direction(model))


def _run_block_nd(config: SimConfigNd, block: int):
    m = block_count(config.n, block)
    rng = block_rng(config.seed, block)
    model = config.model
    d = model.dim
    x = np.tile(config.x0, (m, 1))
    dt = config.dt
    sqdt = np.sqrt(dt)
    sq2dt = np.sqrt(2.0 * dt)
    BT = model.B.T.copy()
    v = config.boundary.direction(model)
    drift_const = not callable(model.drift)
    if drift_const:
        adt = (np.zeros(d) if model.drift is None else model.drift) * dt
    n_steps = config.n_steps

    for i in range(n_steps):
        t = i * dt
        z = rng.standard_normal((x.shape[0], d))
        if drift_const:
            xp = x + adt + sq2dt * (z @ BT)
        else:
            xp = x + model.eval_drift(x, t) * dt + sq2dt * (z @ BT)
        idx = np.flatnonzero(xp[:, 0] < 0.0)
        if idx.size:
            u = rng.random(idx.size)
            xc = xp[idx]
            yb = xc.copy()
            yb[:, 0] = 0.0
            P = config.boundary.eval_P(yb)
            # reflect every crossing, then drop the terminated ones;
            # the first coordinate is set to -x'_1 exactly
            xr = xc - (2.0 * xc[:, 0] / v[0])[:, None] * v[None, :]
            xr[:, 0] = -xc[:, 0]
            xp[idx] = xr
            dead = idx[u < P * sqdt]
            if dead.size:
                keep = np.ones(xp.shape[0], dtype=bool)
                keep[dead] = False
                xp = xp[keep]
        x = xp
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite state in half-space ensemble")
    xc1 = np.histogram(x[:, 0], bins=config.x_edges)[0].astype(np.int64)
    yc1 = np.histogram(x[:, 1], bins=config.y_edges)[0].astype(np.int64)
    joint = None
    if config.joint and d == 2:
        joint = np.histogram2d(x[:, 0], x[:, 1], bins=[config.x_edges, config.y_edges])[
            0
        ].astype(np.int64)
    x_over = x.shape[0] - int(xc1.sum())
    y_over = x.shape[0] - int(yc1.sum())
    return xc1, yc1, joint, x_over, y_over, x.shape[0]


def run_ensemble_nd(config: SimConfigNd, n_workers: int = 1) -> EnsembleResultNd:
    """Run the half-space ensemble; bitwise identical for any n_workers."""
    xc = np.zeros(config.x_edges.size - 1, np.int64)
    yc = np.zeros(config.y_edges.size - 1, np.int64)
    joint = (
        np.zeros((config.x_edges.size - 1, config.y_edges.size - 1), np.int64)
        if config.joint and config.model.dim == 2
        else None
    )
    x_over = y_over = alive = 0
    for bx, by, bj, ox, oy, a in map_blocks(_run_block_nd, config, config.n, n_workers):
        xc += bx
        yc += by
        if joint is not None:
            joint += bj
        x_over += ox
        y_over += oy
        alive += a
    return EnsembleResultNd(
        n_total=config.n,
        n_survived=alive,
        x_edges=config.x_edges,
        y_edges=config.y_edges,
        x_counts=xc,
        y_counts=yc,
        joint_counts=joint,
        x_overflow=x_over,
        y_overflow=y_over,
        dt=config.dt,
        T=config.T,
        seed=config.seed,
    )
