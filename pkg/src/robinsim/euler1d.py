"""Euler scheme on the half-line with a partially reflecting boundary.

Each step proposes x' = x + a(x,t) dt + sqrt(2 sigma(x,t) dt) z with z standard
normal, coefficients frozen at the step start. A proposal with x' < 0 (strictly;
x' = 0 is interior) either terminates the trajectory, with probability
P sqrt(dt), or is reflected to -x'. No within-step crossing detection is
applied. The termination amplitude P realizes the radiation coefficient
kappa = P sqrt(sigma(0, t)) / sqrt(pi).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._ensemble import BLOCK_SIZE, DEFAULT_SEED, block_count, block_rng, map_blocks, n_blocks
from .coefficients import CoefficientModel1D, ConstantField, eval_drift, eval_sigma
from .errors import ConfigError, NumericError

__all__ = [
    "Boundary1D",
    "SimConfig1D",
    "EnsembleResult1D",
    "kappa_to_P",
    "P_to_kappa",
    "step_1d",
    "run_ensemble_1d",
    "empirical_density",
    "default_bin_edges",
]


def kappa_to_P(kappa: float, sigma: float) -> float:
    """Termination amplitude reproducing radiation coefficient kappa."""
    if kappa < 0.0:
        raise ConfigError(f"kappa must be nonnegative, got {kappa}")
    if not sigma > 0.0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    return kappa * np.sqrt(np.pi) / np.sqrt(sigma)


def P_to_kappa(P: float, sigma: float) -> float:
    if P < 0.0:
        raise ConfigError(f"P must be nonnegative, got {P}")
    if not sigma > 0.0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    return P * np.sqrt(sigma) / np.sqrt(np.pi)


@dataclass(frozen=True)
class Boundary1D:
    """Partially reflecting boundary at x = 0 with termination amplitude P >= 0."""

    P: float

    def __post_init__(self):
        if self.P < 0.0:
            raise ConfigError(f"P must be nonnegative, got {self.P}")

    @classmethod
    def from_kappa(cls, kappa: float, sigma: float) -> "Boundary1D":
        return cls(P=kappa_to_P(kappa, sigma))


def _check_step_grid(T: float, dt: float, what: str = "T") -> int:
    steps = T / dt
    n_steps = int(round(steps))
    if n_steps < 1 or abs(steps - n_steps) > 1e-9 * max(1.0, steps):
        raise ConfigError(f"{what}={T} must be an integer multiple of dt={dt}")
    return n_steps


@dataclass(frozen=True, eq=False)
class SimConfig1D:
    """Ensemble configuration; T/dt must be integral and P sqrt(dt) <= 1."""

    model: CoefficientModel1D
    boundary: Boundary1D
    x0: float
    T: float
    dt: float
    n: int
    seed: int = DEFAULT_SEED
    bin_edges: np.ndarray | None = None
    checkpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.x0 > 0.0:
            raise ConfigError(f"x0 must be positive, got {self.x0}")
        if not self.T > 0.0 or not self.dt > 0.0:
            raise ConfigError(f"T and dt must be positive, got T={self.T}, dt={self.dt}")
        if self.n < 1:
            raise ConfigError(f"n must be at least 1, got {self.n}")
        _check_step_grid(self.T, self.dt)
        if self.boundary.P * np.sqrt(self.dt) > 1.0:
            raise ConfigError(
                f"P sqrt(dt) = {self.boundary.P * np.sqrt(self.dt):g} exceeds 1; "
                "termination probability must be a probability"
            )
        for c in self.checkpoints:
            if not 0.0 < c <= self.T:
                raise ConfigError(f"checkpoint {c} outside (0, T]")
            _check_step_grid(c, self.dt, what="checkpoint")
        if self.bin_edges is not None:
            edges = np.asarray(self.bin_edges, dtype=float)
            if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
                raise ConfigError("bin_edges must be a strictly increasing 1D array")
            object.__setattr__(self, "bin_edges", edges)

    @property
    def n_steps(self) -> int:
        return _check_step_grid(self.T, self.dt)


def default_bin_edges(config: SimConfig1D, n_bins: int = 200) -> np.ndarray:
    """Uniform bins on [0, x0 + |a| T + 6 sqrt(sigma T)], scales taken at (x0, 0)."""
    a = float(eval_drift(config.model, config.x0, 0.0))
    s = float(eval_sigma(config.model, config.x0, 0.0))
    hi = config.x0 + abs(a) * config.T + 6.0 * np.sqrt(s * config.T)
    return np.linspace(0.0, hi, n_bins + 1)


@dataclass(frozen=True, eq=False)
class EnsembleResult1D:
    n_total: int
    n_survived: int
    bin_edges: np.ndarray
    counts: np.ndarray
    overflow: int
    dt: float
    T: float
    seed: int
    checkpoint_times: tuple[float, ...] = ()
    checkpoint_alive: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))

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


def step_1d(
    x: float,
    t: float,
    model: CoefficientModel1D,
    boundary: Boundary1D,
    dt: float,
    z: float,
    u: float | None = None,
) -> float | None:
    """Scalar reference step; returns the new position or None on termination.

    u is the uniform draw consumed only when the proposal crosses; it may be
    omitted when P = 0.
    """
    a = float(eval_drift(model, x, t))
    s = float(eval_sigma(model, x, t))
    if not s > 0.0:
        raise NumericError(f"sigma(x={x}, t={t}) = {s} is not positive")
    xp = x + a * dt + np.sqrt(2.0 * s * dt) * z
    if xp >= 0.0:
        return float(xp)
    if boundary.P > 0.0:
        if u is None:
            raise ConfigError("crossing with P > 0 requires a uniform draw u")
        if u < boundary.P * np.sqrt(dt):
            return None
    return float(-xp)


def _run_block_1d(config: SimConfig1D, block: int):
    m = block_count(config.n, block)
    rng = block_rng(config.seed, block)
    x = np.full(m, config.x0)
    dt = config.dt
    sqdt = np.sqrt(dt)
    P = config.boundary.P
    p_term = P * sqdt
    model = config.model
    n_steps = config.n_steps
    cp_steps = {int(round(c / dt)): i for i, c in enumerate(config.checkpoints)}
    cp_alive = np.zeros(len(config.checkpoints), np.int64)

    constant = model.is_constant
    if constant:
        a0 = model.drift.value
        s0 = model.sigma.value
        adt = a0 * dt
        noise = np.sqrt(2.0 * s0 * dt)

    for i in range(n_steps):
        t = i * dt
        z = rng.standard_normal(x.size)
        if constant:
            xp = x + adt + noise * z
        else:
            s = eval_sigma(model, x, t)
            if np.any(s <= 0.0):
                raise NumericError(f"sigma not positive at t={t:g}")
            xp = x + eval_drift(model, x, t) * dt + np.sqrt(2.0 * s * dt) * z
        idx = np.flatnonzero(xp < 0.0)
        if idx.size:
            # uniforms are drawn for every crossing in index order, even at
            # P = 0, so the stream layout is independent of the boundary rule
            u = rng.random(idx.size)
            xp[idx] = -xp[idx]
            dead = idx[u < p_term]
            if dead.size:
                keep = np.ones(xp.size, dtype=bool)
                keep[dead] = False
                xp = xp[keep]
        x = xp
        j = cp_steps.get(i + 1)
        if j is not None:
            cp_alive[j] = x.size
    counts, _ = np.histogram(x, bins=config.bin_edges)
    counts = counts.astype(np.int64)
    overflow = x.size - int(counts.sum())
    return counts, overflow, x.size, cp_alive


def run_ensemble_1d(config: SimConfig1D, n_workers: int = 1) -> EnsembleResult1D:
    """Run the ensemble; output is bitwise identical for any n_workers."""
    edges = config.bin_edges
    if edges is None:
        edges = default_bin_edges(config)
        config = SimConfig1D(
            model=config.model,
            boundary=config.boundary,
            x0=config.x0,
            T=config.T,
            dt=config.dt,
            n=config.n,
            seed=config.seed,
            bin_edges=edges,
            checkpoints=config.checkpoints,
        )
    counts = np.zeros(edges.size - 1, np.int64)
    overflow = 0
    alive = 0
    cp_alive = np.zeros(len(config.checkpoints), np.int64)
    for c, o, a, cp in map_blocks(_run_block_1d, config, config.n, n_workers):
        counts += c
        overflow += o
        alive += a
        cp_alive += cp
    return EnsembleResult1D(
        n_total=config.n,
        n_survived=alive,
        bin_edges=edges,
        counts=counts,
        overflow=overflow,
        dt=config.dt,
        T=config.T,
        seed=config.seed,
        checkpoint_times=config.checkpoints,
        checkpoint_alive=cp_alive,
    )


def empirical_density(result: EnsembleResult1D):
    """Sub-probability density table (bin_lo, bin_hi, density); density is
    count / (n_total * width), so the table integrates to the in-range
    survivor fraction."""
    if result.counts.size == 0:
        raise ConfigError("histogram has zero bins")
    lo = result.bin_edges[:-1]
    hi = result.bin_edges[1:]
    widths = hi - lo
    dens = result.counts / (result.n_total * widths)
    return lo, hi, dens
