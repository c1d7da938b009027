"""Crank-Nicolson solvers for the forward Kolmogorov equation on the half-line
and half-plane with a radiation boundary at x = 0.

The discretization is conservative cell-centered finite volume: cell updates
are divergence differences of face fluxes F = a p - d(sigma p), and the
radiation condition enters as the boundary-face flux F(0) = -kappa p(0) with
p(0) extrapolated to second order. kappa = 0 therefore conserves mass to
solver precision. Far faces are zero-flux. Time stepping is Crank-Nicolson
with an optional Rannacher start (four backward-Euler half-steps) to damp the
oscillations a near-delta initial condition excites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import LinearOperator, bicgstab, spilu

from .coefficients import CoefficientModel1D, constant_model_1d, eval_drift, eval_sigma
from .errors import ConfigError, NumericError

__all__ = [
    "FpeConfig",
    "DensityGrid",
    "FpeDiagnostics",
    "solve_fpe_1d",
    "solve_fpe_2d",
    "grid_survival",
    "grid_marginals",
]


@dataclass(frozen=True, eq=False)
class FpeConfig:
    """Configuration for the 1D (dim=1) or 2D (dim=2) solver.

    For dim=1, either pass a CoefficientModel1D as `model` or constant scalars
    `sigma` and `drift`. For dim=2, `sigma` is the constant SPD tensor and
    `drift` a constant vector. `kappa` may be a constant or, for dim=2, a
    callable over boundary y values.
    """

    dim: int
    kappa: float | Callable
    x0: object
    T: float
    dx: float
    sigma: object = None
    drift: object = None
    model: CoefficientModel1D | None = None
    pde_dt: float | None = None
    L: float | None = None
    Lx: float = 4.0
    Ly: float = 4.0
    ic: str = "gaussian"
    ic_width: float | None = None
    rannacher: bool = True
    krylov_tol: float = 1e-10
    krylov_maxiter: int = 1000

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigError(f"dim must be 1 or 2, got {self.dim}")
        if not self.T > 0.0 or not self.dx > 0.0:
            raise ConfigError(f"T and dx must be positive, got T={self.T}, dx={self.dx}")
        if not callable(self.kappa) and self.kappa < 0.0:
            raise ConfigError(f"kappa must be nonnegative, got {self.kappa}")
        if self.ic not in ("gaussian", "exact"):
            raise ConfigError(f"unknown initial-condition mode {self.ic!r}")
        if self.pde_dt is not None:
            if not self.pde_dt > 0.0:
                raise ConfigError(f"pde_dt must be positive, got {self.pde_dt}")
            if self.pde_dt > self.dx * (1.0 + 1e-12):
                raise ConfigError(
                    f"pde_dt={self.pde_dt} exceeds dx={self.dx}; refine the time step"
                )
        if self.dim == 1:
            if self.model is None and self.sigma is None:
                raise ConfigError("dim=1 needs either model or constant sigma")
            if self.model is not None and self.sigma is not None:
                raise ConfigError("pass either model or constant sigma, not both")
            if callable(self.kappa):
                raise ConfigError("dim=1 takes a constant kappa")
            x0 = float(np.asarray(self.x0))
            if not x0 > 0.0:
                raise ConfigError(f"x0 must be positive, got {x0}")
            object.__setattr__(self, "x0", x0)
        else:
            sigma = np.asarray(self.sigma, dtype=float)
            if sigma.shape != (2, 2):
                raise ConfigError(f"dim=2 sigma must be 2x2, got shape {sigma.shape}")
            if not np.allclose(sigma, sigma.T, atol=1e-12):
                raise ConfigError("sigma must be symmetric")
            if np.linalg.eigvalsh(sigma)[0] <= 0.0:
                raise ConfigError("sigma must be positive definite")
            object.__setattr__(self, "sigma", sigma)
            drift = np.zeros(2) if self.drift is None else np.asarray(self.drift, float)
            if callable(self.drift) or drift.shape != (2,):
                raise ConfigError("dim=2 drift must be a constant 2-vector")
            object.__setattr__(self, "drift", drift)
            x0 = np.asarray(self.x0, dtype=float)
            if x0.shape != (2,):
                raise ConfigError(f"dim=2 x0 must be a 2-vector, got shape {x0.shape}")
            if not x0[0] > 0.0:
                raise ConfigError(f"x0[0] must be positive, got {x0[0]}")
            object.__setattr__(self, "x0", x0)
            if not self.Lx > 0.0 or not self.Ly > 0.0:
                raise ConfigError("Lx and Ly must be positive")

    def model_1d(self) -> CoefficientModel1D:
        if self.model is not None:
            return self.model
        return constant_model_1d(
            0.0 if self.drift is None else float(self.drift), float(self.sigma)
        )


@dataclass(eq=False)
class FpeDiagnostics:
    pde_dt: float
    n_steps: int
    rannacher_steps: int
    mass_history: np.ndarray
    flux_absorbed: float
    balance_max: float
    krylov_iters: list | None = None


@dataclass(eq=False)
class DensityGrid:
    """Cell-centered density; p has shape (Mx,) or (Mx, My)."""

    x_centers: np.ndarray
    dx: float
    p: np.ndarray
    t: float
    y_centers: np.ndarray | None = None
    dy: float | None = None
    diagnostics: FpeDiagnostics | None = None


def grid_survival(grid: DensityGrid) -> float:
    """Midpoint-rule mass, exact for the cell-centered representation."""
    if grid.p.ndim == 1:
        return float(np.sum(grid.p) * grid.dx)
    return float(np.sum(grid.p) * grid.dx * grid.dy)


def grid_marginals(grid: DensityGrid):
    """(x_centers, px), (y_centers, py) marginal densities of a 2D grid."""
    if grid.p.ndim != 2:
        raise ConfigError("marginals need a 2D grid")
    px = grid.p.sum(axis=1) * grid.dy
    py = grid.p.sum(axis=0) * grid.dx
    return (grid.x_centers, px), (grid.y_centers, py)


def _time_grid(config: FpeConfig, duration: float) -> tuple[float, int]:
    if not duration > 0.0:
        raise ConfigError("horizon too small for the exact initial condition")
    target = config.pde_dt
    if target is None:
        target = config.dx if config.dim == 1 else config.dx / 4.0
    n_steps = max(1, int(np.ceil(duration / target - 1e-12)))
    return duration / n_steps, n_steps


# ---------------------------------------------------------------------------
# 1D solver


def _operator_1d(config: FpeConfig, xc: np.ndarray, dx: float):
    """Tridiagonal L with (L u)_i = (F_i - F_{i+1}) / dx."""
    model = config.model_1d()
    M = xc.size
    s = eval_sigma(model, xc, 0.0)
    if np.any(s <= 0.0):
        raise ConfigError("sigma must be positive on the grid")
    faces = np.arange(1, M) * dx
    a_f = eval_drift(model, faces, 0.0)
    kappa = float(config.kappa)

    lower = np.zeros(M)  # coefficient of u_{i-1} in row i
    diag = np.zeros(M)
    upper = np.zeros(M)  # coefficient of u_{i+1} in row i

    # interior face i (between cells i-1, i): F = a_f (u_{i-1}+u_i)/2
    #   - (s_i u_i - s_{i-1} u_{i-1})/dx ; contributes to rows i-1 and i
    cl = a_f / 2.0 + s[:-1] / dx
    cr = a_f / 2.0 - s[1:] / dx
    # row i gains +F_i/dx
    lower[1:] += cl / dx
    diag[1:] += cr / dx
    # row i-1 gains -F_i/dx
    diag[:-1] -= cl / dx
    upper[:-1] -= cr / dx
    # boundary face: F_0 = -kappa (3 u_0 - u_1)/2 enters row 0 as +F_0/dx
    diag[0] += -1.5 * kappa / dx
    upper[0] += 0.5 * kappa / dx
    # far face F_M = 0
    return lower, diag, upper, kappa


def _banded(lower, diag, upper, scale, shift):
    """ab array for solve_banded of shift*I + scale*L."""
    M = diag.size
    ab = np.zeros((3, M))
    ab[0, 1:] = scale * upper[:-1]
    ab[1, :] = shift + scale * diag
    ab[2, :-1] = scale * lower[1:]
    return ab


def _apply_tridiag(lower, diag, upper, u):
    out = diag * u
    out[1:] += lower[1:] * u[:-1]
    out[:-1] += upper[:-1] * u[1:]
    return out


def _initial_1d(config: FpeConfig, xc: np.ndarray, dx: float) -> np.ndarray:
    w = config.ic_width if config.ic_width is not None else 2.0 * dx
    if config.ic == "exact":
        from .analytic1d import RobinParams1D, drift_density

        model = config.model_1d()
        if not model.is_constant:
            raise ConfigError("exact initial condition needs constant coefficients")
        s0 = float(eval_sigma(model, config.x0, 0.0))
        t1 = w * w / (2.0 * s0)
        params = RobinParams1D(
            sigma=s0,
            kappa=float(config.kappa),
            x0=config.x0,
            drift=float(eval_drift(model, config.x0, 0.0)),
        )
        u = drift_density(xc, t1, params)
        return np.clip(u, 0.0, None)
    u = np.exp(-0.5 * ((xc - config.x0) / w) ** 2)
    return u / (np.sum(u) * dx)


def solve_fpe_1d(config: FpeConfig) -> DensityGrid:
    if config.dim != 1:
        raise ConfigError("solve_fpe_1d needs dim=1")
    dx = config.dx
    if config.L is not None:
        L = config.L
    else:
        model = config.model_1d()
        a = float(eval_drift(model, config.x0, 0.0))
        s = float(eval_sigma(model, config.x0, 0.0))
        L = config.x0 + max(a, 0.0) * config.T + 8.0 * np.sqrt(s * config.T)
    M = int(np.ceil(L / dx - 1e-9))
    if M < 4:
        raise ConfigError(f"grid too coarse: {M} cells")
    xc = (np.arange(M) + 0.5) * dx

    lower, diag, upper, kappa = _operator_1d(config, xc, dx)
    u = _initial_1d(config, xc, dx)

    t_start = 0.0
    if config.ic == "exact":
        w = config.ic_width if config.ic_width is not None else 2.0 * dx
        s0 = float(eval_sigma(config.model_1d(), config.x0, 0.0))
        t_start = w * w / (2.0 * s0)
    delta, n_steps = _time_grid(config, config.T - t_start)

    ab = _banded(lower, diag, upper, -delta / 2.0, 1.0)
    rann = 2 if (config.rannacher and n_steps >= 2) else 0
    mass = [np.sum(u) * dx]
    flux = 0.0
    balance_max = 0.0

    def boundary_flux(vec):
        return kappa * (1.5 * vec[0] - 0.5 * vec[1])

    # Rannacher start: four backward-Euler half-steps reuse the same matrix
    for _ in range(2 * rann):
        u_new = solve_banded((1, 1), ab, u)
        dm = (np.sum(u_new) - np.sum(u)) * dx
        step_flux = (delta / 2.0) * boundary_flux(u_new)
        balance_max = max(balance_max, abs(dm + step_flux))
        flux += step_flux
        u = u_new
        mass.append(np.sum(u) * dx)
    for _ in range(n_steps - rann):
        rhs = _apply_tridiag(lower, diag, upper, u) * (delta / 2.0) + u
        u_new = solve_banded((1, 1), ab, rhs)
        dm = (np.sum(u_new) - np.sum(u)) * dx
        step_flux = delta * 0.5 * (boundary_flux(u) + boundary_flux(u_new))
        balance_max = max(balance_max, abs(dm + step_flux))
        flux += step_flux
        u = u_new
        mass.append(np.sum(u) * dx)

    if not np.all(np.isfinite(u)):
        raise NumericError("non-finite density in 1D solver")
    diag_out = FpeDiagnostics(
        pde_dt=delta,
        n_steps=n_steps,
        rannacher_steps=rann,
        mass_history=np.asarray(mass),
        flux_absorbed=flux,
        balance_max=balance_max,
    )
    return DensityGrid(x_centers=xc, dx=dx, p=u, t=config.T, diagnostics=diag_out)


# ---------------------------------------------------------------------------
# 2D solver


def _operator_2d(config: FpeConfig, Mx: int, My: int, dx: float, dy: float,
                 y_centers: np.ndarray):
    """Sparse L = Dx Ax + Dy Ay with (L u) = -div F, plus the boundary-flux
    functional row vector."""
    s11 = float(config.sigma[0, 0])
    s12 = float(config.sigma[0, 1])
    s22 = float(config.sigma[1, 1])
    a1, a2 = float(config.drift[0]), float(config.drift[1])
    if callable(config.kappa):
        kap = np.asarray(config.kappa(y_centers), dtype=float)
        if kap.shape != (My,):
            raise ConfigError("kappa field must return one value per boundary cell")
        if np.any(kap < 0.0):
            raise ConfigError("kappa field must be nonnegative")
    else:
        kap = np.full(My, float(config.kappa))
    N = Mx * My

    def cell(i, j):
        return i * My + j

    rows_x, cols_x, vals_x = [], [], []

    def addx(f, c, v):
        rows_x.append(np.asarray(f).ravel())
        cols_x.append(np.asarray(c).ravel())
        vals_x.append(np.broadcast_to(v, np.asarray(f).shape).ravel())

    # interior x-faces (i = 1..Mx-1)
    I, J = np.meshgrid(np.arange(1, Mx), np.arange(My), indexing="ij")
    f = I * My + J
    addx(f, cell(I - 1, J), a1 / 2.0 + s11 / dx)
    addx(f, cell(I, J), a1 / 2.0 - s11 / dx)
    # mixed part -s12 * (u[i-1,j+1] - u[i-1,j-1] + u[i,j+1] - u[i,j-1])/(4 dy),
    # with zero ghosts at the far y-edges where the density is negligible
    for di, dj, sign in ((-1, 1, -1.0), (-1, -1, 1.0), (0, 1, -1.0), (0, -1, 1.0)):
        mask = (J + dj >= 0) & (J + dj < My)
        addx(f[mask], cell(I + di, J + dj)[mask], sign * s12 / (4.0 * dy))
    # reactive boundary faces i = 0: F = -kappa_j (3 u[0,j] - u[1,j])/2
    jb = np.arange(My)
    addx(jb, cell(0, jb), -1.5 * kap)
    addx(jb, cell(1, jb), 0.5 * kap)

    Ax = sp.coo_array(
        (np.concatenate(vals_x), (np.concatenate(rows_x), np.concatenate(cols_x))),
        shape=((Mx + 1) * My, N),
    ).tocsr()

    rows_y, cols_y, vals_y = [], [], []

    def addy(f, c, v):
        rows_y.append(np.asarray(f).ravel())
        cols_y.append(np.asarray(c).ravel())
        vals_y.append(np.broadcast_to(v, np.asarray(f).shape).ravel())

    # interior y-faces (j = 1..My-1)
    I, J = np.meshgrid(np.arange(Mx), np.arange(1, My), indexing="ij")
    f = I * (My + 1) + J
    addy(f, cell(I, J - 1), a2 / 2.0 + s22 / dy)
    addy(f, cell(I, J), a2 / 2.0 - s22 / dy)
    # mixed part -s12 * average over the two adjacent cells of du/dx; centered
    # in the interior, second-order one-sided in the first and last column
    # (the reactive boundary carries O(1) density, a zero ghost would be wrong)
    for jj_off in (0, -1):
        JJ = J + jj_off
        interior = (I >= 1) & (I <= Mx - 2)
        m = interior
        addy(f[m], cell(I + 1, JJ)[m], -s12 / (4.0 * dx))
        addy(f[m], cell(I - 1, JJ)[m], s12 / (4.0 * dx))
        m = I == 0
        addy(f[m], cell(0, JJ)[m], -s12 / 2.0 * (-3.0) / (2.0 * dx))
        addy(f[m], cell(1, JJ)[m], -s12 / 2.0 * 4.0 / (2.0 * dx))
        addy(f[m], cell(2, JJ)[m], -s12 / 2.0 * (-1.0) / (2.0 * dx))
        m = I == Mx - 1
        addy(f[m], cell(Mx - 1, JJ)[m], -s12 / 2.0 * 3.0 / (2.0 * dx))
        addy(f[m], cell(Mx - 2, JJ)[m], -s12 / 2.0 * (-4.0) / (2.0 * dx))
        addy(f[m], cell(Mx - 3, JJ)[m], -s12 / 2.0 * 1.0 / (2.0 * dx))

    Ay = sp.coo_array(
        (np.concatenate(vals_y), (np.concatenate(rows_y), np.concatenate(cols_y))),
        shape=(Mx * (My + 1), N),
    ).tocsr()

    # divergence: (L u)_k = (Fx[i,j] - Fx[i+1,j])/dx + (Fy[i,j] - Fy[i,j+1])/dy
    I, J = np.meshgrid(np.arange(Mx), np.arange(My), indexing="ij")
    k = cell(I, J).ravel()
    fxl = (I * My + J).ravel()
    fxr = ((I + 1) * My + J).ravel()
    Dx = sp.coo_array(
        (
            np.concatenate([np.full(N, 1.0 / dx), np.full(N, -1.0 / dx)]),
            (np.concatenate([k, k]), np.concatenate([fxl, fxr])),
        ),
        shape=(N, (Mx + 1) * My),
    ).tocsr()
    fyl = (I * (My + 1) + J).ravel()
    fyr = (I * (My + 1) + J + 1).ravel()
    Dy = sp.coo_array(
        (
            np.concatenate([np.full(N, 1.0 / dy), np.full(N, -1.0 / dy)]),
            (np.concatenate([k, k]), np.concatenate([fyl, fyr])),
        ),
        shape=(N, Mx * (My + 1)),
    ).tocsr()

    Lop = (Dx @ Ax + Dy @ Ay).tocsr()
    # boundary absorption functional: -d(mass)/dt = dy * sum_j kappa_j p(0, y_j)
    flux_vec = np.zeros(N)
    flux_vec[cell(0, jb)] = 1.5 * kap * dy
    flux_vec[cell(1, jb)] = -0.5 * kap * dy
    return Lop, flux_vec


def _initial_2d(config: FpeConfig, xc, yc, dx, dy):
    w = config.ic_width if config.ic_width is not None else 2.0 * dx
    X, Y = np.meshgrid(xc, yc, indexing="ij")
    if config.ic == "exact":
        s11 = float(config.sigma[0, 0])
        t1 = w * w / (2.0 * s11)
        cov = 2.0 * config.sigma * t1
        mean = config.x0 + config.drift * t1
        det = np.linalg.det(cov)
        inv = np.linalg.inv(cov)
        dxv = X - mean[0]
        dyv = Y - mean[1]
        q = inv[0, 0] * dxv**2 + 2.0 * inv[0, 1] * dxv * dyv + inv[1, 1] * dyv**2
        u = np.exp(-0.5 * q) / (2.0 * np.pi * np.sqrt(det))
        return u, t1
    u = np.exp(-0.5 * (((X - config.x0[0]) / w) ** 2 + ((Y - config.x0[1]) / w) ** 2))
    u /= np.sum(u) * dx * dy
    return u, 0.0


def solve_fpe_2d(config: FpeConfig) -> DensityGrid:
    if config.dim != 2:
        raise ConfigError("solve_fpe_2d needs dim=2")
    dx = dy = config.dx
    Mx = int(np.round(config.Lx / dx))
    My = int(np.round(2.0 * config.Ly / dy))
    if Mx < 3 or My < 3:
        raise ConfigError(f"grid too coarse: {Mx} x {My} cells")
    xc = (np.arange(Mx) + 0.5) * dx
    yc = -config.Ly + (np.arange(My) + 0.5) * dy

    Lop, flux_vec = _operator_2d(config, Mx, My, dx, dy, yc)
    u2, t_start = _initial_2d(config, xc, yc, dx, dy)
    delta, n_steps = _time_grid(config, config.T - t_start)
    u = u2.ravel()

    N = Mx * My
    eye = sp.identity(N, format="csr")
    A = (eye - (delta / 2.0) * Lop).tocsc()
    M2 = (eye + (delta / 2.0) * Lop).tocsr()
    try:
        ilu = spilu(A, drop_tol=1e-5, fill_factor=10.0)
    except RuntimeError as exc:
        raise NumericError(f"ILU factorization failed: {exc}") from exc
    precond = LinearOperator((N, N), matvec=ilu.solve)

    iters: list[int] = []

    def krylov_solve(rhs, x0):
        count = [0]

        def cb(_):
            count[0] += 1

        sol, info = bicgstab(
            A,
            rhs,
            x0=x0,
            M=precond,
            rtol=config.krylov_tol,
            atol=0.0,
            maxiter=config.krylov_maxiter,
            callback=cb,
        )
        if info != 0:
            raise NumericError(
                f"BiCGSTAB did not converge (info={info}, iterations={count[0]})"
            )
        iters.append(count[0])
        return sol

    rann = 2 if (config.rannacher and n_steps >= 2) else 0
    cell_area = dx * dy
    mass = [np.sum(u) * cell_area]
    flux = 0.0
    balance_max = 0.0

    for _ in range(2 * rann):
        u_new = krylov_solve(u, u)
        dm = (np.sum(u_new) - np.sum(u)) * cell_area
        step_flux = (delta / 2.0) * float(flux_vec @ u_new)
        balance_max = max(balance_max, abs(dm + step_flux))
        flux += step_flux
        u = u_new
        mass.append(np.sum(u) * cell_area)
    for _ in range(n_steps - rann):
        rhs = M2 @ u
        u_new = krylov_solve(rhs, u)
        dm = (np.sum(u_new) - np.sum(u)) * cell_area
        step_flux = delta * 0.5 * float(flux_vec @ u + flux_vec @ u_new)
        balance_max = max(balance_max, abs(dm + step_flux))
        flux += step_flux
        u = u_new
        mass.append(np.sum(u) * cell_area)

    if not np.all(np.isfinite(u)):
        raise NumericError("non-finite density in 2D solver")
    diag_out = FpeDiagnostics(
        pde_dt=delta,
        n_steps=n_steps,
        rannacher_steps=rann,
        mass_history=np.asarray(mass),
        flux_absorbed=flux,
        balance_max=balance_max,
        krylov_iters=iters,
    )
    return DensityGrid(
        x_centers=xc,
        dx=dx,
        p=u.reshape(Mx, My),
        t=config.T,
        y_centers=yc,
        dy=dy,
        diagnostics=diag_out,
    )
