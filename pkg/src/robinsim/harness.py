"""Experiment configs, CSV emission, and the convergence study runner.

Config files are line-oriented `key=value`; `#` starts a comment line. Parsed
values are canonicalized (floats, ints, bools, comma lists as tuples) so that
emit and parse round-trip to an equal config. Every CSV artifact starts with
provenance comment lines (# seed=, # dt=, # n=, # git=) followed by a header
row.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._ensemble import DEFAULT_SEED
from .analytic1d import RobinParams1D, drift_density, survival_analytic
from .coefficients import ConstantField, LinearField, CoefficientModel1D, make_field
from .errors import ConfigError
from .euler1d import (
    Boundary1D,
    EnsembleResult1D,
    SimConfig1D,
    empirical_density,
    kappa_to_P,
    P_to_kappa,
    run_ensemble_1d,
)
from .eulernd import BoundarySpecNd, SimConfigNd, kappa_to_P_nd, run_ensemble_nd
from .fpe import FpeConfig, grid_marginals, grid_survival, solve_fpe_1d, solve_fpe_2d

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "parse_config_text",
    "emit_config",
    "run_convergence",
    "ConvergenceRow",
    "ConvergenceTable",
    "write_csv",
    "git_describe",
]


# ---------------------------------------------------------------------------
# value parsers


def _f(s: str) -> float:
    return float(s)


def _i(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        v = float(s)
        if abs(v - round(v)) > 1e-9 * max(1.0, abs(v)):
            raise ValueError(f"{s!r} is not an integer")
        return int(round(v))


def _s(s: str) -> str:
    return s


def _b(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(f"{s!r} is not a boolean")


def _fl(s: str) -> tuple:
    parts = [p.strip() for p in s.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


_COMMON = {
    "engine": (_s, True),
    "experiment": (_s, False, None),
    "seed": (_i, False, DEFAULT_SEED),
}

_MODEL_1D = {
    "sigma": (_f, False, None),
    "sigma_family": (_s, False, None),
    "sigma_params": (_fl, False, None),
    "drift": (_f, False, 0.0),
    "drift_family": (_s, False, None),
    "drift_params": (_fl, False, None),
}

_BOUNDARY = {
    "kappa": (_f, False, None),
    "P": (_f, False, None),
}

_SCHEMAS: dict[str, dict] = {
    "sim1d": {
        **_COMMON,
        **_MODEL_1D,
        **_BOUNDARY,
        "x0": (_f, True),
        "T": (_f, True),
        "dt": (_f, True),
        "n": (_i, True),
        "bins": (_i, False, 200),
        "hist_max": (_f, False, None),
        "checkpoints": (_fl, False, None),
    },
    "simnd": {
        **_COMMON,
        **_BOUNDARY,
        "sigma": (_fl, True),
        "drift": (_fl, False, None),
        "x0": (_fl, True),
        "T": (_f, True),
        "dt": (_f, True),
        "n": (_i, True),
        "reflection": (_s, False, "conormal"),
        "v": (_fl, False, None),
        "bins": (_i, False, 200),
        "x_max": (_f, False, 3.0),
        "y_max": (_f, False, 3.0),
    },
    "fpe": {
        **_COMMON,
        **_MODEL_1D,
        **_BOUNDARY,
        # scalar for dim=1, row-major 2x2 list for dim=2
        "sigma": (_fl, False, None),
        "drift": (_fl, False, None),
        "dim": (_i, True),
        "x0": (_fl, True),
        "T": (_f, True),
        "dx": (_f, False, None),
        "pde_dt": (_f, False, None),
        "L": (_f, False, None),
        "Lx": (_f, False, 4.0),
        "Ly": (_f, False, 4.0),
        "ic": (_s, False, "gaussian"),
        "rannacher": (_b, False, True),
        "krylov_tol": (_f, False, 1e-10),
        "krylov_maxiter": (_i, False, 1000),
    },
    "analytic": {
        **_COMMON,
        **_BOUNDARY,
        "sigma": (_f, True),
        "drift": (_f, False, 0.0),
        "x0": (_f, True),
        "t": (_f, True),
        "x_max": (_f, False, None),
        "points": (_i, False, 801),
    },
    "blcheck": {
        **_COMMON,
        **_BOUNDARY,
        "sigma": (_f, True),
        "drift": (_f, False, 0.0),
        "dt": (_f, True),
    },
    "convergence": {
        **_COMMON,
        **_MODEL_1D,
        **_BOUNDARY,
        # scalar for the 1D target, row-major 2x2 list for the half-space target
        "sigma": (_fl, False, None),
        "drift": (_fl, False, None),
        "target": (_s, True),
        "dt_list": (_fl, True),
        "reference": (_s, False, "analytic"),
        "x0": (_fl, True),
        "T": (_f, True),
        "n": (_i, True),
        "bins": (_i, False, 200),
        "hist_max": (_f, False, None),
        "x_max": (_f, False, 3.0),
        "y_max": (_f, False, 3.0),
        "reflection": (_s, False, "conormal"),
        "v": (_fl, False, None),
        "fpe_dx": (_f, False, None),
        "fpe_dt": (_f, False, None),
        "fpe_ic": (_s, False, "gaussian"),
        "Lx": (_f, False, 4.0),
        "Ly": (_f, False, 4.0),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, canonicalized experiment description."""

    engine: str
    values: tuple  # sorted (key, value) pairs; tuples keep the config hashable

    def get(self, key, default=None):
        for k, v in self.values:
            if k == key:
                return v
        return default

    def __getitem__(self, key):
        val = self.get(key, _MISSING)
        if val is _MISSING:
            raise KeyError(key)
        return val

    @property
    def seed(self) -> int:
        return self.get("seed", DEFAULT_SEED)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        d = dict(self.values)
        for k, v in kw.items():
            if v is not None:
                d[k] = v
        return ExperimentConfig(self.engine, tuple(sorted(d.items())))


_MISSING = object()


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    raw: dict[str, str] = {}
    lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in raw:
            raise ConfigError(
                f"{source}:{lineno}: duplicate key {key!r} (first on line {lines[key]})"
            )
        raw[key] = value
        lines[key] = lineno

    engine = raw.get("engine")
    if engine is None:
        raise ConfigError(f"{source}: missing required keys: engine")
    if engine not in _SCHEMAS:
        raise ConfigError(
            f"{source}:{lines['engine']}: unknown engine {engine!r}; "
            f"expected one of {sorted(_SCHEMAS)}"
        )
    schema = _SCHEMAS[engine]

    values: dict[str, object] = {}
    for key, value in raw.items():
        if key not in schema:
            raise ConfigError(f"{source}:{lines[key]}: unknown key {key!r} for engine {engine}")
        parser = schema[key][0]
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lines[key]}: bad value for {key!r}: {exc}") from exc

    missing = [k for k, spec in schema.items() if spec[1] and k not in values]
    if missing:
        raise ConfigError(f"{source}: missing required keys: {', '.join(sorted(missing))}")
    for key, spec in schema.items():
        if not spec[1] and key not in values and spec[2] is not None:
            values[key] = spec[2]

    cfg = ExperimentConfig(engine, tuple(sorted(values.items())))
    _validate_config(cfg, source)
    return cfg


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def _validate_config(cfg: ExperimentConfig, source: str) -> None:
    has_kappa = cfg.get("kappa") is not None
    has_p = cfg.get("P") is not None
    if has_kappa == has_p:
        raise ConfigError(
            f"{source}: exactly one of 'kappa' and 'P' must be given "
            f"(got {'both' if has_kappa else 'neither'})"
        )
    if cfg.engine in ("sim1d", "fpe", "convergence"):
        if cfg.get("sigma") is None and cfg.get("sigma_family") is None:
            if cfg.engine != "convergence" or cfg.get("target") != "simnd":
                raise ConfigError(f"{source}: missing required keys: sigma")
    if cfg.engine == "convergence":
        target = cfg.get("target")
        if target not in ("sim1d", "simnd"):
            raise ConfigError(f"{source}: target must be sim1d or simnd, got {target!r}")
        dts = cfg.get("dt_list")
        if len(dts) < 2 or np.any(np.diff(dts) >= 0.0):
            raise ConfigError(f"{source}: dt_list must be strictly decreasing with >= 2 entries")
        ref = cfg.get("reference")
        if ref not in ("analytic", "fpe"):
            raise ConfigError(f"{source}: reference must be analytic or fpe, got {ref!r}")
        if target == "simnd" and ref == "analytic":
            raise ConfigError(f"{source}: the half-space target needs reference=fpe")
    if cfg.engine == "fpe" and cfg.get("dim") not in (1, 2):
        raise ConfigError(f"{source}: dim must be 1 or 2")


def emit_config(cfg: ExperimentConfig) -> str:
    """Canonical serialization; parse_config_text(emit_config(c)) == c."""
    out = []
    for key, value in cfg.values:
        if isinstance(value, bool):
            rep = "true" if value else "false"
        elif isinstance(value, tuple):
            rep = ",".join(repr(float(v)) for v in value)
        elif isinstance(value, float):
            rep = repr(value)
        else:
            rep = str(value)
        out.append(f"{key}={rep}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# builders


def _field_from(cfg: ExperimentConfig, role: str, default_constant):
    family = cfg.get(f"{role}_family")
    if family is not None:
        params = cfg.get(f"{role}_params") or ()
        return make_field(family, params)
    value = cfg.get(role)
    if value is None:
        value = default_constant
    if isinstance(value, tuple):
        if len(value) != 1:
            raise ConfigError(f"{role} must be a scalar for a 1D engine, got {value}")
        value = value[0]
    return ConstantField(float(value))


def _sigma_at_wall(field) -> float:
    if isinstance(field, ConstantField):
        return field.value
    if isinstance(field, LinearField):
        return field.intercept
    return float(np.asarray(field(0.0, 0.0)))


def _boundary_1d(cfg: ExperimentConfig, sigma_field) -> Boundary1D:
    kappa = cfg.get("kappa")
    if kappa is not None:
        return Boundary1D(P=kappa_to_P(kappa, _sigma_at_wall(sigma_field)))
    return Boundary1D(P=float(cfg.get("P")))


def build_sim1d(cfg: ExperimentConfig, dt: float | None = None) -> SimConfig1D:
    if cfg.engine not in ("sim1d", "convergence"):
        raise ConfigError(f"engine {cfg.engine} is not a 1D ensemble config")
    sigma_field = _field_from(cfg, "sigma", None)
    drift_field = _field_from(cfg, "drift", 0.0)
    model = CoefficientModel1D(drift=drift_field, sigma=sigma_field)
    boundary = _boundary_1d(cfg, sigma_field)
    x0 = cfg.get("x0")
    if isinstance(x0, tuple):
        x0 = x0[0]
    use_dt = dt if dt is not None else cfg.get("dt")
    edges = None
    hist_max = cfg.get("hist_max")
    if hist_max is not None:
        edges = np.linspace(0.0, hist_max, cfg.get("bins", 200) + 1)
    checkpoints = cfg.get("checkpoints") or ()
    config = SimConfig1D(
        model=model,
        boundary=boundary,
        x0=float(x0),
        T=cfg.get("T"),
        dt=use_dt,
        n=cfg.get("n"),
        seed=cfg.seed,
        bin_edges=edges,
        checkpoints=tuple(checkpoints),
    )
    return config


def build_simnd(cfg: ExperimentConfig, dt: float | None = None) -> SimConfigNd:
    from .coefficients import HalfSpaceModel

    x0 = np.asarray(cfg.get("x0"), dtype=float)
    d = x0.size
    flat = np.asarray(cfg.get("sigma"), dtype=float)
    if flat.size != d * d:
        raise ConfigError(
            f"sigma needs {d * d} entries (row-major {d}x{d}), got {flat.size}"
        )
    sigma = flat.reshape(d, d)
    drift = cfg.get("drift")
    model = HalfSpaceModel(
        sigma=sigma, drift=None if drift is None else np.asarray(drift, float)
    )
    kappa = cfg.get("kappa")
    P = kappa_to_P_nd(kappa, sigma) if kappa is not None else float(cfg.get("P"))
    boundary = BoundarySpecNd(P=P, rule=cfg.get("reflection", "conormal"), v=cfg.get("v"))
    bins = cfg.get("bins", 200)
    return SimConfigNd(
        model=model,
        boundary=boundary,
        x0=x0,
        T=cfg.get("T"),
        dt=dt if dt is not None else cfg.get("dt"),
        n=cfg.get("n"),
        seed=cfg.seed,
        x_edges=np.linspace(0.0, cfg.get("x_max", 3.0), bins + 1),
        y_edges=np.linspace(-cfg.get("y_max", 3.0), cfg.get("y_max", 3.0), bins + 1),
    )


def build_fpe(cfg: ExperimentConfig) -> FpeConfig:
    dim = cfg.get("dim")
    x0 = cfg.get("x0")
    kappa = cfg.get("kappa")
    if dim == 1:
        sigma_field = _field_from(cfg, "sigma", None)
        drift_field = _field_from(cfg, "drift", 0.0)
        model = CoefficientModel1D(drift=drift_field, sigma=sigma_field)
        if kappa is None:
            kappa = P_to_kappa(cfg.get("P"), _sigma_at_wall(sigma_field))
        return FpeConfig(
            dim=1,
            model=model,
            kappa=kappa,
            x0=float(x0[0] if isinstance(x0, tuple) else x0),
            T=cfg.get("T"),
            dx=cfg.get("dx") or 0.01,
            pde_dt=cfg.get("pde_dt"),
            L=cfg.get("L"),
            ic=cfg.get("ic", "gaussian"),
            rannacher=cfg.get("rannacher", True),
            krylov_tol=cfg.get("krylov_tol", 1e-10),
            krylov_maxiter=cfg.get("krylov_maxiter", 1000),
        )
    flat = np.asarray(cfg.get("sigma"), dtype=float)
    if flat.size != 4:
        raise ConfigError(f"dim=2 sigma needs 4 entries, got {flat.size}")
    sigma = flat.reshape(2, 2)
    if kappa is None:
        kappa = P_to_kappa(cfg.get("P"), float(sigma[0, 0]))
    drift = cfg.get("drift")
    return FpeConfig(
        dim=2,
        sigma=sigma,
        drift=None if drift is None else np.asarray(drift, float),
        kappa=kappa,
        x0=np.asarray(x0, dtype=float),
        T=cfg.get("T"),
        dx=cfg.get("dx") or 0.02,
        pde_dt=cfg.get("pde_dt"),
        Lx=cfg.get("Lx", 4.0),
        Ly=cfg.get("Ly", 4.0),
        ic=cfg.get("ic", "gaussian"),
        rannacher=cfg.get("rannacher", True),
        krylov_tol=cfg.get("krylov_tol", 1e-10),
        krylov_maxiter=cfg.get("krylov_maxiter", 1000),
    )


def build_analytic(cfg: ExperimentConfig):
    sigma = cfg.get("sigma")
    kappa = cfg.get("kappa")
    if kappa is None:
        kappa = P_to_kappa(cfg.get("P"), sigma)
    params = RobinParams1D(
        sigma=sigma, kappa=kappa, x0=cfg.get("x0"), drift=cfg.get("drift", 0.0)
    )
    t = cfg.get("t")
    x_max = cfg.get("x_max")
    if x_max is None:
        x_max = params.x0 + abs(params.drift) * t + 6.0 * np.sqrt(params.sigma * t)
    x = np.linspace(0.0, x_max, cfg.get("points", 801))
    return params, t, x


# ---------------------------------------------------------------------------
# CSV emission

_GIT_CACHE: dict[str, str] = {}


def git_describe() -> str:
    if "v" not in _GIT_CACHE:
        root = Path(__file__).resolve().parent
        try:
            out = subprocess.run(
                ["git", "-C", str(root), "describe", "--always", "--dirty"],
                capture_output=True,
                text=True,
                timeout=10,
            )
            _GIT_CACHE["v"] = out.stdout.strip() if out.returncode == 0 else "unknown"
        except OSError:
            _GIT_CACHE["v"] = "unknown"
    return _GIT_CACHE["v"]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows, provenance: dict) -> None:
    """Write rows with a header and `# key=value` provenance comments.

    Provenance always includes seed, dt, n and git; callers may pass 'na'."""
    path = Path(path)
    base = {"seed": "na", "dt": "na", "n": "na"}
    base.update(provenance)
    base["git"] = git_describe()
    with open(path, "w", newline="") as fh:
        for key, value in base.items():
            fh.write(f"# {key}={_fmt(value)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_survival_csv(path, result, provenance=None) -> None:
    prov = {"seed": result.seed, "dt": result.dt, "n": result.n_total}
    if provenance:
        prov.update(provenance)
    write_csv(
        path,
        ["dt", "n", "n_sur", "p_hat", "stderr"],
        [(result.dt, result.n_total, result.n_survived, result.p_hat, result.stderr)],
        prov,
    )


def write_density_csv(path, result: EnsembleResult1D, provenance=None) -> None:
    lo, hi, dens = empirical_density(result)
    prov = {"seed": result.seed, "dt": result.dt, "n": result.n_total}
    if provenance:
        prov.update(provenance)
    write_csv(path, ["bin_lo", "bin_hi", "density"], zip(lo, hi, dens), prov)


def write_marginal_csv(path, edges, counts, n_total, seed, dt) -> None:
    lo = edges[:-1]
    hi = edges[1:]
    dens = counts / (n_total * (hi - lo))
    write_csv(
        path,
        ["bin_lo", "bin_hi", "density"],
        zip(lo, hi, dens),
        {"seed": seed, "dt": dt, "n": n_total},
    )


# ---------------------------------------------------------------------------
# convergence runner


@dataclass(frozen=True)
class ConvergenceRow:
    dt: float
    n: int
    n_sur: int
    estimate: float
    reference: float
    bias: float
    stderr: float
    ratio: float


@dataclass(frozen=True)
class ConvergenceTable:
    reference: float
    rows: tuple

    def biases(self) -> np.ndarray:
        return np.asarray([r.bias for r in self.rows])

    def ratios(self) -> np.ndarray:
        return np.asarray([r.ratio for r in self.rows])


def _reference_survival(cfg: ExperimentConfig) -> float:
    target = cfg.get("target")
    if cfg.get("reference") == "analytic":
        sigma_field = _field_from(cfg, "sigma", None)
        drift_field = _field_from(cfg, "drift", 0.0)
        if not (isinstance(sigma_field, ConstantField) and isinstance(drift_field, ConstantField)):
            raise ConfigError("analytic reference needs constant coefficients")
        boundary = _boundary_1d(cfg, sigma_field)
        x0 = cfg.get("x0")
        if isinstance(x0, tuple):
            x0 = x0[0]
        params = RobinParams1D(
            sigma=sigma_field.value,
            kappa=P_to_kappa(boundary.P, sigma_field.value),
            x0=float(x0),
            drift=drift_field.value,
        )
        return survival_analytic(cfg.get("T"), params)
    # reference = fpe
    if target == "sim1d":
        fcfg_values = {
            "engine": "fpe",
            "dim": 1,
            "sigma": cfg.get("sigma"),
            "drift": cfg.get("drift", 0.0),
            "x0": (float(cfg.get("x0") if not isinstance(cfg.get("x0"), tuple) else cfg.get("x0")[0]),),
            "T": cfg.get("T"),
            "seed": cfg.seed,
        }
    else:
        fcfg_values = {
            "engine": "fpe",
            "dim": 2,
            "sigma": cfg.get("sigma"),
            "drift": cfg.get("drift"),
            "x0": cfg.get("x0"),
            "T": cfg.get("T"),
            "Lx": cfg.get("Lx", 4.0),
            "Ly": cfg.get("Ly", 4.0),
            "ic": cfg.get("fpe_ic", "gaussian"),
            "seed": cfg.seed,
        }
    if cfg.get("kappa") is not None:
        fcfg_values["kappa"] = cfg.get("kappa")
    else:
        fcfg_values["P"] = cfg.get("P")
    if cfg.get("fpe_dx") is not None:
        fcfg_values["dx"] = cfg.get("fpe_dx")
    if cfg.get("fpe_dt") is not None:
        fcfg_values["pde_dt"] = cfg.get("fpe_dt")
    fcfg_values = {k: v for k, v in fcfg_values.items() if v is not None}
    fcfg = ExperimentConfig("fpe", tuple(sorted(fcfg_values.items())))
    built = build_fpe(fcfg)
    grid = solve_fpe_1d(built) if built.dim == 1 else solve_fpe_2d(built)
    return grid_survival(grid)


def run_convergence(
    cfg: ExperimentConfig, n_workers: int = 1, out_dir=None
) -> ConvergenceTable:
    """Run the ensemble at every dt in dt_list against a fixed reference.

    All rows share the base seed (common random numbers across dt)."""
    if cfg.engine != "convergence":
        raise ConfigError(f"engine {cfg.engine} is not a convergence config")
    reference = _reference_survival(cfg)
    target = cfg.get("target")
    rows = []
    prev_bias = None
    out_dir = Path(out_dir) if out_dir is not None else None
    for dt in cfg.get("dt_list"):
        if target == "sim1d":
            result = run_ensemble_1d(build_sim1d(cfg, dt=dt), n_workers=n_workers)
        else:
            result = run_ensemble_nd(build_simnd(cfg, dt=dt), n_workers=n_workers)
        bias = reference - result.p_hat
        # ratio is undefined for the first row and for a vanishing bias
        # (reflecting runs have bias identically zero)
        ratio = float("nan") if prev_bias is None or bias == 0.0 else prev_bias / bias
        prev_bias = bias
        rows.append(
            ConvergenceRow(
                dt=dt,
                n=result.n_total,
                n_sur=result.n_survived,
                estimate=result.p_hat,
                reference=reference,
                bias=bias,
                stderr=result.stderr,
                ratio=ratio,
            )
        )
        if out_dir is not None:
            if target == "sim1d":
                write_density_csv(out_dir / f"density_dt{dt!r}.csv", result)
            else:
                write_marginal_csv(
                    out_dir / f"marginal_x_dt{dt!r}.csv",
                    result.x_edges,
                    result.x_counts,
                    result.n_total,
                    result.seed,
                    dt,
                )
                write_marginal_csv(
                    out_dir / f"marginal_y_dt{dt!r}.csv",
                    result.y_edges,
                    result.y_counts,
                    result.n_total,
                    result.seed,
                    dt,
                )
    table = ConvergenceTable(reference=reference, rows=tuple(rows))
    if out_dir is not None:
        write_csv(
            out_dir / "convergence.csv",
            ["dt", "n", "n_sur", "estimate", "reference", "bias", "stderr", "ratio"],
            [
                (r.dt, r.n, r.n_sur, r.estimate, r.reference, r.bias, r.stderr, r.ratio)
                for r in table.rows
            ],
            {
                "seed": cfg.seed,
                "dt": ",".join(repr(float(d)) for d in cfg.get("dt_list")),
                "n": cfg.get("n"),
            },
        )
        _write_convergence_reference(cfg, out_dir)
    return table


def _write_convergence_reference(cfg: ExperimentConfig, out_dir: Path) -> None:
    """Reference curve artifacts for the overlay figures."""
    if cfg.get("target") == "sim1d" and cfg.get("reference") == "analytic":
        sigma_field = _field_from(cfg, "sigma", None)
        drift_field = _field_from(cfg, "drift", 0.0)
        boundary = _boundary_1d(cfg, sigma_field)
        x0 = cfg.get("x0")
        if isinstance(x0, tuple):
            x0 = x0[0]
        params = RobinParams1D(
            sigma=sigma_field.value,
            kappa=P_to_kappa(boundary.P, sigma_field.value),
            x0=float(x0),
            drift=drift_field.value,
        )
        t = cfg.get("T")
        hist_max = cfg.get("hist_max")
        if hist_max is None:
            hist_max = params.x0 + abs(params.drift) * t + 6.0 * np.sqrt(params.sigma * t)
        x = np.linspace(0.0, hist_max, 801)
        p = drift_density(x, t, params)
        write_csv(
            out_dir / "analytic.csv",
            ["x", "p"],
            zip(x, p),
            {"dt": "na", "n": "na", "seed": "na"},
        )
    elif cfg.get("target") == "simnd":
        built = build_fpe(
            ExperimentConfig(
                "fpe",
                tuple(
                    sorted(
                        {
                            k: v
                            for k, v in {
                                "engine": "fpe",
                                "dim": 2,
                                "sigma": cfg.get("sigma"),
                                "drift": cfg.get("drift"),
                                "x0": cfg.get("x0"),
                                "T": cfg.get("T"),
                                "kappa": cfg.get("kappa"),
                                "P": cfg.get("P") if cfg.get("kappa") is None else None,
                                "dx": cfg.get("fpe_dx"),
                                "pde_dt": cfg.get("fpe_dt"),
                                "ic": cfg.get("fpe_ic", "gaussian"),
                                "Lx": cfg.get("Lx", 4.0),
                                "Ly": cfg.get("Ly", 4.0),
                                "seed": cfg.seed,
                            }.items()
                            if v is not None
                        }.items()
                    )
                ),
            )
        )
        grid = solve_fpe_2d(built)
        (xc, px), (yc, py) = grid_marginals(grid)
        write_csv(out_dir / "fpe_marginal_x.csv", ["x", "p"], zip(xc, px), {})
        write_csv(out_dir / "fpe_marginal_y.csv", ["y", "p"], zip(yc, py), {})
