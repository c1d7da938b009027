"""Simulation toolkit for diffusion on half-spaces with partially reflecting
(radiation) boundaries: Euler ensemble engines, closed-form references,
Fokker-Planck reference solvers, and boundary-layer verification tools."""

from .analytic1d import (
    RobinParams1D,
    bryan_density,
    density,
    density_dx,
    drift_density,
    survival_analytic,
)
from .blverify import (
    PropagatorInput,
    apply_propagator_1d,
    boundary_derivative_check,
    flux_integral,
)
from .coefficients import (
    CoefficientModel1D,
    ConstantField,
    HalfSpaceModel,
    LinearField,
    constant_model_1d,
    eval_drift,
    eval_sigma,
    factor_diffusion,
    make_field,
    register_family,
    sigma_dx,
)
from .errors import ConfigError, NumericError
from .euler1d import (
    Boundary1D,
    EnsembleResult1D,
    SimConfig1D,
    P_to_kappa,
    default_bin_edges,
    empirical_density,
    kappa_to_P,
    run_ensemble_1d,
    step_1d,
)
from .eulernd import (
    BoundarySpecNd,
    EnsembleResultNd,
    SimConfigNd,
    conormal_direction,
    kappa_to_P_nd,
    reflect_oblique,
    run_ensemble_nd,
    step_nd,
)
from .fpe import (
    DensityGrid,
    FpeConfig,
    FpeDiagnostics,
    grid_marginals,
    grid_survival,
    solve_fpe_1d,
    solve_fpe_2d,
)
from .harness import (
    ConvergenceRow,
    ConvergenceTable,
    ExperimentConfig,
    emit_config,
    parse_config,
    parse_config_text,
    run_convergence,
    write_csv,
)

__version__ = "0.1.0"
