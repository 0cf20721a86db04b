"""High-order operator-splitting integrators for the 1D viscous Burgers equation.

Real-, complex-, and extrapolated-coefficient splitting methods over a
periodic pseudospectral backend and a Dirichlet finite-difference/WENO
backend, with exact reference solutions and an error-versus-work study
harness.
"""

from .engine import (
    ConvergenceReport,
    ProblemSpec,
    RunResult,
    StepperConfig,
    WorkCounter,
    convergence_study,
    example1,
    example2,
    example3,
    extrapolated_step,
    fit_slope,
    integrate,
    split_step,
)
from .exact import HopfColeSeries, QuadratureSpec, evaluate_exact, hopf_cole_coefficients
from .fd import (
    DirichletFlows,
    ExpCache,
    build_diffusion_matrix,
    fd_diffusion_flow,
    matrix_exponential,
    weno_conservation_flow,
    weno_flux,
)
from .grids import DirichletGrid, Field, PeriodicGrid
from .schemes import (
    ExtrapolationRule,
    SplittingScheme,
    builtin_extrapolation,
    builtin_scheme,
    resolve_method,
    validate,
    validate_extrapolation,
)
from .spectral import (
    SpectralField,
    SpectralFlows,
    conservation_flow_spectral,
    conservation_rhs_spectral,
    diffusion_flow_spectral,
    forward_dft,
    inverse_dft,
    reference_solve_periodic,
)

__version__ = "0.1.0"
