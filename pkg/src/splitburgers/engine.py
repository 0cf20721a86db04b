"""Time-stepping core.

Composes the conservation (A) and diffusion (B) sub-flows of a splitting
scheme over pluggable spatial backends, forms Richardson-extrapolated
steps, projects complex states back to the real line after each full step,
counts conservation-flow work, and drives error-versus-step convergence
studies against the designated reference solution (integrating-factor RK4
on the periodic domain, the closed-form series on the Dirichlet domain).
"""

from __future__ import annotations

import math
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exact
from .errors import ConfigurationError, SplitBurgersError, StabilityGuardError
from .fd import DiffusionMatrix, DirichletFlows, ExpCache, build_diffusion_matrix
from .grids import TWO_PI, DirichletGrid, Field, PeriodicGrid
from .schemes import (
    ABA,
    BAB,
    ExtrapolationRule,
    SplittingScheme,
    builtin_scheme,
    resolve_method,
)
from .spectral import SpectralFlows, reference_solve_periodic

Method = SplittingScheme | ExtrapolationRule

SLOPE_WINDOW = (1e-12, 1e-1)
_DIVISIBILITY_RTOL = 1e-9


@dataclass
class WorkCounter:
    """Counts conservation-flow (A) invocations, the cost unit of a run."""

    a_evals: int = 0

    def tick(self) -> None:
        self.a_evals += 1


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """One initial-boundary-value problem instance.

    ``initial`` is either a preset name ("example1", "example2",
    "example3") or an array of samples on the grid nodes. ``resolution``
    is N on the periodic domain and D (interior unknowns) on the Dirichlet
    domain. ``reference_dt`` bounds the step of the periodic reference run.
    """

    boundary: str
    nu: float
    initial: str | np.ndarray
    t_final: float
    resolution: int
    reference_dt: float = 1e-4

    def __post_init__(self):
        if self.boundary not in ("periodic", "dirichlet"):
            raise ConfigurationError(f"unknown boundary type {self.boundary!r}")
        if self.nu <= 0.0:
            raise ConfigurationError(f"viscosity must be positive, got {self.nu}")
        if self.t_final <= 0.0:
            raise ConfigurationError(f"final time must be positive, got {self.t_final}")

    def grid(self) -> PeriodicGrid | DirichletGrid:
        if self.boundary == "periodic":
            return PeriodicGrid(self.resolution)
        return DirichletGrid(self.resolution)

    @property
    def preset(self) -> str | None:
        return self.initial if isinstance(self.initial, str) else None

    def initial_values(self) -> np.ndarray:
        nodes = self.grid().nodes
        if isinstance(self.initial, str):
            if self.initial == "example1":
                return 0.5 + 0.25 * np.sin(nodes)
            if self.initial == "example2":
                return 0.2 * np.sin(np.pi * nodes)
            if self.initial == "example3":
                return 0.5 * nodes * (1.0 - nodes)
            raise ConfigurationError(f"unknown preset {self.initial!r}")
        values = np.asarray(self.initial, dtype=float)
        if values.shape != nodes.shape:
            raise ConfigurationError(
                f"initial data has shape {values.shape}, grid expects {nodes.shape}"
            )
        return values


def example1(nu: float = 0.03, resolution: int = 128, t_final: float = TWO_PI,
             reference_dt: float = 1e-4) -> ProblemSpec:
    """Periodic problem with u0 = 1/2 + sin(x)/4 on [0, 2 pi]."""
    return ProblemSpec("periodic", nu, "example1", t_final, resolution, reference_dt)


def example2(nu: float = 0.1, resolution: int = 200, t_final: float = 1.0) -> ProblemSpec:
    """Dirichlet problem with u0 = sin(pi x)/5 on [0, 1]."""
    return ProblemSpec("dirichlet", nu, "example2", t_final, resolution)


def example3(nu: float = 0.1, resolution: int = 200, t_final: float = 1.0) -> ProblemSpec:
    """Dirichlet problem with u0 = x(1-x)/2 on [0, 1]."""
    return ProblemSpec("dirichlet", nu, "example3", t_final, resolution)


PRESETS = {"example1": example1, "example2": example2, "example3": example3}


@dataclass(frozen=True)
class StepperConfig:
    """Time-stepping choices for one run."""

    method: Method
    h: float
    substeps: int = 5
    project_real: bool = True
    base: SplittingScheme | None = None  # extrapolation base; Strang when omitted

    def __post_init__(self):
        if self.h <= 0.0:
            raise ConfigurationError(f"step size must be positive, got {self.h}")
        if self.substeps < 1:
            raise ConfigurationError(f"substeps must be >= 1, got {self.substeps}")

    def resolved_base(self) -> SplittingScheme:
        return self.base if self.base is not None else builtin_scheme("Strang")


@dataclass
class RunResult:
    """Outcome of one integration: final state, accuracy, and cost."""

    method: str
    h: float
    final: Field
    error_inf: float | None
    work_a_evals: int
    runtime_s: float


@dataclass
class ReportRow:
    method: str
    h: float
    work_a_evals: int
    error_inf: float
    runtime_ms: float


@dataclass
class CellFailure:
    method: str
    h: float
    message: str


@dataclass
class ConvergenceReport:
    """Error-versus-work table with per-method fitted convergence slopes."""

    rows: list[ReportRow] = field(default_factory=list)
    slopes: dict[str, float] = field(default_factory=dict)
    failures: list[CellFailure] = field(default_factory=list)


@dataclass
class BackendResources:
    """Shareable heavyweight state (matrix, exponential cache) for one problem."""

    matrix: DiffusionMatrix | None = None
    cache: ExpCache | None = None

    @classmethod
    def for_problem(cls, problem: ProblemSpec) -> "BackendResources":
        if problem.boundary != "dirichlet":
            return cls()
        matrix = build_diffusion_matrix(DirichletGrid(problem.resolution))
        return cls(matrix=matrix, cache=ExpCache(matrix, problem.nu))


def make_flows(problem: ProblemSpec, substeps: int = 5, counter: WorkCounter | None = None,
               resources: BackendResources | None = None,
               dealias: bool = False) -> SpectralFlows | DirichletFlows:
    grid = problem.grid()
    if isinstance(grid, PeriodicGrid):
        return SpectralFlows(grid, problem.nu, substeps, dealias=dealias, counter=counter)
    resources = resources if resources is not None else BackendResources()
    return DirichletFlows(grid, problem.nu, substeps, counter=counter,
                          matrix=resources.matrix, cache=resources.cache)


def _check_backend(scheme: SplittingScheme, flows) -> None:
    if not flows.accepts_complex_steps and not scheme.real_coefficients_only:
        raise StabilityGuardError(
            f"{scheme.name} has complex diffusion coefficients, which are unstable "
            f"on the {flows.boundary} (finite-difference/WENO) backend; "
            f"choose a real-coefficient method"
        )


def split_step(state: Field, scheme: SplittingScheme, h: float, flows,
               project_real: bool = True) -> Field:
    """One full splitting step, sub-flows applied right to left.

    BAB: B(b1 h), A(a1 h), B(b2 h), ..., A(am h), B(b_{m+1} h).
    ABA starts and ends with the conservation flow instead. With
    ``project_real`` the state is projected onto its real part after the
    full composition, never between sub-flows.
    """
    _check_backend(scheme, flows)
    v = state.values
    if scheme.pattern == BAB:
        v = flows.apply_b(v, scheme.b[0] * h)
        for i in range(len(scheme.a)):
            v = flows.apply_a(v, scheme.a[i] * h)
            v = flows.apply_b(v, scheme.b[i + 1] * h)
    elif scheme.pattern == ABA:
        v = flows.apply_a(v, scheme.a[0] * h)
        for i in range(len(scheme.b)):
            v = flows.apply_b(v, scheme.b[i] * h)
            v = flows.apply_a(v, scheme.a[i + 1] * h)
    else:
        raise ConfigurationError(f"unknown pattern {scheme.pattern!r}")
    if project_real:
        v = flows.project(v)
    return Field(v, state.grid, state.time + h)


def _merged_base_steps(values: np.ndarray, base: SplittingScheme, g: float, n: int,
                       flows) -> np.ndarray:
    # n consecutive BAB base steps of size g; adjacent diffusion factors at
    # the step interfaces are merged into a single exponential.
    m = len(base.a)
    v = flows.apply_b(values, base.b[0] * g)
    for i in range(n):
        for j in range(m):
            v = flows.apply_a(v, base.a[j] * g)
            tau = base.b[j + 1] * g
            if j == m - 1 and i < n - 1:
                tau = (base.b[m] + base.b[0]) * g
            v = flows.apply_b(v, tau)
    return v


def extrapolated_step(state: Field, rule: ExtrapolationRule, h: float, flows,
                      base: SplittingScheme | None = None,
                      project_real: bool = True) -> Field:
    """One extrapolated step: a weighted sum of base-method compositions.

    Each term runs the base method n_j times at step h/n_j (with interface
    diffusion factors merged); the fields are then combined with the
    rule's weights. Projection happens after the combination.
    """
    base = base if base is not None else builtin_scheme("Strang")
    if base.name != "Strang" or base.pattern != BAB:
        raise ConfigurationError(
            "extrapolated steps are built on the BAB Strang base method"
        )
    _check_backend(base, flows)
    acc = None
    for weight, nsub in rule.terms:
        term = _merged_base_steps(state.values, base, h / nsub, nsub, flows)
        acc = float(weight) * term if acc is None else acc + float(weight) * term
    if project_real:
        acc = flows.project(acc)
    return Field(acc, state.grid, state.time + h)


def _num_steps(t_final: float, h: float) -> int:
    steps = int(round(t_final / h))
    if steps < 1 or abs(steps * h - t_final) > _DIVISIBILITY_RTOL * t_final:
        raise ConfigurationError(
            f"step size {h} does not divide the final time {t_final}; "
            f"a final partial step is not allowed"
        )
    return steps


def work_per_step(method: Method) -> int:
    return method.stages


def compute_reference(problem: ProblemSpec) -> np.ndarray | None:
    """Reference solution samples at the final time, or None if unavailable.

    Periodic problems use the integrating-factor oracle for any initial
    data; Dirichlet problems use the closed-form series, which exists for
    the two built-in presets only.
    """
    if problem.boundary == "periodic":
        u0 = Field(problem.initial_values(), problem.grid())
        ref = reference_solve_periodic(u0, problem.nu, problem.t_final, problem.reference_dt)
        return ref.values
    if problem.preset in ("example2", "example3"):
        series = _cached_series(problem.preset, problem.nu)
        return np.asarray(exact.evaluate_exact(series, problem.grid().nodes, problem.t_final))
    return None


_SERIES_CACHE: dict[tuple[str, float], exact.HopfColeSeries] = {}


def _cached_series(preset: str, nu: float) -> exact.HopfColeSeries:
    key = (preset, float(nu))
    if key not in _SERIES_CACHE:
        _SERIES_CACHE[key] = exact.hopf_cole_coefficients(preset, nu)
    return _SERIES_CACHE[key]


def integrate(problem: ProblemSpec, config: StepperConfig,
              reference: np.ndarray | None = None,
              resources: BackendResources | None = None) -> RunResult:
    """Step the problem to its final time and measure the infinity-norm
    error against the designated reference."""
    method = config.method
    if problem.boundary == "dirichlet" and not method.real_coefficients_only:
        raise StabilityGuardError(
            f"{method.name} has complex diffusion coefficients, which are unstable "
            f"on the dirichlet (finite-difference/WENO) backend"
        )
    steps = _num_steps(problem.t_final, config.h)

    counter = WorkCounter()
    flows = make_flows(problem, config.substeps, counter, resources)
    state = Field(problem.initial_values(), problem.grid(), 0.0)

    start = _time.perf_counter()
    if isinstance(method, ExtrapolationRule):
        base = config.resolved_base()
        for _ in range(steps):
            state = extrapolated_step(state, method, config.h, flows, base,
                                      config.project_real)
    else:
        for _ in range(steps):
            state = split_step(state, method, config.h, flows, config.project_real)
    runtime = _time.perf_counter() - start

    if reference is None:
        reference = compute_reference(problem)
    error = None
    if reference is not None:
        error = float(np.max(np.abs(state.values - reference)))

    return RunResult(
        method=method.name,
        h=config.h,
        final=state,
        error_inf=error,
        work_a_evals=counter.a_evals,
        runtime_s=runtime,
    )


def fit_slope(h_values: Sequence[float], errors: Sequence[float],
              window: tuple[float, float] = SLOPE_WINDOW) -> float | None:
    """Least-squares slope of log(error) against log(h).

    Only rows with finite errors inside the window count; at least three
    are required. The window excludes the roundoff plateau below and the
    pre-asymptotic regime above.
    """
    hs = np.asarray(h_values, dtype=float)
    es = np.asarray(errors, dtype=float)
    keep = np.isfinite(es) & (es >= window[0]) & (es <= window[1])
    if keep.sum() < 3:
        return None
    slope = np.polyfit(np.log(hs[keep]), np.log(es[keep]), 1)[0]
    return float(slope)


def _run_cell(args) -> tuple[ReportRow | None, CellFailure | None]:
    problem, method, h, substeps, project_real, reference, resources = args
    try:
        config = StepperConfig(method=method, h=h, substeps=substeps,
                               project_real=project_real)
        result = integrate(problem, config, reference=reference, resources=resources)
        err = math.nan if result.error_inf is None else result.error_inf
        row = ReportRow(result.method, h, result.work_a_evals, err,
                        result.runtime_s * 1e3)
        return row, None
    except SplitBurgersError as e:
        return None, CellFailure(method.name, h, str(e))


def convergence_study(problem: ProblemSpec, methods: Sequence[str | Method],
                      h_values: Sequence[float], substeps: int = 5,
                      project_real: bool = True, workers: int = 1,
                      reference: np.ndarray | None = None) -> ConvergenceReport:
    """Run every (method, step-size) cell and fit per-method slopes.

    Cell failures (guards, blow-ups) are recorded without aborting the
    rest of the study. Rows are sorted by method name and descending step
    size; slopes are fitted only for methods with at least three rows
    inside the error window. A precomputed ``reference`` (samples at the
    final time) skips the oracle run.
    """
    if not methods or not len(h_values):
        raise ConfigurationError("need at least one method and one step size")
    resolved = [resolve_method(m) if isinstance(m, str) else m for m in methods]
    if reference is None:
        reference = compute_reference(problem)

    cells = [(m, h) for m in resolved for h in h_values]
    if workers > 1:
        args = [(problem, m, h, substeps, project_real, reference, None)
                for m, h in cells]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell, args))
    else:
        resources = BackendResources.for_problem(problem)
        outcomes = [
            _run_cell((problem, m, h, substeps, project_real, reference, resources))
            for m, h in cells
        ]

    report = ConvergenceReport()
    for row, failure in outcomes:
        if row is not None:
            report.rows.append(row)
        else:
            report.failures.append(failure)
    report.rows.sort(key=lambda r: (r.method.lower(), -r.h))

    for method in resolved:
        rows = [r for r in report.rows if r.method == method.name]
        slope = fit_slope([r.h for r in rows], [r.error_inf for r in rows])
        if slope is not None:
            report.slopes[method.name] = slope
    return report
