"""Dirichlet finite-difference/WENO backend.

The diffusion sub-flow uses the fourth-order five-point Laplacian with the
boundary values eliminated and advances it exactly through a matrix
exponential (scaling-and-squaring with a diagonal Pade approximant, cached
per step size). The conservation sub-flow uses fifth-order WENO fluxes on
a global Lax-Friedrichs splitting, advanced by classical RK4 with zero
ghost values at both boundaries.

Boundary stencil note: the four-point-plus-eliminated-boundary row serves
the second and second-to-last unknowns. For the first and last rows a
one-sided fourth-order second-derivative stencil needs six points,
[45, -154, 214, -156, 61, -10]/(12 dx^2); that is the default. The
truncated five-coefficient variant (dropping the trailing -10) is kept
behind ``boundary_stencil="printed"`` for sensitivity checks, but it is not
a consistent difference formula (its row sums to 10/(12 dx^2) instead of 0)
and it flips the sign of the extreme eigenvalues, so diffusion flows built
from it grow instead of decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BackendCompatibilityError,
    BlowUpError,
    ConfigurationError,
    DimensionMismatchError,
    InadmissibleStepError,
)
from .grids import DirichletGrid, Field

DEFAULT_SUBSTEPS = 5
GHOST = 3

# fifth-order flux reconstruction: linear weights and regularization
WENO_GAMMA = (1.0 / 10.0, 3.0 / 5.0, 3.0 / 10.0)
WENO_EPS = 1e-6

_SIXPOINT_ROW = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0])
_PRINTED_ROW = np.array([45.0, -154.0, 214.0, -156.0, 61.0])
_NEXT_ROW = np.array([16.0, -30.0, 16.0, -1.0])
_INTERIOR = np.array([-1.0, 16.0, -30.0, 16.0, -1.0])


def burgers_flux(u: np.ndarray) -> np.ndarray:
    return 0.5 * u * u


@dataclass(frozen=True)
class DiffusionMatrix:
    """Dense Laplacian approximation B (without the viscosity factor).

    ``max_real_eigenvalue`` is computed at construction; the heat flow
    exp(nu tau B) is contractive for tau > 0 iff it is negative.
    """

    values: np.ndarray
    grid: DirichletGrid
    boundary_stencil: str
    max_real_eigenvalue: float

    @property
    def is_dissipative(self) -> bool:
        return self.max_real_eigenvalue < 0.0


def build_diffusion_matrix(grid: DirichletGrid,
                           boundary_stencil: str = "sixpoint") -> DiffusionMatrix:
    """Assemble the D x D fourth-order Laplacian for interior unknowns.

    Interior rows carry [-1, 16, -30, 16, -1]/(12 dx^2); the rows adjacent
    to each boundary use the same stencil with the zero boundary value
    eliminated; the first and last rows use the one-sided stencil selected
    by ``boundary_stencil`` ("sixpoint" or "printed", see module note).
    The construction is exactly persymmetric.
    """
    d = grid.d
    if d < 6:
        raise DimensionMismatchError(f"stencil needs at least 6 interior nodes, got {d}")
    if boundary_stencil not in ("sixpoint", "printed"):
        raise ConfigurationError(f"unknown boundary stencil {boundary_stencil!r}")

    first = _SIXPOINT_ROW if boundary_stencil == "sixpoint" else _PRINTED_ROW
    b = np.zeros((d, d))
    b[0, : len(first)] = first
    b[1, :4] = _NEXT_ROW
    for i in range(2, d - 2):
        b[i, i - 2 : i + 3] = _INTERIOR
    b[d - 2, d - 4 :] = _NEXT_ROW[::-1]
    b[d - 1, d - len(first) :] = first[::-1]
    b /= 12.0 * grid.spacing ** 2

    max_re = float(np.linalg.eigvals(b).real.max())
    return DiffusionMatrix(b, grid, boundary_stencil, max_re)


# [m/m] diagonal Pade coefficients of exp(x) for m = 6
_PADE6 = (1.0, 1.0 / 2.0, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0,
          1.0 / 15840.0, 1.0 / 665280.0)


def matrix_exponential(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a degree-6 diagonal
    Pade approximant.

    The input is scaled by a power of two until its 1-norm is at most 1/2,
    where the [6/6] approximant is accurate to machine precision, then the
    result is repeatedly squared. Works for real and complex matrices.
    """
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"need a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix exponential of a non-finite matrix")

    norm = float(np.linalg.norm(a, 1))
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    a = a / (2.0 ** squarings)

    eye = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    odd = a @ (_PADE6[1] * eye + _PADE6[3] * a2 + _PADE6[5] * a4)
    even = _PADE6[0] * eye + _PADE6[2] * a2 + _PADE6[4] * a4 + _PADE6[6] * a6
    x = np.linalg.solve(even - odd, even + odd)
    for _ in range(squarings):
        x = x @ x
    return x


class ExpCache:
    """Cache of heat-flow propagators exp(nu tau B) keyed by (tau, nu).

    Entries are computed once per distinct effective step (scheme
    coefficient times step size) and reused across time steps and runs
    sharing the matrix. Lookups after the warm-up phase are read-only.
    """

    def __init__(self, matrix: DiffusionMatrix, nu: float):
        if nu <= 0.0:
            raise ConfigurationError(f"viscosity must be positive, got {nu}")
        self.matrix = matrix
        self.nu = nu
        self._entries: dict[tuple[float, float], np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def propagator(self, tau: float) -> np.ndarray:
        key = (float(tau), float(self.nu))
        e = self._entries.get(key)
        if e is None:
            e = matrix_exponential(self.nu * tau * self.matrix.values)
            self._entries[key] = e
        return e


def fd_diffusion_flow(state: Field, nu: float, tau: float, cache: ExpCache) -> Field:
    """Exact flow of dU/dt = nu * B U over real time tau >= 0."""
    if isinstance(tau, complex) or np.iscomplexobj(tau):
        raise BackendCompatibilityError("finite-difference diffusion flow takes real steps only")
    if tau < 0.0:
        raise InadmissibleStepError(f"diffusion flow needs tau >= 0, got {tau:.3g}")
    if cache.nu != nu:
        raise ConfigurationError("cache was built for a different viscosity")
    return Field(cache.propagator(tau) @ state.values, state.grid, state.time)


def weno5_reconstruct(g0, g1, g2, g3, g4):
    """Fifth-order WENO interface value from five upwind-ordered samples.

    Three third-order candidate fluxes are blended with nonlinear weights
    w_i built from the linear weights (1/10, 3/5, 3/10) and smoothness
    indicators; eps = 1e-6 regularizes the weights. Inputs may be scalars
    or (broadcastable) arrays of windowed samples.
    """
    c1 = g0 / 3.0 - 7.0 * g1 / 6.0 + 11.0 * g2 / 6.0
    c2 = -g1 / 6.0 + 5.0 * g2 / 6.0 + g3 / 3.0
    c3 = g2 / 3.0 + 5.0 * g3 / 6.0 - g4 / 6.0
    b1 = 13.0 / 12.0 * (g0 - 2.0 * g1 + g2) ** 2 + 0.25 * (g0 - 4.0 * g1 + 3.0 * g2) ** 2
    b2 = 13.0 / 12.0 * (g1 - 2.0 * g2 + g3) ** 2 + 0.25 * (g1 - g3) ** 2
    b3 = 13.0 / 12.0 * (g2 - 2.0 * g3 + g4) ** 2 + 0.25 * (3.0 * g2 - 4.0 * g3 + g4) ** 2
    w1 = WENO_GAMMA[0] / (WENO_EPS + b1) ** 2
    w2 = WENO_GAMMA[1] / (WENO_EPS + b2) ** 2
    w3 = WENO_GAMMA[2] / (WENO_EPS + b3) ** 2
    total = w1 + w2 + w3
    return (w1 * c1 + w2 * c2 + w3 * c3) / total


def weno_weights(g0, g1, g2, g3, g4):
    """Normalized nonlinear weights for one five-sample window (diagnostic)."""
    b1 = 13.0 / 12.0 * (g0 - 2.0 * g1 + g2) ** 2 + 0.25 * (g0 - 4.0 * g1 + 3.0 * g2) ** 2
    b2 = 13.0 / 12.0 * (g1 - 2.0 * g2 + g3) ** 2 + 0.25 * (g1 - g3) ** 2
    b3 = 13.0 / 12.0 * (g2 - 2.0 * g3 + g4) ** 2 + 0.25 * (3.0 * g2 - 4.0 * g3 + g4) ** 2
    w = np.array([WENO_GAMMA[i] / (WENO_EPS + b) ** 2 for i, b in enumerate((b1, b2, b3))])
    return w / w.sum(axis=0)


def weno_flux(u_ext: np.ndarray, flux=burgers_flux) -> np.ndarray:
    """Numerical interface fluxes from a ghost-extended state array.

    ``u_ext`` holds D interior values padded with 3 ghost values per side;
    the return value holds the D+1 interface fluxes. The flux is split
    globally as f_pm = (f(u) +- alpha u)/2 with alpha = max|u|; the
    positive part is reconstructed with the upwind-biased stencils and the
    negative part with their mirror images about each interface.
    """
    u_ext = np.asarray(u_ext)
    if len(u_ext) < 2 * GHOST + 1:
        raise DimensionMismatchError(
            f"need at least {2 * GHOST + 1} samples (3 ghosts per side), got {len(u_ext)}"
        )
    alpha = float(np.max(np.abs(u_ext)))
    fu = flux(u_ext)
    f_pos = 0.5 * (fu + alpha * u_ext)
    f_neg = 0.5 * (fu - alpha * u_ext)

    m = len(u_ext) - 2 * GHOST + 1  # number of interfaces
    windows_pos = [f_pos[i : i + m] for i in range(5)]
    windows_neg = [f_neg[5 - i : 5 - i + m] for i in range(5)]
    return weno5_reconstruct(*windows_pos) + weno5_reconstruct(*windows_neg)


def _weno_rhs(u: np.ndarray, spacing: float) -> np.ndarray:
    ghosts = np.zeros(GHOST)
    fh = weno_flux(np.concatenate([ghosts, u, ghosts]))
    return -(fh[1:] - fh[:-1]) / spacing


def weno_conservation_flow(state: Field, tau: float, substeps: int = DEFAULT_SUBSTEPS,
                           counter=None) -> Field:
    """Advance u_t + (u^2/2)_x = 0 over time tau >= 0 with RK4 in time.

    Homogeneous Dirichlet ghost values (zero) close the stencils at both
    boundaries. One invocation counts as one unit of conservation-flow
    work, independent of ``substeps``.
    """
    if np.iscomplexobj(state.values):
        raise BackendCompatibilityError("WENO conservation flow takes real states only")
    if isinstance(tau, complex) or np.iscomplexobj(tau):
        raise BackendCompatibilityError("WENO conservation flow takes real steps only")
    if tau < 0.0:
        raise InadmissibleStepError(f"conservation flow needs tau >= 0, got {tau:.3g}")
    if substeps < 1:
        raise ConfigurationError(f"substeps must be >= 1, got {substeps}")
    grid = state.grid
    if not isinstance(grid, DirichletGrid):
        raise BackendCompatibilityError("WENO conservation flow needs a Dirichlet grid")

    u = np.asarray(state.values, dtype=float)
    dt = tau / substeps
    dx = grid.spacing
    # overflow is detected by the finiteness check, not by numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(substeps):
            k1 = _weno_rhs(u, dx)
            k2 = _weno_rhs(u + 0.5 * dt * k1, dx)
            k3 = _weno_rhs(u + 0.5 * dt * k2, dx)
            k4 = _weno_rhs(u + dt * k3, dx)
            u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.isfinite(u).all():
                raise BlowUpError(
                    f"WENO flow blew up at internal substep {i + 1} of {substeps}",
                    step=i + 1,
                )
    if counter is not None:
        counter.tick()
    return Field(u, grid, state.time)


class DirichletFlows:
    """Conservation/diffusion sub-flow pair on a Dirichlet grid.

    Real coefficients only. The diffusion matrix and its exponentials are
    shared between instances (and across a convergence study) through the
    ``matrix``/``cache`` arguments.
    """

    boundary = "dirichlet"
    accepts_complex_steps = False

    def __init__(self, grid: DirichletGrid, nu: float, substeps: int = DEFAULT_SUBSTEPS,
                 counter=None, matrix: DiffusionMatrix | None = None,
                 cache: ExpCache | None = None):
        self.grid = grid
        self.nu = nu
        self.substeps = substeps
        self.counter = counter
        self.matrix = matrix if matrix is not None else build_diffusion_matrix(grid)
        self.cache = cache if cache is not None else ExpCache(self.matrix, nu)

    def with_counter(self, counter) -> "DirichletFlows":
        clone = DirichletFlows.__new__(DirichletFlows)
        clone.__dict__.update(self.__dict__)
        clone.counter = counter
        return clone

    def apply_a(self, values: np.ndarray, tau: float) -> np.ndarray:
        out = weno_conservation_flow(
            Field(values, self.grid), tau, self.substeps, self.counter
        )
        return out.values

    def apply_b(self, values: np.ndarray, tau: float) -> np.ndarray:
        out = fd_diffusion_flow(Field(values, self.grid), self.nu, tau, self.cache)
        return out.values

    @staticmethod
    def project(values: np.ndarray) -> np.ndarray:
        return np.real(values).copy()
