"""Spatial grids and the sampled solution state.

Two one-dimensional grids are supported: a uniform periodic grid on
[0, 2*pi] for the pseudospectral backend and a uniform interior grid on
(0, 1) with homogeneous Dirichlet boundaries for the finite-difference/WENO
backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic grid with nodes x_j = j * (2*pi/N), j = 1..N.

    N must be a power of two (for the fast transform) and at least 8.
    """

    n: int

    def __post_init__(self):
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"periodic grid size must be a power of two >= 8, got {self.n}")

    @property
    def length(self) -> float:
        return TWO_PI

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(1, self.n + 1) * self.spacing


@dataclass(frozen=True)
class DirichletGrid:
    """Interior unknowns x_j = j/(D+1), j = 1..D, on (0, 1).

    The homogeneous boundary values u(0) = u(1) = 0 are eliminated, so
    every stored unknown is strictly interior.
    """

    d: int

    def __post_init__(self):
        if self.d < 10:
            raise ValueError(f"Dirichlet grid needs at least 10 interior nodes, got {self.d}")

    @property
    def spacing(self) -> float:
        return 1.0 / (self.d + 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(1, self.d + 1) * self.spacing


Grid = PeriodicGrid | DirichletGrid


@dataclass
class Field:
    """Solution samples over a grid, tagged with the simulation time.

    Values may be real or complex; compositions with complex diffusion
    coefficients produce complex intermediate fields that are projected
    back to the real line after each full step.
    """

    values: np.ndarray
    grid: Grid
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values)
        npoints = self.grid.n if isinstance(self.grid, PeriodicGrid) else self.grid.d
        if self.values.shape != (npoints,):
            raise DimensionMismatchError(
                f"field has shape {self.values.shape}, grid expects ({npoints},)"
            )

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.grid, self.time)
