"""Closed-form reference solutions on the Dirichlet domain.

The Hopf-Cole transformation turns the viscous Burgers equation into the
heat equation, so for initial data whose integral exponentiates nicely the
solution is a ratio of two cosine/sine series,

    u(x, t) = 2 nu pi * sum_n c_n exp(-n^2 pi^2 nu t) n sin(n pi x)
              ----------------------------------------------------
              c_0 + sum_n c_n exp(-n^2 pi^2 nu t) cos(n pi x),

with c_0, c_n the cosine moments of exp(-(2 nu)^{-1} int_0^x u_0). Two
such families are built in:

* ``example2``: u_0 = (1/5) sin(pi x), weight exp(-(10 pi nu)^{-1} (1 - cos(pi x)))
* ``example3``: u_0 = (1/2) x (1 - x), weight exp(-x^2 (24 nu)^{-1} (3 - 2x))

The coefficients are obtained by numerical quadrature (adaptive Simpson by
default, fixed-node Gauss-Legendre as an independent cross-check) and the
series is truncated at M terms with a certified tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, EvaluationError, PrecisionError

ADAPTIVE_SIMPSON = "adaptive_simpson"
GAUSS_LEGENDRE = "gauss_legendre"

DEFAULT_TRUNCATION = 100
DEFAULT_T_MIN = 0.05
DEFAULT_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    """How to evaluate the coefficient integrals on [0, 1]."""

    rule: str = ADAPTIVE_SIMPSON
    tolerance: float = 1e-12
    max_subdivisions: int = 1 << 20
    nodes: int = 256  # Gauss-Legendre only

    def __post_init__(self):
        if self.rule not in (ADAPTIVE_SIMPSON, GAUSS_LEGENDRE):
            raise ConfigurationError(f"unknown quadrature rule {self.rule!r}")
        if self.tolerance <= 0.0:
            raise ConfigurationError("quadrature tolerance must be positive")


def adaptive_simpson(fn, lo: float, hi: float, tolerance: float,
                     max_subdivisions: int = 1 << 20) -> float:
    """Adaptive Simpson quadrature with the standard 1/15 error estimate.

    Raises :class:`PrecisionError` carrying the achieved tolerance when the
    subdivision budget runs out before the local error estimates drop below
    the requested tolerance.
    """
    used = 0
    worst = 0.0

    def node(a, b, fa, fm, fb, whole, tol, depth):
        nonlocal used, worst
        mid = 0.5 * (a + b)
        lmid, rmid = 0.5 * (a + mid), 0.5 * (mid + b)
        flm, frm = fn(lmid), fn(rmid)
        left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb)
        used += 2
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol or depth >= 60:
            worst = max(worst, abs(delta) / 15.0)
            return left + right + delta / 15.0
        if used > max_subdivisions:
            raise PrecisionError(
                f"quadrature did not converge within {max_subdivisions} subdivisions; "
                f"worst local error estimate {max(worst, abs(delta) / 15.0):.3g}",
                achieved=max(worst, abs(delta) / 15.0),
            )
        return (node(a, mid, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + node(mid, b, fm, frm, fb, right, 0.5 * tol, depth + 1))

    fa, fb = fn(lo), fn(hi)
    fm = fn(0.5 * (lo + hi))
    whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
    return node(lo, hi, fa, fm, fb, whole, tolerance, 0)


def gauss_legendre(fn, lo: float, hi: float, nodes: int = 256) -> float:
    """Single-panel Gauss-Legendre quadrature with the given node count."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    xm = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    return 0.5 * (hi - lo) * float(np.dot(w, np.array([fn(t) for t in xm])))


def _integrate(fn, quad: QuadratureSpec, panels: int = 1) -> float:
    """Integrate fn over [0, 1], splitting into panels first.

    The adaptive rule terminates on agreement between refinement levels and
    is therefore blind to integrands that oscillate in step with its sample
    points (cos(n pi x) evaluates to 1 at every dyadic point when n is a
    power of two). Splitting into one panel per half-period before adapting
    removes that failure mode; the tolerance is divided among the panels.
    """
    if quad.rule == ADAPTIVE_SIMPSON:
        if panels <= 1:
            return adaptive_simpson(fn, 0.0, 1.0, quad.tolerance, quad.max_subdivisions)
        edges = np.linspace(0.0, 1.0, panels + 1)
        tol = quad.tolerance / panels
        return math.fsum(
            adaptive_simpson(fn, float(edges[i]), float(edges[i + 1]), tol,
                             quad.max_subdivisions)
            for i in range(panels)
        )
    return gauss_legendre(fn, 0.0, 1.0, quad.nodes)


def initial_condition_weight(example: str, nu: float):
    """exp of minus the scaled antiderivative of the initial condition."""
    if example == "example2":
        scale = 1.0 / (10.0 * math.pi * nu)
        return lambda x: math.exp(-scale * (1.0 - math.cos(math.pi * x)))
    if example == "example3":
        scale = 1.0 / (24.0 * nu)
        return lambda x: math.exp(-x * x * scale * (3.0 - 2.0 * x))
    raise ConfigurationError(f"no closed-form solution for {example!r}")


@dataclass
class HopfColeSeries:
    """Truncated series coefficients of one closed-form solution."""

    nu: float
    c0: float
    c: np.ndarray
    quadrature: QuadratureSpec
    t_min: float = DEFAULT_T_MIN
    tail_tolerance: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if len(self.c) < 1:
            raise ConfigurationError("series needs at least one cosine coefficient")
        if self.c0 <= 0.0:
            raise ConfigurationError(f"leading coefficient must be positive, got {self.c0}")
        m = len(self.c)
        tail = abs(self.c[-1]) * math.exp(-(m * math.pi) ** 2 * self.nu * self.t_min)
        if tail > self.tail_tolerance:
            raise PrecisionError(
                f"truncation at M={m} not certified for t >= {self.t_min}: "
                f"tail bound {tail:.3g} exceeds {self.tail_tolerance:.3g}",
                achieved=tail,
            )

    @property
    def truncation(self) -> int:
        return len(self.c)


def hopf_cole_coefficients(example: str, nu: float, truncation: int = DEFAULT_TRUNCATION,
                           quad: QuadratureSpec | None = None,
                           t_min: float = DEFAULT_T_MIN) -> HopfColeSeries:
    """Compute c_0 and c_1..c_M for one of the built-in solution families.

    c_0 integrates the weight alone; c_n carries the factor 2 and the
    cos(n pi x) kernel.
    """
    if nu <= 0.0:
        raise ConfigurationError(f"viscosity must be positive, got {nu}")
    if truncation < 1:
        raise ConfigurationError(f"truncation must be >= 1, got {truncation}")
    quad = quad if quad is not None else QuadratureSpec()
    weight = initial_condition_weight(example, nu)

    c0 = _integrate(weight, quad)
    coeffs = np.empty(truncation)
    for n in range(1, truncation + 1):
        kernel = lambda x, n=n: weight(x) * math.cos(n * math.pi * x)
        coeffs[n - 1] = 2.0 * _integrate(kernel, quad, panels=n)
    return HopfColeSeries(nu=nu, c0=c0, c=coeffs, quadrature=quad, t_min=t_min)


def evaluate_exact(series: HopfColeSeries, x, t: float):
    """Evaluate the series ratio at positions x in [0, 1] and time t.

    ``t`` must not be below the certified minimum time; boundary positions
    return exactly zero since every sine factor vanishes there.
    """
    if t < series.t_min:
        raise EvaluationError(
            f"series truncation certified for t >= {series.t_min}, got t = {t}"
        )
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if xs.min() < 0.0 or xs.max() > 1.0:
        raise EvaluationError("positions must lie in [0, 1]")

    n = np.arange(1, series.truncation + 1)
    damped = series.c * np.exp(-(n * math.pi) ** 2 * series.nu * t)
    phase = np.outer(n, xs) * math.pi
    numer = 2.0 * series.nu * math.pi * ((damped * n) @ np.sin(phase))
    denom = series.c0 + damped @ np.cos(phase)
    if np.min(np.abs(denom)) < 1e-300:
        raise EvaluationError("series denominator vanished")
    out = numer / denom
    out[(xs == 0.0) | (xs == 1.0)] = 0.0  # every sine factor vanishes there
    return out if np.ndim(x) else float(out[0])
