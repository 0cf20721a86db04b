import math

import numpy as np
import pytest

from splitburgers.errors import ConfigurationError, EvaluationError, PrecisionError
from splitburgers.exact import (
    GAUSS_LEGENDRE,
    HopfColeSeries,
    QuadratureSpec,
    adaptive_simpson,
    evaluate_exact,
    gauss_legendre,
    hopf_cole_coefficients,
    initial_condition_weight,
)

GL_SPEC = QuadratureSpec(rule=GAUSS_LEGENDRE, nodes=256)


@pytest.fixture(scope="module")
def ex2_series():
    return hopf_cole_coefficients("example2", nu=0.1, truncation=60)


def test_quadrature_rules_on_known_integrals():
    assert abs(adaptive_simpson(math.sin, 0.0, math.pi, 1e-12) - 2.0) < 1e-12
    assert abs(gauss_legendre(math.sin, 0.0, math.pi, 64) - 2.0) < 1e-13
    assert abs(adaptive_simpson(lambda x: math.exp(3 * x), 0.0, 1.0, 1e-12)
               - (math.exp(3) - 1) / 3) < 1e-11


def test_adaptive_simpson_budget_exhaustion_reports_achieved():
    # incommensurate frequency so no sample-point aliasing hides the wiggles
    wiggly = lambda x: math.cos(7.3 * 2 * math.pi * x)
    with pytest.raises(PrecisionError) as err:
        adaptive_simpson(wiggly, 0.0, 1.0, 1e-14, max_subdivisions=8)
    assert err.value.achieved is not None and err.value.achieved > 0


def test_weight_functions_solve_the_defining_ode():
    # the weight w satisfies w'/w = -u0/(2 nu); check by central differences
    for example, u0 in (
        ("example2", lambda x: 0.2 * math.sin(math.pi * x)),
        ("example3", lambda x: 0.5 * x * (1 - x)),
    ):
        nu = 0.07
        w = initial_condition_weight(example, nu)
        for x in (0.1, 0.37, 0.5, 0.81):
            eps = 1e-6
            logderiv = (math.log(w(x + eps)) - math.log(w(x - eps))) / (2 * eps)
            assert abs(logderiv + u0(x) / (2 * nu)) < 1e-6


def test_large_viscosity_limit():
    series = hopf_cole_coefficients("example2", nu=1e6, truncation=10)
    assert abs(series.c0 - 1.0) < 1e-6
    assert np.max(np.abs(series.c)) < 1e-6


def test_cross_rule_agreement_example2():
    nu = 0.1
    simpson = hopf_cole_coefficients("example2", nu, truncation=50)
    gl = hopf_cole_coefficients("example2", nu, truncation=50, quad=GL_SPEC)
    assert abs(simpson.c0 - gl.c0) < 1e-12
    assert np.max(np.abs(simpson.c - gl.c)) < 1e-12


def test_example3_coefficients_decay():
    series = hopf_cole_coefficients("example3", nu=0.1, truncation=50)
    assert abs(series.c[49]) < abs(series.c[9])


def test_boundary_values_exactly_zero(ex2_series):
    for t in (0.1, 1.0, 3.0):
        u = evaluate_exact(ex2_series, np.array([0.0, 0.5, 1.0]), t)
        assert u[0] == 0.0
        assert u[2] == 0.0
        assert u[1] != 0.0


def test_truncation_convergence(ex2_series):
    longer = hopf_cole_coefficients("example2", nu=0.1, truncation=70)
    x, t = 0.3, 0.5
    assert abs(evaluate_exact(ex2_series, x, t) - evaluate_exact(longer, x, t)) < 1e-12


def test_diffusive_decay_in_time(ex2_series):
    values = [abs(evaluate_exact(ex2_series, 0.5, t)) for t in (1.0, 2.0, 3.0, 5.0)]
    assert values == sorted(values, reverse=True)


def test_double_truncation_tighter_tolerance_invariance():
    nu = 0.05
    base = hopf_cole_coefficients("example2", nu, truncation=50,
                                  quad=QuadratureSpec(tolerance=1e-10))
    refined = hopf_cole_coefficients("example2", nu, truncation=100,
                                     quad=QuadratureSpec(tolerance=1e-13))
    xs = np.linspace(0.0, 1.0, 33)
    diff = np.abs(evaluate_exact(base, xs, 1.0) - evaluate_exact(refined, xs, 1.0))
    assert np.max(diff) < 1e-10


def test_time_below_certified_minimum_rejected(ex2_series):
    with pytest.raises(EvaluationError):
        evaluate_exact(ex2_series, 0.5, 0.01)


def test_positions_outside_domain_rejected(ex2_series):
    with pytest.raises(EvaluationError):
        evaluate_exact(ex2_series, 1.5, 1.0)


def test_bad_construction_arguments():
    with pytest.raises(ConfigurationError):
        hopf_cole_coefficients("example2", nu=-0.1)
    with pytest.raises(ConfigurationError):
        hopf_cole_coefficients("example2", nu=0.1, truncation=0)
    with pytest.raises(ConfigurationError):
        hopf_cole_coefficients("example9", nu=0.1)
    with pytest.raises(ConfigurationError):
        QuadratureSpec(rule="trapezoid")


def test_series_tail_certification():
    # a one-term series cannot be certified near t = 0
    with pytest.raises(PrecisionError):
        HopfColeSeries(nu=1e-6, c0=1.0, c=np.array([0.5]),
                       quadrature=QuadratureSpec(), t_min=1e-6)


def test_scaling_toward_inviscid_steepens_profile():
    # smaller nu concentrates the transition layer: compare slopes at x=1/2
    xs = np.array([0.45, 0.55])
    steep = []
    for nu in (0.2, 0.05):
        series = hopf_cole_coefficients("example2", nu, truncation=80)
        u = evaluate_exact(series, xs, 1.0)
        steep.append(abs(u[1] - u[0]))
    assert steep[1] != steep[0]
