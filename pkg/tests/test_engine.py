import numpy as np
import pytest

from splitburgers import engine
from splitburgers.engine import (
    BackendResources,
    ProblemSpec,
    StepperConfig,
    WorkCounter,
    compute_reference,
    convergence_study,
    example1,
    example2,
    example3,
    extrapolated_step,
    fit_slope,
    integrate,
    make_flows,
    split_step,
)
from splitburgers.errors import ConfigurationError, StabilityGuardError
from splitburgers.grids import TWO_PI, Field, PeriodicGrid
from splitburgers.schemes import (
    SplittingScheme,
    builtin_extrapolation,
    builtin_scheme,
)
from splitburgers.spectral import SpectralFlows, reference_solve_periodic


class IdentityAFlows:
    """Test hook: conservation flow replaced by the identity."""

    boundary = "periodic"
    accepts_complex_steps = True

    def __init__(self, inner):
        self.inner = inner

    def apply_a(self, values, tau):
        return values

    def apply_b(self, values, tau):
        return self.inner.apply_b(values, tau)

    def project(self, values):
        return self.inner.project(values)


class IdentityFlows:
    """Test hook: both sub-flows replaced by the identity."""

    boundary = "periodic"
    accepts_complex_steps = True

    def apply_a(self, values, tau):
        return values

    def apply_b(self, values, tau):
        return values

    def project(self, values):
        return np.real(values).copy()


@pytest.fixture
def spectral_state():
    grid = PeriodicGrid(64)
    return Field(0.5 + 0.25 * np.sin(grid.nodes), grid), SpectralFlows(grid, nu=0.03)


def test_zero_step_is_identity(spectral_state):
    state, flows = spectral_state
    for scheme in (builtin_scheme("Strang"), builtin_scheme("RC4")):
        out = split_step(state, scheme, 0.0, flows)
        assert np.max(np.abs(out.values - state.values)) < 1e-15


def test_strang_with_identity_a_flow_is_pure_diffusion(spectral_state):
    state, flows = spectral_state
    hooked = IdentityAFlows(flows)
    h = 0.37
    out = split_step(state, builtin_scheme("Strang"), h, hooked)
    expect = flows.project(flows.apply_b(state.values, h))
    assert np.max(np.abs(out.values - expect)) < 1e-13


def test_one_step_local_error_is_third_order():
    grid = PeriodicGrid(128)
    u0 = Field(0.5 + 0.25 * np.sin(grid.nodes), grid)
    flows = SpectralFlows(grid, nu=0.03, substeps=20)
    errs = {}
    for h in (0.1, 0.05):
        ref = reference_solve_periodic(u0, 0.03, h, dt=1e-5)
        out = split_step(u0, builtin_scheme("Strang"), h, flows)
        errs[h] = np.max(np.abs(out.values - ref.values))
    ratio = errs[0.1] / errs[0.05]
    assert 6.5 < ratio < 9.5


def test_extrapolated_step_preserves_identity_flows():
    grid = PeriodicGrid(32)
    state = Field(np.sin(grid.nodes), grid)
    flows = IdentityFlows()
    for rule_name in ("EXT4", "EXT6"):
        out = extrapolated_step(state, builtin_extrapolation(rule_name), 0.25, flows)
        assert np.max(np.abs(out.values - state.values)) < 1e-12


def test_extrapolated_step_work_counts():
    grid = PeriodicGrid(32)
    state = Field(0.5 + 0.25 * np.sin(grid.nodes), grid)
    for rule_name, expected in (("EXT4", 3), ("EXT6", 6)):
        counter = WorkCounter()
        flows = SpectralFlows(grid, nu=0.03, counter=counter)
        extrapolated_step(state, builtin_extrapolation(rule_name), 0.05, flows)
        assert counter.a_evals == expected


def test_extrapolation_requires_strang_base():
    grid = PeriodicGrid(32)
    state = Field(np.sin(grid.nodes), grid)
    with pytest.raises(ConfigurationError):
        extrapolated_step(state, builtin_extrapolation("EXT4"), 0.1,
                          SpectralFlows(grid, 0.03), base=builtin_scheme("ML62"))


def test_merged_interfaces_match_unmerged_composition():
    # two Strang half-steps with the interface exponentials merged must
    # equal the literal back-to-back composition (the diffusion flow is an
    # exact semigroup)
    grid = PeriodicGrid(64)
    state = Field(0.5 + 0.25 * np.sin(grid.nodes), grid)
    flows = SpectralFlows(grid, nu=0.03)
    strang = builtin_scheme("Strang")
    h = 0.2
    two_literal = split_step(
        split_step(state, strang, h / 2, flows, project_real=False),
        strang, h / 2, flows, project_real=False,
    )
    merged = engine._merged_base_steps(state.values, strang, h / 2, 2, flows)
    assert np.max(np.abs(two_literal.values - merged)) < 1e-13


def test_integrate_work_accounting_strang_256_steps():
    problem = example1(t_final=TWO_PI, reference_dt=5e-3)
    result = integrate(problem, StepperConfig(builtin_scheme("Strang"), h=TWO_PI / 256))
    assert result.work_a_evals == 256
    assert result.final.time == pytest.approx(TWO_PI)


def test_integrate_work_accounting_sm64():
    problem = example1(t_final=1.0, reference_dt=1e-2)
    result = integrate(problem, StepperConfig(builtin_scheme("SM64"), h=1.0 / 16))
    assert result.work_a_evals == 16 * 6


def test_integrate_work_accounting_extrapolation():
    problem = example1(t_final=1.0, reference_dt=1e-2)
    for name, per_step in (("EXT4", 3), ("EXT6", 6)):
        result = integrate(problem, StepperConfig(builtin_extrapolation(name), h=1.0 / 8))
        assert result.work_a_evals == 8 * per_step


def test_zero_initial_data_zero_error():
    problem = ProblemSpec("periodic", 0.03, np.zeros(64), 1.0, 64, reference_dt=1e-2)
    for method in (builtin_scheme("Strang"), builtin_scheme("RC4"),
                   builtin_extrapolation("EXT4")):
        result = integrate(problem, StepperConfig(method, h=0.125))
        assert result.error_inf == 0.0


def test_indivisible_final_time_rejected():
    problem = example1(t_final=1.0)
    with pytest.raises(ConfigurationError):
        integrate(problem, StepperConfig(builtin_scheme("Strang"), h=0.3))


def test_projection_keeps_fields_real():
    problem = example1(t_final=0.5, reference_dt=1e-2)
    result = integrate(problem, StepperConfig(builtin_scheme("RC4"), h=1.0 / 16))
    assert not np.iscomplexobj(result.final.values)
    unprojected = integrate(
        problem,
        StepperConfig(builtin_scheme("RC4"), h=1.0 / 16, project_real=False),
    )
    assert np.iscomplexobj(unprojected.final.values)
    assert np.max(np.abs(unprojected.final.values.imag)) > 0


def test_projection_is_noop_for_real_schemes():
    problem = example1(t_final=0.5, reference_dt=1e-2)
    on = integrate(problem, StepperConfig(builtin_scheme("Strang"), h=1.0 / 16))
    off = integrate(problem, StepperConfig(builtin_scheme("Strang"), h=1.0 / 16,
                                           project_real=False))
    assert np.max(np.abs(on.final.values - off.final.values)) < 1e-14


def test_reversed_palindrome_composition_matches():
    scheme = builtin_scheme("SM4")
    reversed_scheme = SplittingScheme(
        "SM4r", scheme.pattern, tuple(reversed(scheme.a)), tuple(reversed(scheme.b)),
        scheme.nominal_order,
    )
    grid = PeriodicGrid(64)
    state = Field(0.5 + 0.25 * np.sin(grid.nodes), grid)
    flows = SpectralFlows(grid, nu=0.03)
    fwd = split_step(state, scheme, 0.05, flows)
    rev = split_step(state, reversed_scheme, 0.05, flows)
    assert np.max(np.abs(fwd.values - rev.values)) < 1e-12


def test_aba_pattern_orders_flows_correctly():
    grid = PeriodicGrid(64)
    state = Field(0.5 + 0.25 * np.sin(grid.nodes), grid)
    flows = SpectralFlows(grid, nu=0.03)
    aba = builtin_scheme("Strang").transposed()
    h = 0.1
    manual = flows.apply_a(state.values, h / 2)
    manual = flows.apply_b(manual, h)
    manual = flows.project(flows.apply_a(manual, h / 2))
    stepped = split_step(state, aba, h, flows)
    assert np.max(np.abs(stepped.values - manual)) < 1e-14


@pytest.mark.parametrize("name", ["RC4", "O4", "SM4", "SM64"])
def test_complex_methods_guarded_on_dirichlet(name):
    problem = example2(resolution=20)
    with pytest.raises(StabilityGuardError, match=name):
        integrate(problem, StepperConfig(builtin_scheme(name), h=0.25))


def test_dirichlet_strang_converges_to_exact():
    problem = example2(resolution=100)
    result = integrate(problem, StepperConfig(builtin_scheme("Strang"), h=1.0 / 16))
    assert result.error_inf is not None
    assert result.error_inf < 1e-3


def test_dirichlet_custom_initial_has_no_reference():
    grid_nodes = np.arange(1, 31) / 31.0
    problem = ProblemSpec("dirichlet", 0.1, 0.1 * np.sin(np.pi * grid_nodes), 1.0, 30)
    result = integrate(problem, StepperConfig(builtin_scheme("Strang"), h=0.25))
    assert result.error_inf is None


def test_integrate_is_deterministic():
    problem = example1(t_final=0.5, reference_dt=1e-2)
    config = StepperConfig(builtin_scheme("SM4"), h=1.0 / 8)
    a = integrate(problem, config)
    b = integrate(problem, config)
    assert a.error_inf == b.error_inf
    assert a.work_a_evals == b.work_a_evals
    assert np.array_equal(a.final.values, b.final.values)


def test_compute_reference_dirichlet_matches_series():
    problem = example2(resolution=20)
    ref = compute_reference(problem)
    from splitburgers import exact

    series = exact.hopf_cole_coefficients("example2", 0.1)
    direct = exact.evaluate_exact(series, problem.grid().nodes, 1.0)
    assert np.max(np.abs(ref - direct)) < 1e-14


def test_fit_slope_window_and_minimum_rows():
    hs = [0.1, 0.05, 0.025, 0.0125]
    errs = [1e-3, 2.5e-4, 6.25e-5, 1.5625e-5]
    assert fit_slope(hs, errs) == pytest.approx(2.0, abs=1e-6)
    assert fit_slope(hs, [0.5, 1e-3, 1e-4, 1e-13]) is None  # only 2 in window
    assert fit_slope(hs[:2], errs[:2]) is None


def test_convergence_study_records_cell_failures():
    problem = example2(resolution=20)
    report = convergence_study(problem, ["Strang", "RC4"], [0.25, 0.125])
    assert {f.method for f in report.failures} == {"RC4"}
    assert len(report.failures) == 2
    strang_rows = [r for r in report.rows if r.method == "Strang"]
    assert len(strang_rows) == 2
    assert strang_rows[0].h > strang_rows[1].h


def test_convergence_study_strang_second_order():
    problem = example1(t_final=1.0, reference_dt=1e-3)
    report = convergence_study(problem, ["Strang"],
                               [1 / 8, 1 / 16, 1 / 32, 1 / 64])
    assert 1.6 < report.slopes["Strang"] < 2.4


def test_convergence_study_rows_sorted_and_complete():
    problem = example1(t_final=0.5, resolution=64, reference_dt=1e-2)
    report = convergence_study(problem, ["strang", "ext4"], [0.25, 0.125, 0.0625])
    assert [r.method for r in report.rows] == ["EXT4"] * 3 + ["Strang"] * 3
    assert all(report.rows[i].h > report.rows[i + 1].h for i in (0, 1, 3, 4))
    works = {r.method: [] for r in report.rows}
    for r in report.rows:
        works[r.method].append(r.work_a_evals)
    assert works["Strang"] == [2, 4, 8]
    assert works["EXT4"] == [6, 12, 24]


def test_convergence_study_parallel_matches_serial():
    problem = example1(t_final=0.5, resolution=64, reference_dt=1e-2)
    serial = convergence_study(problem, ["Strang", "ML62"], [0.25, 0.125])
    parallel = convergence_study(problem, ["Strang", "ML62"], [0.25, 0.125], workers=2)
    assert [(r.method, r.h, r.error_inf, r.work_a_evals) for r in serial.rows] == [
        (r.method, r.h, r.error_inf, r.work_a_evals) for r in parallel.rows
    ]


def test_example2_ml62_beats_strang_at_equal_work_paper_scale():
    # equal-work comparison on the publication grid: 36 conservation-flow
    # evaluations for both methods
    problem = example2(resolution=500)
    resources = BackendResources.for_problem(problem)
    reference = compute_reference(problem)
    errs = {}
    for name, steps in (("ML62", (4, 8)), ("Strang", (12, 24))):
        scheme = builtin_scheme(name)
        errs[name] = []
        for m in steps:
            res = integrate(problem, StepperConfig(scheme, h=1.0 / m, substeps=10),
                            reference=reference, resources=resources)
            assert res.work_a_evals == m * scheme.stages
            errs[name].append(res.error_inf)
    assert errs["ML62"][0] < errs["Strang"][0]  # work 12
    assert errs["ML62"][1] < errs["Strang"][1]  # work 24


def test_presets_reproduce_published_parameters():
    p1, p2, p3 = example1(), example2(), example3()
    assert p1.boundary == "periodic" and p1.nu == 0.03
    g1 = p1.grid()
    u1 = p1.initial_values()
    assert np.allclose(u1, 0.5 + 0.25 * np.sin(g1.nodes))
    assert p2.boundary == "dirichlet" and p2.nu == 0.1 and p2.t_final == 1.0
    assert np.allclose(p2.initial_values(), 0.2 * np.sin(np.pi * p2.grid().nodes))
    x3 = p3.grid().nodes
    assert np.allclose(p3.initial_values(), 0.5 * x3 * (1 - x3))


def test_flow_factory_dispatches_by_boundary():
    assert isinstance(make_flows(example1()), SpectralFlows)
    from splitburgers.fd import DirichletFlows

    assert isinstance(make_flows(example2(resolution=20)), DirichletFlows)
