"""Command-line front end.

Subcommands:

* ``schemes list``  -- print the method registry with coefficients
* ``run``           -- integrate one configuration, print error and work
* ``converge``      -- run an error-versus-work study, write a CSV report
* ``exact``         -- sample a closed-form Dirichlet solution as CSV

Configuration comes from a flat key=value file (``--config``) with
command-line flags taking precedence; unknown keys are rejected. Exit
codes: 0 success, 2 configuration error, 3 numerical failure. Numbers are
printed with 17 significant digits. By default the CSV runtime column is
written as 0 so repeated runs are byte-identical; pass ``--timings`` to
record wall-clock milliseconds instead.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import engine, exact
from .errors import (
    BlowUpError,
    ConfigurationError,
    EvaluationError,
    PrecisionError,
    SplitBurgersError,
    StabilityGuardError,
    UnknownNameError,
)
from .schemes import (
    builtin_extrapolation,
    builtin_scheme,
    extrapolation_names,
    resolve_method,
    scheme_names,
)

DESK_RESOLUTION = {"periodic": 128, "dirichlet": 200}
PAPER_RESOLUTION = {"periodic": 512, "dirichlet": 500}

_PERIODIC_STEP_DIVISORS = (40, 80, 160, 320, 640)
_DIRICHLET_STEP_DIVISORS = (2, 4, 8, 16, 32)

CSV_HEADER = "method,h,work_a_evals,error_inf,runtime_ms"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {text!r}")


CONFIG_KEYS = {
    "preset": str,
    "nu": float,
    "t_final": float,
    "resolution": int,
    "reference_dt": float,
    "method": str,
    "methods": str,
    "h": float,
    "h_values": str,
    "substeps": int,
    "output": str,
    "paper_scale": _parse_bool,
    "workers": int,
    "timings": _parse_bool,
    "example": str,
    "t": float,
    "samples": int,
}


def parse_config_file(path: str) -> dict:
    """Read a flat key=value configuration file; unknown keys are errors."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise ConfigurationError(f"cannot read config file {path}: {e}") from e
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigurationError(
                f"{path}:{lineno}: unknown config key {key!r}"
            )
        try:
            values[key] = CONFIG_KEYS[key](text.strip())
        except (ValueError, ConfigurationError) as e:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {e}") from e
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitburgers",
        description="High-order splitting integrators for the 1D viscous Burgers equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    schemes_p = sub.add_parser("schemes", help="inspect the method registry")
    schemes_p.add_argument("action", choices=("list",))

    def add_problem_flags(p):
        p.add_argument("--config", help="flat key=value configuration file")
        p.add_argument("--preset", choices=("example1", "example2", "example3"))
        p.add_argument("--nu", type=float, help="viscosity")
        p.add_argument("--t-final", dest="t_final", type=float, help="final time")
        p.add_argument("--resolution", type=int, help="N (periodic) or D (Dirichlet)")
        p.add_argument("--reference-dt", dest="reference_dt", type=float,
                       help="step bound for the periodic reference run")
        p.add_argument("--paper-scale", dest="paper_scale", action="store_const",
                       const=True, help="use the publication resolution (N=512 / D=500)")
        p.add_argument("--substeps", type=int,
                       help="internal RK4 substeps per conservation flow")

    run_p = sub.add_parser("run", help="integrate one configuration")
    add_problem_flags(run_p)
    run_p.add_argument("--method", help="scheme or extrapolation name")
    run_p.add_argument("--h", type=float, help="time step")

    conv_p = sub.add_parser("converge", help="error-versus-work study, CSV output")
    add_problem_flags(conv_p)
    conv_p.add_argument("--methods", help="comma-separated method names")
    conv_p.add_argument("--h-values", dest="h_values", help="comma-separated step sizes")
    conv_p.add_argument("--output", help="CSV path ('-' for stdout)")
    conv_p.add_argument("--workers", type=int, help="parallel cell evaluation")
    conv_p.add_argument("--timings", action="store_const", const=True,
                        help="record wall-clock runtimes (breaks byte-stable output)")

    exact_p = sub.add_parser("exact", help="sample a closed-form solution")
    exact_p.add_argument("--config", help="flat key=value configuration file")
    exact_p.add_argument("--example", choices=("example2", "example3"))
    exact_p.add_argument("--nu", type=float)
    exact_p.add_argument("--t", type=float, help="evaluation time")
    exact_p.add_argument("--samples", type=int, help="number of x samples in [0, 1]")
    exact_p.add_argument("--output", help="CSV path ('-' for stdout)")

    return parser


class Settings:
    """Flag values merged over config-file values merged over defaults."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._config = {}
        if self._args.get("config"):
            self._config = parse_config_file(self._args["config"])

    def get(self, key: str, default=None):
        flag = self._args.get(key)
        if flag is not None:
            return flag
        if key in self._config:
            return self._config[key]
        return default

    def require(self, key: str):
        value = self.get(key)
        if value is None:
            raise ConfigurationError(f"missing required option: {key}")
        return value


def _build_problem(settings: Settings) -> engine.ProblemSpec:
    preset = settings.require("preset")
    if preset not in engine.PRESETS:
        raise ConfigurationError(f"unknown preset {preset!r}")
    boundary = "periodic" if preset == "example1" else "dirichlet"
    paper = bool(settings.get("paper_scale", False))
    resolution = settings.get(
        "resolution", (PAPER_RESOLUTION if paper else DESK_RESOLUTION)[boundary]
    )
    kwargs = {"resolution": int(resolution)}
    if settings.get("nu") is not None:
        kwargs["nu"] = float(settings.get("nu"))
    if settings.get("t_final") is not None:
        kwargs["t_final"] = float(settings.get("t_final"))
    problem = engine.PRESETS[preset](**kwargs)
    if settings.get("reference_dt") is not None and boundary == "periodic":
        problem = engine.ProblemSpec(
            boundary, problem.nu, preset, problem.t_final, problem.resolution,
            float(settings.get("reference_dt")),
        )
    return problem


def _guard_methods(problem: engine.ProblemSpec, methods) -> None:
    if problem.boundary != "dirichlet":
        return
    for m in methods:
        if not m.real_coefficients_only:
            raise StabilityGuardError(
                f"{m.name} has complex diffusion coefficients, which are unstable on "
                f"the dirichlet (finite-difference/WENO) backend; remove it or use a "
                f"periodic preset"
            )


def _default_h_values(problem: engine.ProblemSpec) -> list[float]:
    divisors = (_PERIODIC_STEP_DIVISORS if problem.boundary == "periodic"
                else _DIRICHLET_STEP_DIVISORS)
    return [problem.t_final / m for m in divisors]


def _default_methods(problem: engine.ProblemSpec) -> list[str]:
    if problem.boundary == "periodic":
        return list(scheme_names()) + list(extrapolation_names())
    return [n for n in scheme_names() if builtin_scheme(n).real_coefficients_only] + list(
        extrapolation_names()
    )


def emit_report(report: engine.ConvergenceReport, path: str, timings: bool = False) -> None:
    """Write the study as CSV plus trailing slope comments.

    The output is a pure function of the report contents (and the timings
    switch), so identical studies produce byte-identical files.
    """
    if not report.rows:
        raise ConfigurationError("refusing to write an empty report")
    lines = [CSV_HEADER]
    for row in report.rows:
        runtime = fmt(row.runtime_ms) if timings else "0"
        lines.append(
            f"{row.method},{fmt(row.h)},{row.work_a_evals},{fmt(row.error_inf)},{runtime}"
        )
    for name in sorted(report.slopes, key=str.lower):
        lines.append(f"# slope method={name} value={fmt(report.slopes[name])}")
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def parse_report_csv(text: str):
    """Parse an emitted CSV back into rows and slopes (round-trip helper)."""
    rows, slopes = [], {}
    for line in text.strip().splitlines():
        if line == CSV_HEADER:
            continue
        if line.startswith("# slope"):
            parts = dict(p.split("=", 1) for p in line[2:].split() if "=" in p)
            slopes[parts["method"]] = float(parts["value"])
            continue
        method, h, work, err, runtime = line.split(",")
        rows.append(engine.ReportRow(method, float(h), int(work), float(err),
                                     float(runtime)))
    return rows, slopes


def _cmd_schemes(_args: argparse.Namespace) -> int:
    print(f"{'name':8s} {'kind':14s} {'pattern':8s} {'stages':>6s} {'order':>5s} {'effective':>9s}")
    for name in scheme_names():
        s = builtin_scheme(name)
        eff = f"({s.effective_order[0]},{s.effective_order[1]})" if s.effective_order else "-"
        print(f"{s.name:8s} {'splitting':14s} {s.pattern:8s} {s.stages:6d} "
              f"{s.nominal_order:5d} {eff:>9s}")
        print(f"{'':8s} a: " + ", ".join(fmt(a) for a in s.a))
        bs = []
        for b in s.b:
            b = complex(b)
            bs.append(fmt(b.real) if b.imag == 0 else f"{fmt(b.real)}{b.imag:+.17g}i")
        print(f"{'':8s} b: " + ", ".join(bs))
    for name in extrapolation_names():
        r = builtin_extrapolation(name)
        print(f"{r.name:8s} {'extrapolation':14s} {'Strang':8s} {r.stages:6d} "
              f"{r.order:5d} {'-':>9s}")
        print(f"{'':8s} terms: " + ", ".join(f"{w} x {n} substeps" for w, n in r.terms))
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    settings = Settings(args)
    problem = _build_problem(settings)
    method = resolve_method(str(settings.require("method")))
    _guard_methods(problem, [method])
    h = float(settings.require("h"))
    config = engine.StepperConfig(
        method=method, h=h, substeps=int(settings.get("substeps", 5))
    )
    result = engine.integrate(problem, config)
    err = float("nan") if result.error_inf is None else result.error_inf
    print(
        f"method={result.method} h={fmt(result.h)} error_inf={fmt(err)} "
        f"work_a_evals={result.work_a_evals} runtime_ms={fmt(result.runtime_s * 1e3)}"
    )
    return 0


def _cmd_converge(args: argparse.Namespace) -> int:
    settings = Settings(args)
    problem = _build_problem(settings)

    methods_text = settings.get("methods")
    if methods_text:
        names = [m.strip() for m in str(methods_text).split(",") if m.strip()]
    else:
        names = _default_methods(problem)
    methods = [resolve_method(n) for n in names]
    _guard_methods(problem, methods)

    h_text = settings.get("h_values")
    if h_text:
        h_values = [float(t) for t in str(h_text).split(",") if t.strip()]
    else:
        h_values = _default_h_values(problem)

    report = engine.convergence_study(
        problem, methods, h_values,
        substeps=int(settings.get("substeps", 5)),
        workers=int(settings.get("workers", 1)),
    )
    for failure in report.failures:
        print(f"cell failed: {failure.method} h={fmt(failure.h)}: {failure.message}",
              file=sys.stderr)
    emit_report(report, str(settings.get("output", "-")),
                timings=bool(settings.get("timings", False)))
    return 0


def _cmd_exact(args: argparse.Namespace) -> int:
    settings = Settings(args)
    example = str(settings.require("example"))
    nu = float(settings.require("nu"))
    t = float(settings.get("t", 1.0))
    samples = int(settings.get("samples", 501))
    if samples < 2:
        raise ConfigurationError(f"need at least 2 samples, got {samples}")
    series = exact.hopf_cole_coefficients(example, nu)
    xs = np.linspace(0.0, 1.0, samples)
    us = exact.evaluate_exact(series, xs, t)
    lines = ["x,u"] + [f"{fmt(x)},{fmt(u)}" for x, u in zip(xs, us)]
    text = "\n".join(lines) + "\n"
    path = str(settings.get("output", "-"))
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "schemes":
            return _cmd_schemes(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "converge":
            return _cmd_converge(args)
        if args.command == "exact":
            return _cmd_exact(args)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except (ConfigurationError, UnknownNameError, StabilityGuardError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (BlowUpError, PrecisionError, EvaluationError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except SplitBurgersError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
