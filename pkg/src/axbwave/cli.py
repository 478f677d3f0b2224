"""CLI entry point for axbwave commands."""

import argparse
import logging
import sys
import time
from pathlib import Path

from axbwave.common.errors import ConfigError, DomainError, NumericalError

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _config(args, task):
    from axbwave.sweep.config import build_config, load_presets

    overrides = {
        "n": args.n,
        "l": args.l,
        "lam_grid": args.lam,
        "t_grid": args.t,
        "R_grid": args.R,
        "rho_grid": args.rho,
        "x": args.x,
        "eps": args.eps,
        "psi": args.psi,
        "tau": args.tau,
        "regime": args.regime,
        "N": args.N,
        "s_order": args.s_order,
        "nu": args.nu,
        "points": args.points,
        "rel_tol": args.rel_tol,
        "abs_tol": args.abs_tol,
        "max_subdivisions": args.max_subdivisions,
        "output": args.output,
        "format": args.format,
        "seed": args.seed,
        "threads": args.threads,
    }
    return build_config(task, overrides, load_presets(args.config))


def _profile(config):
    """The --psi profile, or None to let each check pick its default."""
    from axbwave.kernels.profiles import profile_by_name

    if config.psi is None:
        return None
    return profile_by_name(config.psi, config.tau)


def _output_path(config, suffix):
    return Path(config.output) if config.output else Path(f"axb-{config.task}.{suffix}")


def _emit(config, manifest, reports, started):
    """Write the JSON report (and manifest) for lab reports; return the exit code."""
    from axbwave.sweep.artifacts import build_report, write_manifest, write_report

    checks = {}
    for report in reports:
        for name, ok in report.checks.items():
            checks[f"{report.name}:{name}" if len(reports) > 1 else name] = ok
    report = build_report(
        config.task,
        config.to_dict(),
        checks,
        [r.to_dict() for r in reports],
        time.perf_counter() - started,
    )
    path = write_report(_output_path(config, "json"), report)
    print(f"  Wrote {path}")
    if manifest:
        print(f"  Wrote {write_manifest(manifest, report)}")
    for name in report["failures"]:
        print(f"  FAIL: {name}")
    return 0 if report["passed"] else EXIT_FAILED


def _write_failure(args, exc, started):
    """JSON report with the exception as its failure list; schema runs write none."""
    from axbwave.sweep.artifacts import build_error_report, write_report

    if args.command == "schema":
        return
    if args.output:
        path = Path(args.output).with_suffix(".json")
    else:
        path = Path(f"axb-{args.command}.json")
    echo = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    report = build_error_report(args.command, echo, exc, time.perf_counter() - started)
    try:
        print(f"  Wrote {write_report(path, report)}", file=sys.stderr)
    except OSError as err:
        logger.warning("could not write failure report %s: %s", path, err)


def kernel_row(job):
    """(R, x, Re k, Im k, err) for one radius."""
    from axbwave.geometry.group import point_at_distance
    from axbwave.kernels.profiles import profile_by_name
    from axbwave.kernels.spectral import multiplier_sample, wave_kernel
    from axbwave.lab.envelopes import default_wave_profile

    n, l, psi_name, tau, lam, t, R, x, quad = job
    psi = profile_by_name(psi_name, tau) if psi_name else default_wave_profile(lam)
    g = point_at_distance(n, R, max(-R, min(x, R)))
    if psi.tau is not None:
        sample = multiplier_sample(n, l, psi.scaled(lam), g, quad)
    else:
        sample = wave_kernel(n, l, psi, lam, t, g, quad)
    return (sample.R, sample.x, sample.value.real, sample.value.imag, sample.error_estimate)


def run_kernel(config, manifest=None):
    """Evaluate the wave kernel k_λ^t (or a heat kernel) on an R grid."""
    from axbwave.sweep.artifacts import KERNEL_COLUMNS, write_csv
    from axbwave.sweep.pool import run_batches

    started = time.perf_counter()
    lam, t = config.lam_grid[0], config.t_grid[0]
    print(f"KERNEL — n={config.n}, lambda={lam:g}, t={t:g}, {len(config.R_grid)} radii...")
    quad = config.quad()
    jobs = [
        (config.n, config.l, config.psi, config.tau, lam, t, R, config.x, quad)
        for R in config.R_grid
    ]
    result = run_batches(kernel_row, jobs, config.threads)
    rows = [row for row in result["results"] if row is not None]
    print(f"  Evaluated {result['completed']}/{result['total']} points")
    if config.format == "csv":
        path = write_csv(_output_path(config, "csv"), KERNEL_COLUMNS, rows)
        print(f"  Wrote {path}")
        for err in result["errors"]:
            print(f"  FAIL: point {err['job']}: {err['error']}")
        return 0 if result["failed"] == 0 else EXIT_FAILED

    from axbwave.sweep.artifacts import build_report, write_report

    report = build_report(
        "kernel",
        config.to_dict(),
        {"all_points": result["failed"] == 0},
        {"columns": list(KERNEL_COLUMNS), "rows": rows, "errors": result["errors"]},
        time.perf_counter() - started,
    )
    print(f"  Wrote {write_report(_output_path(config, 'json'), report)}")
    return 0 if report["passed"] else EXIT_FAILED


def run_envelope(config, manifest=None):
    """Fit pointwise envelope constants for G_λ."""
    from axbwave.lab.envelopes import EnvelopeSpec, check_envelope

    started = time.perf_counter()
    spec = EnvelopeSpec(config.n, config.regime, config.N)
    print(f"ENVELOPE — n={config.n}, regime={spec.regime}, N={spec.N}...")
    psi = _profile(config)
    report = check_envelope(
        spec,
        config.R_grid,
        config.rho_grid,
        config.lam_grid,
        psi,
        config.quad(),
        config.l,
        config.threads,
    )
    print(f"  Fitted constant {report.fitted_constant:.6g}")
    return _emit(config, manifest, [report], started)


def run_l1growth(config, manifest=None):
    """Growth in t of the weighted L¹ norm of W_λ^t."""
    from axbwave.lab.growth import check_l1_growth

    started = time.perf_counter()
    reports = []
    for lam in config.lam_grid:
        print(f"L1GROWTH — n={config.n}, lambda={lam:g}, eps={config.eps:g}...")
        psi = _profile(config)
        report = check_l1_growth(
            config.n, psi, lam, config.eps, config.t_grid, config.quad(), config.l, config.threads,
        )
        predicted = report.notes["predicted_exponent"]
        print(f"  Exponent {report.growth_exponent_fit:.3f} (predicted {predicted:.3f})")
        reports.append(report)
    return _emit(config, manifest, reports, started)


def run_supnorm(config, manifest=None):
    """Sup norm of k_λ^t against (1 + t^{−n/2}) λ^{n/2+1}."""
    from axbwave.lab.supnorm import check_supnorm

    started = time.perf_counter()
    grid = f"{len(config.lam_grid)} lambdas x {len(config.t_grid)} times"
    print(f"SUPNORM — n={config.n}, {grid}...")
    psi = _profile(config)
    report = check_supnorm(
        config.n,
        config.lam_grid,
        config.t_grid,
        config.quad(),
        psi,
        config.l,
        threads=config.threads,
    )
    scaling = report.notes["scaling_ratio"]
    print(f"  Fitted constant {report.fitted_constant:.6g}, scaling {scaling:.3f}")
    return _emit(config, manifest, [report], started)


def run_hs(config, manifest=None):
    """Weighted L¹ norms of F(L/λ²) against ‖F‖_{H(s)}."""
    from axbwave.lab.hebisch import check_hebisch_steger, hs_family

    started = time.perf_counter()
    reports = []
    for lam in config.lam_grid:
        print(f"HS — n={config.n}, lambda={lam:g}, eps={config.eps:g}, s={config.s_order:g}...")
        report = check_hebisch_steger(
            config.n, hs_family(), lam, config.eps, config.s_order, config.quad(), config.l,
        )
        reports.append(report)
    return _emit(config, manifest, reports, started)


def run_oracle(config, manifest=None):
    """Cross-validate n = 2 wave kernels against transferred ℝ³ kernels."""
    from axbwave.lab.suites import check_oracle

    started = time.perf_counter()
    if len(config.lam_grid) == len(config.t_grid):
        pairs = list(zip(config.lam_grid, config.t_grid))
    else:
        pairs = [(lam, t) for lam in config.lam_grid for t in config.t_grid]
    print(f"ORACLE — {len(pairs)} (lambda, t) pairs at {len(config.R_grid)} radii...")
    psi = _profile(config)
    report = check_oracle(pairs, config.R_grid, psi, config.seed, config.quad())
    for d in report.details:
        print(f"  lambda={d['lambda']:g} t={d['t']:g}: max_rel_error {d['max_rel_error']:.3g}")
    return _emit(config, manifest, [report], started)


def run_resolvent_suite(config, manifest=None):
    """Closed form, ODE, continuation and small-R checks of the resolvent kernel."""
    from axbwave.lab.suites import check_resolvent

    started = time.perf_counter()
    print(f"RESOLVENT — n={config.n}, {len(config.nu)} values of nu...")
    report = check_resolvent(config.n, config.nu, config.points, config.seed, config.quad())
    return _emit(config, manifest, [report], started)


RUNNERS = {
    "kernel": run_kernel,
    "envelope": run_envelope,
    "l1growth": run_l1growth,
    "supnorm": run_supnorm,
    "hs": run_hs,
    "oracle": run_oracle,
    "resolvent-suite": run_resolvent_suite,
}


def run(config, manifest=None) -> int:
    """Run the task of a validated SweepConfig and write its artifacts.

    Returns 0 when every check passes and 1 otherwise. ConfigError,
    DomainError and NumericalError propagate to the caller.
    """
    config.validate()
    return RUNNERS[config.task](config, manifest)


def cmd_run(args):
    """Build the config for the chosen subcommand and run it."""
    return run(_config(args, args.command), args.manifest)


def cmd_schema(args):
    """Print the report schema version."""
    from axbwave.sweep.artifacts import report_schema_version

    print(report_schema_version())
    return 0


def _add_common(p):
    p.add_argument("--n", type=int, help="Dimension of the y-variable")
    p.add_argument("--l", type=int, help="Iteration order of D_sh (default: smallest admissible)")
    p.add_argument("--lambda", dest="lam", help="lambda grid: a:b:m or a,b,c")
    p.add_argument("--t", help="Time grid")
    p.add_argument("--R", help="Radius grid")
    p.add_argument("--rho", help="rho grid for envelope sweeps")
    p.add_argument("--x", type=float, help="x coordinate of kernel sample points")
    p.add_argument("--eps", type=float, help="Weight exponent")
    p.add_argument("--psi", help="Profile: bump_low, bump_band, bump_wide, gauss_heat")
    p.add_argument("--tau", type=float, help="Time of the gauss_heat profile")
    p.add_argument("--regime", help="Envelope regime: large-R, small-R, small-R-improved")
    p.add_argument("--N", type=int, help="Decay order of the envelope")
    p.add_argument("--s-order", type=float, help="Sobolev order of the H(s) norm")
    p.add_argument("--nu", help="Comma-separated complex nu values (Re nu < 0)")
    p.add_argument("--points", type=int, help="Sample points per check")
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--max-subdivisions", type=int)
    p.add_argument("--output", help="Output file path")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="Worker processes (AXB_THREADS overrides)")
    p.add_argument(
        "--config", help="Sweep presets file (default: $AXB_SWEEPS or the packaged sweeps.yaml)",
    )
    p.add_argument("--manifest", help="Also write a YAML run manifest here")
    p.add_argument("--verbose", action="store_true", help="DEBUG logging")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="axbwave",
        description="Spectral multiplier and wave kernels on ax+b groups",
    )
    sub = parser.add_subparsers(dest="command")

    commands = [
        ("kernel", "Evaluate k_lambda^t on an R grid"),
        ("envelope", "Fit pointwise envelope constants"),
        ("l1growth", "Weighted L1 growth exponents"),
        ("supnorm", "Sup-norm bound and lambda scaling"),
        ("hs", "Weighted L1 bound against the H(s) norm"),
        ("oracle", "n = 2 transfer cross-validation"),
        ("resolvent-suite", "Resolvent kernel checks"),
    ]
    for name, help_text in commands:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        p.set_defaults(func=cmd_run)

    p_schema = sub.add_parser("schema", help="Print the report schema version")
    p_schema.set_defaults(func=cmd_schema, verbose=False)

    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        sys.exit(EXIT_CONFIG)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    started = time.perf_counter()
    try:
        code = args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"  ERROR: {exc}", file=sys.stderr)
        _write_failure(args, exc, started)
        code = EXIT_CONFIG
    except NumericalError as exc:
        print(f"  NUMERICAL FAILURE: {type(exc).__name__}: {exc}", file=sys.stderr)
        _write_failure(args, exc, started)
        code = EXIT_NUMERICAL
    sys.exit(code)
