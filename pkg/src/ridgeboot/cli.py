"""Command-line interface: fit / cv / infer / predict / simulate.

Exit codes: 0 success, 2 usage error (argparse), 3 data error (files,
shapes, values), 4 numerical error (SVD failure, invalid ridge setup).
Failures print one ``data error: ...`` / ``numerical error: ...`` line to
stderr.  A ``--config`` file may supply any long flag as ``key = value``
lines (booleans as true/false); explicit command-line flags win.  Every
report embeds the seed, package version, and the fully resolved
configuration.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, confidence_region, hypothesis_test
from .errors import DataError, NumericalError
from .estimator import improved_fit
from .io import load_matrix, load_vector, write_report, write_summary, write_table
from .model import DEFAULT_RANK_TOLERANCE, Hyperparams, build_frame
from .model_select import CvGrid, cross_validate, default_grids
from .prediction import cdf_from_raw_residuals, loo_residuals, prediction_region
from .rng import StreamSpec
from .simulate import make_case, power_sweep, rho_error_curve, run_case


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ridgeboot",
        description=(
            "Debiased, thresholded ridge regression with bootstrap "
            "simultaneous confidence and prediction regions."
        ),
    )
    parser.add_argument("--version", action="version", version=f"ridgeboot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file supplying any flag; CLI overrides")
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads; results are thread-count independent")
    common.add_argument("--out", default=".", help="output directory (default .)")
    common.add_argument("--header", action="store_true",
                        help="input CSV files carry one header line to skip")
    common.add_argument("--rank-tolerance", type=float, default=DEFAULT_RANK_TOLERANCE,
                        help="relative singular-value cutoff for the numerical rank")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--x", help="design matrix CSV (n rows x p columns)")
    data.add_argument("--y", help="response CSV (one value per line)")
    data.add_argument("--m", help="combination matrix CSV (p1 rows x p columns; default identity)")

    hyper = argparse.ArgumentParser(add_help=False)
    hyper.add_argument("--rho", type=float, help="ridge penalty (>= 0)")
    hyper.add_argument("--b", "--threshold", dest="b", type=float,
                       help="hard-threshold level (>= 0)")

    boot = argparse.ArgumentParser(add_help=False)
    boot.add_argument("--alpha", type=float, default=0.05, help="miss level (default 0.05)")
    boot.add_argument("--replicates", type=int, default=500,
                      help="bootstrap replicates B (default 500)")

    p_fit = sub.add_parser("fit", parents=[common, data, hyper],
                           help="fit the debiased, thresholded ridge estimator")

    p_cv = sub.add_parser("cv", parents=[common, data],
                          help="5-fold cross-validation over a (rho, threshold) grid")
    p_cv.add_argument("--rho-grid", help="comma-separated rho candidates (default log grid)")
    p_cv.add_argument("--b-grid", help="comma-separated threshold candidates (default linear grid)")
    p_cv.add_argument("--folds", type=int, default=5, help="fold count (default 5)")

    p_infer = sub.add_parser("infer", parents=[common, data, hyper, boot],
                             help="wild-bootstrap simultaneous confidence region / test")
    p_infer.add_argument("--gamma0", help="null vector CSV; runs the test of gamma = gamma0")

    p_predict = sub.add_parser("predict", parents=[common, data, hyper, boot],
                               help="hybrid-bootstrap simultaneous prediction region")
    p_predict.add_argument("--xf", help="future design CSV (rows x p)")
    p_predict.add_argument("--residuals", choices=("fitted", "loo"), default="fitted",
                           help="residuals fed to the future-noise ECDF (default fitted)")

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="Monte-Carlo study case with coverage metrics")
    p_sim.add_argument("--case", type=int, choices=range(1, 7), required=True)
    p_sim.add_argument("--target", choices=("theta", "beta"), default="theta",
                       help="coverage target when p > n (default theta)")
    p_sim.add_argument("--scale", choices=("desk", "full"), default="desk")
    p_sim.add_argument("--reps", type=int, help="replications (default: 300 desk / 1000 full)")
    p_sim.add_argument("--replicates", type=int,
                       help="bootstrap replicates B (default: 200 desk / 500 full)")
    p_sim.add_argument("--rho", type=float, help="override the pinned ridge penalty")
    p_sim.add_argument("--b", "--threshold", dest="b", type=float,
                       help="override the pinned threshold")
    p_sim.add_argument("--cv", action="store_true",
                       help="select (rho, b) by pilot cross-validation instead of the pins")
    p_sim.add_argument("--power-deltas",
                       help="comma-separated shifts; also emit the power curve table")
    p_sim.add_argument("--rho-curve", action="store_true",
                       help="also emit the estimation-error-vs-rho table")
    return parser


def _parse_float_list(text: str, flag: str) -> np.ndarray:
    try:
        values = np.array([float(cell) for cell in text.split(",") if cell.strip() != ""])
    except ValueError:
        raise DataError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if values.size == 0:
        raise DataError(f"{flag}: empty list")
    return values


def apply_config(argv: list[str]) -> list[str]:
    """Expand --config file contents into flags placed before the CLI ones."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return argv
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    injected: list[str] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}: line {lineno}: expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() == "true":
            injected.append(flag)
        elif value.lower() == "false":
            continue
        else:
            injected.extend([flag, value])
    # Keep the subcommand first; command line flags come last and win.
    return argv[:1] + injected + argv[1:]


def _resolved_config(args: argparse.Namespace) -> list[tuple[str, object]]:
    skip = {"command", "seed"}
    rows: list[tuple[str, object]] = [
        ("version", __version__),
        ("seed", args.seed),
        ("command", args.command),
    ]
    for key in sorted(vars(args)):
        if key in skip:
            continue
        value = getattr(args, key)
        rows.append((f"config_{key}", "none" if value is None else value))
    return rows


def _require(parser_name: str, args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{parser_name}: --{name.replace('_', '-')} is required")


class UsageError(Exception):
    """Missing/inconsistent flags detected after parsing."""


def _load_frame(args: argparse.Namespace):
    x = load_matrix(args.x, args.header)
    y = load_vector(args.y, args.header)
    m = load_matrix(args.m, args.header) if args.m else None
    return build_frame(x, y, m, args.rank_tolerance)


def _hyper(args: argparse.Namespace) -> Hyperparams:
    return Hyperparams(rho=args.rho, threshold=args.b)


def _cmd_fit(args: argparse.Namespace) -> int:
    _require("fit", args, "x", "y", "rho", "b")
    frame = _load_frame(args)
    fit = improved_fit(frame, _hyper(args))
    rows = _resolved_config(args) + [
        ("sigma2_hat", fit.sigma2_hat),
        ("selected", fit.selected),
        ("theta_hat", fit.theta_hat),
        ("gamma_hat", fit.gamma_hat),
        ("tau_hat", fit.tau_hat),
        ("rank", frame.svd.rank),
        ("lambda_max", float(frame.svd.singular[0])),
        ("lambda_min", float(frame.svd.singular[-1])),
    ]
    write_report(os.path.join(args.out, "fit_report.csv"), rows)
    write_summary(
        os.path.join(args.out, "fit_summary.txt"),
        "Debiased thresholded ridge fit",
        [
            f"n = {frame.n}, p = {frame.p}, rank = {frame.svd.rank}",
            f"rho = {args.rho}, threshold = {args.b}",
            f"selected {fit.selected.size} of {frame.p} coordinates",
            f"sigma2_hat = {fit.sigma2_hat:.6g}",
        ],
    )
    print(os.path.join(args.out, "fit_report.csv"))
    return 0


def _cmd_cv(args: argparse.Namespace) -> int:
    _require("cv", args, "x", "y")
    frame = _load_frame(args)
    default_rhos, default_bs = default_grids(frame)
    rhos = _parse_float_list(args.rho_grid, "--rho-grid") if args.rho_grid else default_rhos
    bs = _parse_float_list(args.b_grid, "--b-grid") if args.b_grid else default_bs
    grid = CvGrid(rhos=rhos, thresholds=bs, folds=args.folds,
                  stream=StreamSpec(args.seed, (0,)))
    report = cross_validate(frame, grid, threads=args.threads)
    table = np.column_stack([report.rho_grid, report.threshold_grid, report.errors])
    write_table(os.path.join(args.out, "cv_grid.csv"), ["rho", "b", "mean_error"], table)
    rows = _resolved_config(args) + [
        ("chosen_rho", report.chosen.rho),
        ("chosen_b", report.chosen.threshold),
        ("chosen_error", float(report.errors.min())),
        ("folds", args.folds),
    ]
    write_report(os.path.join(args.out, "cv_report.csv"), rows)
    write_summary(
        os.path.join(args.out, "cv_summary.txt"),
        "Cross-validation",
        [
            f"grid: {report.rho_grid.size} pairs, {args.folds} folds",
            f"chosen rho = {report.chosen.rho:.6g}, threshold = {report.chosen.threshold:.6g}",
            f"held-out MSE = {report.errors.min():.6g}",
        ],
    )
    print(os.path.join(args.out, "cv_report.csv"))
    return 0


def _cmd_infer(args: argparse.Namespace) -> int:
    _require("infer", args, "x", "y", "rho", "b")
    frame = _load_frame(args)
    fit = improved_fit(frame, _hyper(args))
    cfg = BootstrapConfig(args.replicates, args.alpha, StreamSpec(args.seed, (1,)))
    region, draws = confidence_region(frame, fit, cfg, threads=args.threads)
    rows = _resolved_config(args) + [
        ("gamma_hat", fit.gamma_hat),
        ("tau_hat", fit.tau_hat),
        ("radius", region.radius),
        ("level", region.level),
        ("interval_lower", fit.gamma_hat - region.radius * fit.tau_hat),
        ("interval_upper", fit.gamma_hat + region.radius * fit.tau_hat),
    ]
    summary = [
        f"simultaneous level {region.level:.3g} region for gamma = M theta",
        f"radius (normalized max statistic) = {region.radius:.6g}",
    ]
    if args.gamma0:
        gamma0 = load_vector(args.gamma0, args.header)
        test = hypothesis_test(frame, fit, gamma0, cfg, draws=draws)
        rows += [
            ("test_statistic", test.statistic),
            ("test_critical", test.critical),
            ("test_reject", test.reject),
        ]
        verdict = "rejected" if test.reject else "not rejected"
        summary.append(
            f"H0: gamma = gamma0 {verdict} at level {args.alpha:g} "
            f"(statistic {test.statistic:.6g} vs critical {test.critical:.6g})"
        )
    write_report(os.path.join(args.out, "infer_report.csv"), rows)
    write_summary(os.path.join(args.out, "infer_summary.txt"),
                  "Wild-bootstrap simultaneous inference", summary)
    print(os.path.join(args.out, "infer_report.csv"))
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    _require("predict", args, "x", "y", "rho", "b", "xf")
    frame = _load_frame(args)
    x_f = load_matrix(args.xf, args.header)
    fit = improved_fit(frame, _hyper(args))
    cdf = None
    if args.residuals == "loo":
        cdf = cdf_from_raw_residuals(loo_residuals(frame, fit.hyper))
    cfg = BootstrapConfig(args.replicates, args.alpha, StreamSpec(args.seed, (2,)))
    region, _ = prediction_region(frame, fit, x_f, cfg, threads=args.threads,
                                  residual_cdf=cdf)
    rows = _resolved_config(args) + [
        ("y_f_hat", region.center),
        ("radius", region.radius),
        ("level", region.level),
        ("interval_lower", region.center - region.radius),
        ("interval_upper", region.center + region.radius),
    ]
    write_report(os.path.join(args.out, "predict_report.csv"), rows)
    write_summary(
        os.path.join(args.out, "predict_summary.txt"),
        "Hybrid-bootstrap prediction region",
        [
            f"{x_f.shape[0]} future rows, level {region.level:.3g}",
            f"radius = {region.radius:.6g} ({args.residuals} residuals)",
        ],
    )
    print(os.path.join(args.out, "predict_report.csv"))
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    hyper = None
    if (args.rho is None) != (args.b is None):
        raise UsageError("simulate: --rho and --b must be given together")
    if args.rho is not None:
        hyper = Hyperparams(rho=args.rho, threshold=args.b)
    case = make_case(
        args.case,
        scale=args.scale,
        reps=args.reps,
        replicates=args.replicates,
        seed=args.seed,
        hyper=hyper,
        use_cv=args.cv,
    )
    report = run_case(case, target=args.target, threads=args.threads)
    headline = report.headline()
    rows = _resolved_config(args) + [
        ("case", report.case_id),
        ("target", report.target),
        ("rho", report.hyper.rho),
        ("threshold", report.hyper.threshold),
        ("reps", report.reps),
        ("bootstrap_replicates", report.replicates),
        ("lambda_r", report.lambda_r),
        ("k1", report.k1),
        ("k2_beta", report.k2_beta),
        ("k2_theta", report.k2_theta),
        ("k3", report.k3),
        ("k4", report.k4),
    ]
    rows += [(key, value) for key, value in headline.items()]
    rows += [
        ("confidence_coverage_se", report.mc_se(headline["confidence_coverage"])),
        ("prediction_coverage_se", report.mc_se(headline["prediction_coverage"])),
        ("coverage_theta", report.coverage_theta),
        ("coverage_beta", report.coverage_beta),
        ("pred_coverage_theta", report.pred_coverage_theta),
        ("pred_coverage_beta", report.pred_coverage_beta),
        ("gamma_max_error_theta", report.gamma_err_theta),
        ("gamma_max_error_beta", report.gamma_err_beta),
    ]
    write_report(os.path.join(args.out, "sim_report.csv"), rows)
    summary = [
        f"case {report.case_id} ({args.scale}), target {report.target}",
        f"rho = {report.hyper.rho:.6g}, threshold = {report.hyper.threshold:.6g}",
        f"misspecification rate = {headline['misspecification_rate']:.4g}",
        f"confidence coverage = {headline['confidence_coverage']:.4g} "
        f"(se {report.mc_se(headline['confidence_coverage']):.3g})",
        f"prediction coverage = {headline['prediction_coverage']:.4g} "
        f"(se {report.mc_se(headline['prediction_coverage']):.3g})",
    ]
    if args.power_deltas:
        deltas = _parse_float_list(args.power_deltas, "--power-deltas")
        table = power_sweep(case, deltas, target=args.target, threads=args.threads)
        write_table(os.path.join(args.out, "power.csv"), ["delta", "power"], table)
        summary.append(f"power curve written for {deltas.size} deltas")
    if args.rho_curve:
        rhos = np.geomspace(max(1e-3, report.hyper.rho / 30), case.n, 20)
        table = rho_error_curve(case, rhos, reps=50, threads=args.threads)
        write_table(os.path.join(args.out, "rho_curve.csv"),
                    ["rho", "ridge_error", "debiased_error", "improved_error"], table)
        summary.append("estimation-error-vs-rho table written")
    write_summary(os.path.join(args.out, "sim_summary.txt"), "Monte-Carlo study", summary)
    print(os.path.join(args.out, "sim_report.csv"))
    return 0


_COMMANDS = {
    "fit": _cmd_fit,
    "cv": _cmd_cv,
    "infer": _cmd_infer,
    "predict": _cmd_predict,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        argv = apply_config(argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
