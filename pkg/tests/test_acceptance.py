"""Acceptance gate: seven criteria, one test each, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines.
Criteria 3-6 are Monte-Carlo studies at desk scale and take a few minutes
combined; everything is deterministic given the pinned seeds.
"""

import contextlib
import dataclasses
import io
import os
import time

import numpy as np

from ridgeboot.bootstrap import (
    BootstrapConfig,
    bootstrap_draws,
    h_oracle,
    sample_quantile,
)
from ridgeboot.cli import main as cli_main
from ridgeboot.estimator import (
    debias,
    expansion_check,
    improved_fit,
    ridge_estimate,
    threshold_select,
)
from ridgeboot.model import Hyperparams, build_frame, complement_project, thin_svd
from ridgeboot.prediction import ecdf
from ridgeboot.rng import StreamSpec, laplace, normal
from ridgeboot.simulate import make_case, power_sweep, run_case

THREADS = min(8, os.cpu_count() or 1)


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, detail


def _close(value, target, tol=1e-10):
    return np.all(np.abs(np.asarray(value) - np.asarray(target)) <= tol)


def two_sample_ks(a: np.ndarray, b: np.ndarray) -> float:
    a = np.sort(a)
    b = np.sort(b)
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


def test_criterion_1_closed_form_and_expansion_identity():
    start = time.perf_counter()
    problems = []

    frame = build_frame(np.eye(2), np.array([1.0, 2.0]))
    if not _close(ridge_estimate(frame, 1.0), [0.5, 1.0]):
        problems.append("ridge (I2, rho=1)")
    if not _close(ridge_estimate(frame, 0.0), [1.0, 2.0]):
        problems.append("ridge (I2, rho=0 = least squares)")
    if not _close(ridge_estimate(build_frame(np.array([[2.0]]), np.array([1.0])), 0.0), 0.5):
        problems.append("ridge (scalar)")
    if not _close(debias(frame, ridge_estimate(frame, 1.0), 1.0), [0.75, 1.5]):
        problems.append("debias (I2, rho=1)")

    fit = improved_fit(frame, Hyperparams(rho=1.0, threshold=1.0))
    if not np.array_equal(fit.selected, [1]):
        problems.append("threshold selection")
    if not _close(fit.theta_hat, [0.0, 1.5]):
        problems.append("theta_hat")
    if not _close(fit.sigma2_hat, 0.625):
        problems.append("sigma2_hat")
    if not _close(fit.tau_hat, [np.sqrt(0.5), np.sqrt(17.0) / 4.0]):
        problems.append("tau_hat")

    gen = np.random.default_rng(20260825)
    worst = 0.0
    for _ in range(100):
        n = int(gen.integers(2, 31))
        p = int(gen.integers(1, 21))
        x = gen.standard_normal((n, p))
        inst = build_frame(x, gen.standard_normal(n))
        defect = expansion_check(
            inst,
            gen.standard_normal(p),
            gen.standard_normal(n),
            float(gen.uniform(0.01, 10.0)),
        )
        worst = max(worst, defect)
    if worst > 1e-9:
        problems.append(f"expansion defect {worst:.3g} > 1e-9")

    elapsed = time.perf_counter() - start
    if elapsed >= 5.0:
        problems.append(f"runtime {elapsed:.2f}s >= 5s")
    _verdict(
        1,
        not problems,
        f"hand examples at 1e-10, expansion defect {worst:.2e} <= 1e-9 "
        f"over 100 instances, {elapsed:.2f}s"
        + (f"; failed: {', '.join(problems)}" if problems else ""),
    )


def test_criterion_2_bootstrap_matches_gaussian_oracle():
    start = time.perf_counter()
    spec = StreamSpec(71, (900,))
    gen = spec.child(1).generator()
    n, p, p1 = 300, 40, 10
    x = gen.standard_normal((n, p))
    m = gen.standard_normal((p1, p))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    beta = np.zeros(p)
    beta[:4] = 3.0
    beta[4:8] = -3.0
    sigma = 2.0
    y = x @ beta + sigma * gen.standard_normal(n)

    frame = build_frame(x, y, m)
    fit = improved_fit(frame, Hyperparams(rho=1.0, threshold=1.0))
    selection_exact = np.array_equal(fit.selected, np.arange(8))
    fit = dataclasses.replace(fit, sigma2_hat=sigma**2)  # pin sigma to the truth

    draws = bootstrap_draws(
        frame, fit, BootstrapConfig(5000, 0.05, spec.child(2)), threads=THREADS
    )
    c = frame.combination[:, fit.selected] @ frame.svd.right[fit.selected, :]
    oracle = h_oracle(
        frame.svd, c, fit.tau_hat, 1.0, sigma, 5000, spec.child(3).generator()
    )
    ks = two_sample_ks(draws.stats, oracle)
    elapsed = time.perf_counter() - start
    ok = selection_exact and ks <= 0.03 and elapsed < 120.0
    _verdict(
        2,
        ok,
        f"selection recovers the 8 signal coordinates: {selection_exact}; "
        f"KS(bootstrap, oracle) = {ks:.4f} <= 0.03 at B = 5000; {elapsed:.1f}s",
    )


def _coverage_criterion(num: int, case_id: int, label: str) -> None:
    start = time.perf_counter()
    report = run_case(make_case(case_id, seed=3), threads=THREADS)
    head = report.headline()
    coverage = head["confidence_coverage"]
    misspec = head["misspecification_rate"]
    pred = head["prediction_coverage"]
    ok = (
        0.92 <= coverage <= 0.98
        and misspec <= 0.01
        and 0.88 <= pred <= 0.96
    )
    elapsed = time.perf_counter() - start
    _verdict(
        num,
        ok,
        f"{label}: confidence coverage {coverage:.3f} in [0.92, 0.98]; "
        f"misspecification {misspec:.3f} <= 0.01; "
        f"prediction coverage {pred:.3f} in [0.88, 0.96]; {elapsed:.0f}s",
    )


def test_criterion_3_normal_error_coverage_study():
    _coverage_criterion(3, 1, "case 1 (Normal errors, p < n)")


def test_criterion_4_laplace_error_coverage_study():
    _coverage_criterion(4, 2, "case 2 (Laplace errors, p < n)")


def test_criterion_5_overparameterized_target_split():
    start = time.perf_counter()
    report = run_case(make_case(5, seed=9), threads=THREADS)
    cov_theta = report.coverage_theta
    cov_beta = report.coverage_beta
    ok = 0.91 <= cov_theta <= 0.99 and cov_beta <= 0.10
    elapsed = time.perf_counter() - start
    _verdict(
        5,
        ok,
        f"case 5 (p > n): coverage of the identifiable target {cov_theta:.3f} "
        f"in [0.91, 0.99]; coverage of the full coefficient vector "
        f"{cov_beta:.3f} <= 0.10; {elapsed:.0f}s",
    )


def test_criterion_6_power_curve():
    start = time.perf_counter()
    deltas = np.array([0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0])
    table = power_sweep(make_case(1, seed=3), deltas, threads=THREADS)
    power = table[:, 1]
    size_ok = 0.02 <= power[0] <= 0.08
    monotone_ok = bool(np.all(np.diff(power) >= -0.03))
    tail_ok = power[-1] >= 0.99
    elapsed = time.perf_counter() - start
    _verdict(
        6,
        size_ok and monotone_ok and tail_ok,
        f"rejection at delta=0 is {power[0]:.3f} in [0.02, 0.08]; "
        f"monotone within 0.03 MC noise: {monotone_ok}; "
        f"power at delta=1 is {power[-1]:.3f} >= 0.99; {elapsed:.0f}s",
    )


def test_criterion_7_property_suite(tmp_path):
    start = time.perf_counter()
    failures = []
    gen = np.random.default_rng(404)

    # Quantile definition: minimal order statistic covering mass q.
    if sample_quantile(np.array([1.0, 2.0, 3.0, 4.0]), 0.75) != 3.0:
        failures.append("quantile (1,2,3,4)@0.75")
    if sample_quantile(np.array([1.0, 1.0, 1.0, 2.0]), 0.5) != 1.0:
        failures.append("quantile ties")
    for _ in range(50):
        values = np.round(gen.standard_normal(int(gen.integers(1, 40))), 1)
        q = float(gen.uniform(0.01, 0.99))
        r = sample_quantile(values, q)
        s = np.sort(values)
        right = np.searchsorted(s, r, side="right") / s.size
        left = np.searchsorted(s, r, side="left") / s.size
        if not (r in s and right >= q and left < q):
            failures.append(f"quantile property at q={q:.3f}")
            break

    # Selection monotonicity: raising b never adds coordinates.
    for _ in range(50):
        theta = gen.standard_normal(30)
        b1, b2 = sorted(gen.uniform(0.0, 2.0, size=2))
        if not set(threshold_select(theta, b2)) <= set(threshold_select(theta, b1)):
            failures.append("selection monotonicity")
            break

    # Null-space projector: idempotent and orthogonal to the row space.
    for _ in range(20):
        svd = thin_svd(gen.standard_normal((6, 12)))
        v = gen.standard_normal(12)
        proj = complement_project(svd, v)
        if np.max(np.abs(complement_project(svd, proj) - proj)) > 1e-10:
            failures.append("projector idempotence")
            break
        if np.max(np.abs(svd.right.T @ proj)) > 1e-10:
            failures.append("projector orthogonality")
            break

    # Residual ECDF is centered and sorted.
    x = gen.standard_normal((40, 6))
    y = x @ np.array([2.0, -2.0, 1.0, 0.0, 0.0, 0.0]) + gen.standard_normal(40)
    fit = improved_fit(build_frame(x, y), Hyperparams(1.0, 0.5))
    cdf = ecdf(fit)
    if abs(float(np.mean(cdf.values))) > 1e-12 or np.any(np.diff(cdf.values) < 0):
        failures.append("residual centering")

    # Thread-count determinism: CLI reports are bit-exact apart from the
    # embedded thread-count config line.
    np.savetxt(tmp_path / "x.csv", x, delimiter=",")
    np.savetxt(tmp_path / "y.csv", y[:, None], delimiter=",")
    base = ["infer", "--x", str(tmp_path / "x.csv"), "--y", str(tmp_path / "y.csv"),
            "--rho", "1.0", "--b", "0.5", "--replicates", "50", "--seed", "7"]
    for threads, name in ((1, "t1"), (4, "t4")):
        with contextlib.redirect_stdout(io.StringIO()):
            code = cli_main(base + ["--threads", str(threads), "--out", str(tmp_path / name)])
        if code != 0:
            failures.append("CLI infer run")
    reports = [
        [
            line
            for line in (tmp_path / name / "infer_report.csv").read_text().splitlines()
            if not line.startswith(("config_threads,", "config_out,"))
        ]
        for name in ("t1", "t4")
    ]
    if reports[0] != reports[1]:
        failures.append("thread-count report determinism")

    # Error-law samplers: both laws have variance 4.
    normal_var = float(np.var(normal(StreamSpec(12).generator(), 0.0, 2.0, 1_000_000)))
    laplace_var = float(np.var(laplace(StreamSpec(13).generator(), np.sqrt(2.0), 1_000_000)))
    if abs(normal_var - 4.0) > 0.05:
        failures.append(f"normal variance {normal_var:.4f}")
    if abs(laplace_var - 4.0) > 0.05:
        failures.append(f"laplace variance {laplace_var:.4f}")

    elapsed = time.perf_counter() - start
    if elapsed >= 120.0:
        failures.append(f"runtime {elapsed:.1f}s >= 120s")
    _verdict(
        7,
        not failures,
        "quantile conformance, selection monotonicity, projector idempotence, "
        "residual centering, thread-count bit-exact reports, sampler variances "
        f"(normal {normal_var:.3f}, laplace {laplace_var:.3f}); {elapsed:.1f}s"
        + (f"; failed: {', '.join(failures)}" if failures else ""),
    )
