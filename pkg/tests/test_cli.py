"""End-to-end tests for the command-line interface."""

import numpy as np
import pytest

from ridgeboot import __version__
from ridgeboot.cli import main


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # argparse exits for usage errors
        return int(exc.code)


def write_csv(path, array):
    np.savetxt(path, np.atleast_2d(array), delimiter=",", fmt="%.17g")
    return str(path)


def read_report(path):
    rows = {}
    for line in path.read_text().splitlines():
        key, _, rest = line.partition(",")
        rows[key] = rest.split(",")
    return rows


@pytest.fixture()
def dataset(tmp_path):
    gen = np.random.default_rng(7)
    x = gen.standard_normal((40, 5))
    beta = np.array([2.0, -2.0, 0.0, 0.0, 0.0])
    y = x @ beta + 0.5 * gen.standard_normal(40)
    paths = {
        "x": write_csv(tmp_path / "x.csv", x),
        "y": write_csv(tmp_path / "y.csv", y[:, None]),
        "m": write_csv(tmp_path / "m.csv", np.eye(5)[:3]),
        "xf": write_csv(tmp_path / "xf.csv", x[:2]),
        "out": str(tmp_path / "out"),
        "dir": tmp_path,
    }
    return paths


def test_fit_happy_path(dataset, capsys):
    code = run_cli(
        ["fit", "--x", dataset["x"], "--y", dataset["y"],
         "--rho", "1.0", "--b", "0.5", "--out", dataset["out"], "--seed", "11"]
    )
    assert code == 0
    report_path = dataset["dir"] / "out" / "fit_report.csv"
    assert capsys.readouterr().out.strip() == str(report_path)
    report = read_report(report_path)
    assert report["version"] == [__version__]
    assert report["seed"] == ["11"]
    assert report["command"] == ["fit"]
    assert report["config_rho"] == ["1.0"]
    assert [int(v) for v in report["selected"]] == [0, 1]
    assert len(report["theta_hat"]) == 5
    assert float(report["sigma2_hat"][0]) > 0.0
    assert (dataset["dir"] / "out" / "fit_summary.txt").exists()


def test_fit_missing_response_is_usage_error(dataset, capsys):
    code = run_cli(["fit", "--x", dataset["x"], "--rho", "1.0", "--b", "0.5"])
    assert code == 2
    err = capsys.readouterr().err
    assert "usage error" in err and "--y is required" in err


def test_unknown_flag_is_usage_error(dataset):
    assert run_cli(["fit", "--x", dataset["x"], "--frobnicate"]) == 2


def test_length_mismatch_names_both_values(dataset, tmp_path, capsys):
    short = write_csv(tmp_path / "short.csv", np.ones((7, 1)))
    code = run_cli(
        ["fit", "--x", dataset["x"], "--y", short, "--rho", "1.0", "--b", "0.5",
         "--out", dataset["out"]]
    )
    assert code == 3
    err = capsys.readouterr().err
    assert "data error" in err and "40" in err and "7" in err


def test_malformed_csv_reports_position(dataset, tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,oops\n")
    code = run_cli(
        ["fit", "--x", str(bad), "--y", dataset["y"], "--rho", "1.0", "--b", "0.5"]
    )
    assert code == 3
    err = capsys.readouterr().err
    assert "line 2" in err and "column 2" in err


def test_zero_design_is_numerical_error(dataset, tmp_path, capsys):
    zero = write_csv(tmp_path / "zero.csv", np.zeros((4, 2)))
    y4 = write_csv(tmp_path / "y4.csv", np.ones((4, 1)))
    code = run_cli(["fit", "--x", zero, "--y", y4, "--rho", "1.0", "--b", "0.5"])
    assert code == 4
    assert "numerical error" in capsys.readouterr().err


def test_infer_with_null_vector(dataset):
    gamma0 = write_csv(dataset["dir"] / "gamma0.csv", np.zeros((3, 1)))
    code = run_cli(
        ["infer", "--x", dataset["x"], "--y", dataset["y"], "--m", dataset["m"],
         "--rho", "1.0", "--b", "0.5", "--replicates", "50", "--seed", "5",
         "--gamma0", gamma0, "--out", dataset["out"]]
    )
    assert code == 0
    report = read_report(dataset["dir"] / "out" / "infer_report.csv")
    assert float(report["radius"][0]) > 0.0
    assert report["level"] == [repr(0.95)]
    assert len(report["gamma_hat"]) == 3
    assert report["test_reject"][0] in {"true", "false"}
    # gamma = (2, -2, 0) is far from zero, so the test must reject.
    assert report["test_reject"] == ["true"]


def test_predict_fitted_and_loo(dataset):
    for residuals in ("fitted", "loo"):
        code = run_cli(
            ["predict", "--x", dataset["x"], "--y", dataset["y"], "--xf", dataset["xf"],
             "--rho", "1.0", "--b", "0.5", "--replicates", "40", "--seed", "5",
             "--residuals", residuals, "--out", dataset["out"] + residuals]
        )
        assert code == 0
        report = read_report(dataset["dir"] / ("out" + residuals) / "predict_report.csv")
        assert len(report["y_f_hat"]) == 2
        assert float(report["radius"][0]) > 0.0
        lower = [float(v) for v in report["interval_lower"]]
        upper = [float(v) for v in report["interval_upper"]]
        center = [float(v) for v in report["y_f_hat"]]
        assert all(lo < c < up for lo, c, up in zip(lower, center, upper))


def test_predict_requires_future_design(dataset, capsys):
    code = run_cli(
        ["predict", "--x", dataset["x"], "--y", dataset["y"], "--rho", "1.0", "--b", "0.5"]
    )
    assert code == 2
    assert "--xf is required" in capsys.readouterr().err


def test_cv_writes_grid_and_choice(dataset):
    code = run_cli(
        ["cv", "--x", dataset["x"], "--y", dataset["y"],
         "--rho-grid", "0.5,5.0", "--b-grid", "0.0,0.5", "--out", dataset["out"]]
    )
    assert code == 0
    grid_lines = (dataset["dir"] / "out" / "cv_grid.csv").read_text().splitlines()
    assert grid_lines[0] == "rho,b,mean_error"
    assert len(grid_lines) == 5  # header + 4 grid pairs
    report = read_report(dataset["dir"] / "out" / "cv_report.csv")
    assert float(report["chosen_rho"][0]) in (0.5, 5.0)
    assert report["folds"] == ["5"]


def test_cv_rejects_malformed_grid(dataset, capsys):
    code = run_cli(
        ["cv", "--x", dataset["x"], "--y", dataset["y"], "--rho-grid", "1.0,abc"]
    )
    assert code == 3
    assert "--rho-grid" in capsys.readouterr().err


def test_simulate_smoke_with_power_table(dataset):
    code = run_cli(
        ["simulate", "--case", "1", "--reps", "3", "--replicates", "8", "--seed", "3",
         "--power-deltas", "0,2.0", "--out", dataset["out"]]
    )
    assert code == 0
    report = read_report(dataset["dir"] / "out" / "sim_report.csv")
    assert report["case"] == ["1"]
    assert 0.0 <= float(report["confidence_coverage"][0]) <= 1.0
    assert 0.0 <= float(report["misspecification_rate"][0]) <= 1.0
    power_lines = (dataset["dir"] / "out" / "power.csv").read_text().splitlines()
    assert power_lines[0] == "delta,power"
    assert len(power_lines) == 3


def test_simulate_needs_both_hyper_overrides(dataset, capsys):
    code = run_cli(["simulate", "--case", "1", "--rho", "1.0"])
    assert code == 2
    assert "--rho and --b must be given together" in capsys.readouterr().err


def test_config_file_supplies_flags_and_cli_wins(dataset, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "x = {x}\ny = {y}\nrho = 1.0\nb = 0.25\nout = {out}\n".format(
            x=dataset["x"], y=dataset["y"], out=dataset["out"]
        )
    )
    code = run_cli(["fit", "--config", str(cfg), "--b", "0.75"])
    assert code == 0
    report = read_report(dataset["dir"] / "out" / "fit_report.csv")
    assert report["config_b"] == ["0.75"]  # command line overrides the file
    assert report["config_rho"] == ["1.0"]

    bad = tmp_path / "bad.cfg"
    bad.write_text("just some words\n")
    code = run_cli(["fit", "--config", str(bad)])
    assert code == 3
    assert "expected key = value" in capsys.readouterr().err


def test_header_flag_skips_first_line(dataset, tmp_path):
    x = np.asarray(np.loadtxt(dataset["x"], delimiter=","))
    y = np.loadtxt(dataset["y"], delimiter=",")
    xh = tmp_path / "xh.csv"
    xh.write_text("c0,c1,c2,c3,c4\n" + "\n".join(",".join(map(str, row)) for row in x) + "\n")
    yh = tmp_path / "yh.csv"
    yh.write_text("resp\n" + "\n".join(str(v) for v in y) + "\n")
    out = str(tmp_path / "hdr")
    code = run_cli(
        ["fit", "--x", str(xh), "--y", str(yh), "--rho", "1.0", "--b", "0.5",
         "--header", "--out", out]
    )
    assert code == 0
    report = read_report(tmp_path / "hdr" / "fit_report.csv")
    assert [int(v) for v in report["selected"]] == [0, 1]


def report_body(path, skip=("config_threads", "config_out")):
    return [
        line
        for line in path.read_text().splitlines()
        if line.split(",", 1)[0] not in skip
    ]


def test_reports_reproducible_and_thread_count_invariant(dataset, tmp_path):
    args = ["infer", "--x", dataset["x"], "--y", dataset["y"], "--m", dataset["m"],
            "--rho", "1.0", "--b", "0.5", "--replicates", "60", "--seed", "9"]
    out1 = str(tmp_path / "r1")
    out4 = str(tmp_path / "r4")
    assert run_cli(args + ["--threads", "1", "--out", out1]) == 0
    first = (tmp_path / "r1" / "infer_report.csv").read_text()
    assert run_cli(args + ["--threads", "1", "--out", out1]) == 0  # rerun in place
    second = (tmp_path / "r1" / "infer_report.csv").read_text()
    assert first == second  # same seed, same thread count: identical bytes
    assert run_cli(args + ["--threads", "4", "--out", out4]) == 0
    # Across thread counts only the embedded execution config lines differ.
    assert report_body(tmp_path / "r1" / "infer_report.csv") == report_body(
        tmp_path / "r4" / "infer_report.csv"
    )


def test_version_flag():
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
