"""Tests for cli.py — exit codes, kernel tables and report files."""

import csv
import math
from argparse import Namespace

import pytest

from axbwave import cli
from axbwave.common.errors import QuadratureError
from axbwave.sweep.artifacts import read_report
from axbwave.sweep.config import build_config

ARG_NAMES = (
    "n", "l", "lam", "t", "R", "rho", "x", "eps", "psi", "tau", "regime", "N", "s_order",
    "nu", "points", "rel_tol", "abs_tol", "max_subdivisions", "output", "format", "seed",
    "threads", "config", "manifest",
)


@pytest.fixture(autouse=True)
def _isolated(monkeypatch, tmp_path):
    presets = tmp_path / "empty-sweeps.yaml"
    presets.write_text("tasks: {}\n")
    monkeypatch.setenv("AXB_SWEEPS", str(presets))
    monkeypatch.delenv("AXB_THREADS", raising=False)
    monkeypatch.chdir(tmp_path)


def _args(**overrides):
    values = dict.fromkeys(ARG_NAMES)
    values["verbose"] = False
    values.update(overrides)
    return Namespace(**values)


def _run(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    return exc.value.code


def _heat(tau, R, x):
    return (
        math.exp(-x) * R / math.sinh(R)
        * (4 * math.pi * tau) ** -1.5 * math.exp(-(R**2) / (4 * tau))
    )


def _read_rows(path):
    with path.open(newline="") as f:
        return list(csv.reader(f))


def test_schema_prints_version(capsys):
    assert _run(["schema"]) == 0
    assert capsys.readouterr().out.strip() == "1.0.0"


def test_no_command_prints_help(capsys):
    assert _run([]) == 2
    assert "usage: axbwave" in capsys.readouterr().out


def test_unknown_regime_is_config_error(capsys, tmp_path):
    assert _run(["envelope", "--regime", "medium"]) == 2
    assert "unknown regime" in capsys.readouterr().err
    report = read_report(tmp_path / "axb-envelope.json")
    assert report["passed"] is False
    assert report["checks"] == {}
    (failure,) = report["failures"]
    assert failure["type"] == "ConfigError"
    assert "unknown regime" in failure["message"]
    assert report["config"]["regime"] == "medium"


def test_unknown_profile_is_config_error():
    assert _run(["kernel", "--psi", "top_hat"]) == 2


def test_bad_thread_variable(monkeypatch):
    monkeypatch.setenv("AXB_THREADS", "lots")
    assert _run(["kernel"]) == 2


def test_supnorm_below_one_is_domain_error(capsys):
    assert _run(["supnorm", "--lambda", "0.5", "--t", "1"]) == 2
    assert "lambda >= 1" in capsys.readouterr().err


def test_missing_preset_file(tmp_path):
    assert _run(["kernel", "--config", str(tmp_path / "nowhere.yaml")]) == 2


def test_numerical_failure_exit_code(monkeypatch, capsys, tmp_path):
    def failing(args):
        raise QuadratureError("did not converge")

    monkeypatch.setattr(cli, "cmd_schema", failing)
    assert _run(["schema"]) == 3
    assert "QuadratureError" in capsys.readouterr().err
    assert list(tmp_path.glob("*.json")) == []


def test_numerical_failure_writes_report(monkeypatch, tmp_path):
    def failing(config, manifest=None):
        raise QuadratureError("did not converge within 20000 subdivisions")

    monkeypatch.setattr(cli, "run", failing)
    out = tmp_path / "heat.csv"
    assert _run(["kernel", "--psi", "gauss_heat", "--output", str(out)]) == 3
    assert not out.exists()
    report = read_report(tmp_path / "heat.json")
    assert report["task"] == "kernel"
    assert report["failures"] == [
        {"type": "QuadratureError", "message": "did not converge within 20000 subdivisions"},
    ]


def test_heat_kernel_csv(tmp_path, capsys):
    out = tmp_path / "heat.csv"
    argv = [
        "kernel", "--psi", "gauss_heat", "--tau", "0.25", "--lambda", "1",
        "--R", "0.5,1.5", "--x", "0.2", "--format", "csv", "--output", str(out),
    ]
    assert _run(argv) == 0
    assert f"Wrote {out}" in capsys.readouterr().out
    header, *rows = _read_rows(out)
    assert header == ["R", "x", "Re k", "Im k", "err"]
    assert len(rows) == 2
    for row in rows:
        R, x, re, im, err = (float(v) for v in row)
        assert x == pytest.approx(0.2)
        assert re == pytest.approx(_heat(0.25, R, x), rel=1e-6)
        assert abs(im) <= 1e-8 * abs(re)
        assert err >= 0


def test_kernel_csv_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["kernel", "--psi", "gauss_heat", "--R", "0.5,1", "--format", "csv", "--output"]
    assert _run([*common, str(first)]) == 0
    assert _run([*common, str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_kernel_clamps_x_to_radius(tmp_path):
    out = tmp_path / "clamped.csv"
    argv = ["kernel", "--psi", "gauss_heat", "--R", "0.5", "--x", "3", "--format", "csv"]
    assert _run([*argv, "--output", str(out)]) == 0
    _, row = _read_rows(out)
    assert float(row[1]) == pytest.approx(0.5)


def test_kernel_json_default_path(tmp_path):
    code = cli.cmd_run(_args(command="kernel", psi="gauss_heat", R="1.0", format="json"))
    assert code == 0
    report = read_report(tmp_path / "axb-kernel.json")
    assert report["task"] == "kernel"
    assert report["checks"] == {"all_points": True}
    assert report["results"]["columns"] == ["R", "x", "Re k", "Im k", "err"]
    assert len(report["results"]["rows"]) == 1


def test_presets_feed_the_command(tmp_path):
    presets = tmp_path / "sweeps.yaml"
    out = tmp_path / "from-preset.csv"
    presets.write_text(
        "tasks:\n"
        "  kernel:\n"
        "    psi: gauss_heat\n"
        "    R_grid: [0.5, 1.0, 1.5]\n"
        "    format: csv\n"
        f"    output: {out}\n",
    )
    assert _run(["kernel", "--config", str(presets)]) == 0
    assert len(_read_rows(out)) == 4


@pytest.mark.slow
def test_resolvent_suite_writes_manifest(tmp_path):
    manifest = tmp_path / "run.yaml"
    argv = [
        "resolvent-suite", "--n", "2", "--nu", "-1", "--points", "3",
        "--output", str(tmp_path / "resolvent.json"), "--manifest", str(manifest),
    ]
    code = _run(argv)
    report = read_report(tmp_path / "resolvent.json")
    assert code == (0 if report["passed"] else 1)
    assert "closed_form[nu=-1+0j]" in report["checks"]
    assert manifest.exists()


def test_run_takes_a_config_directly(tmp_path):
    out = tmp_path / "direct.csv"
    config = build_config(
        "kernel",
        {
            "psi": "gauss_heat",
            "tau": 0.5,
            "lam_grid": "1",
            "R_grid": "1.0",
            "format": "csv",
            "output": str(out),
        },
    )
    assert cli.run(config) == 0
    _, row = _read_rows(out)
    assert float(row[2]) == pytest.approx(_heat(0.5, 1.0, 0.0), rel=1e-6)
