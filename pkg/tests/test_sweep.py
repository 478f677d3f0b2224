"""Tests for sweep/ — config layering, the worker pool and run artifacts."""

import json
import subprocess

import pytest
import yaml

from axbwave.common.errors import ConfigError, DomainError
from axbwave.sweep import artifacts
from axbwave.sweep.artifacts import (
    KERNEL_COLUMNS,
    REPORT_FIELDS,
    build_error_report,
    build_report,
    git_describe,
    read_report,
    report_schema_version,
    write_csv,
    write_manifest,
    write_report,
)
from axbwave.sweep.config import (
    SweepConfig,
    build_config,
    load_presets,
    parse_complex_list,
    parse_grid,
)
from axbwave.sweep.pool import map_ordered, resolve_threads, run_batches


def _square(x):
    return x * x


def _square_even(x):
    if x % 2:
        raise DomainError(f"odd job {x}")
    return x * x


def _sample_report():
    return build_report(
        "kernel",
        {"n": 2, "lam_grid": (4.0,)},
        {"finite": True, "stable": False},
        [{"R": 1.0, "value": 0.5 + 0.25j}],
        1.5,
    )


# --- config ---


def test_parse_grid_range():
    assert parse_grid("0:1:3") == (0.0, 0.5, 1.0)


def test_parse_grid_list_forms():
    assert parse_grid("1, 2,4") == (1.0, 2.0, 4.0)
    assert parse_grid(3) == (3.0,)
    assert parse_grid([1, 2]) == (1.0, 2.0)


@pytest.mark.parametrize("text", ["1:2", "a,b", "0:1:0", "0:1:x"])
def test_parse_grid_rejects(text):
    with pytest.raises(ConfigError):
        parse_grid(text)


def test_parse_complex_list():
    assert parse_complex_list("-1, -0.5-0.5j") == (-1 + 0j, -0.5 - 0.5j)
    assert parse_complex_list(["-2+1j"]) == (-2 + 1j,)
    with pytest.raises(ConfigError):
        parse_complex_list("nope")


def test_defaults(monkeypatch):
    monkeypatch.delenv("AXB_THREADS", raising=False)
    config = build_config("kernel")
    assert config.n == 2
    assert config.lam_grid == (4.0,)
    assert config.R_grid == (0.5, 1.0, 2.0, 4.0)
    assert config.format == "json"
    assert config.threads == 1
    assert config.quad().rel_tol == 1e-10


def test_overrides_beat_presets(monkeypatch):
    monkeypatch.delenv("AXB_THREADS", raising=False)
    presets = {"kernel": {"lam_grid": "1:3:3", "n": 3, "format": "csv"}}
    config = build_config("kernel", {"n": 2, "psi": None}, presets)
    assert config.lam_grid == (1.0, 2.0, 3.0)
    assert config.n == 2
    assert config.format == "csv"
    assert config.psi is None


def test_regime_alias_is_normalised(monkeypatch):
    monkeypatch.delenv("AXB_THREADS", raising=False)
    assert build_config("envelope", {"regime": "small-r"}).regime == "small_R"


@pytest.mark.parametrize(
    ("task", "overrides"),
    [
        ("kernel", {"colour": "blue"}),
        ("kernel", {"psi": "top_hat"}),
        ("envelope", {"regime": "medium"}),
        ("kernel", {"format": "xml"}),
        ("kernel", {"tau": 0.0}),
        ("kernel", {"lam_grid": ""}),
        ("sweep-everything", {}),
    ],
)
def test_build_config_rejects(monkeypatch, task, overrides):
    monkeypatch.delenv("AXB_THREADS", raising=False)
    with pytest.raises(ConfigError):
        build_config(task, overrides)


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("AXB_THREADS", "3")
    assert build_config("kernel", {"threads": 1}).threads == 3


def test_config_to_dict():
    data = SweepConfig(task="resolvent-suite").to_dict()
    assert data["task"] == "resolvent-suite"
    assert data["nu"] == ["(-1+0j)", "(-0.5-0.5j)"]


def test_packaged_presets(monkeypatch):
    monkeypatch.delenv("AXB_SWEEPS", raising=False)
    presets = load_presets()
    assert "schema_version" not in presets
    assert presets["envelope"]["regime"] == "large_R"
    assert set(presets) >= {"kernel", "envelope", "supnorm", "oracle"}


def test_presets_from_environment(monkeypatch, tmp_path):
    path = tmp_path / "custom.yaml"
    path.write_text("kernel:\n  n: 3\n")
    monkeypatch.setenv("AXB_SWEEPS", str(path))
    assert load_presets() == {"kernel": {"n": 3}}


def test_missing_explicit_presets(tmp_path):
    with pytest.raises(ConfigError):
        load_presets(tmp_path / "absent.yaml")


def test_presets_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- kernel\n- envelope\n")
    with pytest.raises(ConfigError):
        load_presets(path)


# --- pool ---


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("AXB_THREADS", raising=False)
    assert resolve_threads() == 1
    assert resolve_threads(4) == 4
    with pytest.raises(ConfigError):
        resolve_threads(0)


@pytest.mark.parametrize("raw", ["many", "0"])
def test_resolve_threads_bad_environment(monkeypatch, raw):
    monkeypatch.setenv("AXB_THREADS", raw)
    with pytest.raises(ConfigError):
        resolve_threads(2)


def test_map_ordered_inline():
    assert map_ordered(_square, range(5)) == [0, 1, 4, 9, 16]


def test_map_ordered_process_pool():
    assert map_ordered(_square, range(7), threads=2, batch_size=2) == [x * x for x in range(7)]


def test_run_batches_records_failures():
    result = run_batches(_square_even, range(5), batch_size=2)
    assert result["total"] == 5
    assert result["completed"] == 3
    assert result["failed"] == 2
    assert result["results"] == [0, None, 4, None, 16]
    assert [e["job"] for e in result["errors"]] == [1, 3]
    assert result["errors"][0]["error"] == "DomainError: odd job 1"


def test_run_batches_lets_other_errors_through():
    with pytest.raises(TypeError):
        run_batches(_square, ["a"])


# --- artifacts ---


def test_write_csv_uses_crlf(tmp_path):
    path = write_csv(tmp_path / "out" / "k.csv", KERNEL_COLUMNS, [(0.1, 0.0, 1.5, -2.0, 1e-12)])
    raw = path.read_bytes()
    assert raw.startswith(b"R,x,Re k,Im k,err\r\n")
    assert raw.endswith(b"\r\n")
    assert b"0.10000000000000001," in raw
    assert b"\n" not in raw.replace(b"\r\n", b"")


def test_build_report_fields():
    report = _sample_report()
    assert tuple(report) == REPORT_FIELDS
    assert report["schema_version"] == report_schema_version() == "1.0.0"
    assert report["passed"] is False
    assert report["failures"] == ["stable"]
    assert report["config"]["lam_grid"] == [4.0]
    assert report["results"][0]["value"] == {"re": 0.5, "im": 0.25}


def test_error_report_lists_the_exception(tmp_path):
    report = build_error_report("hs", {"s_order": 1.0}, DomainError("need s > 2"), 0.01)
    assert tuple(report) == REPORT_FIELDS
    assert report["passed"] is False
    assert report["failures"] == [{"type": "DomainError", "message": "need s > 2"}]
    assert read_report(write_report(tmp_path / "hs.json", report))["checks"] == {}


def test_report_round_trip(tmp_path):
    report = _sample_report()
    path = write_report(tmp_path / "report.json", report)
    assert read_report(path) == json.loads(json.dumps(report))


def test_read_report_missing_fields(tmp_path):
    path = tmp_path / "partial.json"
    path.write_text(json.dumps({"schema_version": "1.0.0", "task": "kernel"}))
    with pytest.raises(ValueError, match="lacks"):
        read_report(path)


def test_read_report_major_version(tmp_path):
    report = _sample_report()
    report["schema_version"] = "2.0.0"
    path = write_report(tmp_path / "future.json", report)
    with pytest.raises(ValueError, match="unsupported"):
        read_report(path)


def test_manifest_omits_results(tmp_path):
    path = write_manifest(tmp_path / "run.yaml", _sample_report())
    doc = yaml.safe_load(path.read_text())
    assert "results" not in doc
    assert doc["task"] == "kernel"
    assert doc["checks"] == {"finite": True, "stable": False}


def test_git_describe_success(monkeypatch):
    def fake_run(*args, **kwargs):
        return subprocess.CompletedProcess(args, 0, stdout="v0.1.0-3-gabc1234\n", stderr="")

    monkeypatch.setattr(artifacts.subprocess, "run", fake_run)
    assert git_describe() == "v0.1.0-3-gabc1234"


def test_git_describe_outside_repository(monkeypatch):
    def fake_run(*args, **kwargs):
        return subprocess.CompletedProcess(args, 128, stdout="", stderr="fatal")

    monkeypatch.setattr(artifacts.subprocess, "run", fake_run)
    assert git_describe() == "unknown"


def test_git_describe_without_git(monkeypatch):
    def fake_run(*args, **kwargs):
        raise FileNotFoundError("git")

    monkeypatch.setattr(artifacts.subprocess, "run", fake_run)
    assert git_describe() == "unknown"
