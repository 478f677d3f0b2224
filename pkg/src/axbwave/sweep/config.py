"""SweepConfig: built-in defaults, then the task preset from sweeps.yaml, then CLI flags."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from importlib.resources import files
from pathlib import Path

import numpy as np
import yaml

from axbwave.common.errors import ConfigError, DomainError
from axbwave.kernels.profiles import BUILTIN_KINDS
from axbwave.lab.envelopes import normalise_regime
from axbwave.quadrature.rules import QuadSpec
from axbwave.sweep.pool import resolve_threads

SWEEPS_ENV = "AXB_SWEEPS"
SWEEPS_RESOURCE = "sweeps.yaml"

TASKS = ("kernel", "envelope", "l1growth", "supnorm", "hs", "oracle", "resolvent-suite")
FORMATS = ("csv", "json")
GRID_FIELDS = ("lam_grid", "t_grid", "R_grid", "rho_grid", "alpha_grid")


def parse_grid(value) -> tuple[float, ...]:
    """"a:b:m" (m points, both ends included), "a,b,c", a number or a list."""
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    if isinstance(value, (int, float)):
        return (float(value),)
    text = str(value).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ConfigError(f"grid {text!r} must look like a:b:m")
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ConfigError(f"grid {text!r} needs at least one point")
            return tuple(float(v) for v in np.linspace(lo, hi, count))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}: {exc}") from exc


def parse_complex_list(value) -> tuple[complex, ...]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    try:
        return tuple(complex(str(v).replace(" ", "")) for v in items if str(v).strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex list {value!r}") from exc


@dataclass(frozen=True)
class SweepConfig:
    task: str
    n: int = 2
    l: int | None = None
    lam_grid: tuple[float, ...] = (4.0,)
    t_grid: tuple[float, ...] = (1.0,)
    R_grid: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    rho_grid: tuple[float, ...] = tuple(float(v) for v in np.linspace(-4.0, 4.0, 17))
    alpha_grid: tuple[float, ...] = (0.0, 0.5, 1.0)
    x: float = 0.0
    eps: float = 0.0
    psi: str | None = None
    tau: float = 1.0
    regime: str = "large_R"
    N: int = 4
    s_order: float = 2.1
    nu: tuple[complex, ...] = (-1.0 + 0j, -0.5 - 0.5j)
    points: int = 20
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 20000
    output: str | None = None
    format: str = "json"
    seed: int = 0
    threads: int = 1

    def quad(self) -> QuadSpec:
        return QuadSpec(
            rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_subdivisions=self.max_subdivisions,
        )

    def validate(self) -> SweepConfig:
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {', '.join(TASKS)}")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        for name in GRID_FIELDS:
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_subdivisions > 0):
            raise ConfigError("tolerances must be positive")
        if self.psi is not None and self.psi not in BUILTIN_KINDS:
            kinds = ", ".join(BUILTIN_KINDS)
            raise ConfigError(f"unknown profile {self.psi!r}; expected one of {kinds}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; expected csv or json")
        if self.tau <= 0 or self.eps < 0 or self.N < 0 or self.points < 1:
            raise ConfigError("tau must be positive; eps, N must be nonnegative; points at least 1")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        try:
            normalise_regime(self.regime)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def to_dict(self) -> dict:
        out = asdict(self)
        out["nu"] = [str(v) for v in self.nu]
        return out


def load_presets(path: Path | str | None = None) -> dict:
    """Task presets from path, else $AXB_SWEEPS, else the sweeps.yaml shipped in the package.

    A missing explicit file is an error.
    """
    explicit = path or os.environ.get(SWEEPS_ENV)
    if explicit:
        path = Path(explicit)
        if not path.exists():
            raise ConfigError(f"sweep presets not found: {path}")
    else:
        path = files("axbwave").joinpath(SWEEPS_RESOURCE)
    data = yaml.safe_load(path.read_text()) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must map task names to presets")
    return data.get("tasks", data)


def _coerce(name: str, value):
    if name in GRID_FIELDS:
        return parse_grid(value)
    if name == "nu":
        return parse_complex_list(value)
    if name == "regime":
        return normalise_regime(str(value)) if value is not None else value
    return value


def build_config(
    task: str, overrides: dict | None = None, presets: dict | None = None,
) -> SweepConfig:
    """Defaults ← presets[task] ← overrides (None values in overrides are ignored)."""
    known = {f.name for f in fields(SweepConfig)}
    values = {}
    for layer in ((presets or {}).get(task) or {}, overrides or {}):
        for name, value in layer.items():
            if value is None:
                continue
            if name not in known:
                raise ConfigError(f"unknown setting {name!r} for task {task!r}")
            try:
                values[name] = _coerce(name, value)
            except DomainError as exc:
                raise ConfigError(str(exc)) from exc
    values.pop("task", None)
    config = SweepConfig(task=task, **values)
    return replace(config, threads=resolve_threads(config.threads)).validate()
