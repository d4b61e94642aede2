"""Strict JSON run configuration.

Every block maps onto a dataclass; unknown keys and values that fail the
owning module's validation are rejected with a message naming the key.

    {
      "model":   {ModelParams fields},
      "grid":    {"cells": [64, 64], "lengths": [4.0, 4.0]},
      "initial": {"u0": profile, "v0": profile, "w0": profile},
      "control": {StepControl fields},
      "monitor": {"p", "q", "r", "u_max", "stride", "growth_threshold", "exponents"},
      "output":  {"dir": "out", "snapshot_times": [..]},
      "sweep":   {"mode": "classify" | "simulate", "axes": [{"name", "values"} | {"name", "start", "stop", "steps"}]}
    }

All blocks are optional; omitted blocks take their defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .model import ModelParams, validate_params
from .monitors import MonitorConfig
from .regimes import Axis
from .solver import Grid, ProfileSpec, StepControl, init_state


class ConfigError(ValueError):
    """Parse or schema error; the CLI maps it to exit code 2."""

    exit_code = 2


TOP_KEYS = ("model", "grid", "initial", "control", "monitor", "output", "sweep")
EXPONENT_SOURCES = ("certificate", "config")
SWEEP_MODES = ("classify", "simulate")


@dataclass(frozen=True)
class MonitorBlock:
    """Monitor settings; ``exponents`` = "certificate" takes p, q, r from a
    found certificate and falls back to the values given here."""

    p: float = 4.0
    q: float = 2.0
    r: float = 2.0
    u_max: float = 1e6
    stride: int = 1
    growth_threshold: float = 0.01
    exponents: str = "certificate"

    def monitor_config(self, p=None, q=None, r=None, source="config") -> MonitorConfig:
        return MonitorConfig(p=self.p if p is None else p, q=self.q if q is None else q,
                             r=self.r if r is None else r, u_max=self.u_max, stride=self.stride,
                             growth_threshold=self.growth_threshold, source=source)


@dataclass(frozen=True)
class OutputBlock:
    dir: str = "out"
    snapshot_times: tuple[float, ...] = ()


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple

    def to_dict(self) -> dict:
        return {"name": self.name, "values": list(self.values)}


@dataclass(frozen=True)
class SweepBlock:
    axes: tuple[SweepAxis, ...]
    mode: str = "classify"


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    grid: Grid = field(default_factory=lambda: Grid((64,), (1.0,)))
    initial: dict = field(default_factory=lambda: {k: ProfileSpec("constant", value=1.0)
                                                   for k in ("u0", "v0", "w0")})
    control: StepControl = field(default_factory=StepControl)
    monitor: MonitorBlock = field(default_factory=MonitorBlock)
    output: OutputBlock = field(default_factory=OutputBlock)
    sweep: SweepBlock | None = None

    def to_dict(self) -> dict:
        """Fully resolved configuration (defaults filled in)."""
        d = {
            "model": asdict(self.model),
            "grid": {"cells": list(self.grid.cells), "lengths": list(self.grid.lengths)},
            "initial": {k: _profile_dict(v) for k, v in self.initial.items()},
            "control": asdict(self.control),
            "monitor": asdict(self.monitor),
            "output": {"dir": self.output.dir, "snapshot_times": list(self.output.snapshot_times)},
        }
        if self.sweep is not None:
            d["sweep"] = {"mode": self.sweep.mode, "axes": [a.to_dict() for a in self.sweep.axes]}
        return d


def _profile_dict(p: ProfileSpec) -> dict:
    d = asdict(p)
    if isinstance(d["center"], tuple):
        d["center"] = list(d["center"])
    if isinstance(d["k"], tuple):
        d["k"] = list(d["k"])
    return d


# ---------------------------------------------------------------------------
# strict block parsing

def _expect_object(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a JSON object")
    return obj


def _check_keys(obj: dict, allowed, where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{where}: unknown key {key!r} (strict schema; allowed: {', '.join(allowed)})")


def _number(value, key: str, where: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number")
    if integer:
        if float(value) != int(value):
            raise ConfigError(f"{where}.{key}: expected an integer")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where}.{key}: must be finite")
    return float(value)


def _numbers(value, key: str, where: str, integer: bool = False) -> tuple:
    if not isinstance(value, list):
        raise ConfigError(f"{where}.{key}: expected a list")
    return tuple(_number(x, key, where, integer) for x in value)


def _build(cls, obj, where: str, special=None):
    """Instantiate ``cls`` from ``obj`` using the dataclass field types as schema."""
    obj = _expect_object(obj, where)
    names = [f.name for f in fields(cls)]
    _check_keys(obj, names, where)
    special = special or {}
    kwargs = {}
    for f in fields(cls):
        if f.name not in obj:
            continue
        value = obj[f.name]
        if f.name in special:
            kwargs[f.name] = special[f.name](value, f.name, where)
            continue
        default = getattr(cls(), f.name)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{where}.{f.name}: expected true or false")
            kwargs[f.name] = value
        elif isinstance(default, int) and not isinstance(default, bool):
            kwargs[f.name] = _number(value, f.name, where, integer=True)
        elif isinstance(default, float) or default is None:
            kwargs[f.name] = None if value is None and default is None else _number(value, f.name, where)
        elif isinstance(default, str):
            if not isinstance(value, str):
                raise ConfigError(f"{where}.{f.name}: expected a string")
            kwargs[f.name] = value
        else:
            raise ConfigError(f"{where}.{f.name}: unsupported value")
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_model(obj) -> ModelParams:
    params = _build(ModelParams, obj, "model")
    violations = validate_params(params)
    if violations:
        raise ConfigError("model: " + "; ".join(violations))
    return params


def parse_grid(obj) -> Grid:
    obj = _expect_object(obj, "grid")
    _check_keys(obj, ("cells", "lengths"), "grid")
    cells = _numbers(obj.get("cells", [64]), "cells", "grid", integer=True)
    lengths = _numbers(obj.get("lengths", [1.0] * len(cells)), "lengths", "grid")
    try:
        return Grid(cells, lengths)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _k_value(value, key, where):
    if isinstance(value, list):
        return _numbers(value, key, where, integer=True)
    return _number(value, key, where, integer=True)


def _center_value(value, key, where):
    return None if value is None else _numbers(value, key, where)


def parse_profile(obj, where: str) -> ProfileSpec:
    return _build(ProfileSpec, obj, where, special={"k": _k_value, "center": _center_value})


def parse_initial(obj) -> dict:
    obj = _expect_object(obj, "initial")
    _check_keys(obj, ("u0", "v0", "w0"), "initial")
    default = ProfileSpec("constant", value=1.0)
    return {k: parse_profile(obj[k], f"initial.{k}") if k in obj else default for k in ("u0", "v0", "w0")}


def parse_monitor(obj) -> MonitorBlock:
    block = _build(MonitorBlock, obj, "monitor")
    if block.exponents not in EXPONENT_SOURCES:
        raise ConfigError(f"monitor.exponents: must be one of {EXPONENT_SOURCES}")
    try:
        block.monitor_config()
    except ValueError as exc:
        raise ConfigError(f"monitor: {exc}") from None
    return block


def parse_output(obj) -> OutputBlock:
    obj = _expect_object(obj, "output")
    _check_keys(obj, ("dir", "snapshot_times"), "output")
    d = obj.get("dir", "out")
    if not isinstance(d, str):
        raise ConfigError("output.dir: expected a string")
    times = _numbers(obj.get("snapshot_times", []), "snapshot_times", "output")
    return OutputBlock(d, times)


def parse_sweep(obj) -> SweepBlock:
    obj = _expect_object(obj, "sweep")
    _check_keys(obj, ("axes", "mode"), "sweep")
    mode = obj.get("mode", "classify")
    if mode not in SWEEP_MODES:
        raise ConfigError(f"sweep.mode: must be one of {SWEEP_MODES}")
    axes_raw = obj.get("axes")
    if not isinstance(axes_raw, list) or not axes_raw:
        raise ConfigError("sweep.axes: expected a non-empty list")
    axes = []
    for i, ax in enumerate(axes_raw):
        where = f"sweep.axes[{i}]"
        ax = _expect_object(ax, where)
        name = ax.get("name")
        if name not in ModelParams.field_names() or name == "logistic":
            raise ConfigError(f"{where}.name: unknown numeric model parameter {name!r}")
        if "values" in ax:
            _check_keys(ax, ("name", "values"), where)
            values = _numbers(ax["values"], "values", where, integer=(name == "n"))
        else:
            _check_keys(ax, ("name", "start", "stop", "steps"), where)
            try:
                values = tuple(Axis(name, _number(ax.get("start"), "start", where),
                                    _number(ax.get("stop"), "stop", where),
                                    _number(ax.get("steps"), "steps", where, integer=True)).values())
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        axes.append(SweepAxis(name, values))
    if len({a.name for a in axes}) != len(axes):
        raise ConfigError("sweep.axes: axis names must be distinct")
    return SweepBlock(tuple(axes), mode)


def config_from_dict(obj) -> RunConfig:
    obj = _expect_object(obj, "config")
    _check_keys(obj, TOP_KEYS, "config")
    kwargs = {}
    parsers = {"model": parse_model, "grid": parse_grid, "initial": parse_initial,
               "control": lambda o: _build(StepControl, o, "control"), "monitor": parse_monitor,
               "output": parse_output, "sweep": parse_sweep}
    for key, parse in parsers.items():
        if key in obj:
            kwargs[key] = parse(obj[key])
    cfg = RunConfig(**kwargs)
    try:
        init_state(cfg.grid, cfg.initial["u0"], cfg.initial["v0"], cfg.initial["w0"])
    except ValueError as exc:
        raise ConfigError(f"initial: {exc}") from None
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    return config_from_dict(obj)
