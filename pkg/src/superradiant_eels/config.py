"""Run configuration: nested dataclasses parsed from JSON with path-aware errors."""

from __future__ import annotations

import dataclasses
import json
import math
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

EXPERIMENTS = ("coupling", "spectrum", "sweep", "dynamics", "reconstruct")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the dotted field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass
class ElectronConfig:
    beta: float = 0.7


@dataclass
class EnsembleConfig:
    N: int = 10
    lambda0: float | None = None  # nm
    hbar_omega0: float | None = None  # eV
    dz: float | None = None  # nm, periodic chain
    positions: list[float] | None = None  # nm, explicit chain
    z0: float = 0.0
    r_perp: float = 10.0
    d_perp: float = 0.1
    d_z: float = 0.0
    n: float = 1.0
    g: float | None = None  # uniform |g| override of the derived coupling


@dataclass
class PulseConfig:
    theta_deg: float | None = None  # None: Cherenkov angle
    area: float | None = None
    tau: float | None = None  # fs
    rabi_rate: float | None = None  # rad/fs


@dataclass
class StateConfig:
    m: int | None = None
    populations: list[float] | None = None


@dataclass
class SweepConfig:
    theta_start_deg: float = 0.0
    theta_stop_deg: float = 90.0
    theta_step_deg: float = 0.25
    areas: list[float] | None = None
    durations_fs: list[float] | None = None
    rabi_rate: float | None = None
    pathway: str = "exact_full"
    bandwidth_samples: int = 0
    workers: int = 1


@dataclass
class DynamicsConfig:
    model: str = "dicke"
    Gamma: float = 1e-3  # fs^-1
    M: int = 500
    initial_m: int | None = None  # Dicke start; default fully inverted
    t_max: float = 10.0  # in units of 1/Gamma
    t_points: int = 1001
    delays_fs: list[float] | None = None
    integrator: str = "dop853"
    rtol: float = 1e-10
    tip_angle: float | None = None
    workers: int = 1


@dataclass
class ReconstructConfig:
    spectrum_csv: str | None = None
    lambda_reg: float = 0.0
    noise: float | None = None


@dataclass
class OutputConfig:
    dir: str = "out"


@dataclass
class RunConfig:
    experiment: str = "spectrum"
    seed: int | None = None
    electron: ElectronConfig = field(default_factory=ElectronConfig)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    pulse: PulseConfig | None = None
    state: StateConfig | None = None
    sweep: SweepConfig = field(default_factory=SweepConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    reconstruct: ReconstructConfig = field(default_factory=ReconstructConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def stochastic(self) -> bool:
        if self.experiment == "dynamics":
            return self.dynamics.model == "twa"
        if self.experiment == "sweep":
            return self.sweep.bandwidth_samples > 0
        return False


# ---------------------------------------------------------------- parsing

def _unwrap_optional(tp):
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if len(args) == 1:
            return args[0], True
    return tp, False


def _coerce(value: Any, tp, path: str):
    tp, optional = _unwrap_optional(tp)
    if value is None:
        if optional:
            return None
        raise ConfigError(path, "must not be null")
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, path)
    origin = typing.get_origin(tp)
    if origin is list:
        (item,) = typing.get_args(tp)
        if not isinstance(value, list):
            raise ConfigError(path, f"expected a list, got {type(value).__name__}")
        return [_coerce(v, item, f"{path}[{i}]") for i, v in enumerate(value)]
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(path, "expected true or false")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(path, "must be finite")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    raise ConfigError(path, f"unsupported field type {tp!r}")  # pragma: no cover


def _build(cls, data: Any, path: str = ""):
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected an object, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            where = f"{path}.{key}" if path else key
            raise ConfigError(where, "unknown key")
    kwargs = {}
    for name in names:
        if name in data:
            where = f"{path}.{name}" if path else name
            kwargs[name] = _coerce(data[name], hints[name], where)
    return cls(**kwargs)


def apply_override(data: dict, assignment: str) -> None:
    """Apply ``a.b.c=value`` to a raw config dict; the value is parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError("", f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.strip().split(".")
    node = data
    for p in parts[:-1]:
        nxt = node.get(p)
        if nxt is None:
            nxt = node[p] = {}
        if not isinstance(nxt, dict):
            raise ConfigError(key, "cannot set a field inside a non-object")
        node = nxt
    node[parts[-1]] = value


def _check(cond: bool, path: str, message: str):
    if not cond:
        raise ConfigError(path, message)


def validate(cfg: RunConfig) -> RunConfig:
    """Re-check every physical constraint, naming the offending field."""
    from .coupling import ElectronParams

    _check(cfg.experiment in EXPERIMENTS, "experiment", f"must be one of {', '.join(EXPERIMENTS)}")
    try:
        ElectronParams(cfg.electron.beta)
    except ValueError as exc:
        raise ConfigError("electron.beta", str(exc)) from None
    en = cfg.ensemble
    _check(en.N >= 1, "ensemble.N", "must be >= 1")
    _check((en.lambda0 is None) != (en.hbar_omega0 is None), "ensemble.lambda0",
           "give exactly one of lambda0 and hbar_omega0")
    if en.lambda0 is not None:
        _check(en.lambda0 > 0, "ensemble.lambda0", "must be > 0")
    if en.hbar_omega0 is not None:
        _check(en.hbar_omega0 > 0, "ensemble.hbar_omega0", "must be > 0")
    _check((en.dz is None) != (en.positions is None), "ensemble.dz", "give exactly one of dz and positions")
    if en.dz is not None:
        _check(en.dz > 0, "ensemble.dz", "must be > 0")
    if en.positions is not None:
        _check(len(en.positions) == en.N, "ensemble.positions", f"needs N = {en.N} entries")
        _check(all(b > a for a, b in zip(en.positions, en.positions[1:])), "ensemble.positions",
               "must be strictly increasing")
    _check(en.r_perp > 0, "ensemble.r_perp", "must be > 0")
    _check(en.n >= 1, "ensemble.n", "must be >= 1")
    if en.g is not None:
        _check(en.g >= 0, "ensemble.g", "must be >= 0")
    if cfg.pulse is not None:
        p = cfg.pulse
        if p.theta_deg is not None:
            _check(0 <= p.theta_deg <= 90, "pulse.theta_deg", "must lie in [0, 90]")
        if p.area is None:
            _check(p.tau is not None and p.rabi_rate is not None, "pulse.area",
                   "give an area or both tau and rabi_rate")
            _check(p.tau >= 0, "pulse.tau", "must be >= 0")
            _check(p.rabi_rate > 0, "pulse.rabi_rate", "must be > 0")
    if cfg.state is not None:
        s = cfg.state
        _check((s.m is None) != (s.populations is None), "state.m", "give exactly one of m and populations")
        if s.m is not None:
            _check(0 <= s.m <= en.N, "state.m", f"must lie in [0, {en.N}]")
        if s.populations is not None:
            _check(len(s.populations) == en.N + 1, "state.populations", f"needs N + 1 = {en.N + 1} entries")
            _check(all(x >= 0 for x in s.populations), "state.populations", "must be nonnegative")
            _check(abs(sum(s.populations) - 1) < 1e-10, "state.populations", "must sum to 1")
        _check(cfg.pulse is None, "state", "give either a pulse or a state, not both")
    sw = cfg.sweep
    _check(sw.theta_step_deg > 0, "sweep.theta_step_deg", "must be > 0")
    _check(0 <= sw.theta_start_deg <= sw.theta_stop_deg <= 90, "sweep.theta_start_deg",
           "need 0 <= theta_start_deg <= theta_stop_deg <= 90")
    _check(sw.pathway in ("exact_full", "ladder_fast"), "sweep.pathway", "must be exact_full or ladder_fast")
    _check(sw.bandwidth_samples >= 0, "sweep.bandwidth_samples", "must be >= 0")
    _check(sw.workers >= 1, "sweep.workers", "must be >= 1")
    if cfg.experiment == "sweep":
        if sw.durations_fs is not None:
            _check(sw.rabi_rate is not None and sw.rabi_rate > 0, "sweep.rabi_rate",
                   "durations need a positive rabi_rate")
        else:
            _check(sw.areas is not None and len(sw.areas) > 0, "sweep.areas", "give areas or durations_fs")
    dy = cfg.dynamics
    _check(dy.model in ("dicke", "twa"), "dynamics.model", "must be dicke or twa")
    _check(dy.Gamma > 0, "dynamics.Gamma", "must be > 0")
    _check(dy.M >= 1, "dynamics.M", "must be >= 1")
    _check(dy.t_max > 0, "dynamics.t_max", "must be > 0")
    _check(dy.t_points >= 2, "dynamics.t_points", "must be >= 2")
    _check(dy.integrator in ("dop853", "rk4"), "dynamics.integrator", "must be dop853 or rk4")
    _check(dy.rtol > 0, "dynamics.rtol", "must be > 0")
    _check(dy.workers >= 1, "dynamics.workers", "must be >= 1")
    if dy.initial_m is not None:
        _check(dy.model == "dicke", "dynamics.initial_m", "only the dicke model takes an initial ladder index")
        _check(0 <= dy.initial_m <= en.N, "dynamics.initial_m", f"must lie in [0, {en.N}]")
    if dy.delays_fs is not None:
        tmax_fs = dy.t_max / dy.Gamma
        _check(all(0 <= d <= tmax_fs for d in dy.delays_fs), "dynamics.delays_fs",
               f"delays must lie in [0, t_max/Gamma] = [0, {tmax_fs:g}] fs")
    rc = cfg.reconstruct
    _check(rc.lambda_reg >= 0, "reconstruct.lambda_reg", "must be >= 0")
    if rc.noise is not None:
        _check(rc.noise > 0, "reconstruct.noise", "must be > 0")
    if cfg.experiment == "reconstruct":
        _check(rc.spectrum_csv is not None, "reconstruct.spectrum_csv", "required for reconstruct runs")
    if cfg.seed is not None:
        _check(cfg.seed >= 0, "seed", "must be >= 0")
    return cfg


def parse_config(data: dict, overrides=()) -> RunConfig:
    data = json.loads(json.dumps(data))  # deep copy of plain JSON
    for o in overrides:
        apply_override(data, o)
    return validate(_build(RunConfig, data))


def load_config(path: str | Path, overrides=()) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("", f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"config {path} is not valid JSON: {exc}") from None
    return parse_config(data, overrides)
