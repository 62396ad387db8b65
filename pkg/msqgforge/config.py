# config.py

import copy
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, asdict, replace, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .defaults import DEFAULT_CONFIG
from .errors import ConfigError

MODES = ("additive", "multiplicative")


def _merge(base: Dict[str, Any], data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Merge 'data' onto a copy of 'base', rejecting keys the defaults do not know."""
    merged = copy.deepcopy(base)
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"Unknown configuration key: {dotted}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"Configuration key {dotted} must be a table")
            merged[key] = _merge(base[key], value, prefix=f"{dotted}.")
        else:
            merged[key] = value
    return merged


def _number(table: Dict[str, Any], key: str, prefix: str, kind=float, optional: bool = False):
    value = table[key]
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{prefix}.{key} must be a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(f"{prefix}.{key} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def _numbers(table: Dict[str, Any], key: str, prefix: str) -> List[float]:
    values = table[key]
    if not isinstance(values, list):
        raise ConfigError(f"{prefix}.{key} must be a list of numbers, got {values!r}")
    return [_number({f"{key}[{i}]": v}, f"{key}[{i}]", prefix) for i, v in enumerate(values)]


def _flag(table: Dict[str, Any], key: str, prefix: str) -> bool:
    if not isinstance(table[key], bool):
        raise ConfigError(f"{prefix}.{key} must be true or false, got {table[key]!r}")
    return table[key]


def _text(table: Dict[str, Any], key: str, prefix: str, optional: bool = False) -> Optional[str]:
    value = table[key]
    if value is None and optional:
        return None
    if not isinstance(value, str):
        raise ConfigError(f"{prefix}.{key} must be a string, got {value!r}")
    return value


@dataclass(frozen=True)
class ScheduleConfig:
    a: int
    b: int
    beta: float
    alpha: float
    gamma: float
    sigma: float
    Q: int
    L: float

    @classmethod
    def from_dict(cls, table: Dict[str, Any]) -> "ScheduleConfig":
        p = "schedule"
        return cls(
            a=_number(table, "a", p, int),
            b=_number(table, "b", p, int),
            beta=_number(table, "beta", p),
            alpha=_number(table, "alpha", p),
            gamma=_number(table, "gamma", p),
            sigma=_number(table, "sigma", p),
            Q=_number(table, "Q", p, int),
            L=_number(table, "L", p),
        )


@dataclass(frozen=True)
class GridConfig:
    N: int
    samples_per_tau: int
    dt: Optional[float]
    flow_points: Optional[int]
    flow_substeps: int

    @classmethod
    def from_dict(cls, table: Dict[str, Any]) -> "GridConfig":
        p = "grid"
        cfg = cls(
            N=_number(table, "N", p, int),
            samples_per_tau=_number(table, "samples_per_tau", p, int),
            dt=_number(table, "dt", p, optional=True),
            flow_points=_number(table, "flow_points", p, int, optional=True),
            flow_substeps=_number(table, "flow_substeps", p, int),
        )
        if cfg.samples_per_tau < 8:
            raise ConfigError("grid.samples_per_tau must be at least 8")
        if cfg.dt is not None and cfg.dt <= 0:
            raise ConfigError("grid.dt must be positive")
        if cfg.flow_substeps < 1:
            raise ConfigError("grid.flow_substeps must be at least 1")
        return cfg


@dataclass(frozen=True)
class NoiseConfig:
    amplitude: float
    eta: float
    band: Optional[float]
    delta: float
    probes: int
    mc_paths: int
    mc_horizon: float
    mc_levels: List[float] = field(default_factory=list)
    mc_dt: float = 1e-3

    @classmethod
    def from_dict(cls, table: Dict[str, Any]) -> "NoiseConfig":
        p = "noise"
        cfg = cls(
            amplitude=_number(table, "amplitude", p),
            eta=_number(table, "eta", p),
            band=_number(table, "band", p, optional=True),
            delta=_number(table, "delta", p),
            probes=_number(table, "probes", p, int),
            mc_paths=_number(table, "mc_paths", p, int),
            mc_horizon=_number(table, "mc_horizon", p),
            mc_levels=_numbers(table, "mc_levels", p),
            mc_dt=_number(table, "mc_dt", p),
        )
        if cfg.eta <= 0:
            raise ConfigError("noise.eta must be positive")
        if not 0 < cfg.delta < 0.25:
            raise ConfigError("noise.delta must lie in (0, 1/4)")
        if cfg.mc_paths < 0:
            raise ConfigError("noise.mc_paths must be nonnegative")
        if cfg.probes < 1:
            raise ConfigError("noise.probes must be positive")
        return cfg


@dataclass(frozen=True)
class EnergyConfig:
    kind: str
    d0: float
    d1: float
    times: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    branch_d1: Optional[float] = None
    branch_time: float = 0.0

    @classmethod
    def from_dict(cls, table: Dict[str, Any]) -> "EnergyConfig":
        p = "energy"
        if not isinstance(table["kind"], str):
            raise ConfigError("energy.kind must be a string")
        return cls(
            kind=table["kind"],
            d0=_number(table, "d0", p),
            d1=_number(table, "d1", p),
            times=_numbers(table, "times", p),
            values=_numbers(table, "values", p),
            branch_d1=_number(table, "branch_d1", p, optional=True),
            branch_time=_number(table, "branch_time", p),
        )


@dataclass(frozen=True)
class ToleranceConfig:
    ball_slack: float
    energy_quadrature: float
    divergence: float
    residual: float
    imaginary: float

    @classmethod
    def from_dict(cls, table: Dict[str, Any]) -> "ToleranceConfig":
        values = {key: _number(table, key, "tolerances") for key in table}
        for key, value in values.items():
            if value <= 0:
                raise ConfigError(f"tolerances.{key} must be positive")
        return cls(**values)


@dataclass(frozen=True)
class OutputConfig:
    directory: str
    checkpoints: bool
    checkpoint_samples: int
    logging: bool
    log_file: Optional[str]

    @classmethod
    def from_dict(cls, table: Dict[str, Any]) -> "OutputConfig":
        return cls(
            directory=_text(table, "directory", "output"),
            checkpoints=_flag(table, "checkpoints", "output"),
            checkpoint_samples=_number(table, "checkpoint_samples", "output", int),
            logging=_flag(table, "logging", "output"),
            log_file=_text(table, "log_file", "output", optional=True),
        )


@dataclass(frozen=True)
class RunConfig:
    """Validated, immutable run configuration."""
    mode: str
    seed: int
    strict: bool
    workers: int
    horizon: Optional[float]
    window_start: Optional[float]
    schedule: ScheduleConfig
    grid: GridConfig
    noise: NoiseConfig
    energy: EnergyConfig
    tolerances: ToleranceConfig
    output: OutputConfig

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """
        Build a RunConfig from a (partial) nested dict merged onto DEFAULT_CONFIG.

        Raises:
            ConfigError: On unknown keys, wrong types or out-of-range values.
        """
        if data is not None and not isinstance(data, dict):
            raise ConfigError("Configuration must be a table of tables")
        merged = _merge(DEFAULT_CONFIG, data or {})
        run = merged["run"]
        mode = run["mode"]
        if mode not in MODES:
            raise ConfigError(f"run.mode must be one of {MODES}, got {mode!r}")
        workers = _number(run, "workers", "run", int)
        if workers < 1:
            raise ConfigError("run.workers must be at least 1")
        horizon = _number(run, "horizon", "run", optional=True)
        if horizon is not None and horizon <= 0:
            raise ConfigError("run.horizon must be positive")
        window_start = _number(run, "window_start", "run", optional=True)
        if window_start is not None and horizon is not None and window_start >= horizon:
            raise ConfigError("run.window_start must lie below run.horizon")
        return cls(
            mode=mode,
            seed=_number(run, "seed", "run", int),
            strict=_flag(run, "strict", "run"),
            workers=workers,
            horizon=horizon,
            window_start=window_start,
            schedule=ScheduleConfig.from_dict(merged["schedule"]),
            grid=GridConfig.from_dict(merged["grid"]),
            noise=NoiseConfig.from_dict(merged["noise"]),
            energy=EnergyConfig.from_dict(merged["energy"]),
            tolerances=ToleranceConfig.from_dict(merged["tolerances"]),
            output=OutputConfig.from_dict(merged["output"]),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Nested dict in the config-file layout; from_dict(to_dict()) round-trips."""
        return {
            "run": {
                "mode": self.mode,
                "seed": self.seed,
                "strict": self.strict,
                "workers": self.workers,
                "horizon": self.horizon,
                "window_start": self.window_start,
            },
            "schedule": asdict(self.schedule),
            "grid": asdict(self.grid),
            "noise": asdict(self.noise),
            "energy": asdict(self.energy),
            "tolerances": asdict(self.tolerances),
            "output": asdict(self.output),
        }

    def with_overrides(self, **flags) -> "RunConfig":
        """
        Apply command-line overrides. Flags left as None are ignored.

        Recognised flags: mode, stages, grid, seed, out, strict, paths, workers, horizon, window_start.
        """
        data = self.to_dict()
        mapping = {
            "mode": ("run", "mode"),
            "stages": ("schedule", "Q"),
            "grid": ("grid", "N"),
            "seed": ("run", "seed"),
            "out": ("output", "directory"),
            "strict": ("run", "strict"),
            "paths": ("noise", "mc_paths"),
            "workers": ("run", "workers"),
            "horizon": ("run", "horizon"),
            "window_start": ("run", "window_start"),
        }
        for name, value in flags.items():
            if name not in mapping:
                raise ConfigError(f"Unknown override: {name}")
            if value is None:
                continue
            table, key = mapping[name]
            data[table][key] = value
        return RunConfig.from_dict(data)

    def replace_energy(self, **changes) -> "RunConfig":
        return replace(self, energy=replace(self.energy, **changes))


def load_config(path: str) -> RunConfig:
    """
    Read a TOML config file and validate it against the defaults.

    Raises:
        ConfigError: If the file is missing, unparsable or invalid.
    """
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(config_path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Could not parse {path}: {e}") from e
    return RunConfig.from_dict(data)
