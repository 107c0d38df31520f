"""Scenario configuration: one schema for TOML or JSON, validated fail-fast.

Unknown keys are rejected so typos cannot silently fall back to defaults.
``emit_config`` produces a canonical JSON-ready dict; parse(emit(cfg))
round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

SCHEMA_VERSION = 1
KINDS = ("exp1", "exp2", "exp3", "platoon", "rate-calc", "sweep-demo")


class ConfigError(ValueError):
    def __init__(self, message: str, category: str = "config-validation"):
        super().__init__(message)
        self.category = category


@dataclass(frozen=True)
class CodeConfig:
    bandwidth_hz: float = 1e9
    # Either rate targets (thresholds solved from them) or explicit thresholds.
    beacon_rate_bps: float | None = 27.5e6
    r_max_bps: float | None = 25e6
    th1_db: float | None = None
    th2_db: float | None = None

    def __post_init__(self):
        by_rates = self.beacon_rate_bps is not None and self.r_max_bps is not None
        by_thresholds = self.th1_db is not None and self.th2_db is not None
        if not (by_rates or by_thresholds):
            raise ConfigError("code needs either rate targets or explicit thresholds")


@dataclass(frozen=True)
class LinkConfig:
    tx_power_dbm: float = 30.0
    noise_floor_dbm: float = -99.0
    bandwidth_hz: float = 1e9


@dataclass(frozen=True)
class AntennaConfig:
    rows: int = 6
    cols: int = 6
    spacing_wavelengths: float = 0.5
    carrier_hz: float = 73e9
    n_sectors: int = 36
    n_arrays: int = 3
    element_peak_dbi: float = 8.0
    element_az_3db_deg: float = 65.0
    element_el_3db_deg: float = 65.0
    element_front_to_back_db: float = 30.0


@dataclass(frozen=True)
class ChannelConfig:
    pathloss_exp_los: float = 2.0
    pathloss_exp_nlos: float = 3.3
    sigma_los_db: float = 4.0
    sigma_nlos_db: float = 7.8
    corr_distance_m: float = 10.0
    n_spectral: int = 256
    shadowing: bool = True
    fading: bool = True
    force_los: bool | None = None


@dataclass(frozen=True)
class GridConfig:
    extent: tuple = (-1000.0, 1000.0, -1000.0, 1000.0)
    resolution: float = 40.0
    max_cells: int = 1_000_000

    def __post_init__(self):
        object.__setattr__(self, "extent", tuple(float(v) for v in self.extent))


@dataclass(frozen=True)
class PlatoonConfig:
    car_length: float = 4.5
    car_width: float = 1.8
    car_height: float = 1.5
    gap: float = 2.0
    hood_height: float = 1.0
    hood_length: float = 1.2
    mount_heights: tuple = (0.5, 1.0)
    mount_inset: float = 0.3
    reflection_loss_db: float = 6.0
    carrier_hz: float = 70e9
    rows: int = 16
    cols: int = 16
    tx_power_dbm: float = 30.0
    noise_floor_dbm: float = -80.0
    link_snr_targets_db: tuple = (50.0, 49.0)
    calibration_db: tuple | None = None  # explicit per-link offsets; None = solve from targets
    th1_db: float = 48.0
    th2_db: float = 47.5
    bandwidth_hz: float = 1e9
    rx_gain_dbi: float = 0.0
    # OTP bookkeeping
    keygen_window_s: float = 0.1
    control_interval_s: float = 0.1
    control_packet_bytes: float = 60.0
    budget_period_min: float = 5.0

    def __post_init__(self):
        object.__setattr__(self, "mount_heights", tuple(float(v) for v in self.mount_heights))
        object.__setattr__(self, "link_snr_targets_db", tuple(float(v) for v in self.link_snr_targets_db))
        if self.calibration_db is not None:
            object.__setattr__(self, "calibration_db", tuple(float(v) for v in self.calibration_db))


@dataclass(frozen=True)
class GeometryConfig:
    d: float = 2.0
    theta_deg: float = 90.0
    n: int = 4
    mobile: tuple = (0.0, 0.0)
    stations: tuple = ()       # exp3: fixed station positions
    triangle: tuple = ()       # exp3: allowed mobile region
    mobile_positions: tuple = ()
    eve: tuple = (5.0, 5.0)    # sweep-demo probe

    def __post_init__(self):
        object.__setattr__(self, "mobile", tuple(float(v) for v in self.mobile))
        object.__setattr__(self, "eve", tuple(float(v) for v in self.eve))
        object.__setattr__(self, "stations", tuple(tuple(float(v) for v in p) for p in self.stations))
        object.__setattr__(self, "triangle", tuple(tuple(float(v) for v in p) for p in self.triangle))
        object.__setattr__(
            self, "mobile_positions", tuple(tuple(float(v) for v in p) for p in self.mobile_positions)
        )


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    seed: int = 42
    trials: int = 1000
    payload_bits: int = 1000
    worst_case: bool = True
    mobile_rx_gain_dbi: float = 0.0
    eve_rx_gain_dbi: float = 0.0
    schema_version: int = SCHEMA_VERSION
    code: CodeConfig = field(default_factory=CodeConfig)
    link: LinkConfig = field(default_factory=LinkConfig)
    antenna: AntennaConfig = field(default_factory=AntennaConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    platoon: PlatoonConfig = field(default_factory=PlatoonConfig)
    output_dir: str = "out"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(
                f"schema_version {self.schema_version} unsupported (expected {SCHEMA_VERSION})"
            )
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")


_SECTION_TYPES = {
    "code": CodeConfig,
    "link": LinkConfig,
    "antenna": AntennaConfig,
    "channel": ChannelConfig,
    "grid": GridConfig,
    "geometry": GeometryConfig,
    "platoon": PlatoonConfig,
}

_TOP_SCALARS = {
    "kind", "seed", "trials", "payload_bits", "worst_case",
    "mobile_rx_gain_dbi", "eve_rx_gain_dbi", "schema_version", "output_dir",
}


def _build_section(name: str, cls, data: dict):
    allowed = set(cls.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad [{name}] section: {exc}") from exc


def parse_config(source) -> ScenarioConfig:
    """Accepts a dict, a JSON/TOML path, or a JSON string."""
    if isinstance(source, ScenarioConfig):
        return source
    if isinstance(source, (str, Path)):
        path = Path(str(source))
        looks_like_path = isinstance(source, Path) or path.suffix.lower() in (".toml", ".json")
        if looks_like_path:
            if not path.exists():
                raise ConfigError(f"config file not found: {path}", category="io")
            if path.suffix.lower() == ".toml":
                data = tomllib.loads(path.read_text())
            else:
                data = json.loads(path.read_text())
        else:
            data = json.loads(source)
    elif isinstance(source, dict):
        data = source
    else:
        raise ConfigError(f"cannot parse configuration from {type(source).__name__}")

    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a table/object")
    unknown = set(data) - _TOP_SCALARS - set(_SECTION_TYPES)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    if "kind" not in data:
        raise ConfigError("configuration must declare its scenario kind")

    kwargs = {k: data[k] for k in _TOP_SCALARS if k in data}
    for name, cls in _SECTION_TYPES.items():
        if name in data:
            section = data[name]
            if not isinstance(section, dict):
                raise ConfigError(f"[{name}] must be a table/object")
            kwargs[name] = _build_section(name, cls, section)
    try:
        return ScenarioConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def emit_config(cfg: ScenarioConfig) -> dict:
    """Canonical plain-dict form; parse(emit(cfg)) == cfg."""
    raw = asdict(cfg)

    def _plain(value):
        if isinstance(value, tuple):
            return [_plain(v) for v in value]
        if isinstance(value, dict):
            return {k: _plain(v) for k, v in value.items()}
        return value

    return {k: _plain(v) for k, v in raw.items()}


def default_config(kind: str, **overrides) -> ScenarioConfig:
    """Shipped defaults per scenario kind, tweakable via keyword overrides."""
    if kind == "exp3":
        # The deployment ships as an editable data file, not code.
        from importlib.resources import files

        text = files("beamkey").joinpath("data/exp3_default.toml").read_text()
        return _apply_overrides(parse_config(tomllib.loads(text)), overrides)
    base = {"kind": kind}
    if kind == "platoon":
        base["grid"] = GridConfig(extent=(-2.0, 8.0, -1.5, 1.5, 0.05, 4.0), resolution=0.1)
        base["channel"] = ChannelConfig(shadowing=False, fading=False, force_los=True)
    elif kind == "sweep-demo":
        base["trials"] = 1
    return _apply_overrides(ScenarioConfig(**base), overrides)


def _apply_overrides(cfg: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    if not overrides:
        return cfg
    return replace(cfg, **overrides)
