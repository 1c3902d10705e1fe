"""Scenario configuration: defaults, the flat key-value file format, round-trip.

The file format is deliberately trivial: one `key = value` per line, dotted
keys for grouping, `#` comments, repeated `station = x, y` lines for the
deployment. An empty file yields the default scenario (four corner stations
of a 200 m square, claimed position (0, 40), gamma 3, sigma 5 dB, 10 samples
per station, base rate 0.5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .geometry import ChannelParams, Deployment, Position, Rect
from .observation import AttackerMode, AttackerSpec


class ConfigError(Exception):
    """Invalid configuration; the message names the offending key."""


DEFAULT_CHANNEL = ChannelParams(p0=0.0, d0=1.0, gamma=3.0, sigma_db=5.0)
DEFAULT_REGION = Rect(-100.0, -100.0, 100.0, 100.0)
DEFAULT_STATIONS = (
    Position(-100.0, -100.0),
    Position(100.0, -100.0),
    Position(-100.0, 100.0),
    Position(100.0, 100.0),
)
DEFAULT_CLAIMED = Position(0.0, 40.0)
DEFAULT_T_GRID = tuple(0.5 * k for k in range(1, 25))  # 0.5 .. 12.0
DEFAULT_SIGMA_LIST = tuple(float(s) for s in range(2, 11))
DEFAULT_T_MULTIPLIERS = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one experiment needs, sufficient to replay it exactly."""

    channel: ChannelParams = DEFAULT_CHANNEL
    deployment: Deployment = Deployment(DEFAULT_STATIONS, DEFAULT_REGION)
    claimed: Position = DEFAULT_CLAIMED
    samples_per_station: int = 10
    attacker: AttackerSpec = field(default_factory=AttackerSpec.far_field)
    base_rate: float = 0.5
    trials: int = 1000
    seed: int = 0
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    grid_step: float = 1.0
    search_rect: Rect = DEFAULT_REGION.padded(0.2)
    sigma_list: tuple[float, ...] = DEFAULT_SIGMA_LIST
    t_multipliers: tuple[float, ...] = DEFAULT_T_MULTIPLIERS
    workers: int = 1
    beta_equals_alpha: bool = False  # test hook: degenerate detector rates

    def __post_init__(self):
        if self.samples_per_station < 1:
            raise ValueError("samples_per_station must be >= 1")
        if not 0.0 <= self.base_rate <= 1.0:
            raise ValueError("base_rate must be in [0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if len(self.t_grid) < 1:
            raise ValueError("t_grid must not be empty")
        if any(t2 <= t1 for t1, t2 in zip(self.t_grid, self.t_grid[1:])):
            raise ValueError("t_grid must be strictly increasing")
        if self.t_grid[0] <= 0:
            raise ValueError("t_grid thresholds must be > 0")
        if self.grid_step <= 0:
            raise ValueError("grid_step must be > 0")
        if not self.deployment.region.contains(self.claimed):
            raise ValueError("claimed position must lie inside the region")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if any(s <= 0 for s in self.sigma_list):
            raise ValueError("sigma_list entries must be > 0")
        if any(m <= 0 for m in self.t_multipliers):
            raise ValueError("t_multipliers entries must be > 0")


_SCALAR_KEYS = {
    "channel.p0",
    "channel.d0",
    "channel.gamma",
    "channel.sigma_db",
    "region",
    "claimed",
    "samples_per_station",
    "attacker.mode",
    "attacker.position",
    "base_rate",
    "trials",
    "seed",
    "t_grid",
    "grid_step",
    "search_rect",
    "sigma_list",
    "t_multipliers",
    "workers",
    "beta_equals_alpha",
}


def parse_config_text(text: str) -> ScenarioConfig:
    """Parse the flat key-value format; see parse_config."""
    raw: dict[str, str] = {}
    stations: list[Position] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key == "station":
            x, y = _parse_floats(key, value, 2, lineno)
            stations.append(Position(x, y))
            continue
        if key not in _SCALAR_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    try:
        channel = ChannelParams(
            p0=_get_float(raw, "channel.p0", DEFAULT_CHANNEL.p0),
            d0=_get_float(raw, "channel.d0", DEFAULT_CHANNEL.d0),
            gamma=_get_float(raw, "channel.gamma", DEFAULT_CHANNEL.gamma),
            sigma_db=_get_float(raw, "channel.sigma_db", DEFAULT_CHANNEL.sigma_db),
        )
    except ValueError as exc:
        raise ConfigError(f"channel: {exc}") from exc

    region = _get_rect(raw, "region", DEFAULT_REGION)
    try:
        deployment = Deployment(tuple(stations) or DEFAULT_STATIONS, region)
    except ValueError as exc:
        raise ConfigError(f"station/region: {exc}") from exc

    claimed = _get_position(raw, "claimed", DEFAULT_CLAIMED)

    mode_txt = raw.get("attacker.mode", "far_field").lower()
    if mode_txt == "far_field":
        if "attacker.position" in raw:
            raise ConfigError("attacker.position: only valid with attacker.mode = at_position")
        attacker = AttackerSpec.far_field()
    elif mode_txt == "at_position":
        if "attacker.position" not in raw:
            raise ConfigError("attacker.position: required when attacker.mode = at_position")
        attacker = AttackerSpec.at_position(_get_position(raw, "attacker.position", None))
    else:
        raise ConfigError(f"attacker.mode: expected far_field or at_position, got {mode_txt!r}")

    t_grid = _get_t_grid(raw)
    search_rect = _get_rect(raw, "search_rect", region.padded(0.2))

    kwargs = dict(
        channel=channel,
        deployment=deployment,
        claimed=claimed,
        samples_per_station=_get_int(raw, "samples_per_station", 10),
        attacker=attacker,
        base_rate=_get_float(raw, "base_rate", 0.5),
        trials=_get_int(raw, "trials", 1000),
        seed=_get_int(raw, "seed", 0),
        t_grid=t_grid,
        grid_step=_get_float(raw, "grid_step", 1.0),
        search_rect=search_rect,
        sigma_list=_get_float_list(raw, "sigma_list", DEFAULT_SIGMA_LIST),
        t_multipliers=_get_float_list(raw, "t_multipliers", DEFAULT_T_MULTIPLIERS),
        workers=_get_int(raw, "workers", 1),
        beta_equals_alpha=_get_bool(raw, "beta_equals_alpha", False),
    )
    try:
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(path: str) -> ScenarioConfig:
    """Read and validate a scenario file; an empty file gives the defaults."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    return parse_config_text(text)


def emit_config(cfg: ScenarioConfig) -> str:
    """Serialize a configuration so that parsing it back reproduces it."""
    lines = [
        f"channel.p0 = {cfg.channel.p0!r}",
        f"channel.d0 = {cfg.channel.d0!r}",
        f"channel.gamma = {cfg.channel.gamma!r}",
        f"channel.sigma_db = {cfg.channel.sigma_db!r}",
        f"region = {_fmt_rect(cfg.deployment.region)}",
    ]
    lines.extend(f"station = {st.x!r}, {st.y!r}" for st in cfg.deployment.stations)
    lines.append(f"claimed = {cfg.claimed.x!r}, {cfg.claimed.y!r}")
    lines.append(f"samples_per_station = {cfg.samples_per_station}")
    lines.append(f"attacker.mode = {cfg.attacker.mode.value}")
    if cfg.attacker.mode is AttackerMode.AT_POSITION:
        p = cfg.attacker.true_position
        lines.append(f"attacker.position = {p.x!r}, {p.y!r}")
    lines.append(f"base_rate = {cfg.base_rate!r}")
    lines.append(f"trials = {cfg.trials}")
    lines.append(f"seed = {cfg.seed}")
    lines.append("t_grid = " + ", ".join(repr(t) for t in cfg.t_grid))
    lines.append(f"grid_step = {cfg.grid_step!r}")
    lines.append(f"search_rect = {_fmt_rect(cfg.search_rect)}")
    lines.append("sigma_list = " + ", ".join(repr(s) for s in cfg.sigma_list))
    lines.append("t_multipliers = " + ", ".join(repr(m) for m in cfg.t_multipliers))
    lines.append(f"workers = {cfg.workers}")
    if cfg.beta_equals_alpha:
        lines.append("beta_equals_alpha = true")
    return "\n".join(lines) + "\n"


def default_config() -> ScenarioConfig:
    return ScenarioConfig()


def with_overrides(cfg: ScenarioConfig, seed: int | None = None, trials: int | None = None) -> ScenarioConfig:
    """Apply command-line overrides on top of a parsed configuration."""
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if trials is not None:
        changes["trials"] = trials
    if not changes:
        return cfg
    try:
        return replace(cfg, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fmt_rect(r: Rect) -> str:
    return f"{r.xmin!r}, {r.ymin!r}, {r.xmax!r}, {r.ymax!r}"


def _parse_floats(key: str, value: str, n: int, lineno: int | None = None) -> list[float]:
    where = f"line {lineno}: " if lineno is not None else ""
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != n:
        raise ConfigError(f"{where}{key}: expected {n} comma-separated numbers, got {value!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"{where}{key}: {exc}") from exc
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{where}{key}: values must be finite")
    return vals


def _get_float(raw: dict, key: str, default: float) -> float:
    if key not in raw:
        return default
    try:
        v = float(raw[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number: {raw[key]!r}") from exc
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite")
    return v


def _get_int(raw: dict, key: str, default: int) -> int:
    if key not in raw:
        return default
    try:
        return int(raw[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: not an integer: {raw[key]!r}") from exc


def _get_bool(raw: dict, key: str, default: bool) -> bool:
    if key not in raw:
        return default
    v = raw[key].lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {raw[key]!r}")


def _get_position(raw: dict, key: str, default: Position | None) -> Position:
    if key not in raw:
        return default
    x, y = _parse_floats(key, raw[key], 2)
    return Position(x, y)


def _get_rect(raw: dict, key: str, default: Rect) -> Rect:
    if key not in raw:
        return default
    xmin, ymin, xmax, ymax = _parse_floats(key, raw[key], 4)
    try:
        return Rect(xmin, ymin, xmax, ymax)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _get_float_list(raw: dict, key: str, default: tuple[float, ...]) -> tuple[float, ...]:
    if key not in raw:
        return default
    parts = [p.strip() for p in raw[key].split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{key}: empty list")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _get_t_grid(raw: dict) -> tuple[float, ...]:
    if "t_grid" not in raw:
        return DEFAULT_T_GRID
    value = raw["t_grid"]
    if ":" in value:
        parts = [p.strip() for p in value.split(":")]
        if len(parts) != 3:
            raise ConfigError(f"t_grid: range form is lo:hi:step, got {value!r}")
        try:
            lo, hi, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"t_grid: {exc}") from exc
        if step <= 0 or hi <= lo:
            raise ConfigError("t_grid: range needs lo < hi and step > 0")
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + k * step for k in range(n))
    return _get_float_list(raw, "t_grid", DEFAULT_T_GRID)
