"""Scenario configuration shared by every module.

All times are carried in microseconds, sizes in bits and rates in bits/s.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path

# Interior clamp applied to traffic probabilities before they enter closed forms
# that divide by q or (1 - q). Exact endpoints go through limit branches instead.
Q_CLAMP = 1e-9


class ConfigError(ValueError):
    """Invalid configuration value. ``field`` names the offending key."""

    def __init__(self, field: str, message: str, *, path: str | None = None,
                 line: int | None = None):
        self.field = field
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{field}: {message}")


@dataclass(frozen=True)
class CoexConfig:
    n_W: int = 2
    n_C: int = 1
    q_W: float = 0.5
    q_C: float = 0.5
    W0: int = 16
    m: int = 3
    Z: int = 16
    R_W: float = 1e8
    R_C: float = 1e8
    D_W: float = 12000.0
    D_C: float = 12000.0
    phy_header_bits: float = 128.0
    mac_header_bits: float = 272.0
    ack_bits: float = 112.0
    sigma_us: float = 9.0
    sifs_us: float = 16.0
    difs_us: float = 34.0
    prop_delay_us: float = 0.1

    def replace(self, **changes) -> CoexConfig:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


INT_FIELDS = ("n_W", "n_C", "W0", "m", "Z")
FIELD_NAMES = tuple(f.name for f in fields(CoexConfig))


def check_probability(name: str, value: float) -> float:
    if not (isinstance(value, (int, float)) and math.isfinite(value)) or not 0.0 <= value <= 1.0:
        raise ConfigError(name, f"must be a probability in [0, 1], got {value!r}")
    return float(value)


def clamp_q(q: float) -> float:
    return min(max(q, Q_CLAMP), 1.0 - Q_CLAMP)


def validate(config: CoexConfig) -> CoexConfig:
    """Return ``config`` unchanged if every invariant holds, else raise ConfigError."""
    for name in INT_FIELDS:
        v = getattr(config, name)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(name, f"must be an integer, got {v!r}")
    if config.n_W < 0:
        raise ConfigError("n_W", "must be >= 0")
    if config.n_C < 0:
        raise ConfigError("n_C", "must be >= 0")
    if config.n_W + config.n_C < 1:
        raise ConfigError("n_W", "n_W + n_C must be >= 1")
    check_probability("q_W", config.q_W)
    check_probability("q_C", config.q_C)
    if config.W0 < 2:
        raise ConfigError("W0", f"minimum Wi-Fi CW must be >= 2, got {config.W0}")
    if config.m < 0:
        raise ConfigError("m", f"maximum backoff stage must be >= 0, got {config.m}")
    if config.Z < 2:
        # beta(Z - 1) = beta(0) = 0 sits in a denominator of the cellular closed form
        raise ConfigError("Z", f"cellular CW must be >= 2, got {config.Z}")
    for name in ("R_W", "R_C", "D_W", "D_C", "phy_header_bits", "mac_header_bits",
                 "ack_bits", "sigma_us", "sifs_us", "difs_us"):
        v = getattr(config, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ConfigError(name, f"must be a finite positive number, got {v!r}")
    v = config.prop_delay_us
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
        raise ConfigError("prop_delay_us", f"must be finite and >= 0, got {v!r}")
    return config


def coerce_value(name: str, raw: str, *, path: str | None = None, line: int | None = None):
    if name not in FIELD_NAMES:
        raise ConfigError(name, "unknown configuration key", path=path, line=line)
    try:
        if name in INT_FIELDS:
            f = float(raw)
            if not f.is_integer():
                raise ValueError
            return int(f)
        return float(raw)
    except ValueError:
        raise ConfigError(name, f"cannot parse value {raw!r}", path=path, line=line) from None


def parse_config_text(text: str, *, base: CoexConfig | None = None,
                      path: str | None = None) -> CoexConfig:
    """Parse ``key = value`` lines (``#`` starts a comment) on top of ``base``."""
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("<syntax>", f"expected 'key = value', got {raw_line.strip()!r}",
                              path=path, line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = coerce_value(key, value, path=path, line=lineno)
    config = (base or CoexConfig()).replace(**values)
    try:
        return validate(config)
    except ConfigError as err:
        raise ConfigError(err.field, str(err).split(": ", 1)[-1], path=path) from None


def load_config(path: str | Path, *, base: CoexConfig | None = None) -> CoexConfig:
    path = Path(path)
    text = path.read_text()
    return parse_config_text(text, base=base, path=str(path))


def format_config(config: CoexConfig) -> str:
    lines = ["# lbt_coex scenario configuration"]
    for name in FIELD_NAMES:
        v = getattr(config, name)
        lines.append(f"{name} = {v!r}")
    return "\n".join(lines) + "\n"


def dump_config(config: CoexConfig, path: str | Path) -> None:
    Path(path).write_text(format_config(config))
