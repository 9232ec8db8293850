"""JSON run configuration: parsing, validation, defaults.

Schema (version 1):

    {
      "schema_version": 1,
      "protocol":   {"kind": "arctan", "omega0": 1.0, "delta": 0.5, "tau": 1.0,
                     "window": [-20.0, 20.0]}
                 or {"kind": "tabulated", "samples": [[t, omega], ...]},
      "system":     {"mass": 1.0, "hbar": 1.0},
      "drive":      {"M": 1.0, "theta_dot": 1.0, "var_theta0": 0.0,
                     "var_P0": 0.0, "H_D": 1.0},
      "tolerances": {"ode_rel": 1e-11, "ode_abs": 1e-13, "quad_abs": 1e-9},
      "samples":    {"n_samples": 1000, "seed": 0, "n_initial": 0},
      "fig1":       {"x_min": 0.1, "x_max": 4.0, "points": 40, "y": 0.5},
      "fcurve":     {"x": [..], "y": 0.5},
      "wigner":     {"n_max": 10, "nu": 1e-3, "mu": 1e-4},
      "modes":      {"frequency": "counterdiabatic" | "bare", "grid_points": 2001}
    }

Only the sections a command needs are required for it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .driving import DrivingSpec
from .errors import ConfigurationError
from .protocol import FrequencyProtocol, SystemSpec

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Tolerances:
    ode_rel: float = 1e-11
    ode_abs: float = 1e-13
    quad_abs: float = 1e-9

    def __post_init__(self):
        for name in ("ode_rel", "ode_abs", "quad_abs"):
            if getattr(self, name) <= 0.0:
                raise ConfigurationError(f"tolerances.{name} must be > 0")

    @classmethod
    def from_dict(cls, d: dict) -> "Tolerances":
        return cls(ode_rel=float(d.get("ode_rel", 1e-11)),
                   ode_abs=float(d.get("ode_abs", 1e-13)),
                   quad_abs=float(d.get("quad_abs", 1e-9)))


@dataclass(frozen=True)
class RunConfig:
    protocol: FrequencyProtocol | None = None
    system: SystemSpec = field(default_factory=SystemSpec)
    drive: DrivingSpec | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    raw: dict = field(default_factory=dict, repr=False)

    def section(self, name: str, default: dict | None = None) -> dict:
        value = self.raw.get(name, default if default is not None else {})
        if not isinstance(value, dict):
            raise ConfigurationError(f"config section {name!r} must be an object")
        return value

    def require_protocol(self) -> FrequencyProtocol:
        if self.protocol is None:
            raise ConfigurationError("config: missing section 'protocol'")
        return self.protocol

    def require_drive(self) -> DrivingSpec:
        if self.drive is None:
            raise ConfigurationError("config: missing section 'drive'")
        return self.drive


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigurationError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    protocol = None
    if "protocol" in data:
        if not isinstance(data["protocol"], dict):
            raise ConfigurationError("config field 'protocol' must be an object")
        protocol = FrequencyProtocol.from_dict(data["protocol"])
    drive = None
    if "drive" in data:
        if not isinstance(data["drive"], dict):
            raise ConfigurationError("config field 'drive' must be an object")
        drive = DrivingSpec.from_dict(data["drive"])
    system = SystemSpec.from_dict(data.get("system", {}))
    tolerances = Tolerances.from_dict(data.get("tolerances", {}))
    return RunConfig(protocol=protocol, system=system, drive=drive,
                     tolerances=tolerances, raw=data)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path!r} is not valid JSON: {exc}") from exc
    return parse_config(data)
