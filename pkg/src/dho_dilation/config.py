"""Scenario configuration: an INI-style ``key = value`` file plus flag overrides."""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace

from .errors import InvalidArgument

SECTION = "scenario"


@dataclass(frozen=True)
class ScenarioConfig:
    omega: float = 1.0
    gamma: float = 0.5
    n_modes: int = 1
    dt: float = 1e-3
    t_max: float | None = None
    t_samples: tuple = (0.0, 0.25, 0.5, 1.0, 2.0, 3.0)
    energy_band: tuple = (-10.0, 10.0, 801)
    output_path: str | None = None
    vector: tuple | None = None
    fock: bool = True
    halfline_checks: bool = True
    seed: int = 12345

    def validate(self) -> "ScenarioConfig":
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise InvalidArgument(f"omega must be > 0, got {self.omega}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise InvalidArgument(f"gamma must be >= 0, got {self.gamma}")
        if self.n_modes < 1:
            raise InvalidArgument(f"n_modes must be >= 1, got {self.n_modes}")
        if not self.dt > 0:
            raise InvalidArgument(f"dt must be > 0, got {self.dt}")
        if self.t_max is not None and not self.t_max > 0:
            raise InvalidArgument(f"t_max must be > 0, got {self.t_max}")
        if not self.t_samples or any(not (math.isfinite(t) and t >= 0) for t in self.t_samples):
            raise InvalidArgument("t_samples must be a non-empty list of non-negative times")
        lo, hi, count = self.energy_band
        if not (lo < hi) or count < 2:
            raise InvalidArgument("energy_band must be (E_min < E_max, count >= 2)")
        if self.vector is not None and len(self.vector) != 2 * self.n_modes:
            raise InvalidArgument(f"vector must have {2 * self.n_modes} entries")
        if self.vector is not None and not any(self.vector):
            raise InvalidArgument("vector must be non-zero")
        return self


def _floats(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def _band(text):
    parts = text.replace(",", " ").split()
    if len(parts) != 3:
        raise InvalidArgument(f"energy_band needs three entries, got {text!r}")
    return float(parts[0]), float(parts[1]), int(parts[2])


def _bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise InvalidArgument(f"not a boolean: {text!r}")


def _optional_float(text):
    return None if text.strip().lower() in ("", "auto", "none") else float(text)


PARSERS = {
    "omega": float,
    "gamma": float,
    "n_modes": int,
    "dt": float,
    "t_max": _optional_float,
    "t_samples": _floats,
    "energy_band": _band,
    "output_path": str,
    "vector": _floats,
    "fock": _bool,
    "halfline_checks": _bool,
    "seed": int,
}
assert set(PARSERS) == {f.name for f in fields(ScenarioConfig)}


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__unused__",
                                       inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise InvalidArgument(f"malformed config: {exc}") from None
    extra = [s for s in parser.sections() if s != SECTION]
    if extra:
        raise InvalidArgument(f"unknown config section(s): {', '.join(extra)}")
    values = {}
    if parser.has_section(SECTION):
        for key, raw in parser.items(SECTION):
            if key not in PARSERS:
                raise InvalidArgument(f"unknown config key {key!r}")
            try:
                values[key] = PARSERS[key](raw)
            except ValueError as exc:
                raise InvalidArgument(f"bad value for {key!r}: {exc}") from None
    return replace(base or ScenarioConfig(), **values)


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidArgument(f"cannot read config {path!r}: {exc.strerror}") from None
    return parse_config(text)
