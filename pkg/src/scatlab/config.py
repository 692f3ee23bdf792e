"""Structured-text experiment configs: `key = value` under sections,
strictly versioned, validated with per-field diagnostics.
"""

import configparser
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Validation failure with a section/field diagnostic."""

    def __init__(self, section, key, message):
        self.section = section
        self.key = key
        super().__init__(f"[{section}] {key}: {message}")


# Known keys per section, with (parser, validator, description).
def _positive(x):
    return x > 0


def _nonnegative(x):
    return x >= 0


def _even_ge4(x):
    return x >= 4 and x % 2 == 0


def _open_unit(x):
    return 0.0 < x < 1.0


def _half_open_unit(x):
    return 0.0 <= x < 1.0


_SCHEMAS = {
    "run": {
        "schema": (int, lambda x: x == SCHEMA_VERSION,
                   f"must equal {SCHEMA_VERSION}"),
        "subcommand": (str, lambda s: True, "subcommand name"),
        "seed": (int, _nonnegative, "64-bit RNG seed, >= 0"),
    },
    "grid": {
        "n": (int, _even_ge4, "even grid size >= 4"),
        "l": (float, _positive, "box length > 0"),
    },
    "operator": {
        "kind": (str, lambda s: s in ("laplacian", "momentum", "polyharmonic"),
                 "one of laplacian, momentum, polyharmonic"),
        "ell": (float, lambda x: x >= 1, "symbol order >= 1"),
    },
    "potential": {
        "name": (str, lambda s: True, "builtin name or csv path"),
        "amplitude": (float, lambda x: True, "potential amplitude"),
        "width": (float, _positive, "potential width > 0"),
    },
    "scan": {
        "alpha": (float, _nonnegative, "weight exponent >= 0"),
        "beta": (float, _open_unit, "growth exponent in (0, 1)"),
        "gamma": (float, _half_open_unit, "kernel exponent in [0, 1)"),
        "theta": (float, _open_unit, "smoothness exponent in (0, 1)"),
        "lambda_min": (float, lambda x: True, "scan window start"),
        "lambda_max": (float, lambda x: True, "scan window end"),
        "points": (int, _positive, "number of scan points"),
        "eps0": (float, _positive, "initial eps > 0"),
        "levels": (int, _positive, "eps halving levels"),
        "side": (int, lambda x: x in (-1, 1), "-1 or +1"),
        "packets": (int, _positive, "ensemble size per band"),
    },
}

_DEFAULTS = {
    ("run", "seed"): 0,
    ("grid", "n"): 256,
    ("grid", "l"): 100.0,
    ("operator", "kind"): "laplacian",
    ("operator", "ell"): 2.0,
    ("scan", "alpha"): 1.0,
    ("scan", "levels"): 6,
    ("scan", "side"): 1,
    ("scan", "points"): 8,
    ("scan", "packets"): 8,
}


@dataclass
class ExperimentConfig:
    path: str
    values: dict = field(default_factory=dict)   # (section, key) -> value

    def get(self, section, key, default=None):
        return self.values.get((section, key), default)

    def echo(self):
        """Flat parameter record for the run manifest."""
        return {f"{s}.{k}": v for (s, k), v in sorted(self.values.items())}


def _parse_value(section, key, raw):
    if section not in _SCHEMAS or key not in _SCHEMAS[section]:
        raise ConfigError(section, key, "unknown key")
    caster, check, description = _SCHEMAS[section][key]
    try:
        value = caster(raw)
    except (TypeError, ValueError):
        raise ConfigError(section, key,
                          f"cannot parse {raw!r} as {caster.__name__} "
                          f"({description})")
    if not check(value):
        raise ConfigError(section, key, f"value {value!r} out of range "
                                        f"({description})")
    return value


def parse_config(path) -> ExperimentConfig:
    """Read and validate a sectioned key = value config file."""
    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise ConfigError("run", "path", f"config file not found: {path}")

    values = {}
    for section in parser.sections():
        sec = section.lower()
        for key, raw in parser.items(section):
            values[(sec, key.lower())] = _parse_value(sec, key.lower(), raw)

    if ("run", "schema") not in values:
        raise ConfigError("run", "schema", "missing schema version")
    for (sec, key), default in _DEFAULTS.items():
        values.setdefault((sec, key), default)
    return ExperimentConfig(path=str(path), values=values)


def validate_overrides(overrides: dict) -> dict:
    """Validate CLI flag overrides given as {(section, key): raw} pairs."""
    return {(s, k): _parse_value(s, k, v) for (s, k), v in overrides.items()}
