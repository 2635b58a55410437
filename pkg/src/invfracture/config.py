"""Run configuration from INI files and command-line overrides.

Example::

    [model]
    name = custom
    W = (1 - 1/F)^2
    dW = 2*(1 - 1/F)/F^2
    ddW = (6/F - 4)/F^3

    [run]
    eps = 0.01, 2
    modes = 1
    lambdas = 1.5
    out = results

    [solver]
    quad_tol = 1e-11
    nodes = 2001
"""

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .exceptions import ConfigError


def _float_list(text, key):
    try:
        return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected a comma-separated list of numbers, got {text!r}") from None


def _int_list(text, key):
    values = _float_list(text, key)
    if any(v != int(v) for v in values):
        raise ConfigError(f"{key}: expected integers, got {text!r}")
    return [int(v) for v in values]


@dataclass
class RunConfig:
    model: dict = field(default_factory=lambda: {"name": "rational"})
    eps: list = field(default_factory=lambda: [0.01])
    modes: list = field(default_factory=lambda: [1])
    lambdas: list = field(default_factory=list)
    out: str = "."
    quad_tol: float = 1e-11
    tol: float = 1e-8
    max_iter: int = 50000
    nodes: int = 2001
    samples: int = 8001
    points: int = 41
    seed: str = "ramp"

    def validate(self):
        if not self.eps or any(not e > 0 for e in self.eps):
            raise ConfigError("eps values must be positive")
        if any(m < 1 for m in self.modes):
            raise ConfigError("modes must be >= 1")
        if any(not v > 0 for v in self.lambdas):
            raise ConfigError("lambda values must be positive")
        for name in ("quad_tol", "tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name, low in (("max_iter", 1), ("nodes", 3), ("samples", 3), ("points", 2)):
            if getattr(self, name) < low:
                raise ConfigError(f"{name} must be >= {low}")
        return self


_FLOAT_KEYS = {"quad_tol", "tol"}
_INT_KEYS = {"max_iter", "nodes", "samples", "points"}


def load_config(path=None):
    """Read ``path`` (INI) into a validated :class:`RunConfig`; defaults if None."""
    cfg = RunConfig()
    if path is None:
        return cfg.validate()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    known_sections = {"model", "run", "solver"}
    unknown = set(parser.sections()) - known_sections
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    if parser.has_section("model"):
        model = dict(parser["model"])
        model.setdefault("name", "rational")
        if model["name"] not in ("rational", "quadratic", "custom"):
            raise ConfigError(f"unknown model {model['name']!r}")
        cfg.model = model
    for section in ("run", "solver"):
        if not parser.has_section(section):
            continue
        for key, raw in parser[section].items():
            _apply(cfg, key, raw)
    return cfg.validate()


def _apply(cfg, key, raw):
    names = {f.name for f in fields(RunConfig)}
    if key == "lambda":
        key = "lambdas"
    if key == "mode":
        key = "modes"
    if key not in names or key == "model":
        raise ConfigError(f"unknown config key {key!r}")
    if key == "eps" or key == "lambdas":
        value = _float_list(raw, key)
    elif key == "modes":
        value = _int_list(raw, key)
    elif key in _FLOAT_KEYS:
        value = _float_list(raw, key)
        if len(value) != 1:
            raise ConfigError(f"{key}: expected one number")
        value = value[0]
    elif key in _INT_KEYS:
        value = _int_list(raw, key)
        if len(value) != 1:
            raise ConfigError(f"{key}: expected one integer")
        value = value[0]
    else:
        value = str(raw).strip()
    setattr(cfg, key, value)


def override(cfg, **values):
    """Apply non-None overrides (CLI flags win over the file)."""
    for key, value in values.items():
        if value is None:
            continue
        if key == "model" and isinstance(value, str):
            value = dict(cfg.model, name=value) if cfg.model.get("name") == value else {"name": value}
        setattr(cfg, key, value)
    return cfg.validate()
