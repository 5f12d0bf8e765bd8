"""JSON model configuration files.

Schema::

    {
      "name": "cchp",
      "structure": "series",            # single | series | parallel
      "components": [
        {"label": "G", "lambda": 0.004, "mu": 0.03, "law": "lindley"}
      ],
      "analysis": {"tStart": 0, "tStop": 500, "points": 501, "logSpacing": false}
    }

``law`` defaults to ``"lindley"``; ``analysis`` is optional.
"""

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    ConfigSyntaxError,
    InvalidRate,
    MissingField,
    UnknownField,
    UnknownLaw,
)
from .lindley import ComponentParams, Law
from .system import Structure, SystemModel

_TOP_FIELDS = {"name", "structure", "components", "analysis"}
_COMPONENT_FIELDS = {"label", "lambda", "mu", "law"}
_ANALYSIS_FIELDS = {"tStart", "tStop", "points", "logSpacing"}

BUNDLED_MODELS = ("cchp.json",)


@dataclass(frozen=True)
class GridOptions:
    t_start: float = 0.0
    t_stop: float = 500.0
    points: int = 501
    log_spacing: bool = False

    def grid(self) -> np.ndarray:
        if self.points < 1:
            raise ConfigError("points must be at least 1")
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_stop)) or self.t_start < 0 or self.t_stop < self.t_start:
            raise ConfigError(f"invalid time range [{self.t_start}, {self.t_stop}]")
        if self.log_spacing:
            if self.t_start <= 0:
                raise ConfigError("logarithmic spacing needs tStart > 0")
            return np.geomspace(self.t_start, self.t_stop, self.points)
        return np.linspace(self.t_start, self.t_stop, self.points)


@dataclass(frozen=True)
class ModelConfig:
    model: SystemModel
    grid: GridOptions


def _rate(obj, key, where, allow_zero):
    if key not in obj:
        raise MissingField(key, where)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidRate(key, value, where)
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        raise InvalidRate(key, value, where)
    return float(value)


def _check_fields(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise UnknownField(key, where)


def _number(obj, key, where, default):
    value = obj.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}.{key}: expected a finite number, got {value!r}")
    return value


def parse_model_config(text: str) -> ModelConfig:
    """Parse and validate a model document; errors name the offending field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(exc.lineno, exc.msg) from None
    _check_fields(doc, _TOP_FIELDS, "model")
    for key in ("name", "structure", "components"):
        if key not in doc:
            raise MissingField(key, "model")
    if not isinstance(doc["name"], str):
        raise ConfigError(f"model.name: expected a string, got {doc['name']!r}")
    try:
        structure = Structure(doc["structure"])
    except ValueError:
        raise ConfigError(f"model.structure: expected one of single/series/parallel, got {doc['structure']!r}") from None

    raw = doc["components"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("model.components: expected a non-empty list")
    comps = []
    for i, c in enumerate(raw):
        where = f"components[{i}]"
        _check_fields(c, _COMPONENT_FIELDS, where)
        if "label" not in c:
            raise MissingField("label", where)
        label = c["label"]
        if not isinstance(label, str) or not label:
            raise ConfigError(f"{where}.label: expected a non-empty string")
        lam = _rate(c, "lambda", where, allow_zero=False)
        mu = _rate(c, "mu", where, allow_zero=True)
        law = c.get("law", "lindley")
        try:
            law = Law(law)
        except ValueError:
            raise UnknownLaw(law, where) from None
        comps.append((label, ComponentParams(lam, mu, law)))
    labels = [label for label, _ in comps]
    if len(set(labels)) != len(labels):
        raise ConfigError("model.components: labels must be unique")
    if structure is Structure.SINGLE and len(comps) != 1:
        raise ConfigError(f"model.structure: 'single' needs exactly one component, got {len(comps)}")

    grid = GridOptions()
    if "analysis" in doc:
        a = doc["analysis"]
        _check_fields(a, _ANALYSIS_FIELDS, "analysis")
        points = a.get("points", grid.points)
        if isinstance(points, bool) or not isinstance(points, int) or points < 1:
            raise ConfigError(f"analysis.points: expected a positive integer, got {points!r}")
        log = a.get("logSpacing", grid.log_spacing)
        if not isinstance(log, bool):
            raise ConfigError(f"analysis.logSpacing: expected true or false, got {log!r}")
        grid = GridOptions(float(_number(a, "tStart", "analysis", grid.t_start)),
                           float(_number(a, "tStop", "analysis", grid.t_stop)), points, log)
        grid.grid()
    return ModelConfig(SystemModel(doc["name"], structure, comps), grid)


def read_model_config(path) -> ModelConfig:
    """Load ``path``; a bare bundled name such as ``cchp.json`` falls back to the packaged copy."""
    p = Path(path)
    if not p.exists() and p.name == str(path) and p.name in BUNDLED_MODELS:
        text = resources.files("phavail.data").joinpath(p.name).read_text(encoding="utf-8")
    else:
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_model_config(text)
