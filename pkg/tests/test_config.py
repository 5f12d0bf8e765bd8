import json

import numpy as np
import pytest

from phavail.config import GridOptions, parse_model_config, read_model_config
from phavail.errors import (
    ConfigError,
    ConfigSyntaxError,
    InvalidRate,
    MissingField,
    UnknownField,
    UnknownLaw,
)
from phavail.lindley import Law
from phavail.system import Structure


def doc(**over):
    base = {"name": "m", "structure": "series",
            "components": [{"label": "G", "lambda": 0.004, "mu": 0.03}]}
    base.update(over)
    return json.dumps(base)


def test_bundled_model():
    cfg = read_model_config("cchp.json")
    m = cfg.model
    assert m.structure is Structure.SERIES
    assert m.labels == ["G", "ICE", "AC"]
    assert [(p.lam, p.mu) for p in m.params] == [(0.004, 0.03), (0.002, 0.08), (0.002, 0.08)]
    assert all(p.law is Law.LINDLEY for p in m.params)
    g = cfg.grid.grid()
    assert g.size == 501 and g[0] == 0 and g[-1] == 500


def test_single_component_model():
    cfg = parse_model_config(doc(structure="single"))
    assert cfg.model.structure is Structure.SINGLE
    assert cfg.model.params[0].lam == 0.004


def test_law_defaults_to_lindley_and_exponential_parses():
    assert parse_model_config(doc()).model.params[0].law is Law.LINDLEY
    comps = [{"label": "a", "lambda": 1, "mu": 2, "law": "exponential"}]
    assert parse_model_config(doc(components=comps)).model.params[0].law is Law.EXPONENTIAL


def test_negative_lambda_named():
    with pytest.raises(InvalidRate) as exc:
        parse_model_config(doc(components=[{"label": "G", "lambda": -1, "mu": 0.03}]))
    assert exc.value.field == "lambda" and exc.value.value == -1


@pytest.mark.parametrize("comp", [
    {"label": "G", "lambda": 0, "mu": 1},
    {"label": "G", "lambda": "0.1", "mu": 1},
    {"label": "G", "lambda": True, "mu": 1},
    {"label": "G", "lambda": 0.1, "mu": -0.5},
])
def test_invalid_rates(comp):
    with pytest.raises(InvalidRate):
        parse_model_config(doc(components=[comp]))


def test_zero_repair_allowed():
    assert parse_model_config(doc(components=[{"label": "G", "lambda": 1, "mu": 0}])).model.params[0].mu == 0


def test_syntax_error_reports_line():
    with pytest.raises(ConfigSyntaxError) as exc:
        parse_model_config('{\n  "name": "m",\n  oops\n}')
    assert exc.value.line == 3


def test_unknown_fields():
    with pytest.raises(UnknownField) as exc:
        parse_model_config(doc(colour="red"))
    assert exc.value.name == "colour"
    with pytest.raises(UnknownField):
        parse_model_config(doc(components=[{"label": "G", "lambda": 1, "mu": 1, "beta": 2}]))


def test_unknown_law():
    with pytest.raises(UnknownLaw) as exc:
        parse_model_config(doc(components=[{"label": "G", "lambda": 1, "mu": 1, "law": "weibull"}]))
    assert exc.value.value == "weibull"


@pytest.mark.parametrize("text", [
    json.dumps({"name": "m", "components": []}),
    json.dumps({"name": "m", "structure": "series", "components": [{"lambda": 1, "mu": 1}]}),
    json.dumps({"name": "m", "structure": "series", "components": [{"label": "x", "mu": 1}]}),
])
def test_missing_fields(text):
    with pytest.raises(MissingField):
        parse_model_config(text)


@pytest.mark.parametrize("over", [
    {"structure": "mesh"},
    {"components": []},
    {"components": [{"label": "a", "lambda": 1, "mu": 1}, {"label": "a", "lambda": 1, "mu": 1}]},
    {"structure": "single", "components": [{"label": "a", "lambda": 1, "mu": 1}, {"label": "b", "lambda": 1, "mu": 1}]},
    {"analysis": {"points": 0}},
    {"analysis": {"tStart": 0, "logSpacing": True}},
    {"analysis": {"tStart": 10, "tStop": 5}},
])
def test_config_errors(over):
    with pytest.raises(ConfigError):
        parse_model_config(doc(**over))


def test_analysis_block():
    cfg = parse_model_config(doc(analysis={"tStart": 1, "tStop": 1000, "points": 4, "logSpacing": True}))
    np.testing.assert_allclose(cfg.grid.grid(), [1, 10, 100, 1000])


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_model_config(tmp_path / "nope.json")


def test_local_file_preferred(tmp_path, monkeypatch):
    (tmp_path / "cchp.json").write_text(doc(name="local"))
    monkeypatch.chdir(tmp_path)
    assert read_model_config("cchp.json").model.name == "local"


def test_grid_defaults():
    g = GridOptions().grid()
    assert g.size == 501 and g[1] == 1.0
