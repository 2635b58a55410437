import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invfracture import ConfigError, RunConfig, load_config
from invfracture.config import override
from invfracture.io import dumps, format_float, read_csv, write_csv, write_json


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(format_float(x)) == x


def test_csv_round_trip(tmp_path, rng):
    cols = {"a": rng.standard_normal(20), "b": np.arange(20)}
    path = write_csv(tmp_path / "sub" / "data.csv", cols)
    back = read_csv(path)
    np.testing.assert_array_equal(back["a"], cols["a"])
    np.testing.assert_array_equal(back["b"], cols["b"])
    assert path.read_text().splitlines()[0] == "a,b"


def test_csv_rejects_ragged(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "x.csv", {"a": [1, 2], "b": [1]})


def test_atomic_overwrite_leaves_no_temp_files(tmp_path):
    for k in range(3):
        write_csv(tmp_path / "x.csv", {"k": [k]})
    assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]
    assert read_csv(tmp_path / "x.csv")["k"][0] == 2


def test_json_numbers_and_nonfinite(tmp_path):
    value = {"pi": math.pi, "bad": float("nan"), "inf": float("inf"), "arr": np.array([0.1, 2]),
             "flag": np.bool_(True), "n": np.int64(3), "nested": [{"x": None}]}
    text = dumps(value)
    data = json.loads(text)
    assert data["pi"] == math.pi
    assert data["bad"] is None and data["inf"] is None
    assert data["arr"] == [0.1, 2.0] and data["flag"] is True and data["n"] == 3
    path = write_json(tmp_path / "v.json", value)
    assert json.loads(path.read_text()) == data


def test_load_config_sections(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(
        "[model]\nname = custom\nW = (1 - 1/F)^2\ndW = 2*(1 - 1/F)/F^2\nddW = (6/F - 4)/F^3\n\n"
        "[run]\neps = 0.01, 2\nmode = 1, 2\nlambda = 1.5\nout = results\n\n"
        "[solver]\nquad_tol = 1e-10\nnodes = 501\n")
    cfg = load_config(path)
    assert cfg.model["name"] == "custom" and cfg.model["W"] == "(1 - 1/F)^2"
    assert cfg.eps == [0.01, 2.0] and cfg.modes == [1, 2] and cfg.lambdas == [1.5]
    assert cfg.quad_tol == 1e-10 and cfg.nodes == 501 and cfg.out == "results"


@pytest.mark.parametrize("text", [
    "[run]\neps = -1\n",
    "[run]\nbogus = 1\n",
    "[extra]\na = 1\n",
    "[run]\neps = abc\n",
    "[solver]\nnodes = 2.5\n",
    "[solver]\nquad_tol = 0\n",
    "[model]\nname = cubic\n",
    "no section header\n",
])
def test_load_config_errors(tmp_path, text):
    path = tmp_path / "bad.ini"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")


def test_override_precedence():
    cfg = override(RunConfig(), eps=[2.0], model="quadratic", nodes=None)
    assert cfg.eps == [2.0] and cfg.model == {"name": "quadratic"} and cfg.nodes == 2001
    with pytest.raises(ConfigError):
        override(RunConfig(), tol=-1.0)
