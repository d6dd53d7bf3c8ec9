"""
Tests for CSV / JSON emission
"""

import json
import math

import numpy as np
import pandas as pd
import pytest

from sweeps.engine import SweepEngine
from sweeps.entities import OutputFormat, SweepResult
from sweeps.writers import read_grid_csv, render, render_csv, render_json, write_result


@pytest.fixture
def grid():
    losses = np.linspace(0.0, 1.0, 6)
    return SweepEngine().visibility_grid(14, 4, losses, losses)


@pytest.fixture
def curve():
    frame = pd.DataFrame({"phi": [0.0, 0.1, 0.2], "delta_phi": [math.inf, 0.25, math.nan]})
    return SweepResult("sensitivity", {"m": 2, "m_prime": 1}, frame, {"best": 0.25})


def test_grid_csv_round_trip_at_twelve_digits(grid, tmp_path):
    path = write_result(grid, tmp_path / "grid.csv")
    loaded = read_grid_csv(path)

    def as_text(values):
        return [f"{value:.12g}" for value in np.ravel(values)]

    assert loaded.shape == grid.frame.shape
    assert as_text(loaded.to_numpy()) == as_text(grid.frame.to_numpy())
    assert as_text(loaded.index) == as_text(grid.frame.index)
    assert list(loaded.columns) == list(grid.frame.columns)


def test_grid_csv_header_and_line_endings(grid, tmp_path):
    path = write_result(grid, tmp_path / "grid.csv")
    raw = path.read_bytes()

    assert b"\r\n" not in raw
    assert raw.endswith(b"\n")
    assert raw.decode("utf-8").splitlines()[0] == "loss_a,0,0.2,0.4,0.6,0.8,1"


def test_flat_csv_has_no_index(curve):
    lines = render_csv(curve).splitlines()

    assert lines[0] == "phi,delta_phi"
    assert lines[1] == "0,inf"


def test_significant_digits():
    frame = pd.DataFrame({"x": [1 / 3]})
    result = SweepResult("x", {}, frame)

    assert render_csv(result).splitlines()[1] == "0.333333333333"
    assert render_csv(result, digits=4).splitlines()[1] == "0.3333"


def test_json_has_config_and_data_and_nulls(curve):
    payload = json.loads(render_json(curve))

    assert payload["config"] == {"sweep": "sensitivity", "m": 2, "m_prime": 1}
    assert payload["data"][0] == {"phi": 0.0, "delta_phi": None}
    assert payload["data"][1]["delta_phi"] == 0.25
    assert payload["data"][2]["delta_phi"] is None
    assert payload["summary"] == {"best": 0.25}


def test_json_grid_payload(grid):
    payload = json.loads(render(grid, OutputFormat.JSON))
    data = payload["data"]

    assert data["index_name"] == "loss_a"
    assert data["columns"][0] == "0"
    assert data["values"][0][0] == pytest.approx(1.0)
    assert len(data["values"]) == len(data["index"]) == 6


def test_write_result_creates_directories(curve, tmp_path):
    path = write_result(curve, tmp_path / "nested" / "out.json", "json")

    assert path.exists()
    assert json.loads(path.read_text(encoding="utf-8"))["config"]["sweep"] == "sensitivity"


def test_unknown_format(curve):
    with pytest.raises(ValueError):
        render(curve, "xml")
