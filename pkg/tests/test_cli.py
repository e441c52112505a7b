"""Tests for the command-line interface (run in-process via main())."""

import json

import numpy as np
import pytest

from steerlp.cli import EXIT_STEERABLE, EXIT_UNSTEERABLE, EXIT_USAGE, main
from steerlp.factory import werner
from steerlp.gmodel import gmodel_from_json_dict
from steerlp.qubit import save_state


def test_analyze_unsteerable_werner(tmp_path):
    out = tmp_path / "report.json"
    code = main([
        "analyze", "--werner", "0.4", "--measurements", "fib:6",
        "--grid", "2", "--out", str(out),
    ])
    assert code == EXIT_UNSTEERABLE
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "unsteerable-for-set"
    assert doc["s_value"] < 1.0
    assert doc["measurements"] == 6
    assert doc["grid"]["level"] == 2
    # the attached model is a genuine mass-1 model
    model = gmodel_from_json_dict(doc["lhs_model"])
    assert abs(model.q.sum() - 1.0) < 1e-9
    assert "witness" not in doc


def test_analyze_steerable_werner(tmp_path):
    out = tmp_path / "report.json"
    code = main([
        "analyze", "--werner", "0.9", "--measurements", "fib:6",
        "--grid", "2", "--out", str(out),
    ])
    assert code == EXIT_STEERABLE
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "steerable-for-set"
    assert doc["s_value"] > 1.0
    assert "witness" in doc and "lhs_model" not in doc


def test_analyze_state_file_and_tstate(tmp_path):
    path = tmp_path / "state.json"
    save_state(werner(0.3), path)
    out = tmp_path / "r.json"
    assert main([
        "analyze", "--state", str(path), "--measurements", "fib:4",
        "--grid", "1", "--out", str(out),
    ]) == EXIT_UNSTEERABLE
    # negative first component needs the = form so argparse keeps it whole
    assert main([
        "analyze", "--tstate=-0.5,-0.5,0", "--measurements", "fib:4",
        "--grid", "1", "--out", str(out),
    ]) == EXIT_UNSTEERABLE


def test_analyze_flag_validation(tmp_path):
    out = tmp_path / "r.json"
    # zero state flags and two state flags are both usage errors
    assert main(["analyze", "--out", str(out)]) == EXIT_USAGE
    assert main([
        "analyze", "--werner", "0.5", "--tstate", "0,0,0", "--out", str(out),
    ]) == EXIT_USAGE
    assert main([
        "analyze", "--werner", "2.0", "--out", str(out),
    ]) == EXIT_USAGE
    assert not out.exists()  # failed runs leave no partial output


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main([
        "sweep", "--family", "werner", "--range", "0.2:0.8:0.3",
        "--measurements", "fib:4", "--grid", "1", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "param,s_value,verdict,residual"
    params = [float(ln.split(",")[0]) for ln in lines[1:]]
    assert params == pytest.approx([0.2, 0.5, 0.8])
    values = [float(ln.split(",")[1]) for ln in lines[1:]]
    assert values == sorted(values)  # monotone in the Werner parameter


def test_sweep_empty_range_and_mixture_family(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main([
        "sweep", "--family", "werner", "--range", "",
        "--out", str(out),
    ]) == 0
    assert out.read_text() == "param,s_value,verdict,residual\n"
    assert main([
        "sweep", "--family", "mixture:-0.5,-0.5,0", "--range", "0.1:0.1:0.1",
        "--measurements", "fib:4", "--grid", "1", "--out", str(out),
    ]) == 0
    assert len(out.read_text().strip().splitlines()) == 2
    assert main([
        "sweep", "--family", "nope", "--range", "0:1:0.5", "--out", str(out),
    ]) == EXIT_USAGE


def test_figure_points_on_ellipsoid(tmp_path):
    out = tmp_path / "fig.csv"
    assert main([
        "figure", "--werner", "0.8", "--samples", "64", "--out", str(out),
    ]) == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert rows.shape == (64, 3)
    # Werner figure is a sphere of radius p/2
    assert np.abs(np.linalg.norm(rows, axis=1) - 0.4).max() < 1e-9


def test_converge_table(tmp_path):
    out = tmp_path / "conv.csv"
    code = main([
        "converge", "--werner", "1.0", "--measurement-counts", "3,5",
        "--grid-levels", "1,2", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "measurements,level1,level2"
    table = np.array([[float(v) for v in ln.split(",")[1:]] for ln in lines[1:]])
    assert (np.diff(table, axis=0) >= -1e-7).all()  # more measurements
    assert (np.diff(table, axis=1) <= 1e-7).all()   # finer grids
