import json

import numpy as np

from fisherqp import (
    Grid,
    HeatField,
    MadelungState,
    PhysicalConstants,
    evolve,
    heat_from_density,
    sweep,
)
from fisherqp import serialization as ser
from fisherqp.grid import ScalarField

from conftest import gaussian_density

C = PhysicalConstants()


def test_field_csv_roundtrip(tmp_path):
    g = Grid(-8.0, 8.0, 513)
    rng = np.random.default_rng(5)
    f = g.field(rng.normal(size=g.n))
    path = tmp_path / "field.csv"
    ser.save_field_csv(f, path)
    back = ser.load_field_csv(path)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)  # 17 digits round-trips float64
    header = path.read_text().splitlines()[0]
    assert header == "x,value"


def test_state_json_roundtrip(tmp_path):
    g = Grid(-8.0, 8.0, 1025)
    d = gaussian_density(g)
    phase = ScalarField(g, 0.3 * g.x)
    path = tmp_path / "state.json"
    ser.save_state_json(path, d, phase=phase, constants=C)
    d2, phase2, c2 = ser.load_state_json(path)
    assert np.max(np.abs(d2.values - d.values)) <= 1e-15
    assert np.array_equal(phase2.values, phase.values)
    assert c2 == C


def test_state_json_phase_optional(tmp_path):
    g = Grid(-8.0, 8.0, 257)
    d = gaussian_density(g)
    path = tmp_path / "bare.json"
    ser.save_state_json(path, d)
    d2, phase2, c2 = ser.load_state_json(path)
    assert phase2 is None
    assert c2 == PhysicalConstants()


def test_heat_field_json_roundtrip(tmp_path):
    g = Grid(-8.0, 8.0, 513)
    hf = heat_from_density(gaussian_density(g), C)
    path = tmp_path / "heat.json"
    ser.save_heat_field_json(path, hf)
    back = ser.load_heat_field_json(path)
    assert np.array_equal(back.Q_heat.values, hf.Q_heat.values)
    payload = json.loads(path.read_text())
    assert "Q_heat" in payload


def test_trajectory_dump(tmp_path):
    g = Grid(-10.0, 10.0, 513)
    state = MadelungState(gaussian_density(g), g.zeros(), C)
    traj = evolve(state, g.zeros(), 1e-3, 8)
    out = ser.dump_trajectory(traj, tmp_path / "traj")
    csvs = sorted(out.glob("step_*.csv"))
    assert len(csvs) == 9
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["schema"] == 1
    assert manifest["steps"] == 8
    assert manifest["dt"] == 1e-3
    assert len(manifest["V"]) == g.n
    first = csvs[0].read_text().splitlines()
    assert first[0] == "x,P,S"
    assert len(first) == g.n + 1


def test_sweep_csv(tmp_path):
    g = Grid(-8.0, 8.0, 2049)
    table = sweep(g.from_function(lambda x: x * x), [-1.0, -4.0, 4.0], g)
    path = tmp_path / "sweep.csv"
    ser.save_sweep_csv(table, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "lambda,I,meanA,Lambda,alpha_norm,status"
    assert len(lines) == 4
    assert lines[-1].startswith("4") and lines[-1].endswith("EdgeLocalized")
    ok_rows = [ln for ln in lines[1:] if ln.endswith(",ok")]
    assert len(ok_rows) == 2
