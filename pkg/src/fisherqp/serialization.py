"""File formats: field CSV, state JSON, trajectory dumps, sweep CSV.

* ScalarField CSV: header ``x,value``, one row per grid point, floats
  written with 17 significant digits (lossless for float64).
* State JSON: ``{"grid": {"xmin", "xmax", "n"}, "P": [...], "S": [...],
  "constants": {...}}`` with ``S`` optional.
* Trajectory dump: one CSV per step plus ``manifest.json`` carrying dt,
  steps, the constants, and the potential.
* Heat fields reuse the state layout with the field named ``Q_heat``.
* Sweep CSV: ``lambda,I,meanA,Lambda,alpha_norm,status``; failed rows
  keep their multiplier and error name with empty value columns.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .grid import Grid, ScalarField
from .legendre import SweepTable
from .propagator import Trajectory
from .states import Density, PhysicalConstants, density_from_samples
from .thermal import HeatField


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def save_field_csv(field: ScalarField, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "value"])
        for x, v in zip(field.grid.x, field.values):
            writer.writerow([_fmt(x), _fmt(v)])


def load_field_csv(path) -> ScalarField:
    xs: list[float] = []
    vals: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["x", "value"]:
            raise ValueError(f"unexpected CSV header {header!r}")
        for row in reader:
            xs.append(float(row[0]))
            vals.append(float(row[1]))
    grid = Grid(xmin=xs[0], xmax=xs[-1], n=len(xs))
    return ScalarField(grid, np.array(vals))


def constants_to_dict(constants: PhysicalConstants) -> dict:
    return {
        "hbar": constants.hbar,
        "mass": constants.mass,
        "omega": constants.omega,
        "boltzmann_k": constants.boltzmann_k,
        "temperature": constants.temperature,
    }


def constants_from_dict(data: dict) -> PhysicalConstants:
    return PhysicalConstants(
        hbar=float(data.get("hbar", 1.0)),
        mass=float(data.get("mass", 1.0)),
        omega=float(data.get("omega", 1.0)),
        boltzmann_k=float(data.get("boltzmann_k", 1.0)),
        temperature=float(data.get("temperature", 1.0)),
    )


def grid_to_dict(grid: Grid) -> dict:
    return {"xmin": grid.xmin, "xmax": grid.xmax, "n": grid.n}


def grid_from_dict(data: dict) -> Grid:
    return Grid(xmin=float(data["xmin"]), xmax=float(data["xmax"]), n=int(data["n"]))


def save_state_json(
    path,
    density: Density,
    phase: ScalarField | None = None,
    constants: PhysicalConstants | None = None,
) -> None:
    payload: dict = {
        "grid": grid_to_dict(density.grid),
        "P": [float(v) for v in density.values],
    }
    if phase is not None:
        payload["S"] = [float(v) for v in phase.values]
    if constants is not None:
        payload["constants"] = constants_to_dict(constants)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)


def load_state_json(path, truncation_check: bool = True):
    """Returns (Density, phase or None, PhysicalConstants)."""
    with open(path) as fh:
        payload = json.load(fh)
    grid = grid_from_dict(payload["grid"])
    density = density_from_samples(
        ScalarField(grid, np.array(payload["P"], dtype=float)),
        truncation_check=truncation_check,
    )
    phase = None
    if "S" in payload:
        phase = ScalarField(grid, np.array(payload["S"], dtype=float))
    constants = constants_from_dict(payload.get("constants", {}))
    return density, phase, constants


def save_heat_field_json(path, hf: HeatField) -> None:
    payload = {
        "grid": grid_to_dict(hf.grid),
        "Q_heat": [float(v) for v in hf.Q_heat.values],
        "constants": constants_to_dict(hf.constants),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)


def load_heat_field_json(path) -> HeatField:
    with open(path) as fh:
        payload = json.load(fh)
    grid = grid_from_dict(payload["grid"])
    constants = constants_from_dict(payload.get("constants", {}))
    return HeatField(
        ScalarField(grid, np.array(payload["Q_heat"], dtype=float)), constants
    )


def dump_trajectory(traj: Trajectory, out_dir) -> Path:
    """Write per-step state CSVs plus a manifest; returns the directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, state in enumerate(traj.states):
        with open(out / f"step_{k:05d}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "P", "S"])
            for x, p, s in zip(
                traj.grid.x, state.density.values, state.phase.values
            ):
                writer.writerow([_fmt(x), _fmt(p), _fmt(s)])
    manifest = {
        "schema": 1,
        "dt": traj.dt,
        "steps": len(traj) - 1,
        "constants": constants_to_dict(traj.constants),
        "grid": grid_to_dict(traj.grid),
        "V": [float(v) for v in traj.potential.values],
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
    return out


def save_sweep_csv(table: SweepTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "I", "meanA", "Lambda", "alpha_norm", "status"])
        rows = [
            (r.lam, _fmt(r.I), _fmt(r.meanA), _fmt(r.Lambda_pot), _fmt(r.alpha_norm), "ok")
            for r in table.records
        ] + [(lam, "", "", "", "", err) for lam, err in table.failures]
        for row in sorted(rows, key=lambda r: float(r[0])):
            writer.writerow([_fmt(float(row[0]))] + list(row[1:]))
