"""CSV and JSON writers/readers for every artifact the tools emit.

Conventions: floats print with 9 significant digits in sweep CSVs; absent
crossings serialize as an empty CSV field and JSON null, never a sentinel
number; files are written atomically enough for reruns to overwrite
identically (same inputs, same bytes).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .exceptions import ConfigError
from .lyapunov import DistanceSeries
from .montecarlo import EnsembleSeries
from .sweep import LambdaRecord, PhaseCell

__all__ = [
    "fmt9",
    "write_json",
    "write_distance_csv",
    "write_curves_csv",
    "write_lambda_sweep_csv",
    "read_lambda_sweep_csv",
    "write_phase_csv",
    "read_phase_csv",
    "write_ensemble_csv",
]


def fmt9(value: Optional[float]) -> str:
    """9-significant-digit float, empty string for absent values."""
    if value is None:
        return ""
    return f"{value:.9g}"


def _coerce(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialise {type(value).__name__}")


def write_json(obj: dict, path: Path | str) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_coerce) + "\n")


def write_distance_csv(series: DistanceSeries, path: Path | str) -> None:
    """Single-leg curve: header t,distance."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "distance"])
        for t, dist in zip(series.times, series.distances):
            writer.writerow([fmt9(float(t)), fmt9(float(dist))])


def write_curves_csv(times: np.ndarray, dist_hot: np.ndarray, dist_cold: np.ndarray,
                     path: Path | str) -> None:
    """Combined hot/cold curves: header t,dist_hot,dist_cold."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "dist_hot", "dist_cold"])
        for t, dh, dc in zip(times, dist_hot, dist_cold):
            writer.writerow([fmt9(float(t)), fmt9(float(dh)), fmt9(float(dc))])


def write_lambda_sweep_csv(records: Sequence[LambdaRecord], path: Path | str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "noise", "t_star", "strength"])
        for rec in records:
            writer.writerow([fmt9(rec.lambda_drive), rec.noise,
                             fmt9(rec.t_star), fmt9(rec.strength)])


def read_lambda_sweep_csv(path: Path | str) -> list[LambdaRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"lambda", "noise", "t_star", "strength"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ConfigError(f"{path}: expected columns {sorted(required)}")
        for row in reader:
            records.append(LambdaRecord(
                lambda_drive=float(row["lambda"]),
                noise=row["noise"],
                t_star=float(row["t_star"]) if row["t_star"] else None,
                strength=float(row["strength"]) if row["strength"] else None,
            ))
    return records


def write_phase_csv(cells: Sequence[PhaseCell], path: Path | str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "g", "stable", "t_star"])
        for cell in cells:
            writer.writerow([fmt9(cell.lambda_drive), fmt9(cell.g_coupling),
                             "true" if cell.stable else "false", fmt9(cell.t_star)])


def read_phase_csv(path: Path | str) -> list[PhaseCell]:
    cells = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"lambda", "g", "stable", "t_star"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ConfigError(f"{path}: expected columns {sorted(required)}")
        for row in reader:
            cells.append(PhaseCell(
                lambda_drive=float(row["lambda"]),
                g_coupling=float(row["g"]),
                stable=row["stable"] == "true",
                t_star=float(row["t_star"]) if row["t_star"] else None,
            ))
    return cells


def _upper_triangle_labels(dim: int) -> list[str]:
    return [f"sigma_{i + 1}{j + 1}" for i in range(dim) for j in range(i, dim)]


def write_ensemble_csv(series: EnsembleSeries, path: Path | str) -> None:
    """Empirical covariance series, upper triangle flattened per row."""
    dim = series.covariances.shape[1]
    idx = [(i, j) for i in range(dim) for j in range(i, dim)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + _upper_triangle_labels(dim))
        for t, cov in zip(series.times, series.covariances):
            writer.writerow([fmt9(float(t))] + [fmt9(float(cov[i, j])) for i, j in idx])
