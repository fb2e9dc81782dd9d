"""Readers for the simulation artifacts this renderer consumes.

Only the file formats are shared with the simulation package: curve CSVs
(`t,dist_hot,dist_cold`), drive-sweep CSVs (`lambda,noise,t_star,strength`
with empty fields for absent values), phase-grid CSVs
(`lambda,g,stable,t_star`), and the scenario summary JSON.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np


class ArtifactError(ValueError):
    """Input file missing, empty, or not matching the declared schema."""


def _reader(path: Path | str, required: set[str]) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"{path}: no such file")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = set(reader.fieldnames or ())
        missing = required - fields
        if missing:
            raise ArtifactError(f"{path}: missing column(s) {sorted(missing)}")
        rows = list(reader)
    if not rows:
        raise ArtifactError(f"{path}: no data rows")
    return rows


@dataclass(frozen=True)
class CurvePair:
    times: np.ndarray
    dist_hot: np.ndarray
    dist_cold: np.ndarray


def read_curves(path: Path | str) -> CurvePair:
    rows = _reader(path, {"t", "dist_hot", "dist_cold"})
    return CurvePair(
        times=np.array([float(r["t"]) for r in rows]),
        dist_hot=np.array([float(r["dist_hot"]) for r in rows]),
        dist_cold=np.array([float(r["dist_cold"]) for r in rows]),
    )


@dataclass(frozen=True)
class SweepPoint:
    lambda_drive: float
    noise: str
    t_star: Optional[float]
    strength: Optional[float]


def read_sweep(path: Path | str) -> list[SweepPoint]:
    rows = _reader(path, {"lambda", "noise", "t_star", "strength"})
    return [
        SweepPoint(
            lambda_drive=float(r["lambda"]),
            noise=r["noise"],
            t_star=float(r["t_star"]) if r["t_star"] else None,
            strength=float(r["strength"]) if r["strength"] else None,
        )
        for r in rows
    ]


@dataclass(frozen=True)
class PhaseGrid:
    lambdas: np.ndarray
    gs: np.ndarray
    t_star: np.ndarray  # shape (len(gs), len(lambdas)), NaN where absent


def read_phase(path: Path | str) -> PhaseGrid:
    rows = _reader(path, {"lambda", "g", "stable", "t_star"})
    lambdas = np.array(sorted({float(r["lambda"]) for r in rows}))
    gs = np.array(sorted({float(r["g"]) for r in rows}))
    grid = np.full((gs.size, lambdas.size), np.nan)
    li = {v: i for i, v in enumerate(lambdas)}
    gi = {v: i for i, v in enumerate(gs)}
    for r in rows:
        if r["stable"] == "true" and r["t_star"]:
            grid[gi[float(r["g"])], li[float(r["lambda"])]] = float(r["t_star"])
    return PhaseGrid(lambdas=lambdas, gs=gs, t_star=grid)


def read_summary(path: Path | str) -> dict:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"{path}: no such file")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(doc, dict):
        raise ArtifactError(f"{path}: expected a JSON object")
    return doc
