from __future__ import annotations

import numpy as np
import pytest

from mpembasim.exceptions import ConfigError
from mpembasim.lyapunov import DistanceSeries
from mpembasim.montecarlo import EnsembleSeries
from mpembasim.serialize import (
    fmt9,
    read_lambda_sweep_csv,
    read_phase_csv,
    write_curves_csv,
    write_distance_csv,
    write_ensemble_csv,
    write_lambda_sweep_csv,
    write_phase_csv,
)
from mpembasim.sweep import LambdaRecord, PhaseCell


def test_fmt9():
    assert fmt9(None) == ""
    assert fmt9(0.123456789123) == "0.123456789"
    assert fmt9(2.0) == "2"


def test_distance_csv_header(tmp_path):
    series = DistanceSeries(np.array([0.0, 0.1]), np.array([1.0, 0.5]))
    path = tmp_path / "curve.csv"
    write_distance_csv(series, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,distance"
    assert lines[1] == "0,1"


def test_curves_csv_header(tmp_path):
    path = tmp_path / "curves.csv"
    write_curves_csv(np.array([0.0]), np.array([2.0]), np.array([1.0]), path)
    assert path.read_text().splitlines()[0] == "t,dist_hot,dist_cold"


def test_lambda_sweep_round_trip(tmp_path):
    records = [
        LambdaRecord(0.44, "white", None, None),
        LambdaRecord(0.48, "dual-weak", 0.883581542, 0.999999999),
    ]
    path = tmp_path / "sweep.csv"
    write_lambda_sweep_csv(records, path)
    again = read_lambda_sweep_csv(path)
    assert again[0].t_star is None and again[0].strength is None
    assert again[1].t_star == pytest.approx(records[1].t_star, rel=1e-9)
    assert again[1].noise == "dual-weak"
    # absent values serialise as empty fields, not sentinels
    assert ",,," not in path.read_text().splitlines()[0]
    assert path.read_text().splitlines()[1].endswith(",,")


def test_write_read_write_byte_stable(tmp_path):
    # the 9-significant-digit format is a fixed point of its own round trip
    records = [LambdaRecord(0.48123456789, "white", 0.904592590332, 1.228838287)]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_lambda_sweep_csv(records, first)
    write_lambda_sweep_csv(read_lambda_sweep_csv(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_phase_round_trip(tmp_path):
    cells = [PhaseCell(0.44, 0.2, True, 1.465757), PhaseCell(0.40, 0.5, False, None)]
    path = tmp_path / "phase.csv"
    write_phase_csv(cells, path)
    again = read_phase_csv(path)
    assert again[0].t_star == pytest.approx(1.465757)
    assert again[1].stable is False and again[1].t_star is None


def test_schema_mismatch_names_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError, match="expected columns"):
        read_lambda_sweep_csv(path)
    with pytest.raises(ConfigError, match="expected columns"):
        read_phase_csv(path)


def test_ensemble_csv_upper_triangle(tmp_path):
    cov = np.arange(16.0).reshape(4, 4)
    cov = (cov + cov.T) / 2
    series = EnsembleSeries(times=np.array([0.0]), covariances=cov[None, :, :], n_traj=10)
    path = tmp_path / "ens.csv"
    write_ensemble_csv(series, path)
    header = path.read_text().splitlines()[0].split(",")
    assert header[0] == "t"
    assert len(header) == 1 + 10  # 4x4 upper triangle
    assert "sigma_11" in header and "sigma_44" in header and "sigma_21" not in header
