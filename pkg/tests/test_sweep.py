from __future__ import annotations

import pytest

from mpembasim.exceptions import ParameterError
from mpembasim.lyapunov import PropagatorConfig
from mpembasim.model import drift_matrix, routh_hurwitz_stable, spectral_stable
from mpembasim.presets import default_params
from mpembasim.sweep import (
    PhaseCell,
    SweepSpec,
    level_crossing_points,
    phase_diagram,
    strength_sweep,
    sweep_lambda,
    table1_presets,
)

FAST_WINDOW = PropagatorConfig(grid_dt=0.01, t_max=4.0)


def test_thread_count_env_override(monkeypatch):
    from mpembasim.sweep import _thread_count

    monkeypatch.setenv("MPEMBASIM_THREADS", "3")
    assert _thread_count() == 3
    monkeypatch.setenv("MPEMBASIM_THREADS", "zero")
    with pytest.raises(ParameterError, match="MPEMBASIM_THREADS"):
        _thread_count()


class TestSweepSpec:
    def test_grids(self):
        spec = SweepSpec(lambda_range=(0.4, 0.49, 10), g_range=(0.1, 0.5, 5))
        assert spec.lambda_values().size == 10
        assert spec.g_values().size == 5

    def test_too_few_points_rejected(self):
        with pytest.raises(ParameterError):
            SweepSpec(lambda_range=(0.4, 0.49, 1))

    def test_unknown_noise_tag_rejected(self):
        with pytest.raises(ParameterError):
            SweepSpec(noise_models=("purple",))


class TestSweepLambda:
    def test_records_cover_grid_including_absent(self):
        spec = SweepSpec(lambda_range=(0.40, 0.48, 3), noise_models=("white",),
                         window=FAST_WINDOW)
        records = sweep_lambda(spec)
        assert len(records) == 3
        # low drive has no crossing inside the short window, still recorded
        assert records[0].t_star is None
        assert records[-1].t_star == pytest.approx(0.905, abs=0.02)

    def test_white_crossing_shrinks_toward_threshold(self):
        spec = SweepSpec(lambda_range=(0.46, 0.49, 4), noise_models=("white",),
                         window=FAST_WINDOW)
        ts = [rec.t_star for rec in sweep_lambda(spec)]
        assert all(t is not None for t in ts)
        assert all(b <= a + 1e-4 for a, b in zip(ts, ts[1:]))

    def test_colored_records_carry_strength(self):
        spec = SweepSpec(lambda_range=(0.46, 0.48, 2), noise_models=("dual-weak",),
                         window=FAST_WINDOW)
        for rec in strength_sweep(spec):
            assert rec.strength is not None and rec.strength > 0

    def test_record_reproducible_from_cell_parameters(self):
        from mpembasim.sweep import lambda_cell

        spec = SweepSpec(lambda_range=(0.47, 0.48, 2), noise_models=("single-weak",),
                         window=FAST_WINDOW)
        for rec in sweep_lambda(spec):
            again = lambda_cell(rec.lambda_drive, rec.noise, FAST_WINDOW)
            assert again.t_star == rec.t_star
            assert again.strength == rec.strength


class TestPhaseDiagram:
    def test_grid_and_stability_mask(self):
        spec = SweepSpec(lambda_range=(0.44, 0.48, 3), g_range=(0.1, 0.3, 3),
                         noise_models=("white",), window=FAST_WINDOW)
        cells = phase_diagram(spec)
        assert len(cells) == 9
        for cell in cells:
            params = default_params(cell.lambda_drive, cell.g_coupling)
            expected = routh_hurwitz_stable(params) and spectral_stable(drift_matrix(params))
            assert cell.stable == expected
            if not cell.stable:
                assert cell.t_star is None

    def test_requires_g_range(self):
        with pytest.raises(ParameterError):
            phase_diagram(SweepSpec(lambda_range=(0.4, 0.49, 3)))

    def test_colored_crossing_region_contains_white(self):
        spec_kwargs = dict(lambda_range=(0.42, 0.48, 3), g_range=(0.15, 0.25, 2),
                           window=PropagatorConfig(grid_dt=0.01, t_max=6.0))
        white = phase_diagram(SweepSpec(noise_models=("white",), **spec_kwargs))
        colored = phase_diagram(SweepSpec(noise_models=("dual-moderate",), **spec_kwargs))
        white_set = {(c.lambda_drive, c.g_coupling) for c in white if c.t_star is not None}
        colored_set = {(c.lambda_drive, c.g_coupling) for c in colored if c.t_star is not None}
        assert white_set <= colored_set
        assert len(colored_set) > len(white_set)


class TestLevelMarker:
    def test_synthetic_level_set(self):
        cells = [PhaseCell(lam, g, True, t_star=float(lam * 10.0))
                 for lam in (0.1, 0.2, 0.3) for g in (0.1, 0.2)]
        points = level_crossing_points(cells, level=2.0)
        assert points, "expected level markers between t*=1 and t*=3 columns"
        for lam, _ in points:
            assert lam == pytest.approx(0.2, abs=0.1 + 1e-9)

    def test_absent_cells_skipped(self):
        cells = [PhaseCell(0.1, 0.1, True, None), PhaseCell(0.2, 0.1, True, 3.0)]
        assert level_crossing_points(cells, level=2.0) == []


class TestReferenceRows:
    def test_five_rows(self):
        rows = table1_presets()
        assert len(rows) == 5
        assert [row.lambda_drive for row in rows] == [0.0, 0.451, 0.451, 0.48, 0.48]
        assert {tag for row in rows for tag in row.scenarios} == {"white", "single", "dual"}

    def test_row_run_smoke(self):
        rows = table1_presets(window=FAST_WINDOW)
        results = rows[3].run()  # weak channels at drive 0.48
        assert results["white"].crossing.t_star == pytest.approx(0.905, abs=0.02)
        assert results["dual"].crossing.t_star < results["white"].crossing.t_star
