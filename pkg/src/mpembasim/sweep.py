"""Parameter studies: drive sweeps, the (drive, coupling) phase diagram,
and the five reference scenario bundles.

Cells are independent pure functions of their parameters; failures
(instability, boundary) are recorded per cell instead of aborting the
sweep.  Parallel evaluation uses a thread pool sized by the
MPEMBASIM_THREADS environment variable, with results always emitted in
input order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import ParameterError, SimulationError
from .lyapunov import PropagatorConfig
from .mpemba import Scenario, run_scenario
from .presets import NOISE_TAGS, noise_from_tag, standard_scenario

__all__ = [
    "SweepSpec",
    "LambdaRecord",
    "PhaseCell",
    "Table1Row",
    "lambda_cell",
    "phase_cell",
    "sweep_lambda",
    "strength_sweep",
    "phase_diagram",
    "level_crossing_points",
    "table1_presets",
]


def _thread_count() -> int:
    env = os.environ.get("MPEMBASIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParameterError(f"MPEMBASIM_THREADS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def _parallel_map(fn: Callable, items: Sequence) -> list:
    workers = _thread_count()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition for drive (and optionally coupling) sweeps."""

    lambda_range: tuple[float, float, int] = (0.40, 0.495, 20)
    g_range: Optional[tuple[float, float, int]] = None
    noise_models: tuple[str, ...] = ("white",)
    preset: Optional[str] = None
    window: PropagatorConfig = field(default_factory=PropagatorConfig)

    def __post_init__(self) -> None:
        if self.lambda_range[2] < 2:
            raise ParameterError("lambda_range needs at least 2 points")
        if self.g_range is not None and self.g_range[2] < 2:
            raise ParameterError("g_range needs at least 2 points")
        for tag in self.noise_models:
            if tag not in NOISE_TAGS:
                raise ParameterError(f"unknown noise tag {tag!r}; expected one of {NOISE_TAGS}")

    def lambda_values(self) -> np.ndarray:
        lo, hi, n = self.lambda_range
        return np.linspace(lo, hi, n)

    def g_values(self) -> np.ndarray:
        if self.g_range is None:
            raise ParameterError("this sweep needs a g_range")
        lo, hi, n = self.g_range
        return np.linspace(lo, hi, n)


@dataclass(frozen=True)
class LambdaRecord:
    lambda_drive: float
    noise: str
    t_star: Optional[float]
    strength: Optional[float]
    error: Optional[str] = None


@dataclass(frozen=True)
class PhaseCell:
    lambda_drive: float
    g_coupling: float
    stable: bool
    t_star: Optional[float]
    strength: Optional[float] = None


def _cell_scenario(lam: float, tag: str, window: PropagatorConfig, g: float = 0.2) -> Scenario:
    return standard_scenario(lambda_drive=lam, noise=noise_from_tag(tag),
                             g_coupling=g, window=window)


def _run_cell(lam: float, tag: str, window: PropagatorConfig, g: float = 0.2):
    try:
        result = run_scenario(_cell_scenario(lam, tag, window, g))
        return result, None
    except SimulationError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def lambda_cell(lam: float, tag: str, window: PropagatorConfig) -> LambdaRecord:
    """One drive-sweep cell; errors are recorded, never raised."""
    result, err = _run_cell(lam, tag, window)
    if result is None:
        return LambdaRecord(lam, tag, None, None, err)
    strength = None if np.isnan(result.strength) else float(result.strength)
    return LambdaRecord(lam, tag, result.crossing.t_star, strength)


def phase_cell(lam: float, g: float, tag: str, window: PropagatorConfig) -> PhaseCell:
    """One phase-diagram cell; instability collapses to stable=false."""
    result, _ = _run_cell(lam, tag, window, g)
    if result is None:
        return PhaseCell(lam, g, stable=False, t_star=None)
    strength = None if np.isnan(result.strength) else float(result.strength)
    return PhaseCell(lam, g, stable=True, t_star=result.crossing.t_star, strength=strength)


def sweep_lambda(spec: SweepSpec) -> list[LambdaRecord]:
    """Crossing time and strength ratio on the drive grid, per noise model.

    Unstable or non-crossing cells are kept in the output with absent
    fields rather than dropped.
    """
    cells = [(lam, tag) for tag in spec.noise_models for lam in spec.lambda_values()]
    return _parallel_map(lambda cell: lambda_cell(cell[0], cell[1], spec.window), cells)


def strength_sweep(spec: SweepSpec) -> list[LambdaRecord]:
    """Slow-mode strength ratio on the drive grid.

    Same records as ``sweep_lambda``; cells with strength above 1 mark
    spikes of the ratio rather than anomalous relaxation.
    """
    return sweep_lambda(spec)


def phase_diagram(spec: SweepSpec) -> list[PhaseCell]:
    """Stability mask and crossing time on the (drive, coupling) grid."""
    if spec.g_range is None:
        raise ParameterError("phase_diagram requires a g_range")
    if len(spec.noise_models) != 1:
        raise ParameterError("phase_diagram runs one noise model at a time")
    tag = spec.noise_models[0]
    cells = [(lam, g) for lam in spec.lambda_values() for g in spec.g_values()]
    return _parallel_map(lambda cell: phase_cell(cell[0], cell[1], tag, spec.window), cells)


def level_crossing_points(cells: Sequence[PhaseCell], level: float = 2.0) -> list[tuple[float, float]]:
    """Midpoints of grid edges where the crossing time passes the level.

    A quick level-set marker for the phase diagram (the renderer draws the
    proper contour from the gridded values).
    """
    lams = sorted({c.lambda_drive for c in cells})
    gs = sorted({c.g_coupling for c in cells})
    grid = {(c.lambda_drive, c.g_coupling): c.t_star for c in cells}
    points = []
    for i, lam in enumerate(lams):
        for j, g in enumerate(gs):
            t0 = grid.get((lam, g))
            if t0 is None:
                continue
            for lam2, g2 in ((lams[i + 1], g) if i + 1 < len(lams) else (None, None),
                             (lam, gs[j + 1]) if j + 1 < len(gs) else (None, None)):
                if lam2 is None:
                    continue
                t1 = grid.get((lam2, g2))
                if t1 is None:
                    continue
                if (t0 - level) * (t1 - level) <= 0 and t0 != t1:
                    frac = (level - t0) / (t1 - t0)
                    points.append((lam + frac * (lam2 - lam), g + frac * (g2 - g)))
    return points


@dataclass(frozen=True)
class Table1Row:
    """One reference row: a regime, a drive value, and the three noise legs."""

    name: str
    regime: str
    lambda_drive: float
    scenarios: dict  # tag ("white" | "single" | "dual") -> Scenario

    def run(self) -> dict:
        out = {}
        for tag, scenario in self.scenarios.items():
            out[tag] = run_scenario(scenario)
        return out


def table1_presets(window: Optional[PropagatorConfig] = None) -> list[Table1Row]:
    """The five reference rows: drive in {0, 0.451, 0.48} under the weak
    channel set, plus {0.451, 0.48} under the moderate set."""
    window = window or PropagatorConfig()
    rows = [
        ("weak-0", "weak", 0.0),
        ("weak-0451", "weak", 0.451),
        ("moderate-0451", "moderate", 0.451),
        ("weak-048", "weak", 0.48),
        ("moderate-048", "moderate", 0.48),
    ]
    out = []
    for name, regime, lam in rows:
        scenarios = {
            "white": standard_scenario(lam, "white", window=window),
            "single": standard_scenario(lam, f"single-{regime}", window=window),
            "dual": standard_scenario(lam, f"dual-{regime}", window=window),
        }
        out.append(Table1Row(name=name, regime=regime, lambda_drive=lam, scenarios=scenarios))
    return out
