"""The four figure kinds rendered from simulation artifacts.

distance_overlay  hot/cold distance curves with the crossing marked
lambda_sweep      first crossing time against drive strength, per noise tag
strength          slow-mode amplitude ratio against drive strength
phase_heatmap     crossing time on the (drive, coupling) grid; cells with
                  no crossing stay white; the t*=2 level is drawn in red

`build_figure` returns the matplotlib figure plus a small metadata dict
(used by tests and by callers that post-process); `render` saves it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import ArtifactError, read_curves, read_phase, read_summary, read_sweep

KINDS = ("distance_overlay", "lambda_sweep", "strength", "phase_heatmap")
CONTOUR_LEVEL = 2.0


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: dict
    output: Optional[str] = None
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ArtifactError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FigureSpec":
        if "kind" not in doc:
            raise ArtifactError('figure spec needs a "kind" field')
        if "inputs" not in doc or not isinstance(doc["inputs"], dict):
            raise ArtifactError('figure spec needs an "inputs" object')
        return cls(
            kind=doc["kind"],
            inputs=doc["inputs"],
            output=doc.get("output"),
            title=doc.get("title", ""),
            xlabel=doc.get("xlabel", ""),
            ylabel=doc.get("ylabel", ""),
            extra=doc.get("extra", {}),
        )


def _require_input(spec: FigureSpec, key: str) -> str:
    try:
        return spec.inputs[key]
    except KeyError:
        raise ArtifactError(f'{spec.kind}: missing input "{key}"') from None


def _interpolated_crossing(curves) -> Optional[float]:
    diff = curves.dist_hot - curves.dist_cold
    change = np.flatnonzero((diff[:-1] > 0) & (diff[1:] <= 0))
    if change.size == 0:
        return None
    i = int(change[0])
    frac = diff[i] / (diff[i] - diff[i + 1])
    return float(curves.times[i] + frac * (curves.times[i + 1] - curves.times[i]))


def _distance_overlay(spec: FigureSpec, ax) -> dict:
    curves = read_curves(_require_input(spec, "curves"))
    ax.plot(curves.times, curves.dist_hot, label="hot", color="tab:red")
    ax.plot(curves.times, curves.dist_cold, label="cold", color="tab:blue")
    t_star: Optional[float] = None
    if "summary" in spec.inputs:
        t_star = read_summary(spec.inputs["summary"]).get("t_star")
    if t_star is None:
        t_star = _interpolated_crossing(curves)
    if t_star is not None:
        d_at = float(np.interp(t_star, curves.times, curves.dist_hot))
        ax.plot([t_star], [d_at], "ko", ms=7, zorder=5, label=f"crossing t*={t_star:.3g}")
        ax.axvline(t_star, color="k", lw=0.6, ls=":")
    ax.set_xlabel(spec.xlabel or "time")
    ax.set_ylabel(spec.ylabel or "distance to steady state")
    ax.legend()
    return {"t_star": t_star, "n_points": curves.times.size}


_MARKERS = ("o", "s", "^", "d", "v")


def _lambda_sweep(spec: FigureSpec, ax) -> dict:
    points = read_sweep(_require_input(spec, "sweep"))
    tags = sorted({p.noise for p in points})
    plotted = {}
    for marker, tag in zip(_MARKERS, tags):
        xs = [p.lambda_drive for p in points if p.noise == tag and p.t_star is not None]
        ys = [p.t_star for p in points if p.noise == tag and p.t_star is not None]
        ax.plot(xs, ys, marker, ls="-", ms=5, label=tag)
        plotted[tag] = len(xs)
    ax.set_xlabel(spec.xlabel or "drive strength")
    ax.set_ylabel(spec.ylabel or "first crossing time")
    ax.legend()
    return {"points_per_tag": plotted, "tags": tags}


def _strength(spec: FigureSpec, ax) -> dict:
    points = read_sweep(_require_input(spec, "sweep"))
    tags = sorted({p.noise for p in points})
    plotted = {}
    for marker, tag in zip(_MARKERS, tags):
        xs = [p.lambda_drive for p in points if p.noise == tag and p.strength is not None]
        ys = [p.strength for p in points if p.noise == tag and p.strength is not None]
        ax.plot(xs, ys, marker, ls="-", ms=5, label=tag)
        plotted[tag] = len(xs)
    ax.axhline(1.0, color="k", lw=0.8, ls="--")
    ax.set_xlabel(spec.xlabel or "drive strength")
    ax.set_ylabel(spec.ylabel or "hot/cold slow-mode amplitude ratio")
    ax.legend()
    return {"points_per_tag": plotted, "tags": tags}


def _phase_heatmap(spec: FigureSpec, ax) -> dict:
    grid = read_phase(_require_input(spec, "phase"))
    masked = np.ma.masked_invalid(grid.t_star)
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("white")
    mesh = ax.pcolormesh(grid.lambdas, grid.gs, masked, cmap=cmap, shading="nearest")
    plt.colorbar(mesh, ax=ax, label=spec.extra.get("cbar_label", "first crossing time"))
    contour_drawn = False
    finite = np.isfinite(grid.t_star)
    level = float(spec.extra.get("contour_level", CONTOUR_LEVEL))
    if (finite.sum() >= 4 and np.nanmin(grid.t_star) < level < np.nanmax(grid.t_star)):
        ax.contour(grid.lambdas, grid.gs, np.where(finite, grid.t_star, np.nan),
                   levels=[level], colors="red", linewidths=1.6)
        contour_drawn = True
    ax.set_xlabel(spec.xlabel or "drive strength")
    ax.set_ylabel(spec.ylabel or "coupling strength")
    return {
        "masked_cells": int(masked.mask.sum()) if masked.mask is not np.ma.nomask else 0,
        "contour_drawn": contour_drawn,
        "contour_level": level,
        "shape": grid.t_star.shape,
    }


_BUILDERS = {
    "distance_overlay": _distance_overlay,
    "lambda_sweep": _lambda_sweep,
    "strength": _strength,
    "phase_heatmap": _phase_heatmap,
}


def build_figure(spec: FigureSpec):
    """Build the figure; returns (matplotlib Figure, metadata dict)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4), dpi=120)
    try:
        meta = _BUILDERS[spec.kind](spec, ax)
    except ArtifactError:
        plt.close(fig)
        raise
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    return fig, meta


def render(spec: FigureSpec) -> Path:
    """Render the spec to its output image; identical inputs give an
    identical file."""
    if not spec.output:
        raise ArtifactError("figure spec has no output path")
    fig, _ = build_figure(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata={"Software": None})
    plt.close(fig)
    return out
