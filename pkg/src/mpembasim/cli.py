"""Command-line front door.

Subcommands: steady, scenario, sweep, phase, oracle, table1.  Every
command reads one JSON configuration (defaults reproduce the drive-0.48
white-noise comparison), writes CSV/JSON artifacts named
``<command>-<preset-or-hash>.*`` into the output directory, and is a pure
function of (config, seed): re-running overwrites identical files.

Exit codes: 0 success, 1 numerical failure (e.g. unstable parameters),
2 usage or configuration error.  MPEMBASIM_THREADS limits sweep
parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .config import RunConfig, config_hash, default_config, load_config, parse_config
from .exceptions import ConfigError, ParameterError, SimulationError
from .lyapunov import lyapunov_residual, steady_state
from .model import DualLorentzian, SingleLorentzian, White, diffusion_matrix, drift_matrix
from .montecarlo import EnsembleConfig, integrate_ensemble, ou_autocorrelation, sample_initial
from .mpemba import run_scenario
from .presets import NAMED_PRESETS, NOISE_TAGS
from .sweep import (
    SweepSpec,
    lambda_cell,
    level_crossing_points,
    phase_cell,
    table1_presets,
)
from .lyapunov import propagate


def _noise_json(tag: str) -> dict:
    from .presets import noise_from_tag

    noise = noise_from_tag(tag)
    if isinstance(noise, White):
        return {"kind": "white"}
    if isinstance(noise, SingleLorentzian):
        ch = noise.channel
        return {"kind": "single", "gamma_l": ch.gamma_l, "d0": ch.d0, "g_l": ch.g_l}
    assert isinstance(noise, DualLorentzian)
    def chan(ch):
        return {"gamma_l": ch.gamma_l, "d0": ch.d0, "g_l": ch.g_l}
    return {"kind": "dual", "channel_a": chan(noise.channel_a), "channel_b": chan(noise.channel_b)}


def _build_config(args: argparse.Namespace) -> tuple[RunConfig, str]:
    # config file first, then preset, then individual flags on top
    if args.config:
        overrides = load_config(args.config).raw
    else:
        overrides = default_config()
    if args.preset:
        if args.preset not in NAMED_PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: {', '.join(sorted(NAMED_PRESETS))}")
        lam, tag = NAMED_PRESETS[args.preset]
        overrides["params"] = {**overrides["params"], "lambda_drive": lam}
        overrides["noise"] = _noise_json(tag)
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
        overrides["ensemble"] = {**overrides["ensemble"], "seed": args.seed}
    if args.t_max is not None:
        overrides["window"] = {**overrides["window"], "t_max": args.t_max}
    if args.distance_full:
        overrides["distance_full"] = True
    if args.prep_mode is not None:
        overrides["prep_mode"] = args.prep_mode
    if args.squeeze_target is not None:
        overrides["squeeze_target"] = args.squeeze_target
    if args.eta_init is not None:
        overrides["eta_init"] = args.eta_init
    cfg = parse_config(overrides)
    label = args.preset if args.preset else config_hash(cfg)
    return cfg, label


def _out_path(cfg: RunConfig, name: str) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg.out_dir / name


def cmd_steady(cfg: RunConfig, label: str) -> int:
    if cfg.params.delta <= 0:
        print(
            f"error: drive at or beyond the stability boundary "
            f"(delta = {cfg.params.delta:.6g} <= 0 at lambda_drive = "
            f"{cfg.params.lambda_drive}); no steady state",
            file=sys.stderr,
        )
        return 1
    a = drift_matrix(cfg.params, cfg.noise)
    d = diffusion_matrix(cfg.params, cfg.noise)
    sigma_ss = steady_state(a, d)
    residual = lyapunov_residual(a, d, sigma_ss)
    rel = residual / max(float(np.linalg.norm(d)), 1e-300)
    report = {
        "sigma_ss": sigma_ss.to_json_dict(),
        "residual": residual,
        "residual_rel": rel,
    }
    path = _out_path(cfg, f"steady-{label}.json")
    serialize.write_json(report, path)
    print(f"steady state written to {path} (relative residual {rel:.3e})")
    return 0


def cmd_scenario(cfg: RunConfig, label: str) -> int:
    result = run_scenario(cfg.scenario())
    csv_path = _out_path(cfg, f"scenario-{label}.csv")
    serialize.write_curves_csv(result.times, result.dist_hot, result.dist_cold, csv_path)
    summary = result.summary_dict()
    summary.update({
        "slow_group_size": result.slow_group_size,
        "criteria_agree": result.criteria_agree,
        "grazing": result.crossing.grazing,
    })
    json_path = _out_path(cfg, f"scenario-{label}.json")
    serialize.write_json(summary, json_path)
    t_star = result.crossing.t_star
    print(f"curves written to {csv_path}")
    print(f"summary written to {json_path} "
          f"(t_star = {'none' if t_star is None else f'{t_star:.6g}'})")
    return 0


def _load_cell_cache(path: Path) -> dict:
    cache: dict = {}
    if path.exists():
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            cache[tuple(rec["key"])] = rec
    return cache


def cmd_sweep(cfg: RunConfig, label: str, noise_tags: list[str], count: int) -> int:
    spec = SweepSpec(
        lambda_range=(0.40, 0.495, count),
        noise_models=tuple(noise_tags),
        window=cfg.window,
    )
    cache_path = _out_path(cfg, f"sweep-{label}.cells.jsonl")
    cache = _load_cell_cache(cache_path)
    records = []
    with open(cache_path, "a") as cache_fh:
        for tag in spec.noise_models:
            for lam in spec.lambda_values():
                key = (round(float(lam), 12), 0.2, tag)
                hit = cache.get(key)
                if hit is not None:
                    from .sweep import LambdaRecord
                    records.append(LambdaRecord(key[0], tag, hit["t_star"], hit["strength"],
                                                hit.get("error")))
                    continue
                rec = lambda_cell(float(lam), tag, spec.window)
                records.append(rec)
                cache_fh.write(json.dumps({
                    "key": list(key), "t_star": rec.t_star,
                    "strength": rec.strength, "error": rec.error,
                }) + "\n")
                cache_fh.flush()
    path = _out_path(cfg, f"sweep-{label}.csv")
    serialize.write_lambda_sweep_csv(records, path)
    print(f"sweep ({len(records)} cells) written to {path}")
    return 0


def cmd_phase(cfg: RunConfig, label: str, noise_tag: str, count: int) -> int:
    spec = SweepSpec(
        lambda_range=(0.40, 0.495, count),
        g_range=(0.05, 0.5, count),
        noise_models=(noise_tag,),
        window=cfg.window,
    )
    cache_path = _out_path(cfg, f"phase-{label}.cells.jsonl")
    cache = _load_cell_cache(cache_path)
    cells = []
    with open(cache_path, "a") as cache_fh:
        for lam in spec.lambda_values():
            for g in spec.g_values():
                key = (round(float(lam), 12), round(float(g), 12), noise_tag)
                hit = cache.get(key)
                if hit is not None:
                    from .sweep import PhaseCell
                    cells.append(PhaseCell(key[0], key[1], hit["stable"], hit["t_star"],
                                           hit.get("strength")))
                    continue
                cell = phase_cell(float(lam), float(g), noise_tag, spec.window)
                cells.append(cell)
                cache_fh.write(json.dumps({
                    "key": list(key), "stable": cell.stable,
                    "t_star": cell.t_star, "strength": cell.strength,
                }) + "\n")
                cache_fh.flush()
    path = _out_path(cfg, f"phase-{label}.csv")
    serialize.write_phase_csv(cells, path)
    contour = level_crossing_points(cells, level=2.0)
    serialize.write_json(
        {"level": 2.0, "points": [[lam, g] for lam, g in contour]},
        _out_path(cfg, f"phase-{label}-contour.json"),
    )
    print(f"phase diagram ({len(cells)} cells) written to {path}")
    return 0


def cmd_oracle(cfg: RunConfig, label: str) -> int:
    scenario = cfg.scenario()
    a = drift_matrix(cfg.params, cfg.noise)
    d = diffusion_matrix(cfg.params, cfg.noise)
    hot0, _ = scenario.initial_covariances()
    init = sample_initial(hot0, cfg.ensemble.n_traj, cfg.ensemble.seed)
    series = integrate_ensemble(a, d, init, cfg.ensemble)
    serialize.write_ensemble_csv(series, _out_path(cfg, f"oracle-{label}.csv"))

    worst = 0.0
    n = cfg.ensemble.n_traj
    for t, emp in zip(series.times, series.covariances):
        exact = propagate(a, d, hot0, float(t)).matrix
        se = np.sqrt((np.outer(np.diag(exact), np.diag(exact)) + exact**2) / n)
        tol = np.maximum(3.0 * se, 0.02 * np.abs(exact))
        tol = np.maximum(tol, 1e-12)
        worst = max(worst, float(np.max(np.abs(emp - exact) / tol)))
    report = {
        "n_traj": n,
        "dt": cfg.ensemble.dt,
        "t_max": cfg.ensemble.t_max,
        "seed": cfg.ensemble.seed,
        "worst_deviation_over_tolerance": worst,
        "pass": worst <= 1.0,
    }

    channels = []
    if isinstance(cfg.noise, SingleLorentzian):
        channels = [cfg.noise.channel]
    elif isinstance(cfg.noise, DualLorentzian):
        channels = [cfg.noise.channel_a, cfg.noise.channel_b]
    if channels:
        fits = []
        for i, ch in enumerate(channels):
            ou_cfg = EnsembleConfig(
                n_traj=1000, dt=0.01, t_max=6.0 / ch.gamma_l,
                seed=cfg.ensemble.seed + i, record_stride=5)
            fit = ou_autocorrelation(ch, ou_cfg)
            fits.append({
                "gamma_l": ch.gamma_l, "d0": ch.d0, "g_l": ch.g_l,
                "stationary_variance": ch.stationary_variance,
                **fit.to_json_dict(),
            })
        report["channel_fits"] = fits

    path = _out_path(cfg, f"oracle-{label}.json")
    serialize.write_json(report, path)
    print(f"oracle report written to {path} "
          f"(worst deviation/tolerance = {worst:.3f}, {'pass' if worst <= 1 else 'FAIL'})")
    return 0 if worst <= 1.0 else 1


def cmd_table1(cfg: RunConfig, label: str) -> int:
    rows = table1_presets(window=cfg.window)
    path = _out_path(cfg, f"table1-{label}.csv")
    with open(path, "w", newline="") as fh:
        fh.write("regime,lambda,t_white,t_single,t_dual\n")
        for row in rows:
            results = row.run()
            cells = [serialize.fmt9(results[tag].crossing.t_star)
                     for tag in ("white", "single", "dual")]
            fh.write(f"{row.regime},{serialize.fmt9(row.lambda_drive)},"
                     f"{cells[0]},{cells[1]},{cells[2]}\n")
    print(f"reference table written to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpembasim",
        description="Covariance-matrix relaxation studies of driven coupled oscillators",
        epilog="Set MPEMBASIM_THREADS to bound sweep parallelism.",
    )
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--preset", help=f"named preset ({', '.join(sorted(NAMED_PRESETS))})")
    parser.add_argument("--out", help="output directory (default from config)")
    parser.add_argument("--seed", type=int, help="override the run seed")
    parser.add_argument("--t-max", type=float, dest="t_max", help="observation window")
    parser.add_argument("--distance-full", action="store_true",
                        help="distance over the full embedded matrix instead of the system block")
    parser.add_argument("--prep-mode", choices=["both", "hot-only"],
                        help="squeeze both states or the hot state only")
    parser.add_argument("--squeeze-target", choices=["a", "both"],
                        help="apply the squeeze to oscillator a or to both")
    parser.add_argument("--eta-init", choices=["zero", "stationary"],
                        help="initial colored-channel statistics")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("steady", help="steady-state covariance and residual")
    sub.add_parser("scenario", help="hot/cold curves, crossing time, summary")
    p_sweep = sub.add_parser("sweep", help="crossing time and strength over the drive grid")
    p_sweep.add_argument("--noise", nargs="+", default=["white"], choices=list(NOISE_TAGS))
    p_sweep.add_argument("--points", type=int, default=20)
    p_phase = sub.add_parser("phase", help="(drive, coupling) stability/crossing grid")
    p_phase.add_argument("--noise", default="white", choices=list(NOISE_TAGS))
    p_phase.add_argument("--points", type=int, default=20)
    sub.add_parser("oracle", help="Monte-Carlo ensemble check against the exact propagator")
    sub.add_parser("table1", help="run the five reference rows")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config and not Path(args.config).exists():
            parser.error(f"config file not found: {args.config}")
        cfg, label = _build_config(args)
        if args.command == "steady":
            return cmd_steady(cfg, label)
        if args.command == "scenario":
            return cmd_scenario(cfg, label)
        if args.command == "sweep":
            return cmd_sweep(cfg, label, args.noise, args.points)
        if args.command == "phase":
            return cmd_phase(cfg, label, args.noise, args.points)
        if args.command == "oracle":
            return cmd_oracle(cfg, label)
        if args.command == "table1":
            return cmd_table1(cfg, label)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (SimulationError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
