"""Run configuration: JSON document -> typed objects.

Every field defaults to the reference operating point, so an empty
configuration reproduces the drive-0.48 white-noise comparison.  Parse
errors name the offending path.

Schema (all keys optional):

    {
      "params":  {"omega_a", "delta_b", "lambda_drive", "g_coupling",
                  "gamma_a", "gamma_b", "nbar_a", "nbar_b"},
      "noise":   {"kind": "white"}
               | {"kind": "single", "gamma_l", "d0", "g_l"}
               | {"kind": "dual", "channel_a": {...}, "channel_b": {...}},
      "hot":     {"nbar_a", "nbar_b", "squeeze": {"r", "phi"} | null},
      "cold":    {"nbar_a", "nbar_b", "squeeze": {...} | null},
      "prep_mode": "both" | "hot-only",
      "squeeze_target": "a" | "both",
      "eta_init": "zero" | "stationary" | <number>,
      "distance_full": bool,
      "window":  {"grid_dt", "t_max"},
      "ensemble": {"n_traj", "dt", "t_max", "seed", "record_stride"},
      "out_dir": str,
      "seed": int
    }
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .exceptions import ConfigError, ParameterError
from .gaussian_states import (
    EtaInitPolicy,
    PreparationMode,
    SqueezeParams,
    SqueezeScope,
    SqueezeTarget,
)
from .lyapunov import PropagatorConfig
from .model import DualLorentzian, LorentzianChannel, NoiseModel, SingleLorentzian, SystemParams, White
from .montecarlo import EnsembleConfig
from .mpemba import Scenario, StatePrep
from .presets import COLD_NBAR, HOT_NBAR

__all__ = ["RunConfig", "default_config", "load_config", "parse_config", "config_hash"]


def default_config() -> dict:
    """Reference configuration as a plain JSON-ready dict."""
    return {
        "params": {
            "omega_a": 1.0, "delta_b": 1.0, "lambda_drive": 0.48, "g_coupling": 0.2,
            "gamma_a": 0.45, "gamma_b": 0.45, "nbar_a": 1.0, "nbar_b": 5.0,
        },
        "noise": {"kind": "white"},
        "hot": {"nbar_a": HOT_NBAR, "nbar_b": HOT_NBAR,
                "squeeze": {"r": 1.0, "phi": math.pi / 4.0}},
        "cold": {"nbar_a": COLD_NBAR, "nbar_b": COLD_NBAR,
                 "squeeze": {"r": 1.0, "phi": math.pi / 4.0}},
        "prep_mode": "both",
        "squeeze_target": "a",
        "eta_init": "zero",
        "distance_full": False,
        "window": {"grid_dt": 1e-2, "t_max": 20.0},
        "ensemble": {"n_traj": 20000, "dt": 1e-3, "t_max": 5.0,
                     "seed": 1234, "record_stride": 100},
        "out_dir": ".",
        "seed": 1234,
    }


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = dict(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"{where}: unknown configuration key")
        if isinstance(base[key], dict) and isinstance(value, dict) and key not in ("noise", "hot", "cold"):
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = value
    return out


def _number(doc: dict, path: str, key: str) -> float:
    try:
        value = doc[key]
    except KeyError:
        raise ConfigError(f"{path}.{key}: missing required field") from None
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _channel(doc: dict, path: str) -> LorentzianChannel:
    try:
        return LorentzianChannel(
            gamma_l=_number(doc, path, "gamma_l"),
            d0=_number(doc, path, "d0"),
            g_l=_number(doc, path, "g_l"),
        )
    except ParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _noise(doc: Any) -> NoiseModel:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError('noise: expected an object with a "kind" field')
    kind = doc["kind"]
    if kind == "white":
        return White()
    if kind == "single":
        return SingleLorentzian(_channel(doc, "noise"))
    if kind == "dual":
        for sub in ("channel_a", "channel_b"):
            if sub not in doc:
                raise ConfigError(f"noise.{sub}: missing for dual noise")
        return DualLorentzian(
            _channel(doc["channel_a"], "noise.channel_a"),
            _channel(doc["channel_b"], "noise.channel_b"),
        )
    raise ConfigError(f'noise.kind: must be "white", "single" or "dual", got {kind!r}')


def _squeeze(doc: Any, path: str) -> Optional[SqueezeParams]:
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected an object or null")
    try:
        return SqueezeParams(r=_number(doc, path, "r"), phi=_number(doc, path, "phi"))
    except ParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _prep(doc: Any, path: str, mode: PreparationMode) -> StatePrep:
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected an object")
    return StatePrep(
        nbar_a=_number(doc, path, "nbar_a"),
        nbar_b=_number(doc, path, "nbar_b"),
        squeeze=_squeeze(doc.get("squeeze"), f"{path}.squeeze"),
        mode=mode,
    )


def _eta(doc: Any) -> EtaInitPolicy:
    if doc == "zero":
        return EtaInitPolicy.zero()
    if doc == "stationary":
        return EtaInitPolicy.stationary()
    if isinstance(doc, (int, float)) and not isinstance(doc, bool):
        return EtaInitPolicy.custom(float(doc))
    raise ConfigError(f'eta_init: must be "zero", "stationary" or a number, got {doc!r}')


@dataclass(frozen=True)
class RunConfig:
    """Typed run configuration for the command-line tools."""

    params: SystemParams
    noise: NoiseModel
    hot_prep: StatePrep
    cold_prep: StatePrep
    prep_mode: PreparationMode
    eta_policy: EtaInitPolicy
    distance_full: bool
    window: PropagatorConfig
    ensemble: EnsembleConfig
    out_dir: Path
    seed: int
    raw: dict = field(repr=False, default_factory=dict)

    def scenario(self) -> Scenario:
        hot, cold = self.hot_prep, self.cold_prep
        if self.prep_mode.scope is SqueezeScope.HOT_ONLY:
            cold = StatePrep(cold.nbar_a, cold.nbar_b, None, cold.mode)
        return Scenario(
            params=self.params,
            noise=self.noise,
            hot_prep=hot,
            cold_prep=cold,
            window=self.window,
            eta_policy=self.eta_policy,
            distance_full=self.distance_full,
        )


def parse_config(overrides: Optional[dict] = None) -> RunConfig:
    """Merge overrides onto the defaults and build typed objects."""
    doc = _merge(default_config(), overrides or {})
    try:
        params = SystemParams(**{k: _number(doc["params"], "params", k)
                                 for k in doc["params"]})
    except ParameterError as exc:
        raise ConfigError(f"params: {exc}") from exc
    except TypeError as exc:
        raise ConfigError(f"params: {exc}") from exc

    scope = {"both": SqueezeScope.BOTH, "hot-only": SqueezeScope.HOT_ONLY}.get(doc["prep_mode"])
    if scope is None:
        raise ConfigError(f'prep_mode: must be "both" or "hot-only", got {doc["prep_mode"]!r}')
    target = {"a": SqueezeTarget.MODE_A, "both": SqueezeTarget.BOTH_MODES}.get(doc["squeeze_target"])
    if target is None:
        raise ConfigError(f'squeeze_target: must be "a" or "both", got {doc["squeeze_target"]!r}')
    mode = PreparationMode(scope, target)

    window_doc = doc["window"]
    try:
        window = PropagatorConfig(grid_dt=_number(window_doc, "window", "grid_dt"),
                                  t_max=_number(window_doc, "window", "t_max"))
    except ParameterError as exc:
        raise ConfigError(f"window: {exc}") from exc

    ens_doc = doc["ensemble"]
    try:
        ensemble = EnsembleConfig(
            n_traj=int(_number(ens_doc, "ensemble", "n_traj")),
            dt=_number(ens_doc, "ensemble", "dt"),
            t_max=_number(ens_doc, "ensemble", "t_max"),
            seed=int(_number(ens_doc, "ensemble", "seed")),
            record_stride=int(_number(ens_doc, "ensemble", "record_stride")),
        )
    except ParameterError as exc:
        raise ConfigError(f"ensemble: {exc}") from exc

    if not isinstance(doc["distance_full"], bool):
        raise ConfigError(f"distance_full: expected true/false, got {doc['distance_full']!r}")

    return RunConfig(
        params=params,
        noise=_noise(doc["noise"]),
        hot_prep=_prep(doc["hot"], "hot", mode),
        cold_prep=_prep(doc["cold"], "cold", mode),
        prep_mode=mode,
        eta_policy=_eta(doc["eta_init"]),
        distance_full=doc["distance_full"],
        window=window,
        ensemble=ensemble,
        out_dir=Path(doc["out_dir"]),
        seed=int(doc["seed"]),
        raw=doc,
    )


def load_config(path: Path | str) -> RunConfig:
    """Parse a JSON configuration file with path-qualified error messages."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return parse_config(doc)


def config_hash(cfg: RunConfig) -> str:
    """Stable 10-hex-digit digest of the merged configuration."""
    canonical = json.dumps(cfg.raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha1(canonical.encode()).hexdigest()[:10]
