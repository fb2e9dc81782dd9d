"""Reference parameter sets and ready-made scenarios.

The default operating point: equal unit frequencies, coupling 0.2, equal
damping 0.45, bath occupations (1, 5), drive 0.48, squeeze (r=1,
phi=pi/4), hot/cold occupations 7 and 2.  Weak and moderate colored
channels are (gamma_l, d0, g_l) = (0.09, 0.3, 0.32) and (0.05, 0.4, 0.5).
"""

from __future__ import annotations

import math
from typing import Optional

from .exceptions import ConfigError
from .gaussian_states import (
    EtaInitPolicy,
    PreparationMode,
    SqueezeParams,
    SqueezeScope,
    SqueezeTarget,
)
from .lyapunov import PropagatorConfig
from .model import DualLorentzian, LorentzianChannel, NoiseModel, SingleLorentzian, SystemParams, White
from .mpemba import Scenario, scenario_from_scope

__all__ = [
    "HOT_NBAR",
    "COLD_NBAR",
    "default_params",
    "default_squeeze",
    "weak_channel",
    "moderate_channel",
    "noise_from_tag",
    "NOISE_TAGS",
    "standard_scenario",
    "named_scenario",
    "NAMED_PRESETS",
]

HOT_NBAR = 7.0
COLD_NBAR = 2.0


def default_params(lambda_drive: float = 0.48, g_coupling: float = 0.2) -> SystemParams:
    return SystemParams(
        omega_a=1.0,
        delta_b=1.0,
        lambda_drive=lambda_drive,
        g_coupling=g_coupling,
        gamma_a=0.45,
        gamma_b=0.45,
        nbar_a=1.0,
        nbar_b=5.0,
    )


def default_squeeze() -> SqueezeParams:
    return SqueezeParams(r=1.0, phi=math.pi / 4.0)


def weak_channel() -> LorentzianChannel:
    return LorentzianChannel(gamma_l=0.09, d0=0.3, g_l=0.32)


def moderate_channel() -> LorentzianChannel:
    return LorentzianChannel(gamma_l=0.05, d0=0.4, g_l=0.5)


NOISE_TAGS = (
    "white",
    "single-weak",
    "single-moderate",
    "dual-weak",
    "dual-moderate",
)


def noise_from_tag(tag: str) -> NoiseModel:
    if tag == "white":
        return White()
    kind, _, regime = tag.partition("-")
    channel = {"weak": weak_channel, "moderate": moderate_channel}.get(regime, lambda: None)()
    if channel is None or kind not in ("single", "dual"):
        raise ConfigError(f"unknown noise tag {tag!r}; expected one of {NOISE_TAGS}")
    if kind == "single":
        return SingleLorentzian(channel)
    return DualLorentzian(channel, channel)


def standard_scenario(
    lambda_drive: float = 0.48,
    noise: NoiseModel | str = "white",
    g_coupling: float = 0.2,
    prep_mode: PreparationMode = PreparationMode(SqueezeScope.BOTH, SqueezeTarget.MODE_A),
    window: Optional[PropagatorConfig] = None,
    eta_policy: Optional[EtaInitPolicy] = None,
    distance_full: bool = False,
) -> Scenario:
    """Hot/cold scenario at the default operating point."""
    if isinstance(noise, str):
        noise = noise_from_tag(noise)
    return scenario_from_scope(
        params=default_params(lambda_drive, g_coupling),
        noise=noise,
        hot_nbar=HOT_NBAR,
        cold_nbar=COLD_NBAR,
        squeeze=default_squeeze(),
        mode=prep_mode,
        window=window or PropagatorConfig(),
        eta_policy=eta_policy or EtaInitPolicy.zero(),
        distance_full=distance_full,
    )


NAMED_PRESETS = {
    # drive 0.48 block
    "table1-weak-048": (0.48, "white"),
    "table1-weak-048-single": (0.48, "single-weak"),
    "table1-weak-048-dual": (0.48, "dual-weak"),
    "table1-moderate-048-single": (0.48, "single-moderate"),
    "table1-moderate-048-dual": (0.48, "dual-moderate"),
    # drive 0.451 block
    "table1-weak-0451": (0.451, "white"),
    "table1-weak-0451-single": (0.451, "single-weak"),
    "table1-weak-0451-dual": (0.451, "dual-weak"),
    "table1-moderate-0451-single": (0.451, "single-moderate"),
    "table1-moderate-0451-dual": (0.451, "dual-moderate"),
    # no drive
    "lambda0-white": (0.0, "white"),
    "lambda0-weak-single": (0.0, "single-weak"),
    "lambda0-weak-dual": (0.0, "dual-weak"),
    # extension point discussed alongside the drive sweeps
    "lambda044-white": (0.44, "white"),
    "lambda044-moderate-dual": (0.44, "dual-moderate"),
}


def named_scenario(name: str, **overrides) -> Scenario:
    """Scenario for one of the named presets (see NAMED_PRESETS)."""
    try:
        lam, tag = NAMED_PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(NAMED_PRESETS))}"
        ) from None
    return standard_scenario(lambda_drive=lam, noise=tag, **overrides)
