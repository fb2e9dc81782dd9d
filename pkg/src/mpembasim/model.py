"""Physical model: two linearly coupled oscillators, one parametrically driven.

Owns the system parameters and builds the drift and diffusion matrices for
the three noise configurations (white, single Lorentzian channel on the
momentum of oscillator a, dual Lorentzian channels on both momenta), plus
the two stability tests.

Quadrature ordering is fixed as (x_a, p_a, x_b, p_b[, eta_a][, eta_b])
everywhere in this package.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

from .exceptions import ParameterError, UnstableSystemError

__all__ = [
    "SystemParams",
    "LorentzianChannel",
    "White",
    "SingleLorentzian",
    "DualLorentzian",
    "NoiseModel",
    "drift_matrix",
    "diffusion_matrix",
    "routh_hurwitz_stable",
    "spectral_stable",
    "weak_noise_ok",
]


@dataclass(frozen=True)
class SystemParams:
    """Constants of the coupled-oscillator model, in units of omega_a.

    ``delta`` = delta_b - 2*lambda_drive and ``big_delta`` = delta_b +
    2*lambda_drive are the detunings shifted by the parametric drive; the
    drive destabilises the system at lambda_drive = delta_b / 2.
    """

    omega_a: float = 1.0
    delta_b: float = 1.0
    lambda_drive: float = 0.0
    g_coupling: float = 0.2
    gamma_a: float = 0.45
    gamma_b: float = 0.45
    nbar_a: float = 0.0
    nbar_b: float = 0.0

    def __post_init__(self) -> None:
        vals = (self.omega_a, self.delta_b, self.lambda_drive, self.g_coupling,
                self.gamma_a, self.gamma_b, self.nbar_a, self.nbar_b)
        if not all(math.isfinite(v) for v in vals):
            raise ParameterError("system parameters must be finite")
        if self.gamma_a <= 0 or self.gamma_b <= 0:
            raise ParameterError("damping rates gamma_a, gamma_b must be positive")
        if self.nbar_a < 0 or self.nbar_b < 0:
            raise ParameterError("bath occupations nbar_a, nbar_b must be >= 0")

    @property
    def delta(self) -> float:
        """Down-shifted detuning delta_b - 2*lambda_drive."""
        return self.delta_b - 2.0 * self.lambda_drive

    @property
    def big_delta(self) -> float:
        """Up-shifted detuning delta_b + 2*lambda_drive."""
        return self.delta_b + 2.0 * self.lambda_drive


@dataclass(frozen=True)
class LorentzianChannel:
    """Ornstein-Uhlenbeck force channel with Lorentzian spectrum.

    The channel obeys d(eta) = -gamma_l*eta*dt + sqrt(2*d0)*dW and couples
    into a momentum quadrature with strength g_l.  Its stationary variance
    is d0/gamma_l and its spectrum 2*d0 / (omega^2 + gamma_l^2).
    """

    gamma_l: float
    d0: float
    g_l: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.gamma_l, self.d0, self.g_l)):
            raise ParameterError("channel parameters must be finite")
        if self.gamma_l <= 0:
            raise ParameterError("inverse correlation time gamma_l must be positive")
        if self.d0 < 0:
            raise ParameterError("diffusion strength d0 must be >= 0")

    @property
    def stationary_variance(self) -> float:
        return self.d0 / self.gamma_l


@dataclass(frozen=True)
class White:
    """Markovian white-noise baths on both oscillators only."""

    dim = 4


@dataclass(frozen=True)
class SingleLorentzian:
    """One colored channel driving p_a; embedded state gains one variable."""

    channel: LorentzianChannel
    dim = 5


@dataclass(frozen=True)
class DualLorentzian:
    """Colored channels driving p_a and p_b; embedded state gains two variables."""

    channel_a: LorentzianChannel
    channel_b: LorentzianChannel
    dim = 6


NoiseModel = Union[White, SingleLorentzian, DualLorentzian]


def _system_drift(params: SystemParams) -> NDArray[np.float64]:
    w, g = params.omega_a, params.g_coupling
    ga, gb = params.gamma_a, params.gamma_b
    d, dd = params.delta, params.big_delta
    return np.array([
        [-ga, w, 0.0, 0.0],
        [-w, -ga, g, 0.0],
        [0.0, 0.0, -gb, d],
        [g, 0.0, -dd, -gb],
    ])


def drift_matrix(params: SystemParams, noise: NoiseModel = White()) -> NDArray[np.float64]:
    """Drift matrix of the (embedded) Langevin dynamics, n in {4, 5, 6}.

    Colored channels appear as an extra state variable with decay -gamma_l
    on the diagonal and coupling g_l feeding the corresponding momentum row.
    """
    a_sys = _system_drift(params)
    if isinstance(noise, White):
        return a_sys
    if isinstance(noise, SingleLorentzian):
        a = np.zeros((5, 5))
        a[:4, :4] = a_sys
        a[1, 4] = noise.channel.g_l
        a[4, 4] = -noise.channel.gamma_l
        return a
    if isinstance(noise, DualLorentzian):
        a = np.zeros((6, 6))
        a[:4, :4] = a_sys
        a[1, 4] = noise.channel_a.g_l
        a[3, 5] = noise.channel_b.g_l
        a[4, 4] = -noise.channel_a.gamma_l
        a[5, 5] = -noise.channel_b.gamma_l
        return a
    raise TypeError(f"unknown noise model: {noise!r}")


def diffusion_matrix(params: SystemParams, noise: NoiseModel = White()) -> NDArray[np.float64]:
    """Diagonal diffusion matrix matching ``drift_matrix``'s dimension.

    White baths contribute gamma*(2*nbar + 1) on each quadrature; every
    colored channel appends 2*d0 for its embedded variable.
    """
    da = params.gamma_a * (2.0 * params.nbar_a + 1.0)
    db = params.gamma_b * (2.0 * params.nbar_b + 1.0)
    entries = [da, da, db, db]
    if isinstance(noise, SingleLorentzian):
        entries.append(2.0 * noise.channel.d0)
    elif isinstance(noise, DualLorentzian):
        entries.append(2.0 * noise.channel_a.d0)
        entries.append(2.0 * noise.channel_b.d0)
    elif not isinstance(noise, White):
        raise TypeError(f"unknown noise model: {noise!r}")
    return np.diag(entries)


def routh_hurwitz_stable(params: SystemParams) -> bool:
    """Algebraic stability test (omega_a^2+gamma_a^2)(gamma_b^2+delta*Delta) - G^2*delta*omega_a > 0.

    Only applicable for omega_a > 0 and delta > 0 (drive below threshold);
    outside that region a ParameterError is raised rather than a verdict.
    """
    if params.delta <= 0 or params.omega_a <= 0:
        raise ParameterError(
            f"stability condition requires omega_a > 0 and delta > 0; got "
            f"omega_a={params.omega_a}, delta={params.delta} "
            f"(lambda_drive={params.lambda_drive} at or beyond the delta_b/2 boundary)"
        )
    lhs = (params.omega_a**2 + params.gamma_a**2) * (params.gamma_b**2 + params.delta * params.big_delta)
    lhs -= params.g_coupling**2 * params.delta * params.omega_a
    return lhs > 0.0


def spectral_stable(a: NDArray[np.float64], tol: float = 1e-12) -> bool:
    """True iff every eigenvalue of the drift matrix has real part < -tol."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"drift matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ParameterError("drift matrix contains non-finite entries")
    try:
        eigs = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise UnstableSystemError(f"eigenvalue computation failed: {exc}") from exc
    return bool(np.max(eigs.real) < -tol)


def weak_noise_ok(params: SystemParams, channel: LorentzianChannel) -> bool:
    """Check g_l^2 * d0 / (gamma_l * omega_a) <= min(gamma_a, gamma_b).

    Emits a (non-fatal) warning when the channel sits outside the weak-noise
    regime, where the colored force competes with the intrinsic damping.
    """
    ratio = channel.g_l**2 * channel.d0 / (channel.gamma_l * params.omega_a)
    ok = ratio <= min(params.gamma_a, params.gamma_b)
    if not ok:
        warnings.warn(
            f"colored channel outside the weak-noise regime: "
            f"g_l^2*d0/(gamma_l*omega_a) = {ratio:.4g} > "
            f"min(gamma_a, gamma_b) = {min(params.gamma_a, params.gamma_b):.4g}",
            stacklevel=2,
        )
    return ok
