"""Steady state and time evolution of the covariance matrix.

The covariance obeys the linear matrix ODE sigma' = A sigma + sigma A^T + D
whose fixed point solves A sigma_ss + sigma_ss A^T + D = 0.  The systems
here are tiny (n <= 6), so the steady state is solved exactly by
vectorising to the n^2 x n^2 Kronecker-sum linear system, and propagation
uses the closed form vec sigma(t) = e^{Lt} (vec sigma0 - vec sigma_ss) +
vec sigma_ss.  A fixed-step RK4 integrator is kept as an independent
cross-check of the exponential path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .exceptions import ParameterError, UnstableSystemError
from .gaussian_states import Covariance
from .spectral import generator, unvec, vec

__all__ = [
    "MatrixExponential",
    "FixedStepRK4",
    "PropagatorConfig",
    "steady_state",
    "propagate",
    "distance_series",
    "DistanceSeries",
]


@dataclass(frozen=True)
class MatrixExponential:
    """Closed-form propagation through the exponential of the generator."""


@dataclass(frozen=True)
class FixedStepRK4:
    """Classical Runge-Kutta on the matrix ODE with a fixed internal step."""

    dt: float = 1e-4

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ParameterError("RK4 step dt must be positive")


PropagationMethod = Union[MatrixExponential, FixedStepRK4]


@dataclass(frozen=True)
class PropagatorConfig:
    method: PropagationMethod = field(default_factory=MatrixExponential)
    grid_dt: float = 1e-2
    t_max: float = 20.0

    def __post_init__(self) -> None:
        if self.grid_dt <= 0 or self.t_max <= 0:
            raise ParameterError("grid_dt and t_max must be positive")


def _check_stable(a: NDArray[np.float64]) -> None:
    eigs = np.linalg.eigvals(a)
    worst = eigs[np.argmax(eigs.real)]
    if worst.real >= 0.0:
        raise UnstableSystemError(
            f"drift matrix has a non-decaying eigenvalue {worst:.6g}; "
            "no unique positive semidefinite steady state"
        )


def steady_state(a: NDArray[np.float64], d: NDArray[np.float64]) -> Covariance:
    """Solve A sigma + sigma A^T + D = 0 via the vectorised linear system."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    if a.shape != d.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"drift {a.shape} and diffusion {d.shape} must be equal square shapes")
    _check_stable(a)
    gen = generator(a)
    try:
        solution = np.linalg.solve(gen, -vec(d))
    except np.linalg.LinAlgError as exc:
        raise UnstableSystemError(f"singular vectorised system: {exc}") from exc
    sigma = unvec(solution, a.shape[0])
    return Covariance((sigma + sigma.T) / 2.0)


def lyapunov_residual(a: NDArray, d: NDArray, sigma: Covariance) -> float:
    """Frobenius norm of A sigma + sigma A^T + D (the defining equation)."""
    s = sigma.matrix
    return float(np.linalg.norm(a @ s + s @ a.T + d))


def _rk4_step(a: NDArray, d: NDArray, s: NDArray, dt: float) -> NDArray:
    def rhs(m: NDArray) -> NDArray:
        return a @ m + m @ a.T + d

    k1 = rhs(s)
    k2 = rhs(s + 0.5 * dt * k1)
    k3 = rhs(s + 0.5 * dt * k2)
    k4 = rhs(s + dt * k3)
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate(
    a: NDArray[np.float64],
    d: NDArray[np.float64],
    sigma0: Covariance,
    t: float,
    cfg: PropagatorConfig = PropagatorConfig(),
) -> Covariance:
    """Covariance at time t starting from sigma0 (t >= 0)."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    if t < 0:
        raise ParameterError("propagation time must be >= 0")
    if sigma0.dim != a.shape[0]:
        raise ParameterError(f"initial covariance dim {sigma0.dim} != drift dim {a.shape[0]}")
    if t == 0.0:
        return sigma0
    if isinstance(cfg.method, FixedStepRK4):
        dt = cfg.method.dt
        steps = int(np.floor(t / dt))
        s = sigma0.matrix.copy()
        for _ in range(steps):
            s = _rk4_step(a, d, s, dt)
        rem = t - steps * dt
        if rem > 1e-15:
            s = _rk4_step(a, d, s, rem)
        return Covariance((s + s.T) / 2.0)
    sigma_ss = steady_state(a, d)
    gen = generator(a)
    dev = vec(sigma0.matrix - sigma_ss.matrix)
    moved = scipy.linalg.expm(gen * t) @ dev
    s = unvec(moved, a.shape[0]) + sigma_ss.matrix
    return Covariance((s + s.T) / 2.0)


@dataclass(frozen=True)
class DistanceSeries:
    """Sampled distance-to-steady-state curve on a uniform time grid."""

    times: NDArray[np.float64]
    distances: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.times.shape != self.distances.shape:
            raise ParameterError("times and distances must have matching shapes")


def distance_series(
    a: NDArray[np.float64],
    d: NDArray[np.float64],
    sigma0: Covariance,
    cfg: PropagatorConfig = PropagatorConfig(),
    full_norm: bool = False,
) -> DistanceSeries:
    """Frobenius distance to the steady state on the uniform output grid.

    For embedded (5- or 6-dimensional) systems the distance is evaluated on
    the leading 4x4 system block of both the state and the steady state, so
    that curves for different noise models live on a common scale;
    ``full_norm`` switches to the norm over the whole embedded matrix.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    n = a.shape[0]
    if sigma0.dim != n:
        raise ParameterError(f"initial covariance dim {sigma0.dim} != drift dim {n}")
    sigma_ss = steady_state(a, d)
    gen = generator(a)
    steps = int(round(cfg.t_max / cfg.grid_dt))
    times = np.arange(steps + 1) * cfg.grid_dt
    step_op = scipy.linalg.expm(gen * cfg.grid_dt)
    dev = vec(sigma0.matrix - sigma_ss.matrix)
    block = n if full_norm else min(4, n)
    out = np.empty(steps + 1)
    for i in range(steps + 1):
        m = unvec(dev, n)
        out[i] = np.linalg.norm(m[:block, :block])
        if i < steps:
            dev = step_op @ dev
    return DistanceSeries(times=times, distances=out)
