"""Monte-Carlo cross-check of the covariance dynamics.

Integrates the linear Langevin equations trajectory-wise with
Euler-Maruyama and compares ensemble covariances against the exact
propagator, and fits the autocorrelation of a simulated colored channel
against its analytic exponential form.  Trajectories are generated in
fixed-size chunks, each with its own counter-based random stream keyed by
(seed, chunk index), so results are bitwise reproducible and chunks could
run in parallel without changing the output.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .exceptions import ParameterError, SimulationError
from .gaussian_states import Covariance
from .model import LorentzianChannel

__all__ = [
    "EnsembleConfig",
    "EnsembleSeries",
    "OuFit",
    "sample_initial",
    "integrate_ensemble",
    "simulate_ou",
    "ou_autocorrelation",
]

_CHUNK = 25_000
_RESOLUTION_FACTOR = 50.0


@dataclass(frozen=True)
class EnsembleConfig:
    n_traj: int = 100_000
    dt: float = 1e-3
    t_max: float = 5.0
    seed: int = 1234
    record_stride: int = 100

    def __post_init__(self) -> None:
        if self.n_traj < 2:
            raise ParameterError("need at least 2 trajectories")
        if self.dt <= 0 or self.t_max <= 0:
            raise ParameterError("dt and t_max must be positive")
        if self.record_stride < 1:
            raise ParameterError("record_stride must be >= 1")


@dataclass(frozen=True)
class EnsembleSeries:
    """Empirical symmetrised covariances on the decimated time grid."""

    times: NDArray[np.float64]
    covariances: NDArray[np.float64]  # shape (n_times, dim, dim)
    n_traj: int


def _rng(seed: int, tag: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(tag)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_initial(cov: Covariance, n_traj: int, seed: int) -> NDArray[np.float64]:
    """Zero-mean Gaussian draws with the given covariance, shape (n_traj, dim).

    Uses a triangular factor when the covariance is positive definite and a
    symmetric eigenvalue square root otherwise (exactly singular inputs are
    allowed, negative eigenvalues are not).
    """
    m = cov.matrix
    eigs = np.linalg.eigvalsh(m)
    if eigs[0] < -1e-10 * max(1.0, eigs[-1]):
        raise ParameterError(f"covariance is not positive semidefinite (min eig {eigs[0]:.3e})")
    try:
        factor = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(m)
        factor = vecs * np.sqrt(np.clip(vals, 0.0, None))
    normals = _rng(seed, 0).standard_normal((n_traj, cov.dim))
    return normals @ factor.T


def integrate_ensemble(
    a: NDArray[np.float64],
    d: NDArray[np.float64],
    init: NDArray[np.float64],
    cfg: EnsembleConfig,
) -> EnsembleSeries:
    """Euler-Maruyama ensemble of dR = A R dt + B dW with B = sqrt(diag D).

    Records the empirical covariance every ``record_stride`` steps.  Aborts
    with the offending trajectory index when a state stops being finite.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    dim = a.shape[0]
    if init.ndim != 2 or init.shape[1] != dim:
        raise ParameterError(f"initial samples must have shape (n, {dim})")
    if not np.allclose(d, np.diag(np.diag(d))):
        raise ParameterError("diffusion matrix must be diagonal")
    eig_re = np.linalg.eigvals(a).real
    if np.max(eig_re) >= 0:
        warnings.warn(
            f"drift matrix has a non-decaying eigenvalue (max Re = {np.max(eig_re):.4g}); "
            "trajectories may diverge",
            stacklevel=2,
        )
    rate = float(np.max(np.abs(eig_re)))
    if rate > 0 and cfg.dt > 1.0 / (_RESOLUTION_FACTOR * rate):
        raise ParameterError(
            f"dt = {cfg.dt} too coarse for decay rate {rate:.4g}; "
            f"need dt <= {1.0 / (_RESOLUTION_FACTOR * rate):.4g}"
        )
    n_traj = init.shape[0]
    n_steps = int(round(cfg.t_max / cfg.dt))
    record_idx = np.arange(0, n_steps + 1, cfg.record_stride)
    times = record_idx * cfg.dt
    noise_amp = np.sqrt(np.diag(d)) * np.sqrt(cfg.dt)
    at_dt = a.T * cfg.dt

    sums = np.zeros((record_idx.size, dim, dim))
    for chunk_no, start in enumerate(range(0, n_traj, _CHUNK)):
        r = init[start:start + _CHUNK].copy()
        rng = _rng(cfg.seed, 1 + chunk_no)
        rec = 0
        for step in range(n_steps + 1):
            if rec < record_idx.size and step == record_idx[rec]:
                finite = np.isfinite(r).all(axis=1)
                if not finite.all():
                    bad = start + int(np.flatnonzero(~finite)[0])
                    raise SimulationError(
                        f"trajectory {bad} became non-finite at t = {step * cfg.dt:.4g}")
                sums[rec] += r.T @ r
                rec += 1
            if step < n_steps:
                r += r @ at_dt + rng.standard_normal(r.shape) * noise_amp
    covs = sums / n_traj
    covs = (covs + np.transpose(covs, (0, 2, 1))) / 2.0
    return EnsembleSeries(times=times, covariances=covs, n_traj=n_traj)


def simulate_ou(channel: LorentzianChannel, cfg: EnsembleConfig) -> tuple[NDArray, NDArray]:
    """Ensemble of scalar colored-channel trajectories, decimated.

    Starts from the stationary distribution so the recorded series is
    statistically stationary from t=0.  Returns (times, series) with series
    of shape (n_traj, n_times).
    """
    n_steps = int(round(cfg.t_max / cfg.dt))
    record_idx = np.arange(0, n_steps + 1, cfg.record_stride)
    times = record_idx * cfg.dt
    rng = _rng(cfg.seed, 9000)
    eta = rng.standard_normal(cfg.n_traj) * np.sqrt(channel.stationary_variance)
    amp = np.sqrt(2.0 * channel.d0 * cfg.dt)
    series = np.empty((cfg.n_traj, record_idx.size))
    rec = 0
    for step in range(n_steps + 1):
        if rec < record_idx.size and step == record_idx[rec]:
            series[:, rec] = eta
            rec += 1
        if step < n_steps:
            eta += -channel.gamma_l * eta * cfg.dt + rng.standard_normal(cfg.n_traj) * amp
    return times, series


@dataclass(frozen=True)
class OuFit:
    """Exponential fit of the channel autocorrelation."""

    variance: float
    decay_rate: float
    lags: NDArray[np.float64]
    autocorrelation: NDArray[np.float64]

    def to_json_dict(self) -> dict:
        return {"variance": self.variance, "decay_rate": self.decay_rate}


def ou_autocorrelation(channel: LorentzianChannel, cfg: EnsembleConfig) -> OuFit:
    """Fit (variance, decay rate) of the simulated channel autocorrelation.

    The lag autocorrelation is averaged over time and ensemble, then the
    rate comes from a weighted least-squares line through log C(tau),
    truncated where C drops below a fifth of C(0) (longer lags are too
    noisy to constrain an exponential).
    """
    times, series = simulate_ou(channel, cfg)
    if np.allclose(series, 0.0):
        raise ParameterError("channel signal is identically zero; nothing to fit")
    lag_step = times[1] - times[0]
    max_lag = min(int(3.0 / (channel.gamma_l * lag_step)), times.size - 2)
    if max_lag < 3:
        raise ParameterError("time window too short for an autocorrelation fit")
    lags = np.arange(max_lag + 1) * lag_step
    corr = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        a = series[:, : series.shape[1] - k]
        b = series[:, k:]
        corr[k] = float(np.mean(a * b))
    variance = corr[0]
    usable = corr > 0.2 * variance
    usable[0] = True
    idx = np.flatnonzero(~usable)
    cutoff = int(idx[0]) if idx.size else max_lag + 1
    if cutoff < 3:
        raise ParameterError("autocorrelation decays too fast for the chosen lag grid")
    slope, _ = np.polyfit(lags[:cutoff], np.log(corr[:cutoff]), 1, w=corr[:cutoff])
    return OuFit(variance=float(variance), decay_rate=float(-slope),
                 lags=lags, autocorrelation=corr)
