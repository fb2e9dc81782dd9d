"""Gaussian covariance matrices: thermal and squeezed-thermal preparation,
embedding into the colored-noise state space, block extraction, and the
Frobenius distance used as the relaxation metric."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .exceptions import ParameterError
from .model import DualLorentzian, NoiseModel, SingleLorentzian, White

__all__ = [
    "Covariance",
    "SqueezeParams",
    "SqueezeScope",
    "SqueezeTarget",
    "PreparationMode",
    "EtaInitPolicy",
    "thermal_covariance",
    "squeeze_matrix",
    "prepare_state",
    "embed_extended",
    "system_block",
    "frobenius_distance",
]

_SYM_RTOL = 1e-12
_PSD_TOL = -1e-10


@dataclass(frozen=True)
class Covariance:
    """Symmetric positive-semidefinite matrix of quadrature second moments.

    Symmetry is checked on construction and the stored matrix is the
    symmetrised (m + m.T)/2 to suppress floating-point drift.
    """

    matrix: NDArray[np.float64]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError(f"covariance must be square, got shape {m.shape}")
        if m.shape[0] not in (2, 4, 5, 6):
            raise ParameterError(f"unsupported covariance dimension {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise ParameterError("covariance contains non-finite entries")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.T)) > _SYM_RTOL * scale:
            raise ParameterError("covariance is not symmetric within tolerance")
        object.__setattr__(self, "matrix", (m + m.T) / 2.0)
        eigs = np.linalg.eigvalsh(self.matrix)
        if eigs[0] < _PSD_TOL * scale:
            raise ParameterError(f"covariance not positive semidefinite (min eigenvalue {eigs[0]:.3e})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_json_dict(self) -> dict:
        """Serialise as {dim, row-major entries}."""
        return {"dim": self.dim, "entries": [float(v) for v in self.matrix.ravel(order="C")]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Covariance":
        dim = int(data["dim"])
        entries = np.asarray(data["entries"], dtype=float)
        if entries.size != dim * dim:
            raise ParameterError(f"expected {dim * dim} entries, got {entries.size}")
        return cls(entries.reshape(dim, dim))


@dataclass(frozen=True)
class SqueezeParams:
    """Single-mode squeeze of magnitude r along angle phi (radians)."""

    r: float
    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and math.isfinite(self.phi)):
            raise ParameterError("squeeze parameters must be finite")
        if self.r < 0:
            raise ParameterError("squeeze magnitude r must be >= 0")
        object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))


class SqueezeScope(Enum):
    """Which of the two compared states receives the squeeze transform."""

    HOT_ONLY = "hot-only"
    BOTH = "both"


class SqueezeTarget(Enum):
    """Which oscillator the 2x2 squeeze block acts on."""

    MODE_A = "a"
    BOTH_MODES = "both"


@dataclass(frozen=True)
class PreparationMode:
    scope: SqueezeScope = SqueezeScope.BOTH
    target: SqueezeTarget = SqueezeTarget.MODE_A


@dataclass(frozen=True)
class EtaInitPolicy:
    """Initial statistics of the colored-noise variable(s).

    ``stationary`` pre-equilibrates each channel at variance d0/gamma_l;
    ``zero`` switches the noise on sharply at t=0 (eta(0) = 0); ``custom``
    pins an explicit variance.
    """

    kind: str
    variance: Optional[float] = None

    @classmethod
    def stationary(cls) -> "EtaInitPolicy":
        return cls("stationary")

    @classmethod
    def zero(cls) -> "EtaInitPolicy":
        return cls("zero")

    @classmethod
    def custom(cls, variance: float) -> "EtaInitPolicy":
        if not math.isfinite(variance) or variance < 0:
            raise ParameterError("custom eta variance must be finite and >= 0")
        return cls("custom", variance)

    def channel_variance(self, stationary_variance: float) -> float:
        if self.kind == "stationary":
            return stationary_variance
        if self.kind == "zero":
            return 0.0
        if self.kind == "custom":
            assert self.variance is not None
            return self.variance
        raise ParameterError(f"unknown eta policy {self.kind!r}")


def thermal_covariance(nbar_a: float, nbar_b: float) -> Covariance:
    """Two-mode thermal state blockdiag((2*nbar_a+1)/2 * I2, (2*nbar_b+1)/2 * I2)."""
    if nbar_a < 0 or nbar_b < 0:
        raise ParameterError("occupations must be >= 0")
    va = (2.0 * nbar_a + 1.0) / 2.0
    vb = (2.0 * nbar_b + 1.0) / 2.0
    return Covariance(np.diag([va, va, vb, vb]))


def squeeze_matrix(s: SqueezeParams) -> NDArray[np.float64]:
    """2x2 unit-determinant squeeze matrix acting on an (x, p) pair."""
    ch, sh = math.cosh(s.r), math.sinh(s.r)
    c, sn = math.cos(s.phi), math.sin(s.phi)
    return np.array([
        [ch - c * sh, -sn * sh],
        [-sn * sh, ch + c * sh],
    ])


def _squeeze_block(s: SqueezeParams, target: SqueezeTarget) -> NDArray[np.float64]:
    block = np.eye(4)
    sq = squeeze_matrix(s)
    block[:2, :2] = sq
    if target is SqueezeTarget.BOTH_MODES:
        block[2:, 2:] = sq
    return block


def prepare_state(
    nbar_a: float,
    nbar_b: float,
    squeeze: Optional[SqueezeParams] = None,
    mode: PreparationMode = PreparationMode(),
) -> Covariance:
    """Thermal state, optionally congruence-transformed by the squeeze block.

    The squeeze acts on oscillator a (default) or on both oscillators; with
    no squeeze the bare thermal covariance is returned.  ``mode.scope`` is
    interpreted by the caller (scenario assembly), not here.
    """
    th = thermal_covariance(nbar_a, nbar_b)
    if squeeze is None:
        return th
    block = _squeeze_block(squeeze, mode.target)
    return Covariance(block @ th.matrix @ block.T)


def embed_extended(
    sys_cov: Covariance,
    noise: NoiseModel,
    eta_policy: EtaInitPolicy = EtaInitPolicy.stationary(),
) -> Covariance:
    """Place a 4x4 system covariance in the leading block of the embedded state.

    The eta block is diagonal with the policy's variance per channel; all
    cross terms with the system start at zero.
    """
    if isinstance(noise, White):
        raise ParameterError("embedding requires a colored noise model")
    if sys_cov.dim != 4:
        raise ParameterError(f"system covariance must be 4x4, got {sys_cov.dim}")
    if isinstance(noise, SingleLorentzian):
        channels = [noise.channel]
    elif isinstance(noise, DualLorentzian):
        channels = [noise.channel_a, noise.channel_b]
    else:
        raise TypeError(f"unknown noise model: {noise!r}")
    n = 4 + len(channels)
    out = np.zeros((n, n))
    out[:4, :4] = sys_cov.matrix
    for i, ch in enumerate(channels):
        out[4 + i, 4 + i] = eta_policy.channel_variance(ch.stationary_variance)
    return Covariance(out)


def system_block(cov: Covariance) -> Covariance:
    """Leading 4x4 principal submatrix (identity on 4x4 inputs)."""
    if cov.dim < 4:
        raise ParameterError(f"need at least a 4x4 covariance, got {cov.dim}")
    if cov.dim == 4:
        return cov
    return Covariance(cov.matrix[:4, :4].copy())


def frobenius_distance(sigma: Covariance, sigma_ss: Covariance) -> float:
    """sqrt(Tr[(sigma - sigma_ss)^T (sigma - sigma_ss)]); zero iff equal."""
    if sigma.dim != sigma_ss.dim:
        raise ParameterError(f"dimension mismatch: {sigma.dim} vs {sigma_ss.dim}")
    return float(np.linalg.norm(sigma.matrix - sigma_ss.matrix))
