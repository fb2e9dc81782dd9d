"""Spectral analysis of the covariance relaxation generator.

The covariance deviation from the steady state evolves linearly under the
Kronecker-sum generator L = A (x) I + I (x) A acting on the column-major
vectorisation of the deviation matrix.  This module builds L, computes its
biorthonormal eigensystem, projects initial deviations onto the relaxation
modes, and evaluates the slow-mode overlap criterion for anomalous
relaxation (hot overlap smaller than cold overlap).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .exceptions import DecompositionError, ParameterError

__all__ = [
    "vec",
    "unvec",
    "generator",
    "SpectralDecomposition",
    "SlowModeReport",
    "decompose",
    "projections",
    "slow_mode_amplitude",
    "mpemba_strength",
]

_COND_LIMIT = 1e10


def vec(m: NDArray) -> NDArray:
    """Column-major (Fortran) vectorisation; the single convention shared
    by the generator and the Lyapunov propagator."""
    return np.asarray(m).ravel(order="F")


def unvec(v: NDArray, n: int) -> NDArray:
    """Inverse of ``vec`` for an n x n matrix."""
    return np.asarray(v).reshape((n, n), order="F")


def generator(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """Kronecker sum A (x) I + I (x) A, sized n^2 x n^2.

    Satisfies generator(A) @ vec(S) == vec(A S + S A^T) in the column-major
    convention of ``vec``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"drift matrix must be square, got shape {a.shape}")
    eye = np.eye(a.shape[0])
    return np.kron(a, eye) + np.kron(eye, a)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of the generator with biorthonormal left/right vectors.

    Eigenvalues are sorted by descending real part, ties broken by ascending
    imaginary part.  Right eigenvectors (columns of ``right``) have unit
    Euclidean norm; left eigenvectors (columns of ``left``) are rescaled so
    that vdot(left_j, right_k) = delta_jk.
    """

    eigenvalues: NDArray[np.complex128]
    right: NDArray[np.complex128]
    left: NDArray[np.complex128]
    biorthonormal: bool = True

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    @property
    def lambda1(self) -> complex:
        """Eigenvalue with the largest real part (slowest relaxation rate)."""
        return complex(self.eigenvalues[0])

    def slow_group(self, group_tol: float = 1e-9) -> NDArray[np.intp]:
        """Indices of every mode within group_tol of the largest real part."""
        re1 = self.eigenvalues[0].real
        return np.flatnonzero(self.eigenvalues.real >= re1 - group_tol)


@dataclass(frozen=True)
class SlowModeReport:
    """Slowest eigenvalue, its (near-)degenerate group, and the projection
    amplitude of an initial deviation onto that group."""

    lambda1: complex
    slow_group: tuple[int, ...]
    amplitude: float

    def to_json_dict(self) -> dict:
        return {
            "lambda1_re": self.lambda1.real,
            "lambda1_im": self.lambda1.imag,
            "slow_group_size": len(self.slow_group),
            "amplitude": self.amplitude,
        }


def decompose(gen: NDArray[np.float64]) -> SpectralDecomposition:
    """Biorthonormal eigendecomposition of the generator.

    Raises DecompositionError when the eigenvector matrix is too
    ill-conditioned to invert reliably (near-defective generator).
    """
    gen = np.asarray(gen, dtype=float)
    try:
        eigvals, vr = scipy.linalg.eig(gen)
    except scipy.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition failed: {exc}") from exc
    order = np.lexsort((eigvals.imag, -eigvals.real))
    eigvals = eigvals[order]
    vr = vr[:, order]
    vr = vr / np.linalg.norm(vr, axis=0)
    cond = np.linalg.cond(vr)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise DecompositionError(
            f"generator is near-defective: eigenvector condition number {cond:.3e} "
            f"exceeds {_COND_LIMIT:.0e}; perturb the parameters"
        )
    # rows of inv(vr) are the left eigenvectors already scaled to <w_j, v_k> = delta_jk
    left = np.linalg.inv(vr).conj().T
    return SpectralDecomposition(eigenvalues=eigvals, right=vr, left=left)


def reconstruction_residual(dec: SpectralDecomposition, gen: NDArray[np.float64]) -> float:
    """Relative Frobenius residual of sum_k v_k lambda_k w_k^dag against the generator."""
    rebuilt = (dec.right * dec.eigenvalues) @ dec.left.conj().T
    return float(np.linalg.norm(rebuilt - gen) / max(np.linalg.norm(gen), 1e-300))


def projections(dec: SpectralDecomposition, delta_sigma0: NDArray) -> NDArray[np.complex128]:
    """Coefficients c_k = vdot(w_k, vec(deviation)) of the modal expansion."""
    x = np.asarray(delta_sigma0).ravel()
    if x.size != dec.size:
        raise ParameterError(f"deviation has {x.size} entries, generator expects {dec.size}")
    return dec.left.conj().T @ x.astype(complex)


def modal_propagate(dec: SpectralDecomposition, delta_sigma0: NDArray, t: float) -> NDArray[np.complex128]:
    """Evaluate sum_k c_k exp(lambda_k t) v_k; exact for diagonalisable generators."""
    coeffs = projections(dec, delta_sigma0)
    return dec.right @ (coeffs * np.exp(dec.eigenvalues * t))


def slow_mode_amplitude(
    dec: SpectralDecomposition,
    delta_sigma0: NDArray,
    group_tol: float = 1e-9,
) -> SlowModeReport:
    """Projection amplitude onto the slowest relaxation group.

    The group collects every mode whose real part lies within group_tol of
    the largest one (complex-conjugate slow pairs, and any exact
    degeneracy, contribute through the Euclidean norm of their
    coefficients).
    """
    group = dec.slow_group(group_tol)
    coeffs = projections(dec, delta_sigma0)
    amplitude = float(np.linalg.norm(coeffs[group]))
    return SlowModeReport(
        lambda1=dec.lambda1,
        slow_group=tuple(int(i) for i in group),
        amplitude=amplitude,
    )


def mpemba_strength(hot_amp: float, cold_amp: float) -> float:
    """Ratio hot/cold of slow-mode amplitudes; values below 1 flag the
    spectral criterion for anomalous relaxation."""
    if cold_amp <= 0.0:
        raise ParameterError("cold amplitude is zero; strength ratio undefined")
    return hot_amp / cold_amp
