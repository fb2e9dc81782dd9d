from __future__ import annotations

import numpy as np
import pytest

from mpembasim.model import SystemParams, White, diffusion_matrix, drift_matrix


@pytest.fixture(scope="session")
def default_params() -> SystemParams:
    return SystemParams(
        omega_a=1.0, delta_b=1.0, lambda_drive=0.48, g_coupling=0.2,
        gamma_a=0.45, gamma_b=0.45, nbar_a=1.0, nbar_b=5.0,
    )


@pytest.fixture(scope="session")
def default_white(default_params):
    a = drift_matrix(default_params, White())
    d = diffusion_matrix(default_params, White())
    return a, d


def random_stable_drift(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random matrix shifted to guarantee every eigenvalue decays."""
    a = rng.standard_normal((dim, dim))
    shift = np.max(np.linalg.eigvals(a).real)
    return a - (shift + rng.uniform(0.1, 1.0)) * np.eye(dim)
