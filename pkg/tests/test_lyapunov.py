from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from conftest import random_stable_drift
from mpembasim.exceptions import ParameterError, UnstableSystemError
from mpembasim.gaussian_states import Covariance, prepare_state, SqueezeParams
from mpembasim.lyapunov import (
    DistanceSeries,
    FixedStepRK4,
    MatrixExponential,
    PropagatorConfig,
    distance_series,
    lyapunov_residual,
    propagate,
    steady_state,
)
from mpembasim.model import SystemParams, White, diffusion_matrix, drift_matrix


def hot_state():
    return prepare_state(7.0, 7.0, SqueezeParams(1.0, np.pi / 4))


class TestSteadyState:
    def test_decoupled_analytic(self):
        gamma, omega, nbar = 0.3, 1.7, 2.5
        a = np.array([[-gamma, omega], [-omega, -gamma]])
        d = gamma * (2 * nbar + 1) * np.eye(2)
        sigma = steady_state(a, d)
        np.testing.assert_allclose(sigma.matrix, (2 * nbar + 1) / 2 * np.eye(2), atol=1e-12)

    def test_residual_within_tolerance(self, default_white):
        a, d = default_white
        sigma = steady_state(a, d)
        assert lyapunov_residual(a, d, sigma) <= 1e-10 * np.linalg.norm(d)
        assert np.all(np.linalg.eigvalsh(sigma.matrix) >= -1e-10)

    def test_matches_independent_solver(self, default_white):
        a, d = default_white
        ours = steady_state(a, d).matrix
        reference = scipy.linalg.solve_continuous_lyapunov(a, -d)
        np.testing.assert_allclose(ours, reference, atol=1e-10)

    def test_unstable_rejected(self):
        with pytest.raises(UnstableSystemError, match="non-decaying"):
            steady_state(np.array([[1.0]]), np.array([[1.0]]))

    def test_random_stable_systems(self):
        rng = np.random.default_rng(31)
        for dim in (4, 5, 6):
            for _ in range(10):
                a = random_stable_drift(rng, dim)
                d = np.diag(rng.uniform(0.1, 2.0, dim))
                sigma = steady_state(a, d)
                assert lyapunov_residual(a, d, sigma) <= 1e-10 * np.linalg.norm(d)


class TestPropagate:
    def test_time_zero_is_identity(self, default_white):
        a, d = default_white
        sigma0 = hot_state()
        assert propagate(a, d, sigma0, 0.0) is sigma0

    def test_long_time_reaches_steady_state(self, default_white):
        a, d = default_white
        t = 50.0 / abs(np.max(np.linalg.eigvals(a).real))
        final = propagate(a, d, hot_state(), t)
        target = steady_state(a, d)
        assert np.linalg.norm(final.matrix - target.matrix) < 1e-8

    def test_semigroup_property(self, default_white):
        a, d = default_white
        rng = np.random.default_rng(41)
        sigma0 = hot_state()
        for _ in range(5):
            t1, t2 = rng.uniform(0, 5, 2)
            direct = propagate(a, d, sigma0, t1 + t2)
            stepped = propagate(a, d, propagate(a, d, sigma0, t1), t2)
            assert np.linalg.norm(direct.matrix - stepped.matrix) < 1e-8

    def test_negative_time_rejected(self, default_white):
        a, d = default_white
        with pytest.raises(ParameterError):
            propagate(a, d, hot_state(), -1.0)

    def test_rk4_agrees_with_exponential(self, default_white):
        a, d = default_white
        sigma0 = hot_state()
        rk4 = PropagatorConfig(method=FixedStepRK4(dt=1e-4))
        exact_cfg = PropagatorConfig(method=MatrixExponential())
        close = propagate(a, d, sigma0, 0.5, rk4)
        ref = propagate(a, d, sigma0, 0.5, exact_cfg)
        assert np.linalg.norm(close.matrix - ref.matrix) < 1e-8
        for t in (1.0, 5.0):
            got = propagate(a, d, sigma0, t, rk4)
            ref = propagate(a, d, sigma0, t, exact_cfg)
            assert np.linalg.norm(got.matrix - ref.matrix) < 1e-6

    def test_psd_preserved_along_trajectory(self, default_white):
        a, d = default_white
        sigma0 = hot_state()
        for t in (0.1, 0.5, 1.0, 3.0, 10.0):
            sigma = propagate(a, d, sigma0, t)
            scale = np.max(np.abs(sigma.matrix))
            assert np.min(np.linalg.eigvalsh(sigma.matrix)) >= -1e-10 * max(1.0, scale)
            np.testing.assert_allclose(sigma.matrix, sigma.matrix.T, atol=1e-12 * scale)


class TestDistanceSeries:
    def test_starts_at_zero_for_steady_input(self, default_white):
        a, d = default_white
        series = distance_series(a, d, steady_state(a, d), PropagatorConfig(t_max=1.0))
        np.testing.assert_allclose(series.distances, 0.0, atol=1e-9)

    def test_positive_then_decaying(self, default_white):
        a, d = default_white
        series = distance_series(a, d, hot_state(), PropagatorConfig(t_max=20.0))
        assert series.distances[0] > 0
        # strictly positive and eventually far below the start
        assert np.all(series.distances >= 0)
        assert series.distances[-1] < 1e-4 * series.distances[0]

    def test_late_decay_rate_single_mode_exact(self):
        # a single decoupled mode relaxes at exactly twice its damping rate
        gamma, omega, nbar = 0.3, 1.2, 1.0
        a = np.array([[-gamma, omega], [-omega, -gamma]])
        d = gamma * (2 * nbar + 1) * np.eye(2)
        sigma0 = Covariance(4.0 * np.eye(2))
        series = distance_series(a, d, sigma0, PropagatorConfig(grid_dt=0.05, t_max=10.0))
        logd = np.log(series.distances)
        slope = np.polyfit(series.times, logd, 1)[0]
        assert slope == pytest.approx(-2 * gamma, rel=1e-6)

    def test_late_decay_rate_matches_slow_generator_mode(self):
        # distinct dampings open a spectral gap; the log-envelope slope
        # fitted through successive peaks approaches 2 * max Re eig(A)
        params = SystemParams(lambda_drive=0.3, gamma_a=0.45, gamma_b=0.15,
                              nbar_a=1.0, nbar_b=5.0)
        a = drift_matrix(params, White())
        d = diffusion_matrix(params, White())
        rate = 2 * np.max(np.linalg.eigvals(a).real)
        series = distance_series(a, d, hot_state(), PropagatorConfig(grid_dt=0.02, t_max=80.0))
        mask = series.times >= 30.0
        t, dist = series.times[mask], series.distances[mask]
        logd = np.log(dist)
        peaks = [i for i in range(1, len(logd) - 1)
                 if logd[i] >= logd[i - 1] and logd[i] >= logd[i + 1]]
        assert len(peaks) >= 3
        slope = np.polyfit(t[peaks], logd[peaks], 1)[0]
        assert slope == pytest.approx(rate, rel=0.01)

    def test_dimension_mismatch_rejected(self, default_white):
        a, d = default_white
        with pytest.raises(ParameterError):
            distance_series(a, d, Covariance(np.eye(5)))


class TestExponentialPaths:
    def test_pade_and_spectral_paths_agree(self):
        # scaling-and-squaring exponential against the modal (spectral
        # decomposition) path, on a well-conditioned non-degenerate system
        from mpembasim.spectral import decompose, generator, modal_propagate, vec
        import scipy.linalg as sla

        params = SystemParams(lambda_drive=0.3, gamma_a=0.45, gamma_b=0.15,
                              nbar_a=1.0, nbar_b=5.0)
        a = drift_matrix(params, White())
        gen = generator(a)
        dec = decompose(gen)
        rng = np.random.default_rng(83)
        x0 = rng.standard_normal(16)
        for t in (0.3, 1.0, 4.0):
            pade = sla.expm(gen * t) @ x0
            modal = modal_propagate(dec, x0, t).real
            assert np.max(np.abs(pade - modal)) < 1e-9 * max(1.0, np.linalg.norm(x0))


class TestConfig:
    def test_invalid_grid_rejected(self):
        with pytest.raises(ParameterError):
            PropagatorConfig(grid_dt=0.0)
        with pytest.raises(ParameterError):
            PropagatorConfig(t_max=-1.0)
        with pytest.raises(ParameterError):
            FixedStepRK4(dt=0.0)

    def test_series_shape_guard(self):
        with pytest.raises(ParameterError):
            DistanceSeries(np.arange(3.0), np.arange(4.0))
