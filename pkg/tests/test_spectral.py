from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from conftest import random_stable_drift
from mpembasim.exceptions import DecompositionError, ParameterError
from mpembasim.gaussian_states import SqueezeParams, prepare_state
from mpembasim.lyapunov import propagate, steady_state
from mpembasim.spectral import (
    decompose,
    generator,
    modal_propagate,
    mpemba_strength,
    projections,
    reconstruction_residual,
    slow_mode_amplitude,
    unvec,
    vec,
)


def multiset_distance(got: np.ndarray, expected: np.ndarray) -> float:
    """Greedy nearest matching of two complex multisets; max pair distance."""
    remaining = list(expected)
    worst = 0.0
    for value in got:
        dists = [abs(value - r) for r in remaining]
        j = int(np.argmin(dists))
        worst = max(worst, dists[j])
        remaining.pop(j)
    return worst


class TestGenerator:
    @pytest.mark.parametrize("dim,expected", [(4, 16), (6, 36)])
    def test_dimensions(self, dim, expected):
        rng = np.random.default_rng(1)
        gen = generator(random_stable_drift(rng, dim))
        assert gen.shape == (expected, expected)

    def test_diagonal_drift(self):
        gen = generator(np.diag([-1.0, -3.0]))
        np.testing.assert_allclose(np.diag(gen), [-2.0, -4.0, -4.0, -6.0])
        assert np.count_nonzero(gen - np.diag(np.diag(gen))) == 0

    def test_vectorisation_convention(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((4, 4))
        s = rng.standard_normal((4, 4))
        lhs = generator(a) @ vec(s)
        rhs = vec(a @ s + s @ a.T)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_vec_unvec_round_trip(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((5, 5))
        np.testing.assert_array_equal(unvec(vec(m), 5), m)

    @pytest.mark.parametrize("dim", [4, 5, 6])
    def test_pairwise_sum_spectrum(self, dim):
        rng = np.random.default_rng(100 + dim)
        for _ in range(20):
            a = random_stable_drift(rng, dim)
            eig_a = np.linalg.eigvals(a)
            expected = (eig_a[:, None] + eig_a[None, :]).ravel()
            got = np.linalg.eigvals(generator(a))
            assert multiset_distance(got, expected) < 1e-9

    def test_max_real_part_doubles(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = random_stable_drift(rng, 4)
            gen_max = np.max(np.linalg.eigvals(generator(a)).real)
            assert gen_max == pytest.approx(2 * np.max(np.linalg.eigvals(a).real), abs=1e-9)


class TestDecompose:
    def test_diagonal_generator(self):
        dec = decompose(np.diag([-1.0, -2.0, -3.0, -4.0]))
        np.testing.assert_allclose(dec.eigenvalues, [-1, -2, -3, -4])
        np.testing.assert_allclose(np.abs(dec.right), np.eye(4), atol=1e-12)
        gram = dec.left.conj().T @ dec.right
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)

    def test_biorthonormality_and_reconstruction(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            gen = generator(random_stable_drift(rng, 4))
            dec = decompose(gen)
            gram = dec.left.conj().T @ dec.right
            np.testing.assert_allclose(gram, np.eye(16), atol=1e-8)
            assert reconstruction_residual(dec, gen) <= 1e-7

    def test_ordering_convention(self):
        rng = np.random.default_rng(29)
        dec = decompose(generator(random_stable_drift(rng, 5)))
        re = dec.eigenvalues.real
        im = dec.eigenvalues.imag
        # real parts non-increasing; exact ties ordered by ascending imag
        assert np.all(np.diff(re) <= 0.0)
        exact_ties = np.diff(re) == 0.0
        assert np.all(np.diff(im)[exact_ties] >= 0.0)

    def test_conjugation_closure(self):
        rng = np.random.default_rng(37)
        dec = decompose(generator(random_stable_drift(rng, 4)))
        spectrum = np.sort_complex(dec.eigenvalues)
        np.testing.assert_allclose(spectrum, np.sort_complex(spectrum.conj()), atol=1e-9)

    def test_defective_generator_raises(self):
        jordan = np.array([[-1.0, 1.0], [0.0, -1.0]])
        with pytest.raises(DecompositionError, match="near-defective"):
            decompose(generator(jordan))

    def test_unit_norm_right_vectors(self):
        rng = np.random.default_rng(43)
        dec = decompose(generator(random_stable_drift(rng, 4)))
        np.testing.assert_allclose(np.linalg.norm(dec.right, axis=0), 1.0, atol=1e-12)


class TestProjections:
    def test_eigenvector_input_gives_unit_vector(self):
        rng = np.random.default_rng(47)
        dec = decompose(generator(random_stable_drift(rng, 4)))
        for j in (0, 3, 10):
            coeffs = projections(dec, dec.right[:, j])
            expected = np.zeros(16, dtype=complex)
            expected[j] = 1.0
            np.testing.assert_allclose(coeffs, expected, atol=1e-8)

    def test_zero_deviation(self):
        rng = np.random.default_rng(53)
        dec = decompose(generator(random_stable_drift(rng, 4)))
        np.testing.assert_allclose(projections(dec, np.zeros(16)), 0.0, atol=1e-15)

    def test_reconstruction(self):
        rng = np.random.default_rng(59)
        dec = decompose(generator(random_stable_drift(rng, 4)))
        x = rng.standard_normal(16)
        coeffs = projections(dec, x)
        np.testing.assert_allclose(dec.right @ coeffs, x, atol=1e-8)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(61)
        dec = decompose(generator(random_stable_drift(rng, 4)))
        with pytest.raises(ParameterError):
            projections(dec, np.zeros(9))

    def test_modal_sum_matches_propagator(self, default_white):
        a, d = default_white
        sigma0 = prepare_state(7.0, 7.0, SqueezeParams(1.0, np.pi / 4))
        sigma_ss = steady_state(a, d)
        dev0 = vec(sigma0.matrix - sigma_ss.matrix)
        dec = decompose(generator(a))
        for t in (0.25, 1.0, 3.0):
            modal = unvec(modal_propagate(dec, dev0, t), 4).real + sigma_ss.matrix
            direct = propagate(a, d, sigma0, t).matrix
            assert np.max(np.abs(modal - direct)) < 1e-7


class TestSlowMode:
    def test_simple_real_mode_amplitude(self):
        dec = decompose(np.diag([-0.2, -1.1, -1.1, -2.0]))
        report = slow_mode_amplitude(dec, 3.0 * dec.right[:, 0].real)
        assert report.amplitude == pytest.approx(3.0, abs=1e-10)
        assert report.slow_group == (0,)
        assert report.lambda1 == pytest.approx(-0.2)

    def test_conjugate_pair_group_norm(self):
        # deviation built from one complex slow eigenvector plus its
        # conjugate partner projects with modulus 1 on each, norm sqrt(2)
        a = np.array([
            [-0.1, 1.0, 0.0],
            [-1.0, -0.1, 0.0],
            [0.0, 0.0, -2.0],
        ])
        dec = decompose(generator(a))
        slow = dec.slow_group(1e-9)
        complex_members = [k for k in slow if abs(dec.eigenvalues[k].imag) > 1e-9]
        k = complex_members[0]
        x = dec.right[:, k] + dec.right[:, k].conj()
        report = slow_mode_amplitude(dec, x.real)
        assert report.amplitude == pytest.approx(np.sqrt(2.0), abs=1e-8)

    def test_rephasing_invariance(self):
        rng = np.random.default_rng(67)
        dec = decompose(generator(random_stable_drift(rng, 4)))
        x = rng.standard_normal(16)
        base = slow_mode_amplitude(dec, x).amplitude
        phase = np.exp(1j * 0.7)
        rotated = dataclasses.replace(dec, right=dec.right * phase, left=dec.left * phase)
        assert slow_mode_amplitude(rotated, x).amplitude == pytest.approx(base, rel=1e-10)

    def test_scaling_linearity(self):
        rng = np.random.default_rng(71)
        dec = decompose(generator(random_stable_drift(rng, 4)))
        x = rng.standard_normal(16)
        amp = slow_mode_amplitude(dec, x).amplitude
        assert slow_mode_amplitude(dec, 2.5 * x).amplitude == pytest.approx(2.5 * amp, rel=1e-10)

    def test_group_report_serialises(self):
        dec = decompose(np.diag([-0.5, -1.0]))
        report = slow_mode_amplitude(dec, np.array([1.0, 0.0]))
        doc = report.to_json_dict()
        assert set(doc) == {"lambda1_re", "lambda1_im", "slow_group_size", "amplitude"}


class TestStrength:
    def test_equal_amplitudes(self):
        assert mpemba_strength(2.0, 2.0) == 1.0

    def test_reference_ratios(self):
        assert mpemba_strength(4.632, 4.896) == pytest.approx(0.9461, abs=1e-4)
        assert mpemba_strength(3.912, 4.038) == pytest.approx(0.9688, abs=1e-4)

    def test_zero_cold_rejected(self):
        with pytest.raises(ParameterError):
            mpemba_strength(1.0, 0.0)

    def test_joint_scaling_invariance(self):
        assert mpemba_strength(3.0, 4.0) == pytest.approx(mpemba_strength(0.3, 0.4), rel=1e-12)
