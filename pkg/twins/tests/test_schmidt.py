import numpy as np
from django.test import SimpleTestCase

from twins.analysis import MatchedBases, find_complete_twins
from twins.exceptions import NotPure, OffDiagonalLeak, SparsityViolation
from twins.pairs import ObservablePair, is_twin_pair
from twins.schmidt import compatibility_report, pure_schmidt, simplified_matrix, simultaneous_expansion
from twins.solver import solve_twin_space
from twins.spins import load_scenario, scenario_decomposition
from twins.states import PureDecomposition, from_pure, mix, reduce

from .factories import (
    DOWN, SQRT_HALF, SZ, UP, example1_state, ket, random_state, scenario_state, sz_pair,
)


def weighted_pure(phase=1.0):
    """√0.8|↑↓⟩ + phase·√0.2|↓↑⟩"""
    return from_pure(np.sqrt(0.8) * ket(UP, DOWN) + phase * np.sqrt(0.2) * ket(DOWN, UP), 2, 2)


def example1_decomposition():
    return scenario_decomposition(load_scenario('example1_range10_00'))


class SimplifiedMatrixTests(SimpleTestCase):
    def test_example1(self):
        simplified = simplified_matrix(example1_state(), sz_pair())
        np.testing.assert_allclose(simplified.matrix, np.eye(2) / 2, atol=1e-12)
        self.assertLessEqual(simplified.forbidden_residual, 1e-12)
        np.testing.assert_allclose(list(simplified.index), [-0.5, 0.5], atol=1e-12)
        self.assertEqual(list(simplified.index.values()), [0, 1])

    def test_pure_state(self):
        simplified = simplified_matrix(weighted_pure(), sz_pair())
        np.testing.assert_allclose(simplified.matrix, [[0.2, 0.4], [0.4, 0.8]], atol=1e-12)

    def test_wrong_bases(self):
        matched = MatchedBases(np.array([-0.5, 0.5]), np.eye(2), np.eye(2), sz_pair())
        with self.assertRaises(SparsityViolation):
            simplified_matrix(example1_state(), matched)

    def test_found_complete_twins(self):
        for name in ('example1_range10_00', 'example2_ms0', 'example2_ms1'):
            state = scenario_state(name)
            found = find_complete_twins(solve_twin_space(state), state, seed=1)
            simplified = simplified_matrix(state, found.matched)
            self.assertLessEqual(simplified.forbidden_residual, 1e-8, name)
            self.assertAlmostEqual(np.real(np.trace(simplified.matrix)), 1.0, msg=name)


class PureSchmidtTests(SimpleTestCase):
    def test_phase_is_carried_by_minus_basis(self):
        phase = np.exp(1j * np.pi / 3)
        form = pure_schmidt(weighted_pure(phase), sz_pair(-1))
        np.testing.assert_allclose(form.coefficients, [np.sqrt(0.8), np.sqrt(0.2)], atol=1e-12)
        np.testing.assert_allclose(form.basis_minus[:, 1], phase * np.array([1, 0]), atol=1e-12)
        self.assertLessEqual(form.reconstruction_residual, 1e-9)
        self.assertLessEqual(form.spectrum_residual, 1e-9)
        np.testing.assert_allclose(form.reconstruct(), form.vector, atol=1e-12)

    def test_mixed_state(self):
        with self.assertRaises(NotPure):
            pure_schmidt(example1_state(), sz_pair())

    def test_random_pure_states_match_svd(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            state = random_state(rng, 3, 3, rank=1)
            found = find_complete_twins(solve_twin_space(state), state, seed=2)
            self.assertIsNotNone(found)
            form = pure_schmidt(state, found.matched)
            self.assertLessEqual(form.reconstruction_residual, 1e-9)
            [(_, vector)] = state.spectral_components()
            singular = np.linalg.svd(vector.reshape(3, 3), compute_uv=False)
            np.testing.assert_allclose(np.sort(form.coefficients), np.sort(singular), atol=1e-9)

    def test_uneven_dimensions(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            state = random_state(rng, 2, 3, rank=1)
            found = find_complete_twins(solve_twin_space(state), state, seed=3)
            form = pure_schmidt(state, found.matched)
            self.assertLessEqual(form.spectrum_residual, 1e-9)
            rho_minus = reduce(state).rho_minus
            np.testing.assert_allclose(
                np.sort(form.coefficients ** 2), np.linalg.eigvalsh(rho_minus)[-2:], atol=1e-9,
            )


class SimultaneousExpansionTests(SimpleTestCase):
    def test_example1(self):
        expansion = simultaneous_expansion(example1_decomposition(), sz_pair(-1), example1_state())
        np.testing.assert_allclose(expansion.coefficients[0], [SQRT_HALF, SQRT_HALF], atol=1e-12)
        np.testing.assert_allclose(expansion.coefficients[1], [SQRT_HALF, -SQRT_HALF], atol=1e-12)
        np.testing.assert_allclose(expansion.populations, 0.5, atol=1e-12)
        np.testing.assert_allclose(expansion.simplified_matrix(), np.eye(2) / 2, atol=1e-12)
        self.assertLessEqual(expansion.leak_residual, 1e-12)

    def test_matches_simplified_matrix(self):
        state = scenario_state('example1_range10_00', (0.7, 0.3))
        decomposition = scenario_decomposition(load_scenario('example1_range10_00', (0.7, 0.3)))
        expansion = simultaneous_expansion(decomposition, sz_pair(), state)
        np.testing.assert_allclose(
            expansion.simplified_matrix(), simplified_matrix(state, sz_pair()).matrix, atol=1e-12,
        )

    def test_mixing_states_with_a_shared_form(self):
        first = np.sqrt(0.8) * ket(UP, DOWN) + np.sqrt(0.2) * ket(DOWN, UP)
        second = np.sqrt(0.3) * ket(UP, DOWN) - 1j * np.sqrt(0.7) * ket(DOWN, UP)
        decomposition = PureDecomposition.build([(0.4, first), (0.6, second)], 2, 2)
        mixed = mix(decomposition)
        parts = [from_pure(vector, 2, 2) for vector in (first, second)]
        for state in [*parts, mixed]:
            self.assertTrue(is_twin_pair(state, sz_pair()).verdict)
        self.assertIsNotNone(find_complete_twins(solve_twin_space(mixed), mixed, seed=5))
        expansion = simultaneous_expansion(decomposition, sz_pair(-1), mixed)
        self.assertLessEqual(expansion.leak_residual, 1e-12)
        expected = sum(
            w * simplified_matrix(part, sz_pair(-1)).matrix for w, part in zip((0.4, 0.6), parts)
        )
        np.testing.assert_allclose(simplified_matrix(mixed, sz_pair(-1)).matrix, expected, atol=1e-12)
        np.testing.assert_allclose(expansion.simplified_matrix(), expected, atol=1e-12)

    def test_leak(self):
        decomposition = PureDecomposition.build([(0.5, ket(UP, DOWN)), (0.5, ket(UP, UP))], 2, 2)
        matched = MatchedBases(
            np.array([-0.5, 0.5]), np.array([[1.0, 0], [0, 1]]), np.array([[0, 1.0], [1, 0]]), sz_pair(-1),
        )
        with self.assertRaises(OffDiagonalLeak):
            simultaneous_expansion(decomposition, matched)


class CompatibilityTests(SimpleTestCase):
    def test_example1(self):
        report = compatibility_report(example1_decomposition(), sz_pair(-1), example1_state())
        self.assertTrue(report.passed, report.residuals)
        self.assertIn('+:A,rho[0]', report.residuals)
        self.assertIn('-:rho[0],rho[1]', report.residuals)
        self.assertEqual(len(report.residuals), 12)

    def test_rotated_pair_is_reported(self):
        decomposition = PureDecomposition.build([(0.5, ket(UP, DOWN)), (0.5, ket(DOWN, UP))], 2, 2)
        theta = 0.1
        U = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        A = U @ SZ @ U.T
        matched = MatchedBases(np.array([-0.5, 0.5]), U, U, ObservablePair(A.astype(complex), -A.astype(complex)))
        report = compatibility_report(decomposition, matched)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.residuals['+:A,rho[0]'], np.sin(2 * theta) / 2)
        self.assertLessEqual(report.residuals['+:A,rho'], 1e-12)
        self.assertLessEqual(report.residuals['+:rho[0],rho[1]'], 1e-12)
