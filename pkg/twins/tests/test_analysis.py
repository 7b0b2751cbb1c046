import numpy as np
import scipy.linalg
import sympy
from django.test import SimpleTestCase
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from twins import linalg
from twins.analysis import (
    apply_function, characteristic_projector_twins, commutation_check, detectable_spectra,
    find_complete_twins, lagrange_projector, match_bases, operator_function, spectral_data,
    split_detectable, support_check, symmetric_polynomial,
)
from twins.exceptions import (
    InvalidInput, MissingFunctionValue, NotComplete, NotReducible, NotSymmetric, SpectraMismatch,
    TwinCheckFailed,
)
from twins.linalg import Side
from twins.pairs import ObservablePair, combine, is_twin_pair
from twins.solver import solve_twin_space
from twins.states import BipartiteState
from twins.tolerances import Tolerances

from .factories import DOWN, ONE, SZ, UP, example1_state, ket, scenario_state, sz_pair

x, y = sympy.symbols('x y')


def uneven_state():
    """⅓(|00⟩⟨00| + |01⟩⟨01| + |12⟩⟨12|) on 2⊗3"""
    rho = np.zeros((6, 6))
    for index in (0, 1, 5):
        rho[index, index] = 1 / 3
    return BipartiteState.from_matrix(rho, 2, 3)


def ms0_twins():
    state = scenario_state('example2_ms0')
    return state, solve_twin_space(state)


class SpectralDataTests(SimpleTestCase):
    def test_clusters(self):
        data = spectral_data(np.diag([1.0, 1.0 + 1e-10, 2.0]), 1e-8)
        np.testing.assert_allclose(data.values, [1.0, 2.0])
        self.assertEqual(data.multiplicities, (2, 1))
        np.testing.assert_allclose(data.projectors[0], np.diag([1, 1, 0]), atol=1e-12)
        self.assertFalse(data.is_nondegenerate)

    def test_index_of(self):
        data = spectral_data(SZ, 1e-8)
        self.assertEqual(data.index_of(0.5, 1e-8), 1)
        self.assertIsNone(data.index_of(0.2, 1e-8))

    def test_projectors_resolve_identity(self):
        rng = np.random.default_rng(0)
        G = rng.standard_normal((4, 4))
        data = spectral_data(G + G.T, 1e-8)
        np.testing.assert_allclose(sum(data.projectors), np.eye(4), atol=1e-10)


class CommutationTests(SimpleTestCase):
    def test_twins_commute_with_subsystem_states(self):
        state, space = ms0_twins()
        for pair in space:
            report = commutation_check(pair, state)
            self.assertTrue(report.passed, report.residuals)

    def test_random_twins(self):
        rng = np.random.default_rng(3)
        state = scenario_state('example2_ms1')
        space = solve_twin_space(state)
        for _ in range(10):
            pair = combine(space.basis, rng.standard_normal(len(space)))
            self.assertTrue(commutation_check(pair, state).passed)

    def test_non_twin_fails(self):
        pair = ObservablePair(ONE.sx, ONE.sx)
        report = commutation_check(pair, scenario_state('example2_ms1'))
        self.assertFalse(report.passed)


class DetectableSplitTests(SimpleTestCase):
    def reference_pair(self):
        half = 0.5 * ONE.identity
        return ObservablePair(ONE.sz - half, -ONE.sz + half)

    def test_reassemble(self):
        state = scenario_state('example2_ms1')
        pair = self.reference_pair()
        split = split_detectable(pair, state)
        rebuilt = split.reassemble()
        np.testing.assert_allclose(rebuilt.a_plus, pair.a_plus, atol=1e-12)
        np.testing.assert_allclose(rebuilt.a_minus, pair.a_minus, atol=1e-12)
        self.assertEqual(split.a_prime_plus.shape, (2, 2))
        self.assertEqual(split.a_dprime_plus.shape, (1, 1))
        self.assertLessEqual(split.detectable_residual(), 1e-10)
        self.assertLessEqual(split.undetectable_residual(state), 1e-10)

    def test_undetectable_part_is_invisible(self):
        state = scenario_state('example2_ms1')
        split = split_detectable(self.reference_pair(), state)
        self.assertAlmostEqual(abs(split.a_dprime_plus[0, 0]), 1.5)
        undetectable = split.undetectable_pair()
        self.assertLess(linalg.max_abs(state.lift(undetectable.a_plus, Side.PLUS) @ state.rho), 1e-12)

    def test_not_reducible(self):
        with self.assertRaises(NotReducible):
            split_detectable(ObservablePair(ONE.sx, ONE.sx), scenario_state('example2_ms1'))

    def test_every_solved_pair_splits(self):
        for name in ('example1_range10_00', 'example2_ms0', 'example2_ms1'):
            state = scenario_state(name)
            for pair in solve_twin_space(state):
                split = split_detectable(pair, state)
                self.assertLessEqual(split.detectable_residual(), 1e-8, name)
                self.assertLessEqual(split.undetectable_residual(state), 1e-8, name)
                self.assertLessEqual(support_check(split), 1e-8, name)


class DetectableSpectraTests(SimpleTestCase):
    def test_example1(self):
        spectra = detectable_spectra(split_detectable(sz_pair(), example1_state()))
        np.testing.assert_allclose(spectra.values, [-0.5, 0.5], atol=1e-12)

    def test_multiplicities_may_differ(self):
        state = uneven_state()
        scalar = detectable_spectra(split_detectable(ObservablePair.scalar(2, 3), state))
        self.assertEqual(scalar.mult_plus, (2,))
        self.assertEqual(scalar.mult_minus, (3,))
        pair = ObservablePair(np.diag([1.0, -1.0]), np.diag([1.0, 1.0, -1.0]))
        self.assertTrue(is_twin_pair(state, pair).verdict)
        spectra = detectable_spectra(split_detectable(pair, state))
        np.testing.assert_allclose(spectra.values, [-1, 1])
        self.assertEqual(spectra.mult_plus, (1, 1))
        self.assertEqual(spectra.mult_minus, (1, 2))

    def test_mismatch(self):
        with self.assertRaises(SpectraMismatch):
            detectable_spectra(split_detectable(ObservablePair(SZ, 2 * SZ), example1_state()))

    def test_support_violation_for_non_twin(self):
        split = split_detectable(ObservablePair(SZ, SZ), example1_state())
        self.assertAlmostEqual(support_check(split), 0.5)


class CharacteristicProjectorTests(SimpleTestCase):
    def test_lagrange_projector(self):
        np.testing.assert_allclose(lagrange_projector(SZ, 0.5, [-0.5]), np.diag([1, 0]))

    def test_example1(self):
        state = example1_state()
        projector_twins = characteristic_projector_twins(split_detectable(sz_pair(), state), state)
        self.assertTrue(projector_twins.passed)
        np.testing.assert_allclose([p.value for p in projector_twins], [-0.5, 0.5], atol=1e-12)
        for characteristic in projector_twins:
            self.assertAlmostEqual(characteristic.probability, 0.5)

    def test_reconstruction_of_action_on_rho(self):
        for name in ('example1_range10_00', 'example2_ms0', 'example2_ms1'):
            state = scenario_state(name)
            rng = np.random.default_rng(len(name))
            space = solve_twin_space(state)
            pair = combine(space.basis, rng.standard_normal(len(space)))
            projector_twins = characteristic_projector_twins(split_detectable(pair, state), state)
            self.assertTrue(projector_twins.passed, name)
            for side, A in ((Side.PLUS, pair.a_plus), (Side.MINUS, pair.a_minus)):
                full = [p.full_plus if side is Side.PLUS else p.full_minus for p in projector_twins]
                rebuilt = sum(p.value * state.lift(P, side) for p, P in zip(projector_twins, full)) @ state.rho
                self.assertLessEqual(linalg.max_abs(rebuilt - state.lift(A, side) @ state.rho), 1e-8, name)

    def test_full_projectors_are_twins(self):
        state, space = ms0_twins()
        pair = combine(space.basis, [0.2, 1.0, 0.7])
        for characteristic in characteristic_projector_twins(split_detectable(pair, state), state):
            full = ObservablePair(characteristic.full_plus, characteristic.full_minus)
            self.assertTrue(is_twin_pair(state, full).verdict)


class FunctionClosureTests(SimpleTestCase):
    def test_square(self):
        pair = apply_function(sz_pair(), lambda value: value ** 2, state=example1_state())
        np.testing.assert_allclose(pair.a_plus, np.eye(2) / 4, atol=1e-12)
        np.testing.assert_allclose(pair.a_minus, np.eye(2) / 4, atol=1e-12)

    def test_value_table(self):
        pair = apply_function(sz_pair(), {0.5: 1.0, -0.5: 0.0})
        np.testing.assert_allclose(pair.a_plus, np.diag([1, 0]), atol=1e-12)
        np.testing.assert_allclose(pair.a_minus, np.diag([0, 1]), atol=1e-12)

    def test_missing_value(self):
        with self.assertRaises(MissingFunctionValue):
            apply_function(sz_pair(), {0.5: 1.0})

    def test_rejects_non_twin_input(self):
        with self.assertRaises(TwinCheckFailed):
            apply_function(ObservablePair(SZ, SZ), np.exp, state=example1_state())

    def test_operator_function_matches_expm(self):
        tol = Tolerances()
        A = np.array([[1.0, 0.3], [0.3, -0.2]])
        np.testing.assert_allclose(operator_function(A, np.exp, tol), scipy.linalg.expm(A), atol=1e-10)

    def test_random_polynomial_functions(self):
        state, space = ms0_twins()
        rng = np.random.default_rng(50)
        for _ in range(50):
            pair = combine(space.basis, rng.standard_normal(len(space)))
            coefficients = rng.standard_normal(int(rng.integers(1, 5)))
            result = apply_function(pair, np.polynomial.Polynomial(coefficients), state=state)
            self.assertTrue(is_twin_pair(state, result).verdict)


class SymmetricPolynomialTests(SimpleTestCase):
    def test_anticommutator(self):
        state, space = ms0_twins()
        first, second = space.basis[1], space.basis[2]
        result = symmetric_polynomial([first, second], 'x*y', state=state)
        expected = (first.a_plus @ second.a_plus + second.a_plus @ first.a_plus) / 2
        np.testing.assert_allclose(result.a_plus, expected, atol=1e-12)
        self.assertTrue(is_twin_pair(state, result).verdict)
        # 乘積順序在另一側反轉
        reversed_plus = ObservablePair(first.a_plus @ second.a_plus, second.a_minus @ first.a_minus)
        self.assertTrue(is_twin_pair(state, reversed_plus).verdict)

    def test_random_symmetric_polynomials(self):
        state, space = ms0_twins()
        rng = np.random.default_rng(20)
        for _ in range(20):
            c = rng.standard_normal(4)
            poly = c[0] + c[1] * (x + y) + c[2] * x * y + c[3] * (x ** 2 + y ** 2)
            pairs = [combine(space.basis, rng.standard_normal(len(space))) for _ in range(2)]
            result = symmetric_polynomial(pairs, poly, state=state)
            self.assertTrue(is_twin_pair(state, result).verdict)

    def test_not_symmetric(self):
        with self.assertRaises(NotSymmetric):
            symmetric_polynomial([sz_pair(), sz_pair()], 'x**2 + y')

    def test_variable_count(self):
        with self.assertRaises(InvalidInput):
            symmetric_polynomial([sz_pair()], 'x*y')

    def test_complex_coefficient(self):
        with self.assertRaises(InvalidInput):
            symmetric_polynomial([sz_pair(), sz_pair()], 'I*x*y')

    def test_not_a_polynomial(self):
        for expression in ('sin(x) + sin(y)', 'x*y + 1/(x + y)', 'x +* y'):
            with self.assertRaises(InvalidInput) as context:
                symmetric_polynomial([sz_pair(), sz_pair()], expression)
            self.assertEqual(context.exception.exit_code, 2, expression)

    @settings(deadline=None, max_examples=25)
    @seed(77)
    @given(st.integers(min_value=1, max_value=3), st.integers(min_value=0, max_value=3))
    def test_power_sums(self, p, q):
        state = example1_state()
        space = solve_twin_space(state)
        result = symmetric_polynomial([space.basis[1], space.basis[0]], x ** p * y ** q + x ** q * y ** p, state=state)
        self.assertTrue(is_twin_pair(state, result).verdict)


class CompleteTwinTests(SimpleTestCase):
    def test_match_bases_example1(self):
        matched = match_bases(split_detectable(sz_pair(), example1_state()))
        np.testing.assert_allclose(matched.sigma_prime, [-0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(matched.product_vectors[:, 0], ket(DOWN, UP), atol=1e-12)
        self.assertLessEqual(matched.eigen_residual(), 1e-12)

    def test_match_bases_reversed(self):
        matched = match_bases(split_detectable(sz_pair(-1), example1_state()))
        np.testing.assert_allclose(matched.product_vectors[:, 0], ket(UP, DOWN), atol=1e-12)

    def test_not_complete(self):
        state, _ = ms0_twins()
        with self.assertRaises(NotComplete):
            match_bases(split_detectable(ObservablePair(ONE.sz @ ONE.sz, ONE.sz @ ONE.sz), state))

    def test_search_finds_complete_twins(self):
        for name in ('example1_range10_00', 'example2_ms0', 'example2_ms1'):
            state = scenario_state(name)
            found = find_complete_twins(solve_twin_space(state), state, seed=0, attempts=16)
            self.assertIsNotNone(found, name)
            self.assertTrue(is_twin_pair(state, found.pair).verdict)
            self.assertLessEqual(found.matched.eigen_residual(), 1e-9)

    def test_search_is_reproducible(self):
        state, space = ms0_twins()
        first = find_complete_twins(space, state, seed=3)
        second = find_complete_twins(space, state, seed=3)
        np.testing.assert_array_equal(first.pair.a_plus, second.pair.a_plus)

    def test_scalars_only(self):
        state = scenario_state('example1_range10_1m1')
        self.assertIsNone(find_complete_twins(solve_twin_space(state), state, attempts=5))

    def test_unequal_ranges(self):
        state = uneven_state()
        with self.assertLogs('twins.analysis', level='INFO'):
            self.assertIsNone(find_complete_twins(solve_twin_space(state), state))
