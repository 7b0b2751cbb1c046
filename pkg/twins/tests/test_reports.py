import json

import numpy as np
from django.test import SimpleTestCase

from twins import reports
from twins.exceptions import SparsityViolation
from twins.solver import solve_twin_space
from twins.states import from_pure

from .factories import DOWN, UP, example1_state, ket, maximally_mixed, scenario_state, sz_pair


class VerdictTests(SimpleTestCase):
    def test_verdict(self):
        self.assertEqual(reports.verdict(1e-12, 1e-8), {'passed': True, 'residual': 1e-12, 'tolerance': 1e-8})
        self.assertFalse(reports.verdict(1.0, 1e-8)['passed'])

    def test_all_passed_walks_nested_reports(self):
        report = {'a': reports.verdict(0, 1), 'b': [{'c': reports.verdict(2, 1)}]}
        self.assertFalse(reports.all_passed(report))
        report['b'][0]['c'] = reports.verdict(0, 1)
        self.assertTrue(reports.all_passed(report))

    def test_error_entry(self):
        entry = reports.error_entry(SparsityViolation('too large'))
        self.assertEqual(entry, {'passed': False, 'error': 'too large', 'code': 'sparsity_violation'})


class SolveReportTests(SimpleTestCase):
    def test_example1(self):
        state = example1_state()
        report = reports.solve_report(state, solve_twin_space(state), scenario='example1_range10_00')
        self.assertTrue(report['passed'])
        self.assertEqual(report['dim_total'], 2)
        self.assertEqual(report['reference']['dim_reference'], 2)
        self.assertEqual(report['warnings'], [])

    def test_example2_reports_both_dimensions(self):
        state = scenario_state('example2_ms1')
        report = reports.solve_report(state, solve_twin_space(state), scenario='example2_ms1')
        self.assertEqual(report['reference']['dim_definitional'], 4)
        self.assertEqual(report['reference']['dim_reference'], 3)
        self.assertTrue(report['reference']['containment']['passed'])

    def test_nonsingular_warning(self):
        state = maximally_mixed()
        report = reports.solve_report(state, solve_twin_space(state))
        self.assertEqual(report['warnings'], [reports.NONSINGULAR_WARNING])
        self.assertTrue(report['passed'])


class VerifyReportTests(SimpleTestCase):
    def test_twin_pair(self):
        report = reports.verify_report(example1_state(), sz_pair())
        self.assertTrue(report['passed'])
        np.testing.assert_allclose(report['spectra']['sigma_prime'], [-0.5, 0.5], atol=1e-12)
        self.assertEqual(len(report['spectra']['characteristic_projectors']), 2)


class AnalyzeReportTests(SimpleTestCase):
    def test_product_state(self):
        state = from_pure(ket(UP, DOWN), 2, 2)
        report = reports.analyze_report(state, solve_twin_space(state), seed=0, attempts=4)
        self.assertTrue(report['passed'])
        self.assertTrue(report['complete_twins']['found'])


class RenderTests(SimpleTestCase):
    def test_json(self):
        rendered = reports.render({'passed': True, 'residual': 0.1}, 'json')
        self.assertEqual(json.loads(rendered), {'passed': True, 'residual': 0.1})

    def test_text(self):
        report = {'command': 'solve', 'twin': reports.verdict(1e-17, 1e-8), 'sub': {'dims': [2, 2]}}
        text = reports.render_text(report)
        self.assertIn('twin: PASS (residual 1e-17, tolerance 1e-08)', text)
        self.assertIn('sub:\n  dims: [2, 2]', text)
