"""
報告的組裝與輸出

每個 verdict 一律附上 residual 與判定用的 tolerance。
JSON 由 rest_framework 的 JSONRenderer 輸出，浮點數使用可完整還原的最短表示。
"""
import logging

import numpy as np
from rest_framework.renderers import JSONRenderer

from .analysis import (
    characteristic_projector_twins, commutation_check, detectable_spectra, find_complete_twins,
    split_detectable, support_check,
)
from .exceptions import VerificationError
from .measurement import distant_measurement_report
from .pairs import is_twin_pair
from .schmidt import compatibility_report, pure_schmidt, simplified_matrix, simultaneous_expansion
from .serializers import PairDocumentSerializer, encode_matrix, encode_vector
from .solver import twins_restrict_to_range_vectors
from .spins import load_scenario, reference_span
from .states import verify_subspace_geometry

logger = logging.getLogger(__name__)

NONSINGULAR_WARNING = 'nonsingular state: trivial twins only'
# Schmidt 形式與相容性檢查的容許誤差
SCHMIDT_TOL = 1e-9


def verdict(residual, tolerance, passed=None):
    residual = float(residual)
    tolerance = float(tolerance)
    if passed is None:
        passed = residual <= tolerance
    return {'passed': bool(passed), 'residual': residual, 'tolerance': tolerance}


def residual_table(residuals, tolerance):
    return {name: verdict(value, tolerance) for name, value in residuals.items()}


def is_verdict(node):
    return isinstance(node, dict) and set(node) == {'passed', 'residual', 'tolerance'}


def all_passed(node):
    """報告中任何一個 passed 為 False 即失敗"""
    if isinstance(node, dict):
        if node.get('passed') is False:
            return False
        return all(all_passed(value) for key, value in node.items() if key != 'passed')
    if isinstance(node, list):
        return all(all_passed(item) for item in node)
    return True


def error_entry(exc):
    return {'passed': False, 'error': str(exc), 'code': exc.code}


def finalize(report):
    report['passed'] = all_passed(report)
    return report


def _pair_document(pair):
    return PairDocumentSerializer(pair).data


def _values(values):
    return [float(v) for v in values]


def _state_header(command, state):
    return {
        'command': command,
        'dims': [state.d_plus, state.d_minus],
        'rank': int(state.rank),
        'singular': bool(state.is_singular),
        'tolerances': state.tol.model_dump(),
    }


# solve
def solve_report(state, space, scenario=None):
    tol = state.tol
    twin_residual = max(is_twin_pair(state, pair).residual for pair in space.basis)
    undetectable = space.dim_undetectable_plus + space.dim_undetectable_minus
    report = _state_header('solve', state)
    report.update({
        'dim_total': space.dim_total,
        'dim_detectable': space.dim_detectable,
        'dim_undetectable_plus': space.dim_undetectable_plus,
        'dim_undetectable_minus': space.dim_undetectable_minus,
        'bookkeeping': verdict(abs(space.dim_total - space.dim_detectable - undetectable), 0),
        'twin_residual': verdict(twin_residual, tol.residual_tol),
        'basis': [_pair_document(pair) for pair in space.basis],
        'warnings': [],
    })
    if not state.is_singular:
        report['warnings'].append(NONSINGULAR_WARNING)
    if scenario:
        reference = reference_span(load_scenario(scenario))
        coordinates = np.column_stack([pair.coordinates() for pair in reference])
        report['reference'] = {
            'scenario': scenario,
            'dim_reference': int(np.linalg.matrix_rank(coordinates)),
            'dim_definitional': space.dim_total,
            'containment': verdict(space.containment_distance(reference), tol.residual_tol),
            'note': 'the twin structure depends only on the range of rho; mixture weights are free',
        }
    return finalize(report)


# verify
def spectral_section(state, pair):
    """detectable 分解、相等譜、support 與特徵投影 twin"""
    tol = state.tol
    try:
        split = split_detectable(pair, state)
        spectra = detectable_spectra(split, tol)
        projector_twins = characteristic_projector_twins(split, state)
    except VerificationError as exc:
        return error_entry(exc)
    return {
        'sigma_prime': _values(spectra.values),
        'mult_plus': list(spectra.mult_plus),
        'mult_minus': list(spectra.mult_minus),
        'off_block': verdict(split.off_block_residual, tol.residual_tol),
        'detectable_twin': verdict(split.detectable_residual(), tol.residual_tol),
        'undetectable_annihilates': verdict(split.undetectable_residual(state), tol.residual_tol),
        'support': verdict(support_check(split, tol), tol.residual_tol),
        'projector_reconstruction': verdict(projector_twins.reconstruction_residual, 1e-9),
        'characteristic_projectors': [
            {
                'value': characteristic.value,
                'probability': characteristic.probability,
                'twin': verdict(characteristic.twin_residual, tol.residual_tol),
                'probability_match': verdict(characteristic.probability_residual, 1e-10),
            }
            for characteristic in projector_twins
        ],
    }


def verify_report(state, pair):
    tol = state.tol
    twin = is_twin_pair(state, pair)
    report = _state_header('verify', state)
    report['twin'] = verdict(twin.residual, twin.tolerance)
    report['commutation'] = residual_table(commutation_check(pair, state).residuals, tol.residual_tol)
    if twin.verdict:
        report['spectra'] = spectral_section(state, pair)
    return finalize(report)


# analyze
def analyze_report(state, space, seed=None, attempts=None):
    tol = state.tol
    report = _state_header('analyze', state)
    report['dim_total'] = space.dim_total
    report['dim_detectable'] = space.dim_detectable
    report['geometry'] = residual_table(verify_subspace_geometry(state).residuals, tol.residual_tol)
    consequences = twins_restrict_to_range_vectors(state, space, seed=seed)
    report['range_consequences'] = residual_table(consequences.residuals, tol.residual_tol)
    report['basis'] = []
    for index, pair in enumerate(space.basis):
        entry = {'index': index}
        entry.update(spectral_section(state, pair))
        report['basis'].append(entry)
    report['complete_twins'] = complete_section(state, space, seed, attempts)
    return finalize(report)


def complete_section(state, space, seed=None, attempts=None):
    found = find_complete_twins(space, state, seed=seed, attempts=attempts)
    if found is None:
        return {'found': False, 'note': 'no complete twins found by the seeded search; absence is not proven'}
    simplified = simplified_matrix(state, found.matched)
    return {
        'found': True,
        'attempts': found.attempts,
        'pair': _pair_document(found.pair),
        'sigma_prime': _values(found.matched.sigma_prime),
        'eigen_residual': verdict(found.matched.eigen_residual(), 1e-9),
        'simplified_matrix': {
            'index': [[float(value), k] for value, k in simplified.index.items()],
            'matrix': encode_matrix(simplified.matrix),
            'forbidden': verdict(simplified.forbidden_residual, simplified.tolerance),
        },
    }


# measure
def measure_report(state, pair):
    report = _state_header('measure', state)
    try:
        measurement = distant_measurement_report(state, pair)
    except VerificationError as exc:
        report['measurement'] = error_entry(exc)
        return finalize(report)
    report['expectation_plus'] = measurement.expectation_plus
    report['expectation_minus'] = measurement.expectation_minus
    report['outcomes'] = [
        {
            'value': outcome.value,
            'probability_plus': outcome.probability_plus,
            'probability_minus': outcome.probability_minus,
            'post_state': encode_matrix(outcome.post_state_plus),
            'conditional_plus': encode_matrix(outcome.conditional_plus),
            'conditional_minus': encode_matrix(outcome.conditional_minus),
        }
        for outcome in measurement.outcomes
    ]
    report['residuals'] = residual_table(measurement.residuals, measurement.tolerance)
    return finalize(report)


# schmidt
def schmidt_report(state, space, decomposition=None, seed=None, attempts=None):
    report = _state_header('schmidt', state)
    found = find_complete_twins(space, state, seed=seed, attempts=attempts)
    if found is None:
        report['complete_twins'] = {'found': False, 'passed': False}
        return finalize(report)
    matched = found.matched
    report['complete_twins'] = {
        'found': True,
        'pair': _pair_document(found.pair),
        'sigma_prime': _values(matched.sigma_prime),
    }
    try:
        simplified = simplified_matrix(state, matched)
        report['simplified_matrix'] = {
            'matrix': encode_matrix(simplified.matrix),
            'forbidden': verdict(simplified.forbidden_residual, simplified.tolerance),
        }
        if state.rank == 1:
            form = pure_schmidt(state, matched)
            report['pure'] = {
                'coefficients': _values(form.coefficients),
                'basis_plus': [encode_vector(v) for v in form.basis_plus.T],
                'basis_minus': [encode_vector(v) for v in form.basis_minus.T],
                'reconstruction': verdict(form.reconstruction_residual, SCHMIDT_TOL),
                'spectrum': verdict(form.spectrum_residual, SCHMIDT_TOL),
            }
        if decomposition is not None:
            expansion = simultaneous_expansion(decomposition, matched, state)
            rebuilt = np.max(np.abs(expansion.simplified_matrix() - simplified.matrix))
            report['expansion'] = {
                'coefficients': [encode_vector(row) for row in expansion.coefficients],
                'populations': [_values(row) for row in expansion.populations],
                'off_diagonal': verdict(expansion.leak_residual, state.tol.residual_tol),
                'matrix_reconstruction': verdict(rebuilt, SCHMIDT_TOL),
            }
            compatibility = compatibility_report(decomposition, matched, state)
            report['compatibility'] = residual_table(compatibility.residuals, compatibility.tolerance)
    except VerificationError as exc:
        report['error'] = error_entry(exc)
    return finalize(report)


# 輸出
def render_json(report):
    return JSONRenderer().render(report, renderer_context={'indent': 2}).decode('utf-8')


def _scalar(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render(node, lines, depth):
    pad = '  ' * depth
    for key, value in node.items():
        if is_verdict(value):
            status = 'PASS' if value['passed'] else 'FAIL'
            lines.append(f"{pad}{key}: {status} (residual {value['residual']!r}, tolerance {value['tolerance']!r})")
        elif isinstance(value, dict):
            lines.append(f'{pad}{key}:')
            _render(value, lines, depth + 1)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f'{pad}{key}:')
            for index, item in enumerate(value):
                lines.append(f'{pad}  [{index}]')
                _render(item, lines, depth + 2)
        else:
            lines.append(f'{pad}{key}: {_scalar(value)}')


def render_text(report):
    lines = []
    _render(report, lines, 0)
    return '\n'.join(lines) + '\n'


def render(report, fmt='json'):
    if fmt == 'text':
        return render_text(report)
    return render_json(report) + '\n'
