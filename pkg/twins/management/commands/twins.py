"""
twins 指令：python manage.py twins <subcommand> ...

exit code：0 成功、1 驗證失敗、2 輸入錯誤。
路徑為 '-' 時從標準輸入讀取文件。
"""
import argparse
import io
import logging
import sys

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser

from twins import reports
from twins.exceptions import InvalidInput, TwinError
from twins.pairs import check_dims
from twins.serializers import (
    DecompositionDocumentSerializer, PairDocumentSerializer, StateDocumentSerializer,
)
from twins.solver import solve_twin_space
from twins.spins import SCENARIOS, build_scenario, load_scenario, scenario_decomposition
from twins.states import check_decomposition

logger = logging.getLogger(__name__)

EXIT_VERIFICATION = 1
EXIT_INPUT = 2


def _flatten(detail, prefix=''):
    """ValidationError.detail -> ['field.sub: message', ...]"""
    if isinstance(detail, dict):
        messages = []
        for key, value in detail.items():
            messages.extend(_flatten(value, f'{prefix}.{key}' if prefix else str(key)))
        return messages
    if isinstance(detail, list):
        messages = []
        for index, value in enumerate(detail):
            if isinstance(value, (dict, list)):
                messages.extend(_flatten(value, f'{prefix}[{index}]'))
            else:
                messages.append(f'{prefix}: {value}' if prefix else str(value))
        return messages
    return [f'{prefix}: {detail}' if prefix else str(detail)]


class Command(BaseCommand):
    help = 'Compute and analyze twin observables of a bipartite density matrix.'
    stealth_options = ('stdin',)

    def add_arguments(self, parser):
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--rank-tol', type=float, default=None)
        common.add_argument('--residual-tol', type=float, default=None)
        common.add_argument('--cluster-tol', type=float, default=None)
        common.add_argument('--seed', type=int, default=None)
        common.add_argument('--attempts', type=int, default=None)
        common.add_argument('--format', choices=('json', 'text'), default='json')

        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        solve = subparsers.add_parser('solve', parents=[common], help='twin space and its dimensions')
        solve.add_argument('state')

        verify = subparsers.add_parser('verify', parents=[common], help='twin check, commutation and spectra')
        verify.add_argument('state')
        verify.add_argument('pair')

        analyze = subparsers.add_parser('analyze', parents=[common], help='geometry, detectable split, complete twins')
        analyze.add_argument('state')

        measure = subparsers.add_parser('measure', parents=[common], help='distant measurement report')
        measure.add_argument('state')
        measure.add_argument('pair')

        schmidt = subparsers.add_parser('schmidt', parents=[common], help='Schmidt forms from complete twins')
        schmidt.add_argument('state')
        schmidt.add_argument('--decomposition', default=None)

        example = subparsers.add_parser('example', parents=[common], help='write a spin scenario document')
        example.add_argument('scenario', choices=list(SCENARIOS))
        example.add_argument('--weights', type=float, nargs='+', default=None)
        example.add_argument('--decomposition', action='store_true')

    def handle(self, *args, **options):
        if options['verbosity'] >= 2:
            logging.getLogger('twins').setLevel(logging.DEBUG)
        self.options = options
        logger.debug('twins %s', options['subcommand'])
        handler = getattr(self, f"handle_{options['subcommand']}")
        try:
            report = handler(options)
        except TwinError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=exc.exit_code)
        if report is None:
            return
        self.stdout.write(reports.render(report, options['format']), ending='')
        if not report['passed']:
            raise CommandError('verification failed', returncode=EXIT_VERIFICATION)

    # 讀取文件
    def read_document(self, path):
        try:
            if path == '-':
                stream = self.options.get('stdin') or sys.stdin
                raw = stream.read()
            else:
                with open(path, 'rb') as handle:
                    raw = handle.read()
        except OSError as exc:
            raise CommandError(f'{path}: {exc.strerror}', returncode=EXIT_INPUT)
        if isinstance(raw, str):
            raw = raw.encode('utf-8')
        try:
            data = JSONParser().parse(io.BytesIO(raw))
        except ParseError as exc:
            raise CommandError(f'{path}: {exc.detail}', returncode=EXIT_INPUT)
        if not isinstance(data, dict):
            raise CommandError(f'{path}: document must be a JSON object', returncode=EXIT_INPUT)
        return data

    def validate(self, serializer, path):
        try:
            serializer.is_valid(raise_exception=True)
        except serializers.ValidationError as exc:
            raise CommandError(f'{path}: ' + '; '.join(_flatten(exc.detail)), returncode=EXIT_INPUT)
        return serializer.validated_data

    def tolerance_overrides(self):
        return {
            'rank_tol': self.options.get('rank_tol'),
            'residual_tol': self.options.get('residual_tol'),
            'cluster_tol': self.options.get('cluster_tol'),
        }

    def load_state(self, path):
        """StateDocument 或 DecompositionDocument 皆可"""
        data = self.read_document(path)
        context = {'tolerances': self.tolerance_overrides()}
        if 'components' in data:
            serializer = DecompositionDocumentSerializer(data=data, context=context)
        else:
            serializer = StateDocumentSerializer(data=data, context=context)
        return self.validate(serializer, path)

    def load_pair(self, path, state):
        serializer = PairDocumentSerializer(data=self.read_document(path), context={'tol': state.tol})
        pair = self.validate(serializer, path)['pair']
        try:
            check_dims(state, pair)
        except InvalidInput as exc:
            raise CommandError(f'{path}: {exc}', returncode=EXIT_INPUT)
        return pair

    # 子指令
    def handle_solve(self, options):
        document = self.load_state(options['state'])
        state = document['state']
        space = solve_twin_space(state)
        report = reports.solve_report(state, space, scenario=document.get('scenario'))
        for warning in report['warnings']:
            self.stderr.write(f'warning: {warning}')
        return report

    def handle_verify(self, options):
        state = self.load_state(options['state'])['state']
        return reports.verify_report(state, self.load_pair(options['pair'], state))

    def handle_analyze(self, options):
        state = self.load_state(options['state'])['state']
        space = solve_twin_space(state)
        return reports.analyze_report(state, space, seed=options['seed'], attempts=options['attempts'])

    def handle_measure(self, options):
        state = self.load_state(options['state'])['state']
        return reports.measure_report(state, self.load_pair(options['pair'], state))

    def handle_schmidt(self, options):
        document = self.load_state(options['state'])
        state = document['state']
        decomposition = document.get('decomposition')
        if options['decomposition']:
            decomposition = self.load_state(options['decomposition']).get('decomposition')
            if decomposition is None:
                raise CommandError(f"{options['decomposition']}: not a decomposition document", returncode=EXIT_INPUT)
            check_decomposition(state, decomposition)
        space = solve_twin_space(state)
        return reports.schmidt_report(
            state, space, decomposition=decomposition, seed=options['seed'], attempts=options['attempts'],
        )

    def handle_example(self, options):
        scenario = load_scenario(options['scenario'], options['weights'])
        context = {'scenario': scenario.name}
        if options['decomposition']:
            document = DecompositionDocumentSerializer(scenario_decomposition(scenario), context=context).data
        else:
            document = StateDocumentSerializer(build_scenario(scenario), context=context).data
        self.stdout.write(reports.render_json(document))
        return None
