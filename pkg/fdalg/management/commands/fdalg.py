import logging
import os
import sys

from django.core.management.base import BaseCommand, CommandError

from fdalg.cli import EXIT_ERROR, exit_code_for, read_json, render_report, stopwatch, write_json
from fdalg.decompose import (
    Failure, decompose_theorem_a, decompose_theorem_d, kernel_meets_radical_trivially, split_ac3,
)
from fdalg.exceptions import BudgetExceeded, FdalgError
from fdalg.gallery import FIXTURES, build_fixture, verify_fixture
from fdalg.identities import CLI_TOKENS, IdentitySpec, check_at_point, check_formal, check_pointwise, identity_kind
from fdalg.localmaps import LOCAL_KINDS, certify_local, experiment_a2, orbit_membership
from fdalg.maps import classify, preserves_squares
from fdalg.serializers import (
    algebra_to_data, certification_to_data, element_to_data, load_algebra, load_element, load_map,
    load_subspace, map_to_data, subspace_to_data, verdict_to_data, witness_to_data,
)


logger = logging.getLogger(__name__)

INVARIANTS = ('radical', 'center', 'commutator', 'derivations', 'multalg')
CHECK_MODES = ('formal', 'pointwise', 'exhaustive', 'sampled')


class Command(BaseCommand):
    help = 'Exact checks on finite-dimensional associative algebras; prints a JSON report.'

    exit_code = 0

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        validate = subparsers.add_parser('validate', help='Validate an algebra file.')
        validate.add_argument('algebra')

        invariant = subparsers.add_parser('invariant', help='Compute a derived subspace.')
        invariant.add_argument('algebra')
        invariant.add_argument('--what', choices=INVARIANTS, required=True)
        invariant.add_argument('--method', default='auto',
                               choices=['auto', 'dickson', 'trace_form', 'frobenius', 'brute'])
        invariant.add_argument('--budget', type=int)

        check = subparsers.add_parser('check', help='Decide a polynomial condition P(x) in V.')
        check.add_argument('algebra')
        check.add_argument('--map', required=True)
        check.add_argument('--identity', choices=sorted(CLI_TOKENS), required=True)
        check.add_argument('--mode', choices=CHECK_MODES, default='formal')
        check.add_argument('--at', help='Element file; evaluate P at this point only.')
        check.add_argument('--y', help='Element file for the second variable of bivariate identities.')
        check.add_argument('--target', choices=['commutators', 'radical'])
        check.add_argument('--budget', type=int)
        check.add_argument('--seed', type=int)
        check.add_argument('--samples', type=int)

        classify_parser = subparsers.add_parser('classify', help='Classify a linear map.')
        classify_parser.add_argument('algebra')
        classify_parser.add_argument('--map', required=True)

        decompose = subparsers.add_parser('decompose', help='Inner-plus-radical or alpha*J decomposition.')
        decompose.add_argument('algebra')
        decompose.add_argument('--map', required=True)
        decompose.add_argument('--theorem', choices=['d', 'a'], required=True)
        decompose.add_argument('--allow-char-violation', action='store_true')
        decompose.add_argument('--complement')

        local = subparsers.add_parser('local', help='Local map certification.')
        local.add_argument('algebra')
        local.add_argument('--map', required=True)
        local.add_argument('--kind', choices=[k.replace('_', '-') for k in LOCAL_KINDS], required=True)
        local.add_argument('--at')
        local.add_argument('--mode', choices=['exhaustive', 'sampled'])
        local.add_argument('--budget', type=int)
        local.add_argument('--seed', type=int)
        local.add_argument('--samples', type=int)

        a2 = subparsers.add_parser('a2', help='Local Jordan automorphism experiment.')
        a2.add_argument('algebra')
        a2.add_argument('--map', required=True)
        a2.add_argument('--budget', type=int)

        gallery = subparsers.add_parser('gallery', help='Build or verify the example fixtures.')
        gallery.add_argument('name', nargs='?', choices=sorted(FIXTURES))
        gallery.add_argument('--out')
        gallery.add_argument('--verify-all', action='store_true')

    def run_from_argv(self, argv):
        super().run_from_argv(argv)
        if self.exit_code:
            sys.exit(self.exit_code)

    def handle(self, *args, **options):
        subcommand = options['subcommand']
        handler = getattr(self, f"handle_{subcommand}")
        with stopwatch() as timings:
            try:
                result = handler(options)
            except BudgetExceeded as exc:
                result = {'status': 'BUDGET_EXCEEDED', 'budget': exc.extra.get('budget'),
                          'details': {'error': exc.code, 'message': exc.detail}}
            except FdalgError as exc:
                raise CommandError(str(exc), returncode=EXIT_ERROR) from exc
        self.exit_code = exit_code_for(result['status'])
        self.stdout.write(render_report(subcommand, result, timings))

    # ========================================================================
    # LOADING
    # ========================================================================

    def _algebra(self, options):
        return load_algebra(read_json(options['algebra']))

    def _map(self, A, options):
        return load_map(A, read_json(options['map']))

    # ========================================================================
    # SUBCOMMANDS
    # ========================================================================

    def handle_validate(self, options):
        try:
            A = self._algebra(options)
        except FdalgError as exc:
            if exc.code not in ('NOT_ASSOCIATIVE', 'MALFORMED_TABLE'):
                raise
            return {'status': 'FAIL', 'details': {'error': exc.code, 'message': exc.detail,
                                                  **witness_to_data(exc.extra)}}
        details = {
            'dim': A.dim,
            'field': A.field.to_data(),
            'labels': list(A.labels),
            'unital': A.unit is not None,
            'commutative': A.is_commutative,
        }
        witnesses = {'unit': element_to_data(A.unit)} if A.unit is not None else {}
        return {'status': 'OK', 'details': details, 'witnesses': witnesses}

    def handle_invariant(self, options):
        A = self._algebra(options)
        what = options['what']
        if what == 'radical':
            S = A.radical(options['method'], budget=options['budget'])
        elif what == 'center':
            S = A.center
        elif what == 'commutator':
            S = A.commutator_space
        elif what == 'multalg':
            S = A.multiplication_algebra
        else:
            maps = A.derivation_space()
            return {'status': 'OK', 'details': {'what': what, 'dim': len(maps)},
                    'witnesses': {'basis': [map_to_data(D) for D in maps]}}
        return {'status': 'OK', 'details': {'what': what, 'dim': S.dim},
                'witnesses': {'subspace': subspace_to_data(S)}}

    def handle_check(self, options):
        A = self._algebra(options)
        T = self._map(A, options)
        target = None
        if options['target'] == 'radical':
            target = A.radical()
        elif options['target'] == 'commutators':
            target = A.commutator_space
        spec = IdentitySpec(identity_kind(options['identity']), (T,), target)
        if options['at']:
            x = load_element(A, read_json(options['at']))
            y = load_element(A, read_json(options['y'])) if options['y'] else None
            return verdict_to_data(check_at_point(A, spec, x, y))
        mode = options['mode']
        if mode == 'formal':
            verdict = check_formal(A, spec)
        else:
            verdict = check_pointwise(A, spec, budget=options['budget'], seed=options['seed'],
                                      mode=None if mode == 'pointwise' else mode,
                                      sample_count=options['samples'])
        return verdict_to_data(verdict)

    def handle_classify(self, options):
        A = self._algebra(options)
        T = self._map(A, options)
        profile = classify(A, T)
        details = {**profile.to_data(), 'preserves_squares': preserves_squares(A, T)}
        return {'status': 'OK', 'details': details}

    def handle_decompose(self, options):
        A = self._algebra(options)
        T = self._map(A, options)
        allow = options['allow_char_violation']
        if options['complement']:
            complement = load_subspace(A, read_json(options['complement']))
            result = split_ac3(A, T, complement, allow_char_violation=allow)
            if isinstance(result, Failure):
                return self._failure(result)
            return {'status': 'OK', 'details': {'theorem': 'ac3'},
                    'witnesses': {'jordan_part': map_to_data(result.jordan_part),
                                  'radical_part': map_to_data(result.radical_part),
                                  'rad': subspace_to_data(result.rad)}}
        if options['theorem'] == 'd':
            result = decompose_theorem_d(A, T, allow_char_violation=allow)
            if isinstance(result, Failure):
                return self._failure(result)
            return {'status': 'OK', 'details': {'theorem': 'd'},
                    'witnesses': {'a': element_to_data(result.a), 'R': map_to_data(result.R),
                                  'rad': subspace_to_data(result.rad)}}
        result = decompose_theorem_a(A, T, allow_char_violation=allow)
        if isinstance(result, Failure):
            return self._failure(result)
        details = {'theorem': 'a', 'profile': result.profile.to_data(),
                   'kernel_meets_radical_trivially': kernel_meets_radical_trivially(A, T)}
        witnesses = {'alpha': element_to_data(result.alpha), 'J': map_to_data(result.J)}
        scalar = A.unit_multiple(result.alpha)
        if scalar is not None:
            witnesses['alpha']['scalar'] = A.field.format(scalar)
        return {'status': 'OK', 'details': details, 'witnesses': witnesses}

    def _failure(self, failure):
        return {'status': 'FAIL', 'details': {'code': failure.code, 'message': failure.detail},
                'witnesses': witness_to_data(failure.data)}

    def handle_local(self, options):
        A = self._algebra(options)
        T = self._map(A, options)
        kind = options['kind']
        if options['at']:
            x = load_element(A, read_json(options['at']))
            member, data = orbit_membership(A, kind, T, x)
            return {'status': 'PASS' if member else 'FAIL', 'mode': 'single_point',
                    'details': {'kind': kind}, 'witnesses': {'point': element_to_data(x), **witness_to_data(data)}}
        certification = certify_local(A, kind, T, budget=options['budget'], seed=options['seed'],
                                      mode=options['mode'], sample_count=options['samples'])
        return certification_to_data(certification)

    def handle_a2(self, options):
        A = self._algebra(options)
        T = self._map(A, options)
        report = experiment_a2(A, T, budget=options['budget'])
        result = certification_to_data(report.certification)
        result['status'] = report.status
        result['details'].update({
            'certification': report.certification.status,
            'profile': report.profile.to_data(),
            'anomaly': report.anomaly,
            'characteristic_excluded': report.characteristic_excluded,
        })
        return result

    def handle_gallery(self, options):
        name = options['name']
        if options['out']:
            if not name:
                raise FdalgError("--out needs a fixture name", code='MALFORMED_ARGUMENT')
            self._write_fixture(build_fixture(name), options['out'])
        if name and not options['verify_all']:
            fixture = build_fixture(name)
            return {'status': 'OK', 'details': {'name': name, 'notes': fixture.notes,
                                                'expected': [row.to_data() for row in fixture.expected]}}
        names = [name] if name else list(FIXTURES)
        rows = []
        for fixture_name in names:
            for result in verify_fixture(build_fixture(fixture_name)):
                rows.append({'fixture': fixture_name, **result.row.to_data(), 'actual': result.actual,
                             'ok': result.ok})
        failed = sum(not row['ok'] for row in rows)
        return {'status': 'FAIL' if failed else 'PASS',
                'details': {'fixtures': names, 'rows': len(rows), 'failed': failed},
                'witnesses': {'rows': rows}}

    def _write_fixture(self, fixture, directory):
        os.makedirs(directory, exist_ok=True)
        write_json(os.path.join(directory, 'algebra.json'), algebra_to_data(fixture.algebra))
        write_json(os.path.join(directory, 'map.json'), map_to_data(fixture.map))
        for aux_name, T in fixture.aux_maps.items():
            write_json(os.path.join(directory, f'map-{aux_name}.json'), map_to_data(T))
        write_json(os.path.join(directory, 'expected.json'), {
            'name': fixture.name,
            'notes': fixture.notes,
            'rows': [row.to_data() for row in fixture.expected],
        })
        logger.info("Wrote fixture %s to %s", fixture.name, directory)
