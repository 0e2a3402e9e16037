import json
import os
import tempfile
from io import StringIO

from django.test import SimpleTestCase, override_settings

from fdalg import __version__
from fdalg.algebra import matrix_algebra
from fdalg.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, EXIT_UNDECIDED, exit_code_for, run, write_json
from fdalg.maps import conjugation, scalar_multiple
from fdalg.scalars import FieldSpec
from fdalg.serializers import algebra_to_data, map_to_data


class CommandTestCase(SimpleTestCase):
    """Runs the ``fdalg`` command in-process against fixture files written to a temp directory."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name
        self.addCleanup(self._tmp.cleanup)

    def fdalg(self, *argv):
        stdout, stderr = StringIO(), StringIO()
        code = run([str(a) for a in argv], stdout=stdout, stderr=stderr)
        output = stdout.getvalue()
        return code, json.loads(output) if output.strip() else None, stderr.getvalue()

    def fixture(self, name):
        directory = os.path.join(self.tmp, name)
        code, _, _ = self.fdalg('gallery', name, '--out', directory)
        self.assertEqual(code, EXIT_OK)
        return directory

    def path(self, directory, filename):
        return os.path.join(directory, filename)


class ValidateInvariantTestCase(CommandTestCase):
    def test_validate_written_fixture(self):
        directory = self.fixture('cd2-demo')
        code, report, _ = self.fdalg('validate', self.path(directory, 'algebra.json'))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['command'], 'validate')
        self.assertEqual(report['details']['dim'], 4)
        self.assertTrue(report['details']['unital'])
        self.assertEqual(report['witnesses']['unit']['coords'], ['1', '0', '0', '1'])
        self.assertEqual(report['version'], __version__)

    def test_validate_reports_non_associative_table(self):
        path = os.path.join(self.tmp, 'bad.json')
        # b0*b0 = b1, b1*b0 = b0
        write_json(path, {
            'field': {'kind': 'Q'},
            'dim': 2,
            'table': [[['0', '1'], ['0', '0']], [['1', '0'], ['0', '0']]],
        })
        code, report, _ = self.fdalg('validate', path)
        self.assertEqual(code, EXIT_FAIL)
        self.assertEqual(report['details']['error'], 'NOT_ASSOCIATIVE')
        self.assertEqual(report['details']['triple'], [1, 1, 1])

    def test_missing_file(self):
        code, report, stderr = self.fdalg('validate', os.path.join(self.tmp, 'missing.json'))
        self.assertEqual(code, EXIT_ERROR)
        self.assertIsNone(report)
        self.assertIn('FILE_NOT_FOUND', stderr)

    def test_unknown_subcommand(self):
        code, _, stderr = self.fdalg('frobnicate')
        self.assertEqual(code, EXIT_ERROR)
        self.assertTrue(stderr.startswith('fdalg:'))

    def test_radical_of_triangular_algebra(self):
        directory = self.fixture('tri-rad-comm')
        code, report, _ = self.fdalg('invariant', self.path(directory, 'algebra.json'), '--what', 'radical')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['details']['dim'], 3)

    def test_derivation_basis(self):
        directory = self.fixture('cd2-demo')
        code, report, _ = self.fdalg('invariant', self.path(directory, 'algebra.json'), '--what', 'derivations')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['details']['dim'], 3)
        self.assertEqual(len(report['witnesses']['basis']), 3)


class CheckClassifyTestCase(CommandTestCase):
    def test_pointwise_pass_and_formal_fail(self):
        directory = self.fixture('f2-m2-cube')
        args = (self.path(directory, 'algebra.json'), '--map', self.path(directory, 'map.json'),
                '--identity', 'xdxx')
        code, report, _ = self.fdalg('check', *args, '--mode', 'pointwise')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['mode'], 'pointwise_exhaustive')
        self.assertEqual(report['details']['checked'], 16)
        code, report, _ = self.fdalg('check', *args)
        self.assertEqual(code, EXIT_FAIL)
        self.assertEqual(report['witnesses']['monomial'], [0, 0, 3])
        self.assertTrue(report['details']['equivalence'].startswith('not guaranteed'))

    def test_pointwise_witness_reverifies_at_a_single_point(self):
        directory = self.fixture('cd2-demo')
        algebra = self.path(directory, 'algebra.json')
        args = (algebra, '--map', self.path(directory, 'map-perturbed.json'), '--identity', 'xd')
        code, report, _ = self.fdalg('check', *args, '--mode', 'pointwise')
        self.assertEqual(code, EXIT_FAIL)
        point = os.path.join(self.tmp, 'witness.json')
        write_json(point, report['witnesses']['point'][0])
        code, single, _ = self.fdalg('check', *args, '--at', point)
        self.assertEqual(code, EXIT_FAIL)
        self.assertEqual(single['mode'], 'single_point')
        self.assertEqual(single['witnesses']['value'], report['witnesses']['value'])
        code, single, _ = self.fdalg('check', algebra, '--map', self.path(directory, 'map.json'),
                                     '--identity', 'xd', '--at', point)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(single['details']['checked'], 1)

    def test_bivariate_point_needs_y(self):
        directory = self.fixture('cd2-demo')
        point = os.path.join(self.tmp, 'unit.json')
        write_json(point, {'coords': ['1', '0', '0', '1']})
        args = (self.path(directory, 'algebra.json'), '--map', self.path(directory, 'map.json'),
                '--identity', 'h1', '--at', point)
        code, _, stderr = self.fdalg('check', *args)
        self.assertEqual(code, EXIT_ERROR)
        self.assertIn('MALFORMED_ARGUMENT', stderr)
        code, report, _ = self.fdalg('check', *args, '--y', point)
        self.assertEqual(report['mode'], 'single_point')

    def test_exhaustive_over_rationals_is_over_budget(self):
        directory = self.fixture('rd-skew')
        code, report, _ = self.fdalg('check', self.path(directory, 'algebra.json'),
                                     '--map', self.path(directory, 'map.json'),
                                     '--identity', 'xd', '--mode', 'exhaustive')
        self.assertEqual(code, EXIT_UNDECIDED)
        self.assertEqual(report['status'], 'BUDGET_EXCEEDED')

    def test_classify(self):
        directory = self.fixture('rd-skew')
        code, report, _ = self.fdalg('classify', self.path(directory, 'algebra.json'),
                                     '--map', self.path(directory, 'map.json'))
        self.assertEqual(code, EXIT_OK)
        self.assertFalse(report['details']['derivation'])
        self.assertIn('preserves_squares', report['details'])


class DecomposeLocalTestCase(CommandTestCase):
    def setUp(self):
        super().setUp()
        self.cd2 = self.fixture('cd2-demo')
        self.algebra = self.path(self.cd2, 'algebra.json')

    def test_inner_derivation_decomposes(self):
        code, report, _ = self.fdalg('decompose', self.algebra, '--map', self.path(self.cd2, 'map.json'),
                                     '--theorem', 'd')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['witnesses']['rad']['dim'], 0)

    def test_perturbed_map_does_not_decompose(self):
        code, report, _ = self.fdalg('decompose', self.algebra,
                                     '--map', self.path(self.cd2, 'map-perturbed.json'), '--theorem', 'd')
        self.assertEqual(code, EXIT_FAIL)
        self.assertEqual(report['details']['code'], 'NO_DECOMPOSITION')

    def test_scalar_alpha_is_printed(self):
        A = matrix_algebra(FieldSpec.prime_field(7), 2)
        T = scalar_multiple(A, A.unit.scale(2), conjugation(A, A.unit + A.basis_element(1)))
        algebra, map_path = os.path.join(self.tmp, 'm2f7.json'), os.path.join(self.tmp, 't2conj.json')
        write_json(algebra, algebra_to_data(A))
        write_json(map_path, map_to_data(T))
        code, report, _ = self.fdalg('decompose', algebra, '--map', map_path, '--theorem', 'a')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['witnesses']['alpha']['scalar'], '2')
        self.assertEqual(report['witnesses']['alpha']['coords'], ['2', '0', '0', '2'])

    def test_local_certification(self):
        code, report, _ = self.fdalg('local', self.algebra, '--map', self.path(self.cd2, 'map.json'),
                                     '--kind', 'inner-derivation')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['details']['checked'], 81)
        code, report, _ = self.fdalg('local', self.algebra, '--map', self.path(self.cd2, 'map-perturbed.json'),
                                     '--kind', 'inner-derivation')
        self.assertEqual(code, EXIT_FAIL)
        self.assertIn('point', report['witnesses'])

    def test_single_point(self):
        point = os.path.join(self.tmp, 'point.json')
        write_json(point, {'coords': ['1', '1', '0', '2']})
        code, report, _ = self.fdalg('local', self.algebra, '--map', self.path(self.cd2, 'map.json'),
                                     '--kind', 'inner-derivation', '--at', point)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['mode'], 'single_point')
        self.assertIn('a', report['witnesses'])

    def test_sampled_local_derivation_is_undecided(self):
        ede = self.fixture('ede-p3')
        code, report, _ = self.fdalg('local', self.path(ede, 'algebra.json'), '--map', self.path(ede, 'map.json'),
                                     '--kind', 'derivation', '--mode', 'sampled', '--seed', 1, '--samples', 4)
        self.assertEqual(code, EXIT_UNDECIDED)
        self.assertEqual(report['seed'], 1)

    def test_a2(self):
        directory = self.fixture('transpose-m2')
        code, report, _ = self.fdalg('a2', self.path(directory, 'algebra.json'),
                                     '--map', self.path(directory, 'map.json'))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['status'], 'CONFIRMED')
        self.assertTrue(report['details']['characteristic_excluded'])


class GalleryCommandTestCase(CommandTestCase):
    def test_out_writes_fixture_files(self):
        directory = self.fixture('cd2-demo')
        self.assertEqual(sorted(os.listdir(directory)),
                         ['algebra.json', 'expected.json', 'map-perturbed.json', 'map.json'])

    def test_verify_one_fixture(self):
        code, report, _ = self.fdalg('gallery', 'cd2-demo', '--verify-all')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report['details']['rows'], 5)
        self.assertEqual(report['details']['failed'], 0)

    def test_out_needs_a_name(self):
        code, _, stderr = self.fdalg('gallery', '--out', self.tmp)
        self.assertEqual(code, EXIT_ERROR)
        self.assertIn('MALFORMED_ARGUMENT', stderr)


class ReportTestCase(CommandTestCase):
    def test_timings_are_opt_in(self):
        directory = self.fixture('cd2-demo')
        _, report, _ = self.fdalg('validate', self.path(directory, 'algebra.json'))
        self.assertNotIn('timings', report)
        with override_settings(FDALG_REPORT_TIMINGS=True):
            _, report, _ = self.fdalg('validate', self.path(directory, 'algebra.json'))
        self.assertIn('seconds', report['timings'])

    def test_exit_codes(self):
        self.assertEqual(exit_code_for('CONFIRMED'), EXIT_OK)
        self.assertEqual(exit_code_for('ANOMALY'), EXIT_FAIL)
        self.assertEqual(exit_code_for('BUDGET_EXCEEDED'), EXIT_UNDECIDED)
        self.assertEqual(exit_code_for('UNDECIDED_SAMPLED'), EXIT_UNDECIDED)
