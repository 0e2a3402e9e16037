import json

from django.test import SimpleTestCase

from fdalg.exceptions import FdalgError
from fdalg.gallery import FIXTURES, ExpectedRow, build_fixture, run_row, verify_all, verify_fixture


class GalleryTestCase(SimpleTestCase):
    def test_every_fixture_reproduces_its_rows(self):
        for name, results in verify_all().items():
            for result in results:
                with self.subTest(fixture=name, operation=result.row.operation, args=result.row.args):
                    self.assertTrue(result.ok, result.actual)

    def test_maps_act_on_their_algebra(self):
        for name in FIXTURES:
            fixture = build_fixture(name)
            self.assertIs(fixture.map.algebra, fixture.algebra)
            for T in fixture.aux_maps.values():
                self.assertIs(T.algebra, fixture.algebra)
            self.assertTrue(fixture.notes)

    def test_rows_are_json_serializable(self):
        for name in FIXTURES:
            json.dumps([row.to_data() for row in build_fixture(name).expected])

    def test_unknown_fixture(self):
        with self.assertRaises(FdalgError) as ctx:
            build_fixture('cd3-demo')
        self.assertEqual(ctx.exception.code, 'UNKNOWN_FIXTURE')

    def test_unknown_map_and_operation(self):
        fixture = build_fixture('rd-skew')
        with self.assertRaises(FdalgError) as ctx:
            fixture.get_map('perturbed')
        self.assertEqual(ctx.exception.code, 'UNKNOWN_MAP')
        with self.assertRaises(FdalgError) as ctx:
            run_row(fixture, ExpectedRow('integrate', {}, {}))
        self.assertEqual(ctx.exception.code, 'UNKNOWN_OPERATION')

    def test_disagreeing_row_is_logged(self):
        fixture = build_fixture('rd-skew')
        fixture.expected = [ExpectedRow('classify', {}, {'derivation': True})]
        with self.assertLogs('fdalg.gallery', level='ERROR'):
            (result,) = verify_fixture(fixture)
        self.assertFalse(result.ok)
        self.assertFalse(result.actual['derivation'])

    def test_library_errors_become_row_values(self):
        fixture = build_fixture('tri-rad-comm')
        actual = run_row(fixture, ExpectedRow('radical', {'method': 'brute'}, {}))
        self.assertEqual(actual, {'error': 'NO_VALID_METHOD'})
