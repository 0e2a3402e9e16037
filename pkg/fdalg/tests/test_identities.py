import itertools
import random
from unittest.mock import patch

from django.test import SimpleTestCase, override_settings

from fdalg import tasks
from fdalg.algebra import matrix_algebra, upper_triangular
from fdalg.exceptions import BudgetExceeded, FdalgError
from fdalg.identities import (
    CUBE_DIFF, FAIL, H1, JORDAN_SQUARE, LINEAR_DIFF, PASS, QUARTIC_DIFF, SINGLE_POINT, UNDECIDED_SAMPLED, XD, XDXX,
    IdentitySpec, check_at_point, check_formal, check_pointwise, equivalence_note, identity_kind,
    left_multiples_in_commutators, square_multiples_in_commutators,
)
from fdalg.maps import LinMap, conjugation, inner_derivation
from fdalg.scalars import FieldSpec


def f2_trace_map(A):
    """D([[x11, x12], [x21, x22]]) = [[x22, x12], [0, x11]] on M2(F2)."""
    return LinMap.from_function(A, lambda x: A.element((x.coords[3], x.coords[1], 0, x.coords[0])))


class IdentityKindTestCase(SimpleTestCase):
    def test_cli_tokens(self):
        self.assertIs(identity_kind('xdxx'), XDXX)
        self.assertIs(identity_kind('quartic-rad'), QUARTIC_DIFF)
        self.assertIs(identity_kind('H1'), H1)
        with self.assertRaises(FdalgError) as ctx:
            identity_kind('quintic')
        self.assertEqual(ctx.exception.code, 'UNKNOWN_IDENTITY')

    def test_degrees(self):
        self.assertEqual([k.degree for k in (XDXX, CUBE_DIFF, QUARTIC_DIFF, H1)], [3, 3, 4, 3])

    def test_map_count_is_enforced(self):
        with self.assertRaises(FdalgError) as ctx:
            IdentitySpec(XDXX, ())
        self.assertEqual(ctx.exception.code, 'MALFORMED_ARGUMENT')

    def test_equivalence_note(self):
        self.assertTrue(equivalence_note(FieldSpec.rationals(), 3).startswith('equivalent'))
        self.assertTrue(equivalence_note(FieldSpec.rational_functions(2), 3).startswith('equivalent'))
        self.assertTrue(equivalence_note(FieldSpec.prime_field(5), 4).startswith('equivalent'))
        self.assertTrue(equivalence_note(FieldSpec.prime_field(2), 3).startswith('not guaranteed'))


class FormalCheckTestCase(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(0)

    def test_inner_derivation_passes_xdxx(self):
        A = matrix_algebra(FieldSpec.rationals(), 3)
        D = inner_derivation(A, A.random_element(self.rng))
        verdict = check_formal(A, IdentitySpec(XDXX, (D,)))
        self.assertEqual(verdict.status, PASS)
        self.assertEqual(verdict.mode, 'formal')

    def test_conjugation_passes_cube(self):
        A = matrix_algebra(FieldSpec.prime_field(7), 2)
        T = conjugation(A, A.unit + A.basis_element(1))
        self.assertTrue(check_formal(A, IdentitySpec(CUBE_DIFF, (T,))).passed)

    def test_identity_map_fails_xdxx_at_e11_cubed(self):
        A = matrix_algebra(FieldSpec.rationals(), 2)
        verdict = check_formal(A, IdentitySpec(XDXX, (LinMap.identity(A),)))
        self.assertEqual(verdict.status, FAIL)
        self.assertEqual(verdict.coefficient_witness, (0, 0, 0))
        self.assertEqual(verdict.witness_value, A.basis_element(0))
        self.assertFalse(A.commutator_space.contains(verdict.witness_value.coords))

    def test_rank_two_commutator_map_passes_xd(self):
        A = matrix_algebra(FieldSpec.rationals(), 2)
        a, b = A.basis_element(0), A.basis_element(1)
        D = LinMap.from_function(A, lambda x: A.mul(A.mul(a, x), b) - A.mul(A.mul(b, x), a))
        self.assertTrue(check_formal(A, IdentitySpec(XD, (D,))).passed)

    def test_cube_implies_h1(self):
        A = matrix_algebra(FieldSpec.prime_field(5), 2)
        for _ in range(3):
            u = A.random_element(self.rng)
            while not A.left_mult_matrix(u).is_invertible:
                u = A.random_element(self.rng)
            T = conjugation(A, u)
            self.assertTrue(check_formal(A, IdentitySpec(CUBE_DIFF, (T,))).passed)
            self.assertTrue(check_formal(A, IdentitySpec(H1, (T,))).passed)

    def test_cube_implies_quartic_modulo_radical(self):
        A = upper_triangular(FieldSpec.rationals(), 2)
        T = conjugation(A, A.unit + A.basis_element(1))
        self.assertTrue(check_formal(A, IdentitySpec(CUBE_DIFF, (T,))).passed)
        self.assertTrue(check_formal(A, IdentitySpec(QUARTIC_DIFF, (T,))).passed)
        self.assertTrue(check_formal(A, IdentitySpec(JORDAN_SQUARE, (T,))).passed)

    def test_jordan_automorphism_moves_only_modulo_commutators(self):
        A = matrix_algebra(FieldSpec.rationals(), 2)
        T = conjugation(A, A.unit + A.basis_element(2))
        self.assertTrue(check_formal(A, IdentitySpec(LINEAR_DIFF, (T,))).passed)

    def test_char_three_coefficient_is_a_double_commutator(self):
        for A in (matrix_algebra(FieldSpec.prime_field(3), 2), upper_triangular(FieldSpec.prime_field(3), 2)):
            for x, y in itertools.product(A.basis(), repeat=2):
                symmetrized = A.mul(A.mul(x, x), y) + A.mul(A.mul(x, y), x) + A.mul(y, A.mul(x, x))
                self.assertEqual(symmetrized, A.commutator(x, A.commutator(x, y)))
                self.assertTrue(A.commutator_space.contains(symmetrized.coords))


class PointwiseCheckTestCase(SimpleTestCase):
    def setUp(self):
        self.F2 = FieldSpec.prime_field(2)
        self.A = matrix_algebra(self.F2, 2)

    def test_f2_map_passes_pointwise_but_not_formally(self):
        spec = IdentitySpec(XDXX, (f2_trace_map(self.A),))
        verdict = check_pointwise(self.A, spec)
        self.assertEqual(verdict.status, PASS)
        self.assertEqual(verdict.mode, 'pointwise_exhaustive')
        self.assertEqual(verdict.checked_count, 16)
        formal = check_formal(self.A, spec)
        self.assertEqual(formal.status, FAIL)
        self.assertEqual(formal.coefficient_witness, (0, 0, 3))
        self.assertEqual(formal.witness_value, self.A.basis_element(0))

    def test_trace_twist_passes_cube_pointwise(self):
        A = self.A
        T = LinMap.from_function(A, lambda x: x + A.unit.scale(A.to_matrix(x).trace()))
        self.assertEqual(check_pointwise(A, IdentitySpec(CUBE_DIFF, (T,))).status, PASS)

    def test_exhaustive_failure_reverifies(self):
        A = matrix_algebra(FieldSpec.prime_field(3), 2)
        T = LinMap.identity(A).scale(2)
        verdict = check_pointwise(A, IdentitySpec(LINEAR_DIFF, (T,)))
        self.assertEqual(verdict.status, FAIL)
        self.assertEqual(verdict.details['index'], 1)
        self.assertEqual(verdict.checked_count, 2)
        (x,) = verdict.witness
        self.assertEqual(x, A.basis_element(0))
        self.assertFalse(A.commutator_space.contains((T(x) - x).coords))

    def test_single_point_evaluation(self):
        A = matrix_algebra(FieldSpec.prime_field(3), 2)
        spec = IdentitySpec(LINEAR_DIFF, (LinMap.identity(A).scale(2),))
        verdict = check_at_point(A, spec, A.basis_element(0))
        self.assertEqual(verdict.status, FAIL)
        self.assertEqual(verdict.mode, SINGLE_POINT)
        self.assertEqual(verdict.witness_value, A.basis_element(0))
        self.assertEqual(check_at_point(A, spec, A.basis_element(1)).status, PASS)
        with self.assertRaises(FdalgError) as ctx:
            check_at_point(A, IdentitySpec(H1, (LinMap.identity(A),)), A.unit)
        self.assertEqual(ctx.exception.code, 'MALFORMED_ARGUMENT')
        self.assertEqual(check_at_point(A, IdentitySpec(H1, (LinMap.identity(A),)), A.unit, A.unit).status, PASS)

    def test_formal_and_pointwise_agree_over_f5(self):
        A = matrix_algebra(FieldSpec.prime_field(5), 2)
        maps = [conjugation(A, A.unit + A.basis_element(1)), LinMap.identity(A).scale(2)]
        for T in maps:
            spec = IdentitySpec(CUBE_DIFF, (T,))
            self.assertEqual(check_formal(A, spec).status, check_pointwise(A, spec).status)
        rng = random.Random(11)
        statuses = []
        for k in range(50):
            D = inner_derivation(A, A.random_element(rng))
            if k % 2:
                D = D + LinMap(A, [A.random_element(rng).coords for _ in range(A.dim)])
            spec = IdentitySpec(XDXX, (D,))
            formal = check_formal(A, spec).status
            self.assertEqual(check_pointwise(A, spec, mode='exhaustive').status, formal)
            statuses.append(formal)
        self.assertEqual(statuses.count(PASS), 25)

    def test_forced_exhaustive_over_infinite_field(self):
        A = matrix_algebra(FieldSpec.rationals(), 2)
        with self.assertRaises(BudgetExceeded) as ctx:
            check_pointwise(A, IdentitySpec(XDXX, (LinMap.identity(A),)), mode='exhaustive')
        self.assertEqual(ctx.exception.code, 'BUDGET_EXCEEDED')

    def test_over_budget_falls_back_to_sampling(self):
        spec = IdentitySpec(XDXX, (f2_trace_map(self.A),))
        with self.assertLogs('fdalg.identities', level='WARNING'):
            verdict = check_pointwise(self.A, spec, budget=10, seed=7, sample_count=5)
        self.assertEqual(verdict.status, UNDECIDED_SAMPLED)
        self.assertEqual(verdict.mode, 'pointwise_sampled')
        self.assertEqual(verdict.checked_count, 4 + 10 + 5)
        self.assertEqual(verdict.seed, 7)

    def test_sampled_failure_over_rationals(self):
        A = matrix_algebra(FieldSpec.rationals(), 2)
        T = LinMap.identity(A).scale(A.field.from_int(2))
        verdict = check_pointwise(A, IdentitySpec(LINEAR_DIFF, (T,)))
        self.assertEqual(verdict.status, FAIL)
        self.assertEqual(verdict.mode, 'pointwise_sampled')
        self.assertEqual(verdict.checked_count, 1)

    def test_h1_enumerates_pairs(self):
        A = matrix_algebra(FieldSpec.prime_field(2), 2)
        verdict = check_pointwise(A, IdentitySpec(H1, (LinMap.identity(A),)))
        self.assertEqual(verdict.status, PASS)
        self.assertEqual(verdict.checked_count, 256)


class PartitionedScanTestCase(SimpleTestCase):
    def setUp(self):
        self.A = matrix_algebra(FieldSpec.prime_field(3), 2)
        self.T = LinMap.identity(self.A).scale(2)

    @override_settings(FDALG_WORKERS=2, FDALG_CHUNK_SIZE=5)
    def test_partitioned_scan_reports_smallest_failure(self):
        with patch('fdalg.tasks.first_failure', wraps=tasks.first_failure) as chunk:
            verdict = check_pointwise(self.A, IdentitySpec(LINEAR_DIFF, (self.T,)))
        self.assertEqual(chunk.call_count, 17)
        self.assertEqual(verdict.details['index'], 1)

    @override_settings(FDALG_WORKERS=2, FDALG_CHUNK_SIZE=5)
    def test_partitioned_scan_passes(self):
        spec = IdentitySpec(CUBE_DIFF, (conjugation(self.A, self.A.unit + self.A.basis_element(1)),))
        verdict = check_pointwise(self.A, spec)
        self.assertEqual(verdict.status, PASS)
        self.assertEqual(verdict.checked_count, 81)


class MembershipTestCase(SimpleTestCase):
    def test_simple_algebra_admits_only_zero(self):
        A = matrix_algebra(FieldSpec.rationals(), 2)
        self.assertTrue(left_multiples_in_commutators(A, A.zero()))
        self.assertFalse(left_multiples_in_commutators(A, A.basis_element(0)))
        self.assertTrue(square_multiples_in_commutators(A, A.zero()))
        self.assertFalse(square_multiples_in_commutators(A, A.basis_element(1)))

    def test_radical_element_of_triangular_algebra(self):
        A = upper_triangular(FieldSpec.rationals(), 3)
        e13 = A.basis_element(A.labels.index('e13'))
        self.assertTrue(left_multiples_in_commutators(A, e13))
        self.assertTrue(square_multiples_in_commutators(A, e13))
