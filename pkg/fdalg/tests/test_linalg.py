import random
from fractions import Fraction

from django.test import SimpleTestCase

from fdalg.algebra import upper_triangular
from fdalg.exceptions import FdalgError, NoValidMethod
from fdalg.linalg import (
    Matrix, Polynomial, Subspace, invariant_factors, is_similar, random_matrix, row_reduce_and_solve, subspace_ops,
)
from fdalg.scalars import FieldSpec


def _matrix(field, grid):
    return Matrix.parse(field, [[str(v) for v in row] for row in grid])


def _determinant(grid):
    if len(grid) == 1:
        return grid[0][0]
    total = Polynomial(grid[0][0].field)
    for j, entry in enumerate(grid[0]):
        term = entry * _determinant([row[:j] + row[j + 1:] for row in grid[1:]])
        total = total - term if j % 2 else total + term
    return total


def characteristic_polynomial(M):
    """det(xI - M) by cofactor expansion along the first row."""
    field = M.field
    x = Polynomial.x(field)
    return _determinant([[(x if i == j else Polynomial(field)) - Polynomial.constant(field, a)
                          for j, a in enumerate(row)] for i, row in enumerate(M.rows)])


class SolveTestCase(SimpleTestCase):
    def setUp(self):
        self.Q = FieldSpec.rationals()
        self.F3 = FieldSpec.prime_field(3)

    def test_rank_deficient_system(self):
        result = row_reduce_and_solve(_matrix(self.Q, [[1, 2], [2, 4]]), (Fraction(1), Fraction(2)))
        self.assertTrue(result.consistent)
        self.assertEqual(result.solution, (1, 0))
        self.assertEqual(result.pivots, (0,))
        self.assertEqual(result.kernel.dim, 1)
        self.assertTrue(result.kernel.contains((Fraction(-2), Fraction(1))))

    def test_identity_system(self):
        result = row_reduce_and_solve(Matrix.identity(self.Q, 3), (4, 5, 6))
        self.assertEqual(result.solution, (4, 5, 6))
        self.assertTrue(result.kernel.is_zero)

    def test_prime_field_system(self):
        self.assertEqual(_matrix(self.F3, [[1, 1], [1, 2]]).solve((0, 1)), (2, 1))

    def test_inconsistent_system_is_reported(self):
        result = row_reduce_and_solve(_matrix(self.Q, [[1, 1], [1, 1]]), (Fraction(0), Fraction(1)))
        self.assertFalse(result.consistent)
        self.assertIsNone(result.solution)

    def test_rref_is_reduced(self):
        rref, pivots = _matrix(self.Q, [[2, 4, 2], [1, 3, 0]]).rref()
        self.assertEqual(pivots, (0, 1))
        self.assertEqual(rref.rows, ((1, 0, 3), (0, 1, -1)))

    def test_inverse(self):
        M = _matrix(self.F3, [[1, 1], [0, 1]])
        self.assertEqual(M * M.inverse(), Matrix.identity(self.F3, 2))
        with self.assertRaises(FdalgError) as ctx:
            _matrix(self.F3, [[1, 1], [1, 1]]).inverse()
        self.assertEqual(ctx.exception.code, 'NOT_INVERTIBLE')


class SubspaceTestCase(SimpleTestCase):
    def setUp(self):
        self.Q = FieldSpec.rationals()
        self.F5 = FieldSpec.prime_field(5)

    def test_membership(self):
        U = Subspace.span(self.Q, 3, [(1, 0, 0), (0, 1, 0)])
        self.assertTrue(U.contains((1, 1, 0)))
        self.assertFalse(U.contains((0, 0, 1)))

    def test_span_is_canonical(self):
        U = Subspace.span(self.Q, 2, [(Fraction(2), Fraction(2))])
        V = Subspace.span(self.Q, 2, [(Fraction(-3), Fraction(-3))])
        self.assertTrue(U.equals(V))
        self.assertEqual(U.basis, ((1, 1),))

    def test_modular_law(self):
        rng = random.Random(0)
        for _ in range(25):
            U = Subspace.span(self.F5, 6, [[rng.randrange(5) for _ in range(6)] for _ in range(rng.randint(0, 4))])
            V = Subspace.span(self.F5, 6, [[rng.randrange(5) for _ in range(6)] for _ in range(rng.randint(0, 4))])
            self.assertEqual(U.sum(V).dim + U.intersection(V).dim, U.dim + V.dim)
            self.assertTrue(U.contains_subspace(U.intersection(V)))

    def test_dispatch(self):
        U = subspace_ops('span', self.F5, 2, [(1, 0)])
        V = subspace_ops('span', self.F5, 2, [(0, 1)])
        self.assertTrue(subspace_ops('membership', U, (3, 0)))
        self.assertEqual(subspace_ops('sum', U, V).dim, 2)
        self.assertTrue(subspace_ops('intersection', U, V).is_zero)
        self.assertFalse(subspace_ops('equals', U, V))
        self.assertEqual(subspace_ops('quotient_coords', U, (4, 2)), (2,))
        with self.assertRaises(FdalgError) as ctx:
            subspace_ops('complement', U)
        self.assertEqual(ctx.exception.code, 'UNKNOWN_OPERATION')

    def test_ambient_mismatch(self):
        with self.assertRaises(FdalgError) as ctx:
            Subspace.zero(self.Q, 2).sum(Subspace.zero(self.Q, 3))
        self.assertEqual(ctx.exception.code, 'AMBIENT_MISMATCH')

    def test_quotient_coords_of_radical_vector(self):
        A = upper_triangular(self.Q, 2)
        rad = A.radical()
        e12 = A.basis_element(A.labels.index('e12'))
        self.assertTrue(all(v == 0 for v in rad.quotient_coords(e12.coords)))
        self.assertEqual(len(rad.quotient_coords(e12.coords)), 2)


class InvariantFactorsTestCase(SimpleTestCase):
    def setUp(self):
        self.Q = FieldSpec.rationals()
        self.F3 = FieldSpec.prime_field(3)
        self.F5 = FieldSpec.prime_field(5)

    def _factors(self, M):
        return [str(f) for f in invariant_factors(M)]

    def test_zero_matrix(self):
        self.assertEqual(self._factors(Matrix.zeros(self.Q, 2, 2)), ['x', 'x'])

    def test_companion_matrix(self):
        self.assertEqual(self._factors(_matrix(self.Q, [[0, -1], [1, 0]])), ['x^2+1'])

    def test_nilpotent_block(self):
        self.assertEqual(self._factors(_matrix(self.F3, [[0, 1], [0, 0]])), ['x^2'])

    def test_product_is_characteristic_polynomial(self):
        rng = random.Random(3)
        for field in (self.Q, self.F3, self.F5):
            for size in (2, 3, 4):
                for _ in range(8):
                    M = random_matrix(field, size, size, rng)
                    factors = invariant_factors(M)
                    product = Polynomial.constant(field, 1)
                    for f in factors:
                        product = product * f
                    self.assertEqual(product, characteristic_polynomial(M))
                    for f, g in zip(factors, factors[1:]):
                        self.assertTrue((g % f).is_zero())

    def test_sympy_and_elimination_agree(self):
        rng = random.Random(6)
        for field in (self.Q, self.F3, self.F5):
            for size in (2, 3, 4):
                for _ in range(5):
                    M = random_matrix(field, size, size, rng)
                    self.assertEqual(invariant_factors(M, method='sympy'),
                                     invariant_factors(M, method='elimination'))

    def test_rational_functions_use_elimination(self):
        F = FieldSpec.rational_functions(3)
        t = F.ops.t()
        M = Matrix.from_rows(F, [[t, F.one], [F.zero, t]])
        self.assertEqual(len(invariant_factors(M)), 1)
        with self.assertRaises(NoValidMethod):
            invariant_factors(M, method='sympy')

    def test_idempotent_not_similar_to_nilpotent(self):
        e11 = _matrix(self.Q, [[1, 0], [0, 0]])
        e12 = _matrix(self.Q, [[0, 1], [0, 0]])
        self.assertFalse(is_similar(e11, e12))

    def test_similar_to_conjugate(self):
        rng = random.Random(4)
        for _ in range(15):
            M = random_matrix(self.F5, 3, 3, rng)
            P = random_matrix(self.F5, 3, 3, rng)
            while not P.is_invertible:
                P = random_matrix(self.F5, 3, 3, rng)
            self.assertTrue(is_similar(M, P * M * P.inverse()))

    def test_similar_to_transpose(self):
        rng = random.Random(5)
        for field in (self.Q, self.F3, self.F5):
            for size in (2, 3, 4):
                for _ in range(20):
                    M = random_matrix(field, size, size, rng)
                    self.assertTrue(is_similar(M, M.transpose()))

    def test_size_mismatch(self):
        with self.assertRaises(FdalgError) as ctx:
            is_similar(Matrix.identity(self.Q, 2), Matrix.identity(self.Q, 3))
        self.assertEqual(ctx.exception.code, 'SIZE_MISMATCH')


class PolynomialTestCase(SimpleTestCase):
    def test_divmod(self):
        F = FieldSpec.prime_field(5)
        f = Polynomial.make(F, [1, 0, 1])
        g = Polynomial.make(F, [2, 1])
        q, r = f.divmod(g)
        self.assertEqual(q, Polynomial.make(F, [3, 1]))
        self.assertTrue(r.is_zero())
        self.assertEqual(q * g + r, f)
