import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from sympy import Symbol
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors as sympy_invariant_factors

from .exceptions import FdalgError, NoValidMethod
from .scalars import PRIME_FIELD, RATIONALS


logger = logging.getLogger(__name__)


def _require_same_field(*items):
    fields = {item.field for item in items}
    if len(fields) > 1:
        raise FdalgError("Operands live over different fields", code='FIELD_MISMATCH')


def _rref_rows(ops, rows, ncols):
    """
    Gauss-Jordan elimination on the first ``ncols`` columns of ``rows``.

    Rows may be longer than ``ncols`` (augmented systems); the extra columns
    are carried along. Returns the reduced rows (zero rows at the bottom)
    and the pivot columns.
    """
    rows = [list(row) for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        pivot = next((i for i in range(r, len(rows)) if not ops.is_zero(rows[i][c])), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        if lead != ops.one:
            inverse = ops.inv(lead)
            rows[r] = [ops.mul(inverse, v) for v in rows[r]]
        pivot_row = rows[r]
        for i, row in enumerate(rows):
            if i == r or ops.is_zero(row[c]):
                continue
            f = row[c]
            rows[i] = [a if ops.is_zero(b) else ops.sub(a, ops.mul(f, b)) for a, b in zip(row, pivot_row)]
        pivots.append(c)
        r += 1
    return rows, pivots


# ============================================================================
# MATRICES
# ============================================================================

@dataclass(frozen=True)
class Matrix:
    """Dense matrix of field payloads, stored row-major."""

    field: object
    rows: tuple

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise FdalgError("Matrices must have positive dimensions", code='MALFORMED_MATRIX')
        width = len(self.rows[0])
        if any(len(row) != width for row in self.rows):
            raise FdalgError("Ragged matrix rows", code='MALFORMED_MATRIX')

    @classmethod
    def from_rows(cls, field, rows):
        return cls(field, tuple(tuple(row) for row in rows))

    @classmethod
    def from_columns(cls, field, columns):
        return cls(field, tuple(zip(*columns)))

    @classmethod
    def identity(cls, field, n):
        return cls(field, tuple(tuple(field.one if i == j else field.zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, field, nrows, ncols):
        return cls(field, tuple((field.zero,) * ncols for _ in range(nrows)))

    @classmethod
    def parse(cls, field, grid):
        return cls.from_rows(field, [[field.parse(v) for v in row] for row in grid])

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0])

    @property
    def is_square(self):
        return self.nrows == self.ncols

    def __getitem__(self, index):
        return self.rows[index]

    def columns(self):
        return tuple(zip(*self.rows))

    def transpose(self):
        return Matrix(self.field, self.columns())

    def apply(self, vector):
        """Matrix-vector product."""
        if len(vector) != self.ncols:
            raise FdalgError("Vector length does not match matrix", code='SIZE_MISMATCH')
        ops = self.field.ops
        result = []
        for row in self.rows:
            acc = ops.zero
            for a, v in zip(row, vector):
                if not ops.is_zero(a) and not ops.is_zero(v):
                    acc = ops.add(acc, ops.mul(a, v))
            result.append(acc)
        return tuple(result)

    def __mul__(self, other):
        _require_same_field(self, other)
        if self.ncols != other.nrows:
            raise FdalgError("Inner dimensions do not agree", code='SIZE_MISMATCH')
        return Matrix.from_columns(self.field, [self.apply(column) for column in other.columns()])

    def __add__(self, other):
        _require_same_field(self, other)
        ops = self.field.ops
        return Matrix(self.field, tuple(tuple(ops.add(a, b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other):
        _require_same_field(self, other)
        ops = self.field.ops
        return Matrix(self.field, tuple(tuple(ops.sub(a, b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def scale(self, c):
        ops = self.field.ops
        return Matrix(self.field, tuple(tuple(ops.mul(c, a) for a in row) for row in self.rows))

    def trace(self):
        ops = self.field.ops
        acc = ops.zero
        for i in range(min(self.nrows, self.ncols)):
            acc = ops.add(acc, self.rows[i][i])
        return acc

    @cached_property
    def _reduced(self):
        return _rref_rows(self.field.ops, self.rows, self.ncols)

    def rref(self):
        rows, pivots = self._reduced
        return Matrix.from_rows(self.field, rows), tuple(pivots)

    @property
    def rank(self):
        return len(self._reduced[1])

    def kernel(self):
        """Subspace of vectors ``x`` with ``self.apply(x) == 0``."""
        ops = self.field.ops
        rows, pivots = self._reduced
        free = [c for c in range(self.ncols) if c not in pivots]
        vectors = []
        for f in free:
            v = [ops.zero] * self.ncols
            v[f] = ops.one
            for row, c in zip(rows, pivots):
                v[c] = ops.neg(row[f])
            vectors.append(v)
        return Subspace.span(self.field, self.ncols, vectors)

    def solve(self, b):
        """Canonical solution (free variables zero) of ``self x = b``, or ``None``."""
        if len(b) != self.nrows:
            raise FdalgError("Right-hand side has the wrong length", code='SIZE_MISMATCH')
        ops = self.field.ops
        augmented = [list(row) + [v] for row, v in zip(self.rows, b)]
        rows, pivots = _rref_rows(ops, augmented, self.ncols)
        for row in rows[len(pivots):]:
            if not ops.is_zero(row[-1]):
                return None
        x = [ops.zero] * self.ncols
        for row, c in zip(rows, pivots):
            x[c] = row[-1]
        return tuple(x)

    @property
    def is_invertible(self):
        return self.is_square and self.rank == self.nrows

    def inverse(self):
        if not self.is_square:
            raise FdalgError("Only square matrices are invertible", code='NOT_INVERTIBLE')
        n = self.nrows
        identity = Matrix.identity(self.field, n)
        augmented = [list(row) + list(e) for row, e in zip(self.rows, identity.rows)]
        rows, pivots = _rref_rows(self.field.ops, augmented, n)
        if len(pivots) < n:
            raise FdalgError("Matrix is singular", code='NOT_INVERTIBLE')
        return Matrix.from_rows(self.field, [row[n:] for row in rows])

    def format(self):
        return [[self.field.format(v) for v in row] for row in self.rows]


def random_matrix(field, nrows, ncols, rng):
    return Matrix.from_rows(field, [[field.random(rng) for _ in range(ncols)] for _ in range(nrows)])


@dataclass(frozen=True)
class SolveResult:
    rref: Matrix
    pivots: tuple
    solution: tuple
    kernel: object
    consistent: bool


def row_reduce_and_solve(A, b=None):
    """
    Reduce ``A`` and, when ``b`` is given, solve ``A x = b``.

    An inconsistent system is reported through ``consistent=False`` and a
    ``None`` solution rather than an exception.
    """
    rref, pivots = A.rref()
    solution = None
    consistent = True
    if b is not None:
        solution = A.solve(tuple(b))
        consistent = solution is not None
        if not consistent:
            logger.debug("Inconsistent %dx%d system", A.nrows, A.ncols)
    return SolveResult(rref, pivots, solution, A.kernel(), consistent)


# ============================================================================
# SUBSPACES
# ============================================================================

@dataclass(frozen=True)
class Subspace:
    """
    Subspace of F^n held by its reduced row-echelon basis.

    The RREF basis is unique, so two subspaces are equal exactly when their
    bases are equal.
    """

    field: object
    ambient_dim: int
    basis: tuple = ()
    pivots: tuple = ()

    @classmethod
    def span(cls, field, ambient_dim, vectors):
        vectors = [tuple(v) for v in vectors]
        if any(len(v) != ambient_dim for v in vectors):
            raise FdalgError("Vector length differs from ambient dimension", code='AMBIENT_MISMATCH')
        if not vectors:
            return cls(field, ambient_dim)
        rows, pivots = _rref_rows(field.ops, vectors, ambient_dim)
        return cls(field, ambient_dim, tuple(tuple(row) for row in rows[:len(pivots)]), tuple(pivots))

    @classmethod
    def zero(cls, field, ambient_dim):
        return cls(field, ambient_dim)

    @classmethod
    def full(cls, field, ambient_dim):
        return cls.span(field, ambient_dim, Matrix.identity(field, ambient_dim).rows)

    @property
    def dim(self):
        return len(self.basis)

    @property
    def is_zero(self):
        return not self.basis

    def _check(self, other):
        if self.ambient_dim != other.ambient_dim or self.field != other.field:
            raise FdalgError("Subspaces live in different ambient spaces", code='AMBIENT_MISMATCH')

    def reduce(self, vector):
        """Remainder of ``vector`` after clearing every pivot coordinate."""
        if len(vector) != self.ambient_dim:
            raise FdalgError("Vector length differs from ambient dimension", code='AMBIENT_MISMATCH')
        ops = self.field.ops
        v = list(vector)
        for row, c in zip(self.basis, self.pivots):
            f = v[c]
            if not ops.is_zero(f):
                v = [a if ops.is_zero(b) else ops.sub(a, ops.mul(f, b)) for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, vector):
        ops = self.field.ops
        return all(ops.is_zero(v) for v in self.reduce(vector))

    def contains_subspace(self, other):
        self._check(other)
        return all(self.contains(v) for v in other.basis)

    def sum(self, other):
        self._check(other)
        return Subspace.span(self.field, self.ambient_dim, self.basis + other.basis)

    def intersection(self, other):
        self._check(other)
        equations = self.equations + other.equations
        if not equations:
            return Subspace.full(self.field, self.ambient_dim)
        return Matrix.from_rows(self.field, equations).kernel()

    def equals(self, other):
        self._check(other)
        return self.basis == other.basis

    @cached_property
    def equations(self):
        """Rows of linear functionals whose common kernel is this subspace."""
        if not self.basis:
            return Matrix.identity(self.field, self.ambient_dim).rows
        annihilator = Matrix(self.field, self.basis).kernel()
        return annihilator.basis

    @property
    def complement_positions(self):
        return tuple(c for c in range(self.ambient_dim) if c not in self.pivots)

    def quotient_coords(self, vector):
        """Coordinates of ``vector`` modulo this subspace, on the non-pivot positions."""
        remainder = self.reduce(vector)
        return tuple(remainder[c] for c in self.complement_positions)

    def format(self):
        return [[self.field.format(v) for v in row] for row in self.basis]


def subspace_ops(kind, *args):
    if kind == 'span':
        return Subspace.span(*args)
    operations = {
        'membership': Subspace.contains,
        'sum': Subspace.sum,
        'intersection': Subspace.intersection,
        'equals': Subspace.equals,
        'quotient_coords': Subspace.quotient_coords,
    }
    if kind not in operations:
        raise FdalgError(f"Unknown subspace operation '{kind}'", code='UNKNOWN_OPERATION')
    return operations[kind](*args)


# ============================================================================
# POLYNOMIALS AND SIMILARITY
# ============================================================================

@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial, coefficients lowest degree first, no trailing zeros."""

    field: object
    coeffs: tuple = ()

    @classmethod
    def make(cls, field, coeffs):
        ops = field.ops
        coeffs = list(coeffs)
        while coeffs and ops.is_zero(coeffs[-1]):
            coeffs.pop()
        return cls(field, tuple(coeffs))

    @classmethod
    def constant(cls, field, c):
        return cls.make(field, [c])

    @classmethod
    def x(cls, field):
        return cls(field, (field.zero, field.one))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1]

    def is_zero(self):
        return not self.coeffs

    @property
    def is_monic(self):
        return bool(self.coeffs) and self.lead == self.field.one

    def __add__(self, other):
        ops = self.field.ops
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (ops.zero,) * (n - len(self.coeffs))
        b = other.coeffs + (ops.zero,) * (n - len(other.coeffs))
        return Polynomial.make(self.field, [ops.add(u, v) for u, v in zip(a, b)])

    def __neg__(self):
        ops = self.field.ops
        return Polynomial(self.field, tuple(ops.neg(c) for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        ops = self.field.ops
        if self.is_zero() or other.is_zero():
            return Polynomial(self.field)
        out = [ops.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if ops.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                if not ops.is_zero(b):
                    out[i + j] = ops.add(out[i + j], ops.mul(a, b))
        return Polynomial.make(self.field, out)

    def scale(self, c):
        ops = self.field.ops
        return Polynomial.make(self.field, [ops.mul(c, a) for a in self.coeffs])

    def divmod(self, other):
        if other.is_zero():
            raise FdalgError("Polynomial division by zero", code='DIVISION_BY_ZERO')
        ops = self.field.ops
        remainder = list(self.coeffs)
        quotient = [ops.zero] * max(len(remainder) - len(other.coeffs) + 1, 0)
        lead_inverse = ops.inv(other.lead)
        d = other.degree
        while len(remainder) - 1 >= d and remainder:
            shift = len(remainder) - 1 - d
            factor = ops.mul(remainder[-1], lead_inverse)
            quotient[shift] = factor
            for k, c in enumerate(other.coeffs):
                remainder[shift + k] = ops.sub(remainder[shift + k], ops.mul(factor, c))
            remainder.pop()
            while remainder and ops.is_zero(remainder[-1]):
                remainder.pop()
        return Polynomial.make(self.field, quotient), Polynomial.make(self.field, remainder)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.field.ops.inv(self.lead))

    def gcd(self, other):
        """Monic gcd by the Euclidean algorithm."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __str__(self):
        if self.is_zero():
            return '0'
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if self.field.is_zero(c):
                continue
            text = self.field.format(c)
            if any(ch in text for ch in '+/') or ('-' in text[1:]):
                text = f'({text})'
            if k == 0:
                terms.append(text)
                continue
            power = 'x' if k == 1 else f'x^{k}'
            terms.append(power if c == self.field.one else f'{text}*{power}')
        return '+'.join(terms).replace('+-', '-')


def _characteristic_grid(M):
    x = Polynomial.x(M.field)
    grid = []
    for i, row in enumerate(M.rows):
        grid.append([(x if i == j else Polynomial(M.field)) - Polynomial.constant(M.field, a)
                     for j, a in enumerate(row)])
    return grid


def _elimination_factors(M):
    """
    Diagonalize xI - M over F[x] with elementary row and column operations,
    always pivoting on an entry of minimal degree.
    """
    n = M.nrows
    grid = _characteristic_grid(M)
    diagonal = []
    for k in range(n):
        while True:
            candidates = [(grid[i][j].degree, i, j) for i in range(k, n) for j in range(k, n)
                          if not grid[i][j].is_zero()]
            _, i, j = min(candidates)
            grid[k], grid[i] = grid[i], grid[k]
            for row in grid:
                row[k], row[j] = row[j], row[k]
            pivot = grid[k][k]
            clean = True
            for i in range(k + 1, n):
                if grid[i][k].is_zero():
                    continue
                q, r = grid[i][k].divmod(pivot)
                grid[i] = grid[i][:k] + [a - q * b for a, b in zip(grid[i][k:], grid[k][k:])]
                clean = clean and r.is_zero()
            for j in range(k + 1, n):
                if grid[k][j].is_zero():
                    continue
                q, r = grid[k][j].divmod(pivot)
                for i in range(k, n):
                    grid[i][j] = grid[i][j] - q * grid[i][k]
                clean = clean and r.is_zero()
            if not clean:
                continue
            offender = next(((i, j) for i in range(k + 1, n) for j in range(k + 1, n)
                             if not (grid[i][j] % pivot).is_zero()), None)
            if offender is None:
                break
            i = offender[0]
            grid[k] = grid[k][:k] + [a + b for a, b in zip(grid[k][k:], grid[i][k:])]
        diagonal.append(grid[k][k].monic())
    return diagonal


def _ground_domain(field):
    if field.kind == RATIONALS:
        return QQ
    if field.kind == PRIME_FIELD:
        return GF(field.p)
    return None


def _sympy_factors(M, K):
    """Invariant factors of xI - M through a ``DomainMatrix`` over K[x]."""
    field = M.field
    R = K[Symbol('x')]
    ring = R.ring
    x = ring.gens[0]

    def ground(a):
        return K(a.numerator, a.denominator) if field.kind == RATIONALS else K(a)

    def back(c):
        return Fraction(int(c.numerator), int(c.denominator)) if field.kind == RATIONALS else int(c) % field.p

    rows = [[(x if i == j else ring.zero) - ring.ground_new(ground(a)) for j, a in enumerate(row)]
            for i, row in enumerate(M.rows)]
    diagonal = []
    for f in sympy_invariant_factors(DomainMatrix(rows, (M.nrows, M.nrows), R)):
        coeffs = [field.zero] * (max((k for (k,) in f.keys()), default=0) + 1)
        for (k,), c in f.items():
            coeffs[k] = back(c)
        diagonal.append(Polynomial.make(field, coeffs))
    return diagonal


def _divisibility_chain(diagonal):
    """Smith form of a diagonal matrix: pairs become (gcd, lcm) until each entry divides the next."""
    d = [f.monic() for f in diagonal if not f.is_zero()]
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = d[i].gcd(d[j])
            d[i], d[j] = g, (d[i] * d[j]).divmod(g)[0].monic()
    return d


SIMILARITY_METHODS = ('auto', 'sympy', 'elimination')


def invariant_factors(M, method='auto'):
    """
    Invariant-factor chain f_1 | ... | f_k of a square matrix: the nonconstant
    monic diagonal entries of the Smith form of xI - M.

    Over Q and F_p the Smith form comes from sympy's ``invariant_factors`` on
    a ``DomainMatrix``; F_p(t) has no matching sympy domain and always uses
    elimination.
    """
    if not M.is_square:
        raise FdalgError("Invariant factors need a square matrix", code='SIZE_MISMATCH')
    if method not in SIMILARITY_METHODS:
        raise NoValidMethod(f"Unknown similarity method '{method}'")
    K = _ground_domain(M.field)
    if method == 'sympy' and K is None:
        raise NoValidMethod(f"sympy has no domain for {M.field}")
    if K is not None and method != 'elimination':
        diagonal = _sympy_factors(M, K)
    else:
        diagonal = _elimination_factors(M)
    return [f for f in _divisibility_chain(diagonal) if f.degree >= 1]


def is_similar(M1, M2):
    """Similarity over the base field, decided by comparing invariant factors."""
    if M1.nrows != M2.nrows or not (M1.is_square and M2.is_square):
        raise FdalgError("Similarity needs square matrices of the same size", code='SIZE_MISMATCH')
    _require_same_field(M1, M2)
    return invariant_factors(M1) == invariant_factors(M2)
