import itertools
import logging
from dataclasses import dataclass
from functools import cached_property

from django.conf import settings

from .exceptions import BudgetExceeded, FdalgError, NoValidMethod
from .linalg import Matrix, Polynomial, Subspace
from .scalars import PRIME_FIELD, RationalFunction, Scalar


logger = logging.getLogger(__name__)

AUTO = 'auto'
TRACE_FORM = 'trace_form'
FROBENIUS = 'frobenius'
BRUTE = 'brute'

RADICAL_METHODS = (AUTO, TRACE_FORM, FROBENIUS, BRUTE)

# Accepted spellings on the command line.
METHOD_ALIASES = {'dickson': TRACE_FORM, 'trace-form': TRACE_FORM}


# ============================================================================
# ELEMENTS
# ============================================================================

@dataclass(frozen=True, eq=False)
class Element:
    """Member of an algebra, held by its coordinate payloads on the basis."""

    algebra: object
    coords: tuple

    def _check(self, other):
        if not isinstance(other, Element) or other.algebra is not self.algebra:
            raise FdalgError("Elements belong to different algebras", code='ALGEBRA_MISMATCH')

    def __eq__(self, other):
        return isinstance(other, Element) and other.algebra is self.algebra and other.coords == self.coords

    def __hash__(self):
        return hash(self.coords)

    def __add__(self, other):
        self._check(other)
        ops = self.algebra.field.ops
        return Element(self.algebra, tuple(ops.add(a, b) for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        ops = self.algebra.field.ops
        return Element(self.algebra, tuple(ops.sub(a, b) for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        ops = self.algebra.field.ops
        return Element(self.algebra, tuple(ops.neg(a) for a in self.coords))

    def __mul__(self, other):
        return self.algebra.mul(self, other)

    def scale(self, c):
        ops = self.algebra.field.ops
        return Element(self.algebra, tuple(ops.mul(c, a) for a in self.coords))

    def is_zero(self):
        ops = self.algebra.field.ops
        return all(ops.is_zero(a) for a in self.coords)

    def scalars(self):
        return [Scalar(self.algebra.field, a) for a in self.coords]

    def format(self):
        return [self.algebra.field.format(a) for a in self.coords]

    def __str__(self):
        field = self.algebra.field
        terms = []
        for label, c in zip(self.algebra.labels, self.coords):
            if field.is_zero(c):
                continue
            terms.append(label if c == field.one else f'{field.format(c)}*{label}')
        return ' + '.join(terms) or '0'


# ============================================================================
# ALGEBRAS
# ============================================================================

class Algebra:
    """
    Finite-dimensional associative algebra given by structure constants.

    ``table[i][j]`` is the coordinate tuple of b_i*b_j. Instances are treated
    as immutable after ``build_algebra``; derived subspaces are computed on
    first access and cached.
    """

    def __init__(self, field, table, labels, tags=None):
        self.field = field
        self.table = table
        self.labels = tuple(labels)
        self.tags = dict(tags or {})
        self.dim = len(table)
        self.unit = None
        self._radicals = {}
        ops = field.ops
        self._sparse = tuple(
            tuple(tuple((k, c) for k, c in enumerate(entry) if not ops.is_zero(c)) for entry in row)
            for row in table
        )

    def __repr__(self):
        return f'<Algebra dim={self.dim} over {self.field}>'

    # -- elements ------------------------------------------------------------

    def element(self, coords):
        coords = tuple(coords)
        if len(coords) != self.dim:
            raise FdalgError(f"Expected {self.dim} coordinates, got {len(coords)}", code='SIZE_MISMATCH')
        return Element(self, coords)

    def parse_element(self, literals):
        return self.element(self.field.parse(v) for v in literals)

    def zero(self):
        return Element(self, (self.field.zero,) * self.dim)

    def basis_element(self, i):
        ops = self.field.ops
        return Element(self, tuple(ops.one if k == i else ops.zero for k in range(self.dim)))

    def basis(self):
        return [self.basis_element(i) for i in range(self.dim)]

    def random_element(self, rng):
        return Element(self, tuple(self.field.random(rng) for _ in range(self.dim)))

    def require_unit(self):
        if self.unit is None:
            raise FdalgError("The algebra has no unit", code='NOT_UNITAL')
        return self.unit

    # -- products ------------------------------------------------------------

    def mul(self, x, y):
        if x.algebra is not self or y.algebra is not self:
            raise FdalgError("Elements belong to a different algebra", code='ALGEBRA_MISMATCH')
        ops = self.field.ops
        out = [ops.zero] * self.dim
        for i, a in enumerate(x.coords):
            if ops.is_zero(a):
                continue
            row = self._sparse[i]
            for j, b in enumerate(y.coords):
                if ops.is_zero(b):
                    continue
                ab = ops.mul(a, b)
                for k, c in row[j]:
                    out[k] = ops.add(out[k], ops.mul(ab, c))
        return Element(self, tuple(out))

    def commutator(self, x, y):
        return self.mul(x, y) - self.mul(y, x)

    def jordan_product(self, x, y):
        return self.mul(x, y) + self.mul(y, x)

    def unit_multiple(self, x):
        """The scalar c with x = c*1, or None when x is not in F*1."""
        unit = self.require_unit()
        ops = self.field.ops
        k = next(i for i, u in enumerate(unit.coords) if not ops.is_zero(u))
        c = ops.div(x.coords[k], unit.coords[k])
        return c if unit.scale(c) == x else None

    def power(self, x, k):
        if k < 0:
            raise FdalgError("Negative powers are not supported", code='MALFORMED_ARGUMENT')
        result = self.require_unit() if k == 0 else None
        base = x
        while k:
            if k & 1:
                result = base if result is None else self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def left_mult_matrix(self, a):
        return Matrix.from_columns(self.field, [self.mul(a, b).coords for b in self.basis()])

    def right_mult_matrix(self, a):
        return Matrix.from_columns(self.field, [self.mul(b, a).coords for b in self.basis()])

    def is_nilpotent_element(self, x):
        power = x
        for _ in range(self.dim + 1):
            if power.is_zero():
                return True
            power = self.mul(power, x)
        return power.is_zero()

    # -- matrix algebras -----------------------------------------------------

    @property
    def matrix_side(self):
        return self.tags.get('matrix_side')

    def to_matrix(self, x):
        s = self.matrix_side
        if s is None:
            raise FdalgError("Not a full matrix algebra", code='NOT_MATRIX_ALGEBRA')
        return Matrix.from_rows(self.field, [x.coords[i * s:(i + 1) * s] for i in range(s)])

    def from_matrix(self, M):
        s = self.matrix_side
        if s is None:
            raise FdalgError("Not a full matrix algebra", code='NOT_MATRIX_ALGEBRA')
        return self.element(v for row in M.rows for v in row)

    # -- enumeration ---------------------------------------------------------

    def enumeration_size(self, arity=1):
        """Number of elements (or element tuples), ``None`` when the field is infinite."""
        if not self.field.is_finite:
            return None
        return self.field.order ** (self.dim * arity)

    def element_at(self, index):
        """Element number ``index`` in mixed-radix order, least significant coordinate first."""
        p = self.field.order
        coords = []
        for _ in range(self.dim):
            index, r = divmod(index, p)
            coords.append(r)
        return Element(self, tuple(coords))

    def sample_plan(self, count, rng):
        """Basis vectors, then sums b_i + b_j (i <= j), then ``count`` seeded random elements."""
        basis = self.basis()
        for b in basis:
            yield b
        for i, j in itertools.combinations_with_replacement(range(self.dim), 2):
            yield basis[i] + basis[j]
        for _ in range(count):
            yield self.random_element(rng)

    # -- derived subspaces ---------------------------------------------------

    def span(self, elements):
        return Subspace.span(self.field, self.dim, [x.coords for x in elements])

    @cached_property
    def is_commutative(self):
        return self.commutator_space.is_zero

    @cached_property
    def commutator_space(self):
        basis = self.basis()
        return self.span(self.commutator(basis[i], basis[j])
                         for i, j in itertools.combinations(range(self.dim), 2))

    @cached_property
    def center(self):
        rows = []
        for b in self.basis():
            rows.extend((self.right_mult_matrix(b) - self.left_mult_matrix(b)).rows)
        return Matrix.from_rows(self.field, rows).kernel()

    def product_space(self, U, V):
        """Span of all products u*v with u in U and v in V."""
        return self.span(self.mul(self.element(u), self.element(v)) for u in U.basis for v in V.basis)

    def generated_ideal(self, generators):
        S = self.span(generators)
        basis = self.basis()
        while True:
            products = [self.element(v) for v in S.basis]
            grown = S.sum(self.span(itertools.chain.from_iterable(
                (self.mul(b, v), self.mul(v, b)) for v in products for b in basis)))
            if grown.dim == S.dim:
                return S
            S = grown

    def is_ideal(self, S):
        basis = self.basis()
        for v in S.basis:
            x = self.element(v)
            for b in basis:
                if not (S.contains(self.mul(b, x).coords) and S.contains(self.mul(x, b).coords)):
                    return False
        return True

    def is_nilpotent_ideal(self, S):
        if not self.is_ideal(S):
            raise FdalgError("Subspace is not a two-sided ideal", code='NOT_AN_IDEAL')
        power = S
        for _ in range(self.dim + 1):
            if power.is_zero:
                return True
            power = self.product_space(power, S)
        return power.is_zero

    @cached_property
    def derivation_subspace(self):
        """
        Der(A) as a subspace of the n^2-dimensional operator space.

        Unknown ``j*n + k`` is the coefficient of b_k in delta(b_j), so each
        solution vector is the concatenation of the operator's columns.
        """
        n = self.dim
        ops = self.field.ops
        rows = []
        for i in range(n):
            for j in range(n):
                for m in range(n):
                    row = [ops.zero] * (n * n)
                    for l, c in self._sparse[i][j]:
                        row[l * n + m] = ops.add(row[l * n + m], c)
                    for k in range(n):
                        for mm, c in self._sparse[k][j]:
                            if mm == m:
                                row[i * n + k] = ops.sub(row[i * n + k], c)
                        for mm, c in self._sparse[i][k]:
                            if mm == m:
                                row[j * n + k] = ops.sub(row[j * n + k], c)
                    if any(not ops.is_zero(v) for v in row):
                        rows.append(row)
        if not rows:
            return Subspace.full(self.field, n * n)
        return Matrix.from_rows(self.field, rows).kernel()

    @cached_property
    def multiplication_algebra(self):
        self.require_unit()
        basis = self.basis()
        operators = []
        for a in basis:
            left = [self.mul(a, b) for b in basis]
            for c in basis:
                operators.append(tuple(v for x in left for v in self.mul(x, c).coords))
        return Subspace.span(self.field, self.dim * self.dim, operators)

    def radical(self, method=AUTO, budget=None, verify=True):
        method = METHOD_ALIASES.get(method, method)
        if method not in RADICAL_METHODS:
            raise FdalgError(f"Unknown radical method '{method}'", code='NO_VALID_METHOD')
        if method == AUTO:
            method = self._select_radical_method(budget)
        if method in self._radicals:
            return self._radicals[method]
        compute = {
            TRACE_FORM: self._radical_trace_form,
            FROBENIUS: self._radical_frobenius,
            BRUTE: self._radical_brute,
        }[method]
        R = compute(budget) if method == BRUTE else compute()
        if verify:
            self._verify_radical(R, method, budget)
        self._radicals[method] = R
        return R

    # -- radical methods -----------------------------------------------------

    @property
    def trace_form_valid(self):
        p = self.field.characteristic
        return p == 0 or p > self.dim

    @property
    def frobenius_valid(self):
        return self.field.characteristic > 0 and self.is_commutative

    def brute_valid(self, budget=None):
        budget = settings.FDALG_RADICAL_BUDGET if budget is None else budget
        size = self.enumeration_size()
        return size is not None and size <= budget

    def _select_radical_method(self, budget):
        if self.trace_form_valid:
            method = TRACE_FORM
        elif self.frobenius_valid:
            method = FROBENIUS
        elif self.brute_valid(budget):
            method = BRUTE
        else:
            raise NoValidMethod(
                f"No radical method applies to dimension {self.dim} over {self.field}; "
                f"extend the field or raise FDALG_RADICAL_BUDGET"
            )
        logger.info("Radical of %r via %s", self, method)
        return method

    def _radical_trace_form(self):
        if not self.trace_form_valid:
            raise NoValidMethod(f"Trace form needs characteristic 0 or above {self.dim}")
        ops = self.field.ops
        n = self.dim
        traces = []
        for m in range(n):
            acc = ops.zero
            for i in range(n):
                for k, c in self._sparse[m][i]:
                    if k == i:
                        acc = ops.add(acc, c)
            traces.append(acc)
        gram = []
        for j in range(n):
            row = []
            for k in range(n):
                acc = ops.zero
                for m, c in self._sparse[k][j]:
                    acc = ops.add(acc, ops.mul(c, traces[m]))
                row.append(acc)
            gram.append(row)
        return Matrix.from_rows(self.field, gram).kernel()

    def _radical_frobenius(self):
        """
        Nilradical of a commutative algebra in characteristic p.

        x is nilpotent iff x^q = 0 for q = p^k >= dim, and x -> x^q is
        additive, so (sum c_i b_i)^q = sum c_i^q b_i^q. Over F_p(t) the
        q-th powers form F_p(t^q); each equation is split along the basis
        1, t, ..., t^(q-1) and pulled back through t^q -> t.
        """
        if not self.frobenius_valid:
            raise NoValidMethod("Frobenius kernel needs a commutative algebra in positive characteristic")
        p = self.field.characteristic
        q = p
        while q < self.dim:
            q *= p
        images = [self.power(b, q).coords for b in self.basis()]
        relations = Matrix.from_columns(self.field, images).kernel()
        equations = relations.equations
        if not equations:
            return Subspace.full(self.field, self.dim)
        if self.field.kind == PRIME_FIELD:
            return Matrix.from_rows(self.field, equations).kernel()
        return Matrix.from_rows(self.field, self._split_equations(equations, q)).kernel()

    def _split_equations(self, equations, q):
        ops = self.field.ops
        rows = []
        for equation in equations:
            scale = RationalFunction((1,), (1,))
            for c in equation:
                if not ops.is_zero(c):
                    scale = ops.mul(scale, RationalFunction(c.den, (1,)))
            polys = [ops.mul(scale, c).num for c in equation]
            for s in range(q):
                row = []
                for num in polys:
                    degree = len(num) - 1
                    coeffs = {}
                    for offset, c in enumerate(num):
                        k = degree - offset
                        if c and k % q == s:
                            coeffs[k // q] = c
                    top = max(coeffs, default=-1)
                    dense = [coeffs.get(k, 0) for k in range(top, -1, -1)]
                    row.append(ops.canonical(dense, [1]))
                if any(not ops.is_zero(v) for v in row):
                    rows.append(row)
        if not rows:
            return [[ops.zero] * self.dim]
        return rows

    def _radical_brute(self, budget=None):
        if not self.field.is_finite:
            raise NoValidMethod(f"Brute force needs a finite field, not {self.field}")
        if not self.brute_valid(budget):
            raise BudgetExceeded(f"{self.field.order}^{self.dim} elements exceed the radical budget")
        R = Subspace.zero(self.field, self.dim)
        for index in range(1, self.enumeration_size()):
            x = self.element_at(index)
            if R.contains(x.coords) or not self.is_nilpotent_element(x):
                continue
            ideal = self.generated_ideal([x])
            if self.is_nilpotent_ideal(ideal):
                R = R.sum(ideal)
                logger.debug("Radical grew to dimension %d at index %d", R.dim, index)
        return R

    def _verify_radical(self, R, method, budget):
        if not self.is_nilpotent_ideal(R):
            raise FdalgError(f"{method} radical is not nilpotent", code='RADICAL_CHECK_FAILED')
        if R.is_zero:
            return
        Q = quotient(self, R)
        if not Q.radical(method, budget=budget, verify=False).is_zero:
            raise FdalgError(f"{method} radical leaves a non-semisimple quotient", code='RADICAL_CHECK_FAILED')

    # -- derived maps ---------------------------------------------------------

    def derivation_space(self):
        from .maps import LinMap

        return [LinMap.from_vector(self, v) for v in self.derivation_subspace.basis]


# ============================================================================
# CONSTRUCTION
# ============================================================================

def _find_unit(field, table, n):
    ops = field.ops
    rows, rhs = [], []
    for i in range(n):
        for m in range(n):
            rows.append([table[k][i][m] for k in range(n)])
            rhs.append(ops.one if m == i else ops.zero)
            rows.append([table[i][k][m] for k in range(n)])
            rhs.append(ops.one if m == i else ops.zero)
    return Matrix.from_rows(field, rows).solve(rhs)


def build_algebra(field, table, labels=None, tags=None):
    """
    Validate structure constants and return an ``Algebra``.

    Associativity is checked on every basis triple; the first violation (in
    lexicographic order of the triple) is reported with 1-based basis positions,
    matching the b1..bn labels. The unit is found by solving e*b_i = b_i*e = b_i
    and is absent when that system is inconsistent.
    """
    n = len(table)
    if n == 0:
        raise FdalgError("An algebra needs at least one basis vector", code='MALFORMED_TABLE')
    if any(len(row) != n or any(len(entry) != n for entry in row) for row in table):
        raise FdalgError(f"Structure table must be {n}x{n}x{n}", code='MALFORMED_TABLE')
    labels = list(labels) if labels is not None else [f'b{i + 1}' for i in range(n)]
    if len(labels) != n:
        raise FdalgError(f"Expected {n} labels, got {len(labels)}", code='MALFORMED_TABLE')
    table = tuple(tuple(tuple(entry) for entry in row) for row in table)
    A = Algebra(field, table, labels, tags)
    basis = A.basis()
    for i, j, k in itertools.product(range(n), repeat=3):
        left = A.mul(A.mul(basis[i], basis[j]), basis[k])
        right = A.mul(basis[i], A.mul(basis[j], basis[k]))
        if left != right:
            raise FdalgError(
                f"({labels[i]}*{labels[j]})*{labels[k]} != {labels[i]}*({labels[j]}*{labels[k]})",
                code='NOT_ASSOCIATIVE', triple=(i + 1, j + 1, k + 1),
            )
    unit = _find_unit(field, table, n)
    if unit is not None:
        A.unit = Element(A, unit)
    return A


def _unit_label(i, j, s):
    return f'e{i + 1}{j + 1}' if s < 10 else f'e{i + 1}_{j + 1}'


def matrix_algebra(field, s):
    """M_s(F) on the matrix units e_ij, ordered row-major."""
    ops = field.ops
    n = s * s
    table = []
    for i, j in itertools.product(range(s), repeat=2):
        row = []
        for k, l in itertools.product(range(s), repeat=2):
            entry = [ops.zero] * n
            if j == k:
                entry[i * s + l] = ops.one
            row.append(entry)
        table.append(row)
    labels = [_unit_label(i, j, s) for i, j in itertools.product(range(s), repeat=2)]
    return build_algebra(field, table, labels, tags={'kind': 'matrix', 'matrix_side': s})


def upper_triangular(field, s):
    """T_s(F) on the units e_ij with i <= j; tagged with its diagonal complement."""
    ops = field.ops
    units = [(i, j) for i in range(s) for j in range(i, s)]
    position = {u: k for k, u in enumerate(units)}
    n = len(units)
    table = []
    for i, j in units:
        row = []
        for k, l in units:
            entry = [ops.zero] * n
            if j == k:
                entry[position[(i, l)]] = ops.one
            row.append(entry)
        table.append(row)
    labels = [_unit_label(i, j, s) for i, j in units]
    A = build_algebra(field, table, labels, tags={'kind': 'upper_triangular', 'side': s})
    A.tags['complement'] = A.span(A.basis_element(position[(i, i)]) for i in range(s))
    return A


def direct_sum(A, B):
    if A.field != B.field:
        raise FdalgError("Summands live over different fields", code='FIELD_MISMATCH')
    ops = A.field.ops
    n = A.dim + B.dim
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = [ops.zero] * n
            if i < A.dim and j < A.dim:
                entry[:A.dim] = A.table[i][j]
            elif i >= A.dim and j >= A.dim:
                entry[A.dim:] = B.table[i - A.dim][j - A.dim]
            row.append(entry)
        table.append(row)
    labels = [f'{label}@1' for label in A.labels] + [f'{label}@2' for label in B.labels]
    return build_algebra(A.field, table, labels, tags={'kind': 'direct_sum'})


def quotient(A, ideal):
    """A/I on the classes of the basis vectors at the non-pivot positions of I."""
    if not A.is_ideal(ideal):
        raise FdalgError("Quotient needs a two-sided ideal", code='NOT_AN_IDEAL')
    positions = ideal.complement_positions
    if not positions:
        raise FdalgError("Quotient by the whole algebra is zero", code='MALFORMED_TABLE')
    table = [[ideal.quotient_coords(A.table[p][q]) for q in positions] for p in positions]
    labels = [A.labels[p] for p in positions]
    return build_algebra(A.field, table, labels, tags={'kind': 'quotient'})


def field_extension(field, f):
    """F[X]/(f) on the basis 1, a, ..., a^(d-1), where a is the class of X."""
    if f.field != field or f.is_zero() or f.degree < 1 or not f.is_monic:
        raise FdalgError("Extensions need a monic polynomial of degree >= 1", code='NON_MONIC')
    ops = field.ops
    d = f.degree
    x = Polynomial.x(field)
    powers = [Polynomial.constant(field, ops.one)]
    for _ in range(2 * d - 2):
        powers.append(powers[-1] * x % f)
    table = []
    for i in range(d):
        row = []
        for j in range(d):
            coeffs = list(powers[i + j].coeffs)
            row.append(coeffs + [ops.zero] * (d - len(coeffs)))
        table.append(row)
    labels = ['1', 'a'] + [f'a^{k}' for k in range(2, d)]
    return build_algebra(field, table, labels[:d], tags={'kind': 'field_extension'})


STANDARD_KINDS = {
    'matrix': matrix_algebra,
    'upper_triangular': upper_triangular,
    'direct_sum': direct_sum,
    'quotient': quotient,
    'field_extension': field_extension,
}


def make_standard(kind, *args):
    try:
        constructor = STANDARD_KINDS[kind]
    except KeyError:
        raise FdalgError(f"Unknown standard algebra '{kind}'", code='UNKNOWN_KIND')
    return constructor(*args)


def product_ops(A, op, *args):
    operations = {
        'mul': A.mul,
        'left_mult_matrix': A.left_mult_matrix,
        'right_mult_matrix': A.right_mult_matrix,
        'commutator': A.commutator,
        'power': A.power,
    }
    if op not in operations:
        raise FdalgError(f"Unknown product operation '{op}'", code='UNKNOWN_OPERATION')
    return operations[op](*args)


def ideal_ops(A, op, arg):
    if op == 'generated_by':
        return A.generated_ideal(arg)
    if op == 'is_nilpotent':
        return A.is_nilpotent_ideal(arg)
    if op == 'is_ideal':
        return A.is_ideal(arg)
    raise FdalgError(f"Unknown ideal operation '{op}'", code='UNKNOWN_OPERATION')


def is_rank_one(A, a):
    """a != 0 and a*A*a lies in Z*a."""
    if a.is_zero():
        return False
    Za = A.span(A.mul(A.element(z), a) for z in A.center.basis)
    return all(Za.contains(A.mul(A.mul(a, b), a).coords) for b in A.basis())
