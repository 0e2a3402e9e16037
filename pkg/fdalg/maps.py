import itertools
from dataclasses import dataclass, fields

from .exceptions import FdalgError
from .linalg import Matrix


# ============================================================================
# LINEAR MAPS
# ============================================================================

class LinMap:
    """
    Linear operator on an algebra; ``columns[j]`` is the coordinate tuple of T(b_j).
    """

    def __init__(self, algebra, columns):
        columns = tuple(tuple(c) for c in columns)
        if len(columns) != algebra.dim or any(len(c) != algebra.dim for c in columns):
            raise FdalgError(f"A map on a {algebra.dim}-dimensional algebra needs {algebra.dim} columns "
                             f"of length {algebra.dim}", code='SIZE_MISMATCH')
        self.algebra = algebra
        self.columns = columns

    @classmethod
    def from_function(cls, algebra, f):
        return cls(algebra, [f(b).coords for b in algebra.basis()])

    @classmethod
    def from_vector(cls, algebra, vector):
        n = algebra.dim
        return cls(algebra, [vector[j * n:(j + 1) * n] for j in range(n)])

    @classmethod
    def identity(cls, algebra):
        return cls.from_function(algebra, lambda x: x)

    @classmethod
    def zero(cls, algebra):
        return cls.from_function(algebra, lambda x: algebra.zero())

    def __eq__(self, other):
        return isinstance(other, LinMap) and other.algebra is self.algebra and other.columns == self.columns

    def __hash__(self):
        return hash(self.columns)

    def __repr__(self):
        return f'<LinMap on {self.algebra!r}>'

    def __call__(self, x):
        return self.apply(x)

    def apply(self, x):
        if x.algebra is not self.algebra:
            raise FdalgError("Element belongs to a different algebra", code='ALGEBRA_MISMATCH')
        ops = self.algebra.field.ops
        out = [ops.zero] * self.algebra.dim
        for c, column in zip(x.coords, self.columns):
            if ops.is_zero(c):
                continue
            out = [a if ops.is_zero(b) else ops.add(a, ops.mul(c, b)) for a, b in zip(out, column)]
        return self.algebra.element(out)

    @property
    def matrix(self):
        return Matrix.from_columns(self.algebra.field, self.columns)

    def vector(self):
        """The columns concatenated, as a point of the n^2-dimensional operator space."""
        return tuple(v for column in self.columns for v in column)

    def _check(self, other):
        if not isinstance(other, LinMap) or other.algebra is not self.algebra:
            raise FdalgError("Maps act on different algebras", code='ALGEBRA_MISMATCH')

    def compose(self, other):
        """self o other."""
        self._check(other)
        return LinMap(self.algebra, [self.apply(self.algebra.element(c)).coords for c in other.columns])

    def __add__(self, other):
        self._check(other)
        ops = self.algebra.field.ops
        return LinMap(self.algebra, [[ops.add(a, b) for a, b in zip(u, v)]
                                     for u, v in zip(self.columns, other.columns)])

    def __sub__(self, other):
        self._check(other)
        ops = self.algebra.field.ops
        return LinMap(self.algebra, [[ops.sub(a, b) for a, b in zip(u, v)]
                                     for u, v in zip(self.columns, other.columns)])

    def scale(self, c):
        ops = self.algebra.field.ops
        return LinMap(self.algebra, [[ops.mul(c, a) for a in column] for column in self.columns])

    def kernel(self):
        return self.matrix.kernel()

    @property
    def is_bijective(self):
        return self.matrix.is_invertible

    def inverse(self):
        return LinMap.from_columns_matrix(self.algebra, self.matrix.inverse())

    @classmethod
    def from_columns_matrix(cls, algebra, M):
        return cls(algebra, M.columns())

    def format(self):
        field = self.algebra.field
        return [[field.format(v) for v in column] for column in self.columns]


# ============================================================================
# CONSTRUCTORS
# ============================================================================

def inner_derivation(A, a):
    """ad_a : x -> [a, x]."""
    return LinMap.from_function(A, lambda x: A.commutator(a, x))


def element_inverse(A, u):
    unit = A.require_unit()
    v = A.left_mult_matrix(u).solve(unit.coords)
    if v is None:
        raise FdalgError(f"{u} is not invertible", code='NOT_INVERTIBLE')
    v = A.element(v)
    if A.mul(v, u) != unit:
        raise FdalgError(f"{u} has no two-sided inverse", code='NOT_INVERTIBLE')
    return v


def conjugation(A, u):
    """x -> u x u^-1."""
    if not A.left_mult_matrix(u).is_invertible:
        raise FdalgError(f"{u} is not invertible", code='NOT_INVERTIBLE')
    v = element_inverse(A, u)
    return LinMap.from_function(A, lambda x: A.mul(A.mul(u, x), v))


def transpose(A):
    s = A.matrix_side
    if s is None:
        raise FdalgError("Transpose needs a full matrix algebra", code='NOT_MATRIX_ALGEBRA')
    return LinMap.from_function(A, lambda x: A.from_matrix(A.to_matrix(x).transpose()))


def is_central(A, a):
    return A.center.contains(a.coords)


def scalar_multiple(A, alpha, T):
    """x -> alpha T(x) for a central alpha."""
    if not is_central(A, alpha):
        raise FdalgError(f"{alpha} is not central", code='NOT_CENTRAL')
    return LinMap.from_function(A, lambda x: A.mul(alpha, T(x)))


MAP_KINDS = {
    'from_columns': LinMap,
    'inner_derivation': inner_derivation,
    'conjugation': conjugation,
    'transpose': transpose,
    'scalar_multiple': scalar_multiple,
}


def make_map(kind, A, *args):
    try:
        constructor = MAP_KINDS[kind]
    except KeyError:
        raise FdalgError(f"Unknown map kind '{kind}'", code='UNKNOWN_KIND')
    return constructor(A, *args)


# ============================================================================
# CLASSIFICATION
# ============================================================================

@dataclass(frozen=True)
class MapProfile:
    bijective: bool
    unital: bool
    derivation: bool
    jordan_homomorphism: bool
    homomorphism: bool
    antihomomorphism: bool
    jordan_automorphism: bool
    automorphism: bool
    antiautomorphism: bool
    in_mult_algebra: bool

    def to_data(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _holds_on_basis_pairs(A, law, pairs=None):
    basis = A.basis()
    pairs = pairs or itertools.product(range(A.dim), repeat=2)
    return all(law(basis[i], basis[j]) for i, j in pairs)


def is_derivation(A, T):
    return _holds_on_basis_pairs(A, lambda x, y: T(A.mul(x, y)) == A.mul(T(x), y) + A.mul(x, T(y)))


def is_jordan_homomorphism(A, T):
    pairs = itertools.combinations_with_replacement(range(A.dim), 2)
    return _holds_on_basis_pairs(A, lambda x, y: T(A.jordan_product(x, y)) == A.jordan_product(T(x), T(y)), pairs)


def in_multiplication_algebra(A, T):
    if A.unit is None:
        return False
    return A.multiplication_algebra.contains(T.vector())


def classify(A, T):
    """Decide every MapProfile flag exactly on basis pairs."""
    if T.algebra is not A:
        raise FdalgError("Map acts on a different algebra", code='ALGEBRA_MISMATCH')
    bijective = T.is_bijective
    jordan = is_jordan_homomorphism(A, T)
    homomorphism = _holds_on_basis_pairs(A, lambda x, y: T(A.mul(x, y)) == A.mul(T(x), T(y)))
    antihomomorphism = _holds_on_basis_pairs(A, lambda x, y: T(A.mul(x, y)) == A.mul(T(y), T(x)))
    return MapProfile(
        bijective=bijective,
        unital=A.unit is not None and T(A.unit) == A.unit,
        derivation=is_derivation(A, T),
        jordan_homomorphism=jordan,
        homomorphism=homomorphism,
        antihomomorphism=antihomomorphism,
        jordan_automorphism=bijective and jordan,
        automorphism=bijective and homomorphism,
        antiautomorphism=bijective and antihomomorphism,
        in_mult_algebra=in_multiplication_algebra(A, T),
    )


def preserves_squares(A, T):
    """
    T(x^2) == T(x)^2 at every basis vector and every sum of two basis vectors.

    Polarization makes this equivalent to the Jordan law when char != 2.
    """
    basis = A.basis()
    points = basis + [basis[i] + basis[j] for i, j in itertools.combinations(range(A.dim), 2)]
    return all(T(A.mul(x, x)) == A.mul(T(x), T(x)) for x in points)
