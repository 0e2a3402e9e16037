import logging
from dataclasses import dataclass, field as dataclass_field

from .exceptions import FdalgError
from .linalg import Matrix
from .maps import LinMap, classify, inner_derivation, is_central, is_jordan_homomorphism, scalar_multiple


logger = logging.getLogger(__name__)


@dataclass
class Failure:
    """A structured negative outcome; not an error."""

    code: str
    detail: str
    data: dict = dataclass_field(default_factory=dict)


@dataclass
class DerivationDecomposition:
    a: object
    R: object
    rad: object


@dataclass
class JordanFactorization:
    alpha: object
    J: object
    profile: object


@dataclass
class Ac3Split:
    jordan_part: object
    radical_part: object
    complement: object
    rad: object


def guard_characteristic(field, excluded, allow, context):
    """Raise CHAR_EXCLUDED for an excluded characteristic unless overridden."""
    p = field.characteristic
    if p not in excluded:
        return
    if not allow:
        raise FdalgError(f"{context} excludes characteristic {p}", code='CHAR_EXCLUDED', characteristic=p)
    logger.warning("%s: proceeding in excluded characteristic %d", context, p)


def _commutator_system(A, project):
    """Columns k: the projected brackets [b_k, b_i], concatenated over i."""
    basis = A.basis()
    columns = []
    for bk in basis:
        column = []
        for bi in basis:
            column.extend(project(A.commutator(bk, bi).coords))
        columns.append(column)
    return columns


# ============================================================================
# DERIVATIONS
# ============================================================================

def solve_inner_derivation(A, D):
    """Canonical a with [a, x] = D(x) for all x, or None when D is not inner."""
    columns = _commutator_system(A, lambda v: v)
    rhs = [v for column in D.columns for v in column]
    a = Matrix.from_columns(A.field, columns).solve(rhs)
    if a is None:
        return None
    a = A.element(a)
    if inner_derivation(A, a) != D:
        raise FdalgError("Inner-derivation solve failed to re-verify", code='INTERNAL_ERROR')
    return a


def decompose_theorem_d(A, D, allow_char_violation=False, method='auto'):
    """
    Split D as ad_a + R with R taking values in rad(A).

    Solves quotient_coords(D(b_i) - [a, b_i]) = 0 for the n coordinates of a.
    """
    guard_characteristic(A.field, {2}, allow_char_violation, 'Derivation decomposition')
    rad = A.radical(method)
    basis = A.basis()
    if not rad.complement_positions:
        a = A.zero()
    else:
        columns = _commutator_system(A, rad.quotient_coords)
        matrix = Matrix.from_columns(A.field, columns)
        rhs = [v for column in D.columns for v in rad.quotient_coords(column)]
        solution = matrix.solve(rhs)
        if solution is None:
            width = len(rad.complement_positions)
            culprit = next(i for i in range(A.dim)
                           if Matrix.from_rows(A.field, matrix.rows[:(i + 1) * width])
                           .solve(rhs[:(i + 1) * width]) is None)
            return Failure('NO_DECOMPOSITION',
                           f"No a satisfies D(x) - [a, x] in rad(A); the system is inconsistent at {A.labels[culprit]}",
                           {'basis_index': culprit, 'radical_dim': rad.dim})
        a = A.element(solution)
    R = D - inner_derivation(A, a)
    for j, column in enumerate(R.columns):
        if not rad.contains(column):
            raise FdalgError(f"Residual leaves the radical at {basis[j]}", code='INTERNAL_ERROR')
    return DerivationDecomposition(a, R, rad)


# ============================================================================
# JORDAN AUTOMORPHISMS
# ============================================================================

def decompose_theorem_a(A, T, allow_char_violation=False):
    """Factor T = alpha*J with alpha = T(1) central, alpha^3 = 1 and J a Jordan automorphism in M(A)."""
    unit = A.require_unit()
    guard_characteristic(A.field, {2, 3}, allow_char_violation, 'Jordan factorization')
    if not A.radical().is_zero:
        raise FdalgError("Jordan factorization needs a semisimple algebra", code='SEMISIMPLE_REQUIRED')
    alpha = T(unit)
    if not is_central(A, alpha):
        return Failure('ALPHA_NOT_CENTRAL', f"T(1) = {alpha} is not central", {'alpha': alpha})
    alpha_squared = A.mul(alpha, alpha)
    if A.mul(alpha_squared, alpha) != unit:
        return Failure('ALPHA_CUBE_NOT_ONE', f"T(1) = {alpha} does not cube to 1", {'alpha': alpha})
    J = scalar_multiple(A, alpha_squared, T)
    profile = classify(A, J)
    if not profile.jordan_automorphism:
        return Failure('JORDAN_FAIL', "alpha^-1 T is not a Jordan automorphism",
                       {'alpha': alpha, 'J': J, 'profile': profile})
    if not profile.in_mult_algebra:
        return Failure('NOT_IN_MULT_ALGEBRA', "alpha^-1 T lies outside M(A)",
                       {'alpha': alpha, 'J': J, 'profile': profile})
    return JordanFactorization(alpha, J, profile)


def kernel_meets_radical_trivially(A, T):
    """ker T and rad(A) intersect in 0."""
    return T.kernel().intersection(A.radical()).is_zero


def projection_along(A, complement, rad):
    """The projection of A onto ``complement`` along ``rad``."""
    k = complement.dim
    B = Matrix.from_columns(A.field, list(complement.basis) + list(rad.basis))

    def project(x):
        coefficients = B.solve(x.coords)
        result = A.zero()
        for c, v in zip(coefficients[:k], complement.basis):
            result = result + A.element(v).scale(c)
        return result

    return LinMap.from_function(A, project)


def split_ac3(A, T, complement, allow_char_violation=False):
    """
    Split T into a Jordan endomorphism into ``complement`` plus a radical-valued map.

    ``complement`` must be a subalgebra with complement + rad(A) = A.
    """
    rad = A.radical()
    closed = complement.contains_subspace(A.product_space(complement, complement))
    if not closed or complement.dim + rad.dim != A.dim or not complement.intersection(rad).is_zero:
        raise FdalgError("Subspace is not a subalgebra complement of the radical", code='NOT_A_COMPLEMENT',
                         closed=closed, dim=complement.dim, radical_dim=rad.dim)
    unit = A.require_unit()
    if T(unit) != unit:
        raise FdalgError("T must fix the unit", code='UNIT_NOT_FIXED')
    guard_characteristic(A.field, {2, 3}, allow_char_violation, 'Radical splitting')
    pi = projection_along(A, complement, rad)
    jordan_part = pi.compose(T)
    radical_part = T - jordan_part
    if not is_jordan_homomorphism(A, jordan_part):
        return Failure('JORDAN_ENDO_FAIL', "The projected map is not a Jordan endomorphism",
                       {'jordan_part': jordan_part, 'radical_part': radical_part})
    return Ac3Split(jordan_part, radical_part, complement, rad)
