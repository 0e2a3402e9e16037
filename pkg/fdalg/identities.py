import itertools
import logging
import random
from dataclasses import dataclass, field as dataclass_field

from django.conf import settings

from .exceptions import BudgetExceeded, FdalgError


logger = logging.getLogger(__name__)

PASS = 'PASS'
FAIL = 'FAIL'
UNDECIDED_SAMPLED = 'UNDECIDED_SAMPLED'
BUDGET_EXCEEDED = 'BUDGET_EXCEEDED'

FORMAL = 'formal'
POINTWISE_EXHAUSTIVE = 'pointwise_exhaustive'
POINTWISE_SAMPLED = 'pointwise_sampled'
SINGLE_POINT = 'single_point'

COMMUTATORS = 'commutators'
RADICAL = 'radical'


# ============================================================================
# IDENTITY KINDS
# ============================================================================

@dataclass(frozen=True)
class IdentityKind:
    """
    A polynomial condition P(x) in V, given by its d-linear form.

    ``form(A, maps, c, args)`` evaluates the multilinear expression at the
    element tuple ``args``; P(x) is the form at (x, ..., x). For bivariate
    kinds the last slot is the independent variable y.
    """

    name: str
    token: str
    degree: int
    map_count: int
    default_target: str
    form: object
    bivariate: bool = False
    needs_element: bool = False


def _xdxx(A, maps, c, args):
    x1, x2, x3 = args
    return A.mul(A.mul(x1, maps[0](x2)), x3)


def _cube_diff(A, maps, c, args):
    T = maps[0]
    x1, x2, x3 = args
    return A.mul(A.mul(T(x1), T(x2)), T(x3)) - A.mul(A.mul(x1, x2), x3)


def _square_diff(A, maps, c, args):
    T = maps[0]
    x1, x2 = args
    return A.mul(T(x1), T(x2)) - A.mul(x1, x2)


def _quartic_diff(A, maps, c, args):
    T = maps[0]
    x1, x2, x3, x4 = args
    product = A.mul(A.mul(A.mul(x1, x2), x3), x4)
    images = A.mul(A.mul(A.mul(T(x1), T(x2)), T(x3)), T(x4))
    return T(product) - images


def _h1(A, maps, c, args):
    T = maps[0]
    x1, x2, y = args
    return A.mul(A.mul(T(x1), T(x2)), T(y)) - A.mul(A.mul(x1, x2), y)


def _xd(A, maps, c, args):
    x1, x2 = args
    return A.mul(x1, maps[0](x2))


def _linear_diff(A, maps, c, args):
    (x1,) = args
    return maps[0](x1) - x1


def _jordan_square(A, maps, c, args):
    T = maps[0]
    x1, x2 = args
    return T(A.mul(x1, x2)) - A.mul(T(x1), T(x2))


def _c_square(A, maps, c, args):
    x1, x2 = args
    return A.mul(c, A.mul(x1, x2))


XDXX = IdentityKind('XDXX', 'xdxx', 3, 1, COMMUTATORS, _xdxx)
CUBE_DIFF = IdentityKind('CUBE_DIFF', 'cube', 3, 1, COMMUTATORS, _cube_diff)
SQUARE_DIFF = IdentityKind('SQUARE_DIFF', 'square', 2, 1, COMMUTATORS, _square_diff)
QUARTIC_DIFF = IdentityKind('QUARTIC_DIFF', 'quartic-rad', 4, 1, RADICAL, _quartic_diff)
H1 = IdentityKind('H1', 'h1', 3, 1, COMMUTATORS, _h1, bivariate=True)
XD = IdentityKind('XD', 'xd', 2, 1, COMMUTATORS, _xd)
LINEAR_DIFF = IdentityKind('LINEAR_DIFF', 'linear', 1, 1, COMMUTATORS, _linear_diff)
JORDAN_SQUARE = IdentityKind('JORDAN_SQUARE', 'jordan-square-rad', 2, 1, RADICAL, _jordan_square)
C_SQUARE = IdentityKind('C_SQUARE', 'c-square', 2, 0, COMMUTATORS, _c_square, needs_element=True)

IDENTITY_KINDS = {kind.name: kind for kind in (
    XDXX, CUBE_DIFF, SQUARE_DIFF, QUARTIC_DIFF, H1, XD, LINEAR_DIFF, JORDAN_SQUARE, C_SQUARE,
)}

CLI_TOKENS = {kind.token: kind for kind in IDENTITY_KINDS.values() if not kind.needs_element}


def identity_kind(name_or_token):
    kind = IDENTITY_KINDS.get(name_or_token) or CLI_TOKENS.get(name_or_token)
    if kind is None:
        raise FdalgError(f"Unknown identity '{name_or_token}'", code='UNKNOWN_IDENTITY')
    return kind


@dataclass(frozen=True)
class IdentitySpec:
    kind: IdentityKind
    maps: tuple = ()
    target: object = None
    element: object = None

    def __post_init__(self):
        if len(self.maps) != self.kind.map_count:
            raise FdalgError(f"{self.kind.name} takes {self.kind.map_count} map(s)", code='MALFORMED_ARGUMENT')
        if self.kind.needs_element and self.element is None:
            raise FdalgError(f"{self.kind.name} needs an element argument", code='MALFORMED_ARGUMENT')

    @property
    def degree(self):
        return self.kind.degree

    def resolve_target(self, A):
        if self.target is not None:
            if self.target.ambient_dim != A.dim:
                raise FdalgError("Target subspace has the wrong ambient dimension", code='AMBIENT_MISMATCH')
            return self.target
        if self.kind.default_target == RADICAL:
            return A.radical()
        return A.commutator_space

    def evaluate(self, A, args):
        return self.kind.form(A, self.maps, self.element, tuple(args))

    def at_point(self, A, x, y=None):
        """P(x), or P(x, y) for bivariate kinds."""
        slots = [x] * (self.degree - 1) + [y] if self.kind.bivariate else [x] * self.degree
        return self.evaluate(A, slots)


# ============================================================================
# VERDICTS
# ============================================================================

@dataclass
class Verdict:
    kind: str
    status: str
    mode: str
    witness: tuple = None
    witness_value: object = None
    coefficient_witness: tuple = None
    equivalence_note: str = ''
    checked_count: int = 0
    budget: int = None
    seed: int = None
    details: dict = dataclass_field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS


def equivalence_note(field, degree):
    """Whether formal and pointwise verdicts coincide for this field and degree."""
    if field.characteristic == 0:
        return 'equivalent: characteristic 0'
    if not field.is_finite:
        return 'equivalent: infinite field'
    if field.order > degree:
        return f'equivalent: |F| = {field.order} > degree {degree}'
    return f'not guaranteed: |F| = {field.order} <= degree {degree}'


def _monomials(n, kind):
    if kind.bivariate:
        for pair in itertools.combinations_with_replacement(range(n), kind.degree - 1):
            for k in range(n):
                yield pair + (k,)
    else:
        yield from itertools.combinations_with_replacement(range(n), kind.degree)


def symmetrized_coefficient(A, spec, monomial):
    """
    Sum of the form over every distinct arrangement of the monomial's slots.

    No multinomial factor is divided out, so the result is valid in every
    characteristic.
    """
    basis = A.basis()
    if spec.kind.bivariate:
        head, tail = monomial[:-1], monomial[-1:]
        arrangements = sorted(set(itertools.permutations(head)))
        arrangements = [a + tail for a in arrangements]
    else:
        arrangements = sorted(set(itertools.permutations(monomial)))
    total = A.zero()
    for arrangement in arrangements:
        total = total + spec.evaluate(A, [basis[i] for i in arrangement])
    return total


def check_formal(A, spec):
    """PASS iff every symmetrized coefficient lies in the target."""
    target = spec.resolve_target(A)
    note = equivalence_note(A.field, spec.degree)
    checked = 0
    for monomial in _monomials(A.dim, spec.kind):
        coefficient = symmetrized_coefficient(A, spec, monomial)
        checked += 1
        if not target.contains(coefficient.coords):
            logger.info("%s fails formally at monomial %s", spec.kind.name, monomial)
            return Verdict(spec.kind.name, FAIL, FORMAL, witness_value=coefficient,
                           coefficient_witness=monomial, equivalence_note=note, checked_count=checked)
    return Verdict(spec.kind.name, PASS, FORMAL, equivalence_note=note, checked_count=checked)


# ============================================================================
# POINTWISE
# ============================================================================

def point_at(A, spec, index):
    """Element (or pair) number ``index`` of the exhaustive enumeration."""
    if spec.kind.bivariate:
        size = A.enumeration_size()
        return A.element_at(index % size), A.element_at(index // size)
    return (A.element_at(index),)


def first_failure(A, spec, target, start, stop):
    """Smallest index in [start, stop) whose value leaves the target, or None."""
    for index in range(start, stop):
        point = point_at(A, spec, index)
        if not target.contains(spec.at_point(A, *point).coords):
            return index
    return None


def _scan_partitioned(A, spec, target, size):
    from celery import group

    from .serializers import identity_payload
    from .tasks import scan_identity_range

    chunk = settings.FDALG_CHUNK_SIZE
    payload = identity_payload(A, spec, target)
    ranges = [(start, min(start + chunk, size)) for start in range(0, size, chunk)]
    logger.info("Scanning %d points of %s in %d chunks", size, spec.kind.name, len(ranges))
    results = group(scan_identity_range.s(payload, start, stop) for start, stop in ranges)().get()
    failures = [index for index in results if index is not None]
    return min(failures, default=None)


def scan(A, spec, target, size):
    if settings.FDALG_WORKERS > 1 and size > settings.FDALG_CHUNK_SIZE:
        return _scan_partitioned(A, spec, target, size)
    return first_failure(A, spec, target, 0, size)


def check_at_point(A, spec, x, y=None):
    """Evaluate P at one point, e.g. a witness printed by an earlier check."""
    if spec.kind.bivariate and y is None:
        raise FdalgError(f"{spec.kind.name} needs a second point y", code='MALFORMED_ARGUMENT')
    point = (x, y) if spec.kind.bivariate else (x,)
    value = spec.at_point(A, *point)
    status = PASS if spec.resolve_target(A).contains(value.coords) else FAIL
    return Verdict(spec.kind.name, status, SINGLE_POINT, witness=point, witness_value=value,
                   equivalence_note=equivalence_note(A.field, spec.degree), checked_count=1)


def _sample_points(A, spec, count, rng):
    if spec.kind.bivariate:
        basis = A.basis()
        for x, y in itertools.product(basis, repeat=2):
            yield x, y
        for _ in range(count):
            yield A.random_element(rng), A.random_element(rng)
        return
    for x in A.sample_plan(count, rng):
        yield (x,)


def check_pointwise(A, spec, budget=None, seed=None, mode=None, sample_count=None):
    """
    Evaluate P at every element when the field is finite and the space fits
    the budget, otherwise at a seeded sample.

    ``mode`` forces 'exhaustive' (BudgetExceeded when infeasible) or 'sampled'.
    """
    budget = settings.FDALG_BUDGET if budget is None else budget
    seed = settings.FDALG_SEED if seed is None else seed
    sample_count = settings.FDALG_SAMPLE_COUNT if sample_count is None else sample_count
    target = spec.resolve_target(A)
    note = equivalence_note(A.field, spec.degree)
    arity = 2 if spec.kind.bivariate else 1
    size = A.enumeration_size(arity)
    feasible = size is not None and size <= budget

    if mode == 'exhaustive' and not feasible:
        raise BudgetExceeded(f"Exhaustive check of {spec.kind.name} needs {size or 'infinitely many'} "
                             f"evaluations, budget is {budget}", budget=budget)

    if feasible and mode != 'sampled':
        index = scan(A, spec, target, size)
        if index is None:
            return Verdict(spec.kind.name, PASS, POINTWISE_EXHAUSTIVE, equivalence_note=note,
                           checked_count=size, budget=budget, seed=seed)
        point = point_at(A, spec, index)
        return Verdict(spec.kind.name, FAIL, POINTWISE_EXHAUSTIVE, witness=point,
                       witness_value=spec.at_point(A, *point), equivalence_note=note,
                       checked_count=index + 1, budget=budget, seed=seed, details={'index': index})

    rng = random.Random(seed)
    checked = 0
    for point in _sample_points(A, spec, sample_count, rng):
        checked += 1
        value = spec.at_point(A, *point)
        if not target.contains(value.coords):
            return Verdict(spec.kind.name, FAIL, POINTWISE_SAMPLED, witness=point, witness_value=value,
                           equivalence_note=note, checked_count=checked, budget=budget, seed=seed)
    logger.warning("%s undecided after %d sampled points (seed %s)", spec.kind.name, checked, seed)
    return Verdict(spec.kind.name, UNDECIDED_SAMPLED, POINTWISE_SAMPLED, equivalence_note=note,
                   checked_count=checked, budget=budget, seed=seed)


# ============================================================================
# MEMBERSHIP SUBROUTINES
# ============================================================================

def left_multiples_in_commutators(A, c):
    """c*A lies in [A, A]."""
    commutators = A.commutator_space
    return all(commutators.contains(A.mul(c, b).coords) for b in A.basis())


def square_multiples_in_commutators(A, c):
    """c*x^2 lies in [A, A] for every x, decided formally."""
    return check_formal(A, IdentitySpec(C_SQUARE, element=c)).passed
