import logging
import random
from dataclasses import dataclass, field as dataclass_field

from django.conf import settings

from .exceptions import BudgetExceeded, FdalgError
from .identities import FAIL, PASS, POINTWISE_EXHAUSTIVE, POINTWISE_SAMPLED, UNDECIDED_SAMPLED
from .linalg import Matrix, invariant_factors, is_similar
from .maps import classify


logger = logging.getLogger(__name__)

DERIVATION = 'derivation'
INNER_DERIVATION = 'inner_derivation'
INNER_AUTOMORPHISM = 'inner_automorphism'
JORDAN_AUTOMORPHISM = 'jordan_automorphism'

LOCAL_KINDS = (DERIVATION, INNER_DERIVATION, INNER_AUTOMORPHISM, JORDAN_AUTOMORPHISM)


def local_kind(name):
    kind = name.replace('-', '_')
    if kind not in LOCAL_KINDS:
        raise FdalgError(f"Unknown local kind '{name}'", code='UNKNOWN_KIND')
    return kind


@dataclass
class Certification:
    kind: str
    status: str
    mode: str
    checked_count: int = 0
    witness: object = None
    witness_data: list = dataclass_field(default_factory=list)
    budget: int = None
    seed: int = None

    @property
    def passed(self):
        return self.status == PASS


@dataclass
class A2Report:
    certification: Certification
    profile: object
    anomaly: bool
    characteristic_excluded: bool

    @property
    def status(self):
        if self.anomaly:
            return 'ANOMALY'
        if not self.certification.passed:
            return 'HYPOTHESIS_UNMET'
        return 'CONFIRMED'


# ============================================================================
# ORBIT TESTS
# ============================================================================

class OrbitTester:
    """
    Decides whether T(x) lies in the orbit of x under one family of maps.

    Per-algebra data (the derivation basis) is prepared once so a tester can
    be reused across every point of an enumeration.
    """

    def __init__(self, A, kind, T):
        self.A = A
        self.kind = local_kind(kind)
        self.T = T
        if T.algebra is not A:
            raise FdalgError("Map acts on a different algebra", code='ALGEBRA_MISMATCH')
        if self.kind in (INNER_AUTOMORPHISM, JORDAN_AUTOMORPHISM) and A.matrix_side is None:
            raise FdalgError(f"{self.kind} orbits are decided only on full matrix algebras",
                             code='UNSUPPORTED_ALGEBRA')
        self.derivations = A.derivation_space() if self.kind == DERIVATION else None

    def __call__(self, x):
        return getattr(self, f'_{self.kind}')(x)

    def _derivation(self, x):
        target = self.T(x)
        if not self.derivations:
            return target.is_zero(), {'derivation_coords': []}
        images = Matrix.from_columns(self.A.field, [d(x).coords for d in self.derivations])
        coefficients = images.solve(target.coords)
        if coefficients is None:
            return False, {}
        return True, {'derivation_coords': [self.A.field.format(c) for c in coefficients]}

    def _inner_derivation(self, x):
        A = self.A
        brackets = Matrix.from_columns(A.field, [A.commutator(b, x).coords for b in A.basis()])
        a = brackets.solve(self.T(x).coords)
        if a is None:
            return False, {}
        return True, {'a': A.element(a)}

    def _similarity(self, x):
        A = self.A
        X, Y = A.to_matrix(x), A.to_matrix(self.T(x))
        if not is_similar(X, Y):
            return False, {}
        return True, {'invariant_factors': [str(f) for f in invariant_factors(X)]}

    _inner_automorphism = _similarity
    _jordan_automorphism = _similarity


def orbit_membership(A, kind, T, x):
    """(T(x) is in the orbit of x, witness data for that point)."""
    return OrbitTester(A, kind, T)(x)


# ============================================================================
# CERTIFICATION
# ============================================================================

def first_orbit_failure(A, kind, T, start, stop):
    tester = OrbitTester(A, kind, T)
    for index in range(start, stop):
        if not tester(A.element_at(index))[0]:
            return index
    return None


def _scan_partitioned(A, kind, T, size):
    from celery import group

    from .serializers import orbit_payload
    from .tasks import scan_orbit_range

    chunk = settings.FDALG_CHUNK_SIZE
    payload = orbit_payload(A, kind, T)
    ranges = [(start, min(start + chunk, size)) for start in range(0, size, chunk)]
    logger.info("Certifying %d points as local %s in %d chunks", size, kind, len(ranges))
    results = group(scan_orbit_range.s(payload, start, stop) for start, stop in ranges)().get()
    return min((index for index in results if index is not None), default=None)


def certify_local(A, kind, T, budget=None, seed=None, mode=None, sample_count=None):
    """
    Check that T agrees with some map of ``kind`` at every point.

    Exhaustive over finite fields when |F|^n fits the budget; otherwise a
    seeded sample that starts with the basis vectors and their pairwise sums.
    """
    kind = local_kind(kind)
    budget = settings.FDALG_BUDGET if budget is None else budget
    seed = settings.FDALG_SEED if seed is None else seed
    sample_count = settings.FDALG_SAMPLE_COUNT if sample_count is None else sample_count
    tester = OrbitTester(A, kind, T)
    size = A.enumeration_size()
    feasible = size is not None and size <= budget

    if mode == 'exhaustive' and not feasible:
        raise BudgetExceeded(f"Exhaustive certification needs {size or 'infinitely many'} points, "
                             f"budget is {budget}", budget=budget)

    audit = []
    if feasible and mode != 'sampled':
        for b in A.basis():
            audit.append(_audit_entry(b, tester(b)[1]))
        if settings.FDALG_WORKERS > 1 and size > settings.FDALG_CHUNK_SIZE:
            index = _scan_partitioned(A, kind, T, size)
        else:
            index = next((i for i in range(size) if not tester(A.element_at(i))[0]), None)
        if index is None:
            return Certification(kind, PASS, POINTWISE_EXHAUSTIVE, size, witness_data=audit,
                                 budget=budget, seed=seed)
        return Certification(kind, FAIL, POINTWISE_EXHAUSTIVE, index + 1, witness=A.element_at(index),
                             witness_data=audit, budget=budget, seed=seed)

    rng = random.Random(seed)
    checked = 0
    for x in A.sample_plan(sample_count, rng):
        checked += 1
        member, data = tester(x)
        if not member:
            return Certification(kind, FAIL, POINTWISE_SAMPLED, checked, witness=x,
                                 witness_data=audit, budget=budget, seed=seed)
        if checked <= A.dim:
            audit.append(_audit_entry(x, data))
    logger.warning("Local %s undecided after %d sampled points (seed %s)", kind, checked, seed)
    return Certification(kind, UNDECIDED_SAMPLED, POINTWISE_SAMPLED, checked, witness_data=audit,
                         budget=budget, seed=seed)


def _audit_entry(x, data):
    return {'point': x, **data}


def experiment_a2(A, T, budget=None):
    """
    Certify T as a local Jordan automorphism exhaustively and, when it
    passes, confirm that it is a Jordan automorphism lying in M(A).
    """
    if A.matrix_side is None or not A.field.is_finite:
        raise FdalgError("The experiment runs on full matrix algebras over finite fields",
                         code='UNSUPPORTED_ALGEBRA')
    excluded = A.field.characteristic in (2, 3)
    if excluded:
        logger.warning("Local Jordan experiment in characteristic %d", A.field.characteristic)
    certification = certify_local(A, JORDAN_AUTOMORPHISM, T, budget=budget, mode='exhaustive')
    profile = classify(A, T)
    anomaly = certification.passed and not (profile.jordan_automorphism and profile.in_mult_algebra)
    if anomaly:
        logger.error("Certified local Jordan automorphism is not a Jordan automorphism in M(A)")
    return A2Report(certification, profile, anomaly, excluded)
