"""
Named example constructions, each bundled with the verdicts it must reproduce.

Every fixture holds an algebra, a main map, optional auxiliary maps and a
table of expected rows. ``verify_fixture`` re-runs each row against the
library and reports the rows that disagree.
"""
import logging
from dataclasses import dataclass, field as dataclass_field

from .algebra import field_extension, matrix_algebra, upper_triangular
from .decompose import Failure, decompose_theorem_a, decompose_theorem_d, solve_inner_derivation
from .exceptions import FdalgError
from .identities import IdentitySpec, check_formal, check_pointwise, identity_kind
from .linalg import Polynomial
from .localmaps import certify_local, experiment_a2, orbit_membership
from .maps import LinMap, classify, inner_derivation, transpose
from .scalars import FieldSpec


logger = logging.getLogger(__name__)

EXAMPLE = 'example'
DERIVED = 'derived'


@dataclass
class ExpectedRow:
    operation: str
    args: dict
    expected: dict
    provenance: str = EXAMPLE

    def to_data(self):
        return {'operation': self.operation, 'args': self.args, 'expected': self.expected,
                'provenance': self.provenance}


@dataclass
class Fixture:
    name: str
    algebra: object
    map: object
    expected: list
    notes: str = ''
    aux_maps: dict = dataclass_field(default_factory=dict)

    def get_map(self, name='main'):
        if name == 'main':
            return self.map
        try:
            return self.aux_maps[name]
        except KeyError:
            raise FdalgError(f"Fixture {self.name} has no map '{name}'", code='UNKNOWN_MAP')


@dataclass
class RowResult:
    row: ExpectedRow
    actual: dict
    ok: bool


def _element(A, **coords):
    """Element from label=literal keyword pairs, e.g. _element(A, e12=1, e21=2)."""
    index = {label: i for i, label in enumerate(A.labels)}
    values = [A.field.zero] * A.dim
    for label, value in coords.items():
        values[index[label]] = A.field.parse(value)
    return A.element(values)


def _trace(A, x):
    return A.to_matrix(x).trace()


# ============================================================================
# FIXTURES
# ============================================================================

def _f2_m2_cube():
    A = matrix_algebra(FieldSpec.prime_field(2), 2)
    # D([[x11, x12], [x21, x22]]) = [[x22, x12], [0, x11]]
    D = LinMap.from_function(A, lambda x: A.element((x.coords[3], x.coords[1], 0, x.coords[0])))
    rows = [
        ExpectedRow('check_pointwise', {'identity': 'xdxx'}, {'status': 'PASS', 'checked': 16,
                                                              'mode': 'pointwise_exhaustive'}),
        ExpectedRow('check_formal', {'identity': 'xdxx'}, {'status': 'FAIL', 'monomial': [0, 0, 3]}, DERIVED),
        ExpectedRow('classify', {}, {'derivation': False}),
    ]
    notes = ("Map on M2(F2) whose values xD(x)x all have trace 0, although D is not a derivation; "
             "the formal coefficient at e11^2 e22 is e11, so the formal check fails over a field "
             "with no more elements than the degree.")
    return Fixture('f2-m2-cube', A, D, rows, notes)


def _eaut1():
    A = matrix_algebra(FieldSpec.prime_field(2), 2)
    T = LinMap.from_function(A, lambda x: x + A.unit.scale(_trace(A, x)))
    rows = [
        ExpectedRow('check_pointwise', {'identity': 'cube'}, {'status': 'PASS', 'checked': 16}),
        ExpectedRow('classify', {}, {'unital': True, 'automorphism': False, 'bijective': True}),
        ExpectedRow('classify', {}, {'antiautomorphism': True, 'jordan_automorphism': True}, DERIVED),
        ExpectedRow('decompose_a', {'allow': True}, {'code': 'OK', 'alpha': ['1', '0', '0', '1']}, DERIVED),
    ]
    notes = ("T(x) = x + tr(x)1 on M2(F2). Over F2 this is the adjugate [[d, b], [c, a]], an "
             "antiautomorphism, so it is a Jordan automorphism of the form 1*J; the rows record "
             "the computed profile.")
    return Fixture('eaut1', A, T, rows, notes)


def _remaut_p3():
    A = matrix_algebra(FieldSpec.prime_field(3), 2)
    a = _element(A, e12=1)
    T = LinMap.from_function(A, lambda x: x + a.scale(_trace(A, x)))
    rows = [
        ExpectedRow('check_pointwise', {'identity': 'cube'}, {'status': 'PASS', 'checked': 81}),
        ExpectedRow('check_formal', {'identity': 'cube'}, {'status': 'PASS'}, DERIVED),
        ExpectedRow('decompose_a', {'allow': True}, {'code': 'ALPHA_NOT_CENTRAL'}),
    ]
    notes = ("T(x) = x + phi(x)a on M2(F3) with a = e12 (a^3 = 0) and phi = trace; T(1) = 1 + 2e12 "
             "is not central, so T is not a central multiple of a Jordan automorphism.")
    return Fixture('remaut-p3', A, T, rows, notes)


def _rd_skew():
    A = matrix_algebra(FieldSpec.rationals(), 2)
    a, b = _element(A, e11=1), _element(A, e12=1)
    D = LinMap.from_function(A, lambda x: A.mul(A.mul(a, x), b) - A.mul(A.mul(b, x), a))
    rows = [
        ExpectedRow('check_formal', {'identity': 'xd'}, {'status': 'PASS'}),
        ExpectedRow('classify', {}, {'derivation': False}, DERIVED),
        ExpectedRow('solve_inner', {}, {'found': False}, DERIVED),
    ]
    notes = "D(x) = axb - bxa on M2(Q) with a = e11, b = e12; x(axb - bxa) = [xa, xb]."
    return Fixture('rd-skew', A, D, rows, notes)


def _rh_square():
    A = matrix_algebra(FieldSpec.rationals(), 3)
    a, b = _element(A, e13=1), _element(A, e12=1)
    T = LinMap.from_function(A, lambda x: x + A.mul(A.mul(a, x), b) - A.mul(A.mul(b, x), a))
    rows = [
        ExpectedRow('check_formal', {'identity': 'square'}, {'status': 'PASS'}),
        ExpectedRow('classify', {}, {'jordan_automorphism': False}),
    ]
    notes = ("T(x) = x + axb - bxa on M3(Q) with a = e13, b = e12 (a^2 = ab = ba = b^2 = 0); "
             "T(e31)^2 = e32 while T(e31^2) = 0.")
    return Fixture('rh-square', A, T, rows, notes)


def _tri_rad_comm():
    A = upper_triangular(FieldSpec.rationals(), 3)
    rows = [
        ExpectedRow('radical', {}, {'dim': 3, 'equals_commutators': True}),
        ExpectedRow('radical', {'method': 'brute'}, {'error': 'NO_VALID_METHOD'}, DERIVED),
    ]
    notes = "Upper triangular 3x3 matrices over Q, where rad(A) = [A, A] is the strict upper triangle."
    return Fixture('tri-rad-comm', A, LinMap.identity(A), rows, notes)


def _ede_p3():
    F = FieldSpec.rational_functions(3)
    ops = F.ops
    f = Polynomial.make(F, [ops.neg(ops.t()), F.zero, F.zero, F.one])
    A = field_extension(F, f)
    one, alpha, alpha2 = A.basis()
    L = LinMap(A, [A.zero().coords, one.coords, A.zero().coords])
    d_dalpha = LinMap(A, [A.zero().coords, one.coords, alpha.scale(F.from_int(2)).coords])
    points = [['0', '1', '0'], ['0', '0', '1'], ['1', '1', '0'], ['0', 't', '1']]
    rows = [
        ExpectedRow('classify', {'map': 'd_dalpha'}, {'derivation': True}),
        ExpectedRow('classify', {}, {'derivation': False}),
        ExpectedRow('derivations', {}, {'dim': 3}, DERIVED),
        ExpectedRow('radical', {}, {'dim': 0}),
    ]
    rows += [ExpectedRow('orbit', {'kind': 'derivation', 'point': point}, {'member': True}) for point in points]
    rows.append(ExpectedRow('certify_local', {'kind': 'derivation', 'mode': 'sampled', 'seed': 1},
                            {'status': 'UNDECIDED_SAMPLED'}))
    notes = ("F = F3(t), A = F(a) with a^3 = t. L sends 1 to 0, a to 1 and a^2 to 0; it is a local "
             "derivation but not a derivation, while d/da is a derivation.")
    return Fixture('ede-p3', A, L, rows, notes, aux_maps={'d_dalpha': d_dalpha})


def _transpose_m2():
    A = matrix_algebra(FieldSpec.prime_field(3), 2)
    rows = [
        ExpectedRow('certify_local', {'kind': 'inner_automorphism'}, {'status': 'PASS', 'checked': 81}),
        ExpectedRow('classify', {}, {'antiautomorphism': True, 'automorphism': False,
                                     'jordan_automorphism': True, 'in_mult_algebra': True}),
        ExpectedRow('orbit', {'kind': 'jordan_automorphism', 'point': ['1', '2', '0', '1']}, {'member': True}),
        ExpectedRow('experiment_a2', {}, {'status': 'CONFIRMED', 'anomaly': False}, DERIVED),
    ]
    notes = "Transpose on M2(F3): every x is similar to its transpose, so it is a local inner automorphism."
    return Fixture('transpose-m2', A, transpose(A), rows, notes)


def _cd2_demo():
    A = matrix_algebra(FieldSpec.prime_field(3), 2)
    a0 = _element(A, e12=1, e21=2)
    D = inner_derivation(A, a0)
    e12 = _element(A, e12=1)
    perturbed = D + LinMap.from_function(A, lambda x: e12.scale(x.coords[0]))
    rows = [
        ExpectedRow('certify_local', {'kind': 'inner_derivation'}, {'status': 'PASS', 'checked': 81}),
        ExpectedRow('solve_inner', {}, {'found': True}),
        ExpectedRow('check_formal', {'identity': 'xdxx'}, {'status': 'PASS'}, DERIVED),
        ExpectedRow('certify_local', {'kind': 'inner_derivation', 'map': 'perturbed'}, {'status': 'FAIL'}, DERIVED),
        ExpectedRow('solve_inner', {'map': 'perturbed'}, {'found': False}, DERIVED),
    ]
    notes = ("Inner derivation ad_a on M2(F3) with a = e12 + 2e21, and the same map plus "
             "x -> x11*e12, which fails to be a local inner derivation.")
    return Fixture('cd2-demo', A, D, rows, notes, aux_maps={'perturbed': perturbed})


FIXTURES = {
    'f2-m2-cube': _f2_m2_cube,
    'eaut1': _eaut1,
    'remaut-p3': _remaut_p3,
    'rd-skew': _rd_skew,
    'rh-square': _rh_square,
    'tri-rad-comm': _tri_rad_comm,
    'ede-p3': _ede_p3,
    'transpose-m2': _transpose_m2,
    'cd2-demo': _cd2_demo,
}


def build_fixture(name):
    try:
        builder = FIXTURES[name]
    except KeyError:
        raise FdalgError(f"Unknown fixture '{name}'; known: {', '.join(FIXTURES)}", code='UNKNOWN_FIXTURE')
    return builder()


# ============================================================================
# VERIFICATION
# ============================================================================

def _verdict_data(verdict):
    data = {'status': verdict.status, 'checked': verdict.checked_count, 'mode': verdict.mode}
    if verdict.coefficient_witness is not None:
        data['monomial'] = list(verdict.coefficient_witness)
    return data


def run_row(fixture, row):
    """Run one expected row and return the observed values."""
    A = fixture.algebra
    args = row.args
    T = fixture.get_map(args.get('map', 'main'))
    operation = row.operation
    try:
        if operation == 'check_formal':
            return _verdict_data(check_formal(A, IdentitySpec(identity_kind(args['identity']), (T,))))
        if operation == 'check_pointwise':
            spec = IdentitySpec(identity_kind(args['identity']), (T,))
            return _verdict_data(check_pointwise(A, spec, seed=args.get('seed'), mode=args.get('mode')))
        if operation == 'classify':
            return classify(A, T).to_data()
        if operation == 'decompose_a':
            result = decompose_theorem_a(A, T, allow_char_violation=args.get('allow', False))
            if isinstance(result, Failure):
                return {'code': result.code}
            return {'code': 'OK', 'alpha': result.alpha.format()}
        if operation == 'decompose_d':
            result = decompose_theorem_d(A, T, allow_char_violation=args.get('allow', False))
            return {'code': result.code if isinstance(result, Failure) else 'OK'}
        if operation == 'solve_inner':
            return {'found': solve_inner_derivation(A, T) is not None}
        if operation == 'certify_local':
            certification = certify_local(A, args['kind'], T, seed=args.get('seed'), mode=args.get('mode'))
            return {'status': certification.status, 'checked': certification.checked_count,
                    'mode': certification.mode}
        if operation == 'orbit':
            member, _ = orbit_membership(A, args['kind'], T, A.parse_element(args['point']))
            return {'member': member}
        if operation == 'radical':
            R = A.radical(args.get('method', 'auto'))
            return {'dim': R.dim, 'equals_commutators': R.equals(A.commutator_space)}
        if operation == 'derivations':
            return {'dim': A.derivation_subspace.dim}
        if operation == 'experiment_a2':
            report = experiment_a2(A, T)
            return {'status': report.status, 'anomaly': report.anomaly}
    except FdalgError as exc:
        return {'error': exc.code}
    raise FdalgError(f"Unknown gallery operation '{operation}'", code='UNKNOWN_OPERATION')


def verify_fixture(fixture):
    results = []
    for row in fixture.expected:
        actual = run_row(fixture, row)
        ok = all(actual.get(key) == value for key, value in row.expected.items())
        if not ok:
            logger.error("%s: %s %s expected %s, got %s", fixture.name, row.operation, row.args,
                         row.expected, actual)
        results.append(RowResult(row, actual, ok))
    return results


def verify_all(names=None):
    return {name: verify_fixture(build_fixture(name)) for name in (names or FIXTURES)}
