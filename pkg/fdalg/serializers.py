from rest_framework import serializers

from . import __version__
from .algebra import build_algebra
from .exceptions import FdalgError
from .identities import IdentitySpec, identity_kind
from .linalg import Subspace
from .maps import LinMap
from .scalars import FIELD_KINDS, FieldSpec


def _literal_grid(depth):
    field = serializers.CharField(trim_whitespace=True)
    for _ in range(depth):
        field = serializers.ListField(child=field)
    return field


# ============================================================================
# FILE FORMAT SERIALIZERS
# ============================================================================

class FieldSerializer(serializers.Serializer):
    """{"kind": "Q"|"Fp"|"FpT", "p": <int?>}"""

    kind = serializers.ChoiceField(choices=FIELD_KINDS)
    p = serializers.IntegerField(required=False, allow_null=True)

    def validate(self, data):
        try:
            data['spec'] = FieldSpec(data['kind'], data.get('p'))
        except FdalgError as exc:
            raise serializers.ValidationError({'p': exc.detail})
        return data


class AlgebraFileSerializer(serializers.Serializer):
    """Algebra file: field, dim, labels and the structure table of scalar literals."""

    field = FieldSerializer()
    dim = serializers.IntegerField(min_value=1)
    labels = serializers.ListField(child=serializers.CharField(), required=False)
    table = _literal_grid(3)
    tags = serializers.DictField(required=False)

    def validate(self, data):
        n = data['dim']
        table = data['table']
        if len(table) != n or any(len(row) != n or any(len(entry) != n for entry in row) for row in table):
            raise serializers.ValidationError({'table': f"Expected a {n}x{n}x{n} table."})
        if 'labels' in data and len(data['labels']) != n:
            raise serializers.ValidationError({'labels': f"Expected {n} labels."})
        return data

    def create(self, validated_data):
        field = validated_data['field']['spec']
        table = [[[field.parse(v) for v in entry] for entry in row] for row in validated_data['table']]
        tags = dict(validated_data.get('tags') or {})
        complement = tags.pop('complement', None)
        algebra = build_algebra(field, table, validated_data.get('labels'), tags)
        if complement is not None:
            algebra.tags['complement'] = Subspace.span(
                field, algebra.dim, [[field.parse(v) for v in row] for row in complement])
        return algebra


class MapFileSerializer(serializers.Serializer):
    """Map file: column j is the image of basis vector j. Needs ``algebra`` in the context."""

    columns = _literal_grid(2)

    def validate_columns(self, value):
        n = self.context['algebra'].dim
        if len(value) != n or any(len(column) != n for column in value):
            raise serializers.ValidationError(f"Expected {n} columns of length {n}.")
        return value

    def create(self, validated_data):
        algebra = self.context['algebra']
        field = algebra.field
        return LinMap(algebra, [[field.parse(v) for v in column] for column in validated_data['columns']])


class ElementFileSerializer(serializers.Serializer):
    coords = _literal_grid(1)

    def validate_coords(self, value):
        n = self.context['algebra'].dim
        if len(value) != n:
            raise serializers.ValidationError(f"Expected {n} coordinates.")
        return value

    def create(self, validated_data):
        return self.context['algebra'].parse_element(validated_data['coords'])


class SubspaceFileSerializer(serializers.Serializer):
    """{"basis": [[...], ...]} spanning vectors in algebra coordinates."""

    basis = _literal_grid(2)

    def validate_basis(self, value):
        n = self.context['algebra'].dim
        if any(len(vector) != n for vector in value):
            raise serializers.ValidationError(f"Every vector needs {n} coordinates.")
        return value

    def create(self, validated_data):
        algebra = self.context['algebra']
        field = algebra.field
        return Subspace.span(field, algebra.dim, [[field.parse(v) for v in vector]
                                                  for vector in validated_data['basis']])


class ReportSerializer(serializers.Serializer):
    """The JSON document every subcommand prints."""

    command = serializers.CharField()
    status = serializers.CharField()
    mode = serializers.CharField(required=False, allow_null=True)
    budget = serializers.IntegerField(required=False, allow_null=True)
    seed = serializers.IntegerField(required=False, allow_null=True)
    witnesses = serializers.JSONField(required=False)
    details = serializers.JSONField(required=False)
    timings = serializers.JSONField(required=False)
    version = serializers.CharField(default=__version__)


# ============================================================================
# LOADING
# ============================================================================

def _load(serializer):
    if not serializer.is_valid():
        raise FdalgError(f"Malformed file: {serializer.errors}", code='MALFORMED_FILE', errors=serializer.errors)
    return serializer.save()


def load_algebra(data):
    return _load(AlgebraFileSerializer(data=data))


def load_map(algebra, data):
    return _load(MapFileSerializer(data=data, context={'algebra': algebra}))


def load_element(algebra, data):
    return _load(ElementFileSerializer(data=data, context={'algebra': algebra}))


def load_subspace(algebra, data):
    return _load(SubspaceFileSerializer(data=data, context={'algebra': algebra}))


# ============================================================================
# DUMPING
# ============================================================================

def algebra_to_data(algebra):
    field = algebra.field
    data = {
        'field': field.to_data(),
        'dim': algebra.dim,
        'labels': list(algebra.labels),
        'table': [[[field.format(v) for v in entry] for entry in row] for row in algebra.table],
    }
    tags = {k: v for k, v in algebra.tags.items() if k != 'complement'}
    if 'complement' in algebra.tags:
        tags['complement'] = algebra.tags['complement'].format()
    if tags:
        data['tags'] = tags
    return data


def map_to_data(T):
    return {'columns': T.format()}


def element_to_data(x):
    return {'coords': x.format()}


def subspace_to_data(S):
    return {'dim': S.dim, 'basis': S.format()}


def witness_to_data(value):
    """Serialize elements, maps, subspaces and containers of them."""
    if hasattr(value, 'coords'):
        return element_to_data(value)
    if isinstance(value, LinMap):
        return map_to_data(value)
    if isinstance(value, Subspace):
        return subspace_to_data(value)
    if hasattr(value, 'to_data'):
        return value.to_data()
    if isinstance(value, dict):
        return {str(k): witness_to_data(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [witness_to_data(v) for v in value]
    return value


def verdict_to_data(verdict):
    witnesses = {}
    if verdict.witness is not None:
        witnesses['point'] = [element_to_data(x) for x in verdict.witness]
    if verdict.witness_value is not None:
        witnesses['value'] = element_to_data(verdict.witness_value)
    if verdict.coefficient_witness is not None:
        witnesses['monomial'] = list(verdict.coefficient_witness)
    return {
        'status': verdict.status,
        'mode': verdict.mode,
        'budget': verdict.budget,
        'seed': verdict.seed,
        'witnesses': witnesses,
        'details': {'identity': verdict.kind, 'checked': verdict.checked_count,
                    'equivalence': verdict.equivalence_note, **verdict.details},
    }


def certification_to_data(certification):
    witnesses = {'audit': witness_to_data(certification.witness_data)}
    if certification.witness is not None:
        witnesses['point'] = element_to_data(certification.witness)
    return {
        'status': certification.status,
        'mode': certification.mode,
        'budget': certification.budget,
        'seed': certification.seed,
        'witnesses': witnesses,
        'details': {'kind': certification.kind, 'checked': certification.checked_count},
    }


# ============================================================================
# TASK PAYLOADS
# ============================================================================

def identity_payload(algebra, spec, target):
    return {
        'algebra': algebra_to_data(algebra),
        'kind': spec.kind.name,
        'maps': [map_to_data(T) for T in spec.maps],
        'element': element_to_data(spec.element) if spec.element is not None else None,
        'target': subspace_to_data(target),
    }


def load_identity_payload(payload):
    algebra = load_algebra(payload['algebra'])
    maps = tuple(load_map(algebra, data) for data in payload['maps'])
    element = load_element(algebra, payload['element']) if payload.get('element') else None
    target = load_subspace(algebra, payload['target'])
    return algebra, IdentitySpec(identity_kind(payload['kind']), maps, target, element), target


def orbit_payload(algebra, kind, T):
    return {'algebra': algebra_to_data(algebra), 'kind': kind, 'map': map_to_data(T)}


def load_orbit_payload(payload):
    algebra = load_algebra(payload['algebra'])
    return algebra, payload['kind'], load_map(algebra, payload['map'])
