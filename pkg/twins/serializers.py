from rest_framework import serializers

import numpy as np

from .exceptions import TwinError
from .pairs import ObservablePair
from .spins import SCENARIOS
from .states import BipartiteState, PureDecomposition, mix
from .tolerances import Tolerances


def encode_complex(z):
    return [float(np.real(z)), float(np.imag(z))]


def encode_matrix(M):
    """矩陣 -> [[re, im], ...] 的巢狀列表 (row-major)"""
    return [[encode_complex(z) for z in row] for row in np.asarray(M)]


def encode_vector(v):
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


class ComplexField(serializers.Field):
    """複數以 [re, im] 表示；也接受單一實數"""
    default_error_messages = {
        'invalid': 'Expected [re, im] or a real number.',
        'non_finite': 'Complex entries must be finite.',
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail('invalid')
        if isinstance(data, (int, float)):
            value = complex(data, 0.0)
        elif isinstance(data, (list, tuple)) and len(data) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in data
        ):
            value = complex(data[0], data[1])
        else:
            self.fail('invalid')
        if not np.isfinite(value):
            self.fail('non_finite')
        return value

    def to_representation(self, value):
        return encode_complex(value)


class MatrixField(serializers.ListField):
    """二維複數矩陣，列長度必須一致"""
    child = serializers.ListField(child=ComplexField(), allow_empty=False)
    default_error_messages = {
        'ragged': 'All matrix rows must have the same length.',
    }

    def __init__(self, **kwargs):
        kwargs.setdefault('allow_empty', False)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        rows = super().to_internal_value(data)
        if len({len(row) for row in rows}) != 1:
            self.fail('ragged')
        return np.array(rows, dtype=complex)

    def to_representation(self, value):
        return encode_matrix(value)


class VectorField(serializers.ListField):
    child = ComplexField()

    def __init__(self, **kwargs):
        kwargs.setdefault('allow_empty', False)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        return np.array(super().to_internal_value(data), dtype=complex)

    def to_representation(self, value):
        return encode_vector(value)


class TolerancesSerializer(serializers.Serializer):
    rank_tol = serializers.FloatField(min_value=0, required=False)
    residual_tol = serializers.FloatField(min_value=0, required=False)
    cluster_tol = serializers.FloatField(min_value=0, required=False)
    herm_tol = serializers.FloatField(min_value=0, required=False)


class DimsField(serializers.ListField):
    child = serializers.IntegerField(min_value=1)

    def __init__(self, **kwargs):
        kwargs.setdefault('min_length', 2)
        kwargs.setdefault('max_length', 2)
        super().__init__(**kwargs)


def _raise_as_validation(field, exc):
    raise serializers.ValidationError({field: [str(exc)]}, code=getattr(exc, 'code', 'invalid'))


class DocumentSerializer(serializers.Serializer):
    """
    所有文件共用的欄位與容許誤差合併

    順序：settings.TWINS -> 文件的 tolerances -> context['tolerances'] (命令列參數)
    """
    tolerances = TolerancesSerializer(required=False)
    scenario = serializers.ChoiceField(choices=list(SCENARIOS), required=False)

    def resolve_tolerances(self, attrs):
        overrides = dict(attrs.get('tolerances') or {})
        overrides.update({k: v for k, v in self.context.get('tolerances', {}).items() if v is not None})
        return Tolerances.from_settings(**overrides)


class StateDocumentSerializer(DocumentSerializer):
    dims = DimsField()
    rho = MatrixField()

    def validate(self, attrs):
        tol = self.resolve_tolerances(attrs)
        d_plus, d_minus = attrs['dims']
        try:
            attrs['state'] = BipartiteState.from_matrix(attrs['rho'], d_plus, d_minus, tol)
        except TwinError as exc:
            _raise_as_validation('rho', exc)
        return attrs

    def to_representation(self, instance):
        # instance 為 BipartiteState
        document = {
            'dims': [instance.d_plus, instance.d_minus],
            'rho': encode_matrix(instance.rho),
        }
        scenario = self.context.get('scenario')
        if scenario:
            document['scenario'] = scenario
        return document


class ComponentSerializer(serializers.Serializer):
    weight = serializers.FloatField()
    vector = VectorField()

    def to_representation(self, instance):
        weight, vector = instance
        return {'weight': float(weight), 'vector': encode_vector(vector)}


class DecompositionDocumentSerializer(DocumentSerializer):
    dims = DimsField()
    components = ComponentSerializer(many=True, allow_empty=False)

    def validate(self, attrs):
        tol = self.resolve_tolerances(attrs)
        d_plus, d_minus = attrs['dims']
        try:
            decomposition = PureDecomposition.build(
                [(c['weight'], c['vector']) for c in attrs['components']], d_plus, d_minus,
            )
        except TwinError as exc:
            _raise_as_validation('components', exc)
        attrs['decomposition'] = decomposition
        attrs['state'] = mix(decomposition, tol)
        return attrs

    def to_representation(self, instance):
        # instance 為 PureDecomposition
        document = {
            'dims': [instance.d_plus, instance.d_minus],
            'components': [ComponentSerializer(component).data for component in instance],
        }
        scenario = self.context.get('scenario')
        if scenario:
            document['scenario'] = scenario
        return document


class PairDocumentSerializer(serializers.Serializer):
    a_plus = MatrixField()
    a_minus = MatrixField()

    def validate(self, attrs):
        tol = self.context.get('tol') or Tolerances.from_settings()
        try:
            attrs['pair'] = ObservablePair.hermitian(attrs['a_plus'], attrs['a_minus'], tol.herm_tol)
        except TwinError as exc:
            _raise_as_validation('a_plus', exc)
        return attrs

    def to_representation(self, instance):
        # instance 為 ObservablePair
        return {
            'a_plus': encode_matrix(instance.a_plus),
            'a_minus': encode_matrix(instance.a_minus),
        }
