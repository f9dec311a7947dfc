from rest_framework import serializers

from noc.exceptions import PermutationError
from noc.models.routing import Permutation


class PermutationSerializer(serializers.Serializer):
    """
    Wraps a permutation file (a JSON array of destinations indexed by source).
    Pass the topology's node count as context['nodes'].
    """
    mapping = serializers.ListField(
        child=serializers.IntegerField(min_value=0),
        allow_empty=False,
    )

    def validate_mapping(self, value):
        nodes = self.context.get('nodes')
        if nodes is not None and len(value) != nodes:
            raise serializers.ValidationError(
                'permutation has %d entries, topology has %d nodes' % (len(value), nodes))
        try:
            Permutation(tuple(value))
        except PermutationError as exc:
            raise serializers.ValidationError(str(exc))
        return value

    def create(self, validated_data):
        return Permutation(tuple(validated_data['mapping']))


class RouteSetSerializer(serializers.BaseSerializer):
    def to_representation(self, instance):
        return instance.to_json()


class RouteOutcomeSerializer(serializers.Serializer):
    source = serializers.IntegerField()
    header = serializers.CharField()
    expected = serializers.IntegerField()
    destination = serializers.IntegerField(allow_null=True)
    outcome = serializers.CharField()
    correct = serializers.BooleanField()


class RouteReportSerializer(serializers.Serializer):
    passed = serializers.BooleanField()
    opened = serializers.IntegerField()
    rejected = serializers.IntegerField()
    cycles = serializers.IntegerField()
    outcomes = RouteOutcomeSerializer(many=True)
