from rest_framework import serializers

from noc.exceptions import TopologyError
from noc.models.topology import NetworkSpec, build_topology


class TopologyConfigSerializer(serializers.Serializer):
    nodes = serializers.IntegerField(
        required=True,
        help_text='Endpoint count N, a power of two >= 4',
    )
    switch_bits = serializers.IntegerField(
        required=True,
        min_value=1,
        help_text='Bits per full-size switch; switch degree is 2^switch_bits',
    )

    def validate(self, attrs):
        try:
            attrs['spec'] = NetworkSpec(attrs['nodes'], attrs['switch_bits'])
        except TopologyError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs

    def create(self, validated_data):
        return build_topology(validated_data['spec'])


class StageSerializer(serializers.Serializer):
    port_bits = serializers.IntegerField()
    degree = serializers.IntegerField()
    switch_count = serializers.IntegerField()


class TopologyReadSerializer(serializers.Serializer):
    nodes = serializers.IntegerField(source='n_nodes')
    switch_bits = serializers.IntegerField(source='spec.switch_bits')
    stage_count = serializers.IntegerField()
    header_bits = serializers.IntegerField()
    switch_total = serializers.IntegerField(source='plan.switch_total')
    folded = serializers.BooleanField()
    stages = serializers.SerializerMethodField()
    boundaries = serializers.SerializerMethodField()

    def get_stages(self, instance):
        return StageSerializer(instance.plan.stages, many=True).data

    def get_boundaries(self, instance):
        return [list(boundary) for boundary in instance.wiring.boundaries]
