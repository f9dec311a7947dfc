from rest_framework import serializers

from noc.exceptions import PermutationError, ScheduleError
from noc.models.routing import Permutation
from noc.models.tdm import DEFAULT_SLOT_CYCLES, TdmSchedule, TdmSlot, TimingModel


class ScheduleSlotSerializer(serializers.Serializer):
    perm = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    cycles = serializers.IntegerField(min_value=1, default=DEFAULT_SLOT_CYCLES)
    priority = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    label = serializers.CharField(required=False, allow_blank=True, default='')
    route_priorities = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    route_order = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)

    def validate_perm(self, value):
        try:
            Permutation(tuple(value))
        except PermutationError as exc:
            raise serializers.ValidationError(str(exc))
        return value

    def validate(self, attrs):
        n = len(attrs['perm'])
        priorities = attrs.get('route_priorities')
        if priorities is not None and len(priorities) != n:
            raise serializers.ValidationError('route_priorities needs %d entries, got %d' % (n, len(priorities)))
        order = attrs.get('route_order')
        if order is not None and sorted(order) != list(range(n)):
            raise serializers.ValidationError('route_order must list every source once')
        return attrs


class ScheduleSerializer(serializers.Serializer):
    """
    A schedule file: a JSON list of slots. Pass the node count as
    context['nodes'] to check every slot against the topology.
    """
    slots = ScheduleSlotSerializer(many=True, allow_empty=False)

    def to_internal_value(self, data):
        if isinstance(data, list):
            data = {'slots': data}
        return super().to_internal_value(data)

    def validate_slots(self, value):
        sizes = {len(slot['perm']) for slot in value}
        if len(sizes) != 1:
            raise serializers.ValidationError('slots disagree on the node count: %r' % sorted(sizes))
        nodes = self.context.get('nodes')
        if nodes is not None and sizes != {nodes}:
            raise serializers.ValidationError(
                'schedule covers %d nodes, topology has %d' % (sizes.pop(), nodes))
        return value

    def create(self, validated_data):
        slots = []
        for entry in validated_data['slots']:
            priorities = entry.get('route_priorities')
            order = entry.get('route_order')
            slots.append(TdmSlot(
                Permutation(tuple(entry['perm'])), entry['cycles'], entry.get('priority'), entry['label'],
                None if priorities is None else tuple(priorities),
                None if order is None else tuple(order),
            ))
        return TdmSchedule(len(slots[0].permutation), slots)


class TimingModelSerializer(serializers.Serializer):
    nodes = serializers.IntegerField(min_value=2)
    efficiency = serializers.FloatField()
    frequency = serializers.FloatField()
    switch_bits = serializers.IntegerField(min_value=1, default=1)

    def validate(self, attrs):
        try:
            attrs['model'] = TimingModel(attrs['frequency'], attrs['efficiency'], attrs['nodes'],
                                         attrs['switch_bits'])
        except ScheduleError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs

    def create(self, validated_data):
        return validated_data['model']


class CycleTimeSerializer(serializers.Serializer):
    overhead_cycles = serializers.IntegerField()
    slot_cycles = serializers.FloatField()
    slot_us = serializers.SerializerMethodField()
    cycle_us = serializers.SerializerMethodField()

    def get_slot_us(self, instance):
        return instance.slot_seconds * 1e6

    def get_cycle_us(self, instance):
        return instance.cycle_seconds * 1e6


class ScheduleIssueSerializer(serializers.Serializer):
    slot = serializers.IntegerField()
    check = serializers.CharField()
    passed = serializers.BooleanField()
    detail = serializers.CharField()
