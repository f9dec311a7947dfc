import logging
from fractions import Fraction

from rest_framework import serializers

from noc.exceptions import PermutationError
from noc.models.netsim import Close, Idle, InitiatorModel, Open, Send, default_target
from noc.models.routing import complete_permutation, route_permutation
from noc.models.topology import find_header

logger = logging.getLogger(__name__)


class BitStringField(serializers.CharField):
    def __init__(self, **kwargs):
        kwargs.setdefault('allow_blank', True)
        kwargs.setdefault('trim_whitespace', True)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        value = super().to_internal_value(data)
        if set(value) - {'0', '1'}:
            raise serializers.ValidationError('%r is not a bit string' % value)
        return value


class RateField(serializers.Field):
    """
    A consume rate in bits per cycle: a number or a fraction string such as "1/4".
    """

    def to_internal_value(self, data):
        try:
            rate = Fraction(str(data))
        except (ValueError, ZeroDivisionError):
            raise serializers.ValidationError('%r is not a rate' % data)
        if rate <= 0:
            raise serializers.ValidationError('rate must be positive')
        return rate

    def to_representation(self, value):
        return str(value)


class InitiatorSerializer(serializers.Serializer):
    node = serializers.IntegerField(min_value=0)
    route_to = serializers.IntegerField(min_value=0, required=False)
    header = BitStringField(required=False)
    payload_bits = BitStringField(required=False, default='')
    start_cycle = serializers.IntegerField(min_value=0, default=0)
    hold = serializers.IntegerField(min_value=0, default=0)

    def validate(self, attrs):
        if 'route_to' not in attrs and not attrs.get('header'):
            raise serializers.ValidationError('initiator %d needs route_to or header' % attrs['node'])
        return attrs


class TargetSerializer(serializers.Serializer):
    node = serializers.IntegerField(min_value=0)
    fifo_capacity = serializers.IntegerField(min_value=1, required=False)
    consume_rate = RateField(required=False)
    cts_threshold = serializers.IntegerField(min_value=0, required=False)
    refuse = serializers.BooleanField(default=False)


class ScenarioSerializer(serializers.Serializer):
    """
    A simulation scenario. Pass the topology as context['topology'] and,
    optionally, a numpy Generator as context['rng'] to vary searched headers.

    Initiators with route_to and distinct destinations are routed together
    as one permutation; otherwise each gets the first header found for its
    pair, so scenarios can set up conflicts on purpose.
    """
    initiators = InitiatorSerializer(many=True, required=False, default=list)
    targets = TargetSerializer(many=True, required=False, default=list)

    def to_internal_value(self, data):
        if isinstance(data, list):
            data = {'initiators': data}
        return super().to_internal_value(data)

    def validate(self, attrs):
        topology = self.context['topology']
        n = topology.n_nodes
        for group in ('initiators', 'targets'):
            nodes = [entry['node'] for entry in attrs[group]]
            for node in nodes:
                if node >= n:
                    raise serializers.ValidationError('%s reference node %d, topology has %d nodes' % (group, node, n))
            if len(set(nodes)) != len(nodes):
                raise serializers.ValidationError('%s list a node twice' % group)
        for entry in attrs['initiators']:
            if entry.get('route_to') is not None and entry['route_to'] >= n:
                raise serializers.ValidationError('route_to %d outside [0, %d)' % (entry['route_to'], n))
            if entry.get('header') and len(entry['header']) != topology.header_bits:
                raise serializers.ValidationError('header %r needs %d bits' % (entry['header'], topology.header_bits))
        return attrs

    def _headers(self, topology, initiators):
        routed = {entry['node']: entry['route_to'] for entry in initiators
                  if not entry.get('header') and entry.get('route_to') is not None}
        headers = {}
        if routed and len(set(routed.values())) == len(routed):
            try:
                routeset = route_permutation(topology, complete_permutation(routed, topology.n_nodes))
                headers = {src: routeset.headers[src].bits for src in routed}
            except PermutationError:
                logger.exception('joint routing failed, falling back to single-route search')
        for src, dst in routed.items():
            if src not in headers:
                headers[src] = find_header(topology, src, dst, rng=self.context.get('rng'))
        for entry in initiators:
            if entry.get('header'):
                headers[entry['node']] = entry['header']
        return headers

    def create(self, validated_data):
        topology = self.context['topology']
        headers = self._headers(topology, validated_data['initiators'])
        initiators = []
        for entry in validated_data['initiators']:
            script = [Open(headers[entry['node']]), Send(entry['payload_bits'])]
            if entry['hold']:
                script.append(Idle(entry['hold']))
            script.append(Close())
            initiators.append(InitiatorModel(entry['node'], script, start_cycle=entry['start_cycle']))
        targets = []
        for entry in validated_data['targets']:
            overrides = {key: entry[key] for key in ('fifo_capacity', 'consume_rate', 'cts_threshold', 'refuse')
                         if key in entry}
            targets.append(default_target(entry['node'], topology, **overrides))
        return initiators, targets

