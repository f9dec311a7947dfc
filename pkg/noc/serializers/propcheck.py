from rest_framework import serializers

from noc.models.properties import Legality

LEVELS = ('core', 'network', 'latency', 'flow', 'isolation', 'equivalence', 'schedule', 'mutation', 'full')


class CampaignConfigSerializer(serializers.Serializer):
    """
    Campaign config file, also built from the verify command's options.
    Missing values fall back to the defaults passed in context['defaults'].
    """
    level = serializers.ChoiceField(choices=LEVELS)
    n = serializers.IntegerField(min_value=4, required=False)
    switch_bits = serializers.IntegerField(min_value=1, required=False)
    seeds = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False, allow_empty=False)
    cycles = serializers.IntegerField(min_value=1, required=False)
    samples = serializers.IntegerField(min_value=1, required=False)
    exhaustive = serializers.BooleanField(default=False)
    legality = serializers.ChoiceField(choices=[item.value for item in Legality], default=Legality.PROTOCOL.value)
    workers = serializers.IntegerField(min_value=1, required=False)

    def validate(self, attrs):
        for key, value in self.context.get('defaults', {}).items():
            if attrs.get(key) is None:
                attrs[key] = value
        attrs['legality'] = Legality(attrs['legality'])
        return attrs

    def create(self, validated_data):
        return dict(validated_data)


class CoverageRowSerializer(serializers.Serializer):
    property_id = serializers.CharField()
    name = serializers.CharField()
    checked_by = serializers.CharField()
    hits = serializers.IntegerField()
    status = serializers.CharField()


class MutationResultSerializer(serializers.Serializer):
    mutant = serializers.CharField()
    property_id = serializers.CharField()
    killed = serializers.BooleanField()
