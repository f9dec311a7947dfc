import logging

from noc.management.commands._base import NocCommand
from noc.models.topology import switch_count_table, validate
from noc.serializers.topology import TopologyConfigSerializer, TopologyReadSerializer

logger = logging.getLogger(__name__)

SWEEP_NODES = tuple(1 << k for k in range(2, 13))
SWEEP_SWITCH_BITS = (1, 2, 3)


class Command(NocCommand):
    help = 'Build a folded Benes topology, print its stage plan and write it as JSON.'

    def add_arguments(self, parser):
        parser.add_argument('--nodes', type=int, help='endpoint count N (power of two, >= 4)')
        parser.add_argument('--switch-bits', type=int, default=1, help='bits per full-size switch (default 1)')
        parser.add_argument('--output', help='write the topology JSON here ("-" for stdout)')
        parser.add_argument('--check', action='store_true', help='run the structural validation')
        parser.add_argument('--exhaustive-limit', type=int, default=4,
                            help='with --check, also route every permutation when N is at most this')
        parser.add_argument('--sweep', action='store_true',
                            help='print the switch-count table (N, p, S, switches, P) instead')

    def run(self, **options):
        if options['sweep']:
            nodes = SWEEP_NODES if options['nodes'] is None else (options['nodes'],)
            self.stdout.write('N,p,S,switches,P')
            for row in switch_count_table(nodes, SWEEP_SWITCH_BITS):
                self.stdout.write(','.join(str(value) for value in row))
            return
        if options['nodes'] is None:
            self.usage('--nodes is required')
        topology = self.deserialize(TopologyConfigSerializer,
                                    {'nodes': options['nodes'], 'switch_bits': options['switch_bits']})
        self.stdout.write(topology.plan.describe())
        self.stdout.write('S=%d switches=%d' % (topology.stage_count, topology.plan.switch_total))
        if options['check']:
            report = validate(topology, exhaustive_limit=options['exhaustive_limit'])
            for check in report.checks:
                self.stdout.write('%-26s %s %s' % (check.name, 'ok' if check.passed else 'FAILED', check.detail))
            if not report.passed:
                self.fail('topology N=%d p=%d failed validation' % (topology.n_nodes, topology.spec.switch_bits))
        if options['output']:
            self.write_json(options['output'], TopologyReadSerializer(topology).data)
