import logging

import numpy as np
from django.conf import settings

from noc.management.commands._base import NocCommand
from noc.models.netsim import build_network, run
from noc.serializers.netsim import ScenarioSerializer

logger = logging.getLogger(__name__)

SUMMARY_KEYS = (
    'cycles', 'completed', 'pending', 'routes_opened', 'routes_rejected', 'routes_aborted',
    'bits_delivered', 'bits_dropped', 'max_setup_latency', 'setup_bound', 'max_error_latency', 'error_bound',
)


class Command(NocCommand):
    help = 'Simulate a scenario cycle by cycle and print the trace summary.'

    def add_arguments(self, parser):
        parser.add_argument('topology', help='topology JSON file')
        parser.add_argument('scenario', help='scenario JSON file')
        parser.add_argument('--trace', help='write the event trace (cycle,kind,location,detail) here')
        parser.add_argument('--full-dump', action='store_true', help='record every switch port signal')
        parser.add_argument('--vcd', help='write the signal dump as a VCD file (implies --full-dump)')
        parser.add_argument('--seed', type=int, help='seed for header search (default MCENOC_SEED)')
        parser.add_argument('--max-cycles', type=int, default=100000)

    def run(self, **options):
        topology = self.load_topology(options['topology'])
        seed = settings.MCENOC_SEED if options['seed'] is None else options['seed']
        initiators, targets = self.deserialize(ScenarioSerializer, self.load_json(options['scenario']),
                                               topology=topology, rng=np.random.default_rng(seed))
        full_dump = options['full_dump'] or bool(options['vcd'])
        trace = run(build_network(topology), initiators, targets, max_cycles=options['max_cycles'],
                    full_dump=full_dump)
        if options['trace']:
            with open(options['trace'], 'w') as stream:
                trace.write_events(stream)
            logger.info('trace of %d events written to %s', len(trace.events), options['trace'])
        if options['vcd']:
            with open(options['vcd'], 'w') as stream:
                trace.write_vcd(stream)
        if full_dump and not options['vcd']:
            for record in trace.records:
                self.stdout.write('%d,%s,%s,%d' % (record.cycle, record.location, record.signal, record.value))
        for key in SUMMARY_KEYS:
            value = trace.summary[key]
            self.stdout.write('%s=%s' % (key, '-' if value is None else value))
        if not trace.summary['completed']:
            logger.warning('scenario did not finish within %d cycles', options['max_cycles'])
