import logging

from noc.management.commands._base import NocCommand
from noc.models.routing import route_permutation, verify_routeset
from noc.serializers.routing import PermutationSerializer, RouteReportSerializer, RouteSetSerializer

logger = logging.getLogger(__name__)


class Command(NocCommand):
    help = 'Compute conflict-free route headers for a permutation and verify them in simulation.'

    def add_arguments(self, parser):
        parser.add_argument('topology', help='topology JSON file')
        parser.add_argument('permutation', help='JSON array of destinations indexed by source')
        parser.add_argument('--output', help='write the route set JSON here (default stdout)')
        parser.add_argument('--no-verify', action='store_true', help='skip the simulation check')
        parser.add_argument('--report', help='write the per-route simulation outcomes as JSON here')

    def run(self, **options):
        topology = self.load_topology(options['topology'])
        permutation = self.deserialize(PermutationSerializer, {'mapping': self.load_json(options['permutation'])},
                                       nodes=topology.n_nodes)
        routeset = route_permutation(topology, permutation)
        self.write_json(options['output'], RouteSetSerializer(routeset).data)
        if options['no_verify']:
            return
        report = verify_routeset(topology, routeset, permutation)
        if options['report']:
            self.write_json(options['report'], RouteReportSerializer(report).data)
        if not report.passed:
            for outcome in report.outcomes:
                if not outcome.correct:
                    logger.error('route %d -> %d via %s: %s at %s', outcome.source, outcome.expected,
                                 outcome.header, outcome.outcome, outcome.destination)
            self.fail('%d of %d routes failed in simulation' % (
                len(report.outcomes) - sum(1 for o in report.outcomes if o.correct), len(report.outcomes)))
        stream = self.stdout if options['output'] else self.stderr
        stream.write('%d routes verified conflict-free in %d cycles' % (report.opened, report.cycles))
