import logging

from django.conf import settings

from noc.management.commands._base import NocCommand
from noc.models import propcheck
from noc.models.properties import Stimulus, merge_reports
from noc.models.topology import NetworkSpec, build_topology
from noc.serializers.propcheck import LEVELS, CampaignConfigSerializer, CoverageRowSerializer, MutationResultSerializer

logger = logging.getLogger(__name__)

FULL_LEVELS = ('core', 'network', 'latency', 'flow', 'isolation', 'equivalence', 'schedule')


class Command(NocCommand):
    help = 'Run property-checking campaigns and print the coverage table; exits 1 if any property fails.'

    def add_arguments(self, parser):
        parser.add_argument('--level', choices=LEVELS, default='core')
        parser.add_argument('--config', help='campaign config JSON file (replaces the options below)')
        parser.add_argument('--nodes', dest='n', type=int)
        parser.add_argument('--switch-bits', type=int)
        parser.add_argument('--seeds', type=int, nargs='+')
        parser.add_argument('--cycles', type=int, help='core campaign length (default MCENOC_CORE_CYCLES)')
        parser.add_argument('--samples', type=int, help='routes or scenarios per campaign '
                                                        '(default MCENOC_NETWORK_SAMPLES)')
        parser.add_argument('--exhaustive', action='store_true',
                            help='enumerate every permutation and header (N <= MCENOC_EXHAUSTIVE_MAX_NODES)')
        parser.add_argument('--legality', default='protocol', help='protocol or unconstrained core stimulus')
        parser.add_argument('--workers', type=int)
        parser.add_argument('--json', help='write the machine-readable report here')

    def run(self, **options):
        if options['config']:
            data = self.load_json(options['config'])
        else:
            data = {key: options[key] for key in ('level', 'n', 'switch_bits', 'seeds', 'cycles', 'samples',
                                                  'exhaustive', 'legality', 'workers')
                    if options[key] is not None}
        config = self.deserialize(CampaignConfigSerializer, data, defaults={
            'n': 8,
            'switch_bits': 1,
            'seeds': [settings.MCENOC_SEED],
            'cycles': settings.MCENOC_CORE_CYCLES,
            'samples': settings.MCENOC_NETWORK_SAMPLES,
            'workers': settings.MCENOC_WORKERS,
        })
        if config['level'] == 'mutation':
            return self.mutation(config, options['json'])

        levels = FULL_LEVELS if config['level'] == 'full' else (config['level'],)
        reports = []
        for level in levels:
            logger.info('campaign %s: %s', level, {key: value for key, value in config.items() if key != 'legality'})
            reports.append(self.campaign(level, config))
        report = merge_reports(reports)
        rows = propcheck.coverage_report(report)
        for note in report.notes:
            self.stdout.write(note)
        self.stdout.write(propcheck.format_table(rows))
        for property_id, result in sorted(report.results.items()):
            for failure in result.failures:
                self.stdout.write('%s FAILED at cycle %d %s: %s' % (property_id, failure.cycle, failure.location,
                                                                   failure.detail))
        if options['json']:
            data = report.to_json()
            data['coverage'] = CoverageRowSerializer(rows, many=True).data
            self.write_json(options['json'], data)
        if not report.passed:
            failed = sorted(pid for pid, result in report.results.items() if result.status == 'fail')
            self.fail('properties failed: %s' % ', '.join(failed))

    def campaign(self, level, config):
        n, switch_bits, workers = config['n'], config['switch_bits'], config['workers']
        if level == 'core':
            return merge_reports(
                propcheck.check_core(switch_bits, Stimulus(seed, config['cycles'], config['legality']))
                for seed in config['seeds'])
        if level == 'equivalence':
            return propcheck.check_equivalence(n_nodes=n)

        topology = build_topology(NetworkSpec(n, switch_bits))
        if level == 'schedule':
            return propcheck.check_schedule(topology)
        samples = config['samples']
        reports = []
        if level == 'network' and config['exhaustive']:
            reports.append(propcheck.exhaustive_small(n, switch_bits, limit=settings.MCENOC_EXHAUSTIVE_MAX_NODES,
                                                      workers=workers))
            reports.append(propcheck.check_network(topology, Stimulus(config['seeds'][0], 0), exhaustive=True,
                                                   workers=workers))
            return merge_reports(reports)
        for seed in config['seeds']:
            stimulus = Stimulus(seed, 0)
            if level == 'network':
                reports.append(propcheck.check_network(topology, stimulus, samples=samples, workers=workers))
                reports.append(propcheck.check_random_permutations(topology, stimulus, max(1, samples // 10),
                                                                   workers=workers))
            elif level == 'latency':
                reports.append(propcheck.check_setup_latency(topology, stimulus, samples))
                reports.append(propcheck.check_error_latency(topology, stimulus, samples))
            elif level == 'flow':
                reports.append(propcheck.check_flow(topology, stimulus, samples))
            elif level == 'isolation':
                reports.append(propcheck.check_isolation(topology, stimulus, samples))
        return merge_reports(reports)

    def mutation(self, config, json_path):
        results = propcheck.mutation_check(seed=config['seeds'][0], cycles=min(config['cycles'], 20000),
                                           samples=min(config['samples'], 256))
        for result in results:
            self.stdout.write('%-18s %-4s %s' % (result.mutant, result.property_id,
                                                 'killed' if result.killed else 'SURVIVED'))
        if json_path:
            self.write_json(json_path, MutationResultSerializer(results, many=True).data)
        survivors = [result.mutant for result in results if not result.killed]
        if survivors:
            self.fail('mutants survived: %s' % ', '.join(survivors))
