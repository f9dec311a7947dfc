import logging

from django.conf import settings

from noc.management.commands._base import NocCommand
from noc.models.tdm import (
    DEFAULT_SLOT_CYCLES, all_to_all_schedule, bisection_bandwidth, broadcast_schedule,
    mesh_emulation_schedule, model_rows, run_schedule, tdm_cycle_time, validate_schedule,
)
from noc.serializers.tdm import (
    CycleTimeSerializer, ScheduleIssueSerializer, ScheduleSerializer, TimingModelSerializer,
)

logger = logging.getLogger(__name__)

KINDS = ('all_to_all', 'mesh', 'broadcast')
SWEEP_NODES = tuple(1 << k for k in range(2, 11))
SWEEP_EFFICIENCIES = (0.5, 0.9, 0.95, 0.99)
ROW_FIELDS = ('N', 'B', 'efficiency', 'f_Hz', 'slot_us', 'cycle_us')


def _format_row(row):
    return '%d,%d,%g,%g,%.4f,%.4f' % tuple(row[key] for key in ROW_FIELDS)


class Command(NocCommand):
    help = 'TDM analytics: slot and cycle time model, and permutation schedule generation.'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', required=True)

        model = subparsers.add_parser('model', help='slot/cycle time and bisection bandwidth')
        model.add_argument('--nodes', type=int)
        model.add_argument('--eff', type=float, help='payload efficiency in (0, 1) (default MCENOC_EFFICIENCY)')
        model.add_argument('--freq', type=float, help='clock in Hz (default MCENOC_FREQUENCY_HZ)')
        model.add_argument('--switch-bits', type=int, default=1)
        model.add_argument('--width', type=int, default=1, help='link width in bits')
        model.add_argument('--bandwidth', action='store_true', help='also print bisection bandwidth')
        model.add_argument('--sweep', action='store_true', help='CSV rows over N and efficiency')

        schedule = subparsers.add_parser('schedule', help='generate or check a permutation schedule')
        schedule.add_argument('--kind', choices=KINDS, default='all_to_all')
        schedule.add_argument('--nodes', type=int)
        schedule.add_argument('--dims', type=int, default=2, help='mesh dimensions')
        schedule.add_argument('--shape', help='mesh side lengths, comma separated (e.g. 4,4)')
        schedule.add_argument('--source', type=int, default=0, help='broadcast source')
        schedule.add_argument('--cycles', type=int, default=DEFAULT_SLOT_CYCLES, help='slot length in cycles')
        schedule.add_argument('--input', help='read a schedule JSON file instead of generating one')
        schedule.add_argument('--topology', help='validate the schedule against this topology JSON file')
        schedule.add_argument('--no-simulate', action='store_true', help='static checks only')
        schedule.add_argument('--run', action='store_true', help='simulate the schedule slot by slot')
        schedule.add_argument('--output', help='write the schedule JSON here')
        schedule.add_argument('--report', help='with --topology, write every check result as JSON here')

    def run(self, **options):
        if options['action'] == 'model':
            return self.model(options)
        return self.schedule(options)

    def model(self, options):
        efficiency = settings.MCENOC_EFFICIENCY if options['eff'] is None else options['eff']
        frequency = settings.MCENOC_FREQUENCY_HZ if options['freq'] is None else options['freq']
        if options['sweep']:
            nodes = SWEEP_NODES if options['nodes'] is None else (options['nodes'],)
            efficiencies = SWEEP_EFFICIENCIES if options['eff'] is None else (efficiency,)
            self.stdout.write(','.join(ROW_FIELDS))
            for row in model_rows(nodes, efficiencies, frequency, options['switch_bits']):
                self.stdout.write(_format_row(row))
            return
        if options['nodes'] is None:
            self.usage('--nodes is required')
        timing = self.deserialize(TimingModelSerializer, {
            'nodes': options['nodes'], 'efficiency': efficiency,
            'frequency': frequency, 'switch_bits': options['switch_bits'],
        })
        cycle_time = CycleTimeSerializer(tdm_cycle_time(timing)).data
        self.stdout.write(','.join(ROW_FIELDS) + ',overhead_cycles,slot_cycles')
        row = model_rows((timing.n_nodes,), (timing.efficiency,), timing.frequency_hz, timing.switch_bits)[0]
        self.stdout.write('%s,%d,%.2f' % (_format_row(row), cycle_time['overhead_cycles'], cycle_time['slot_cycles']))
        if options['bandwidth']:
            report = bisection_bandwidth(frequency, options['width'], timing.n_nodes)
            self.stdout.write('bisection_bandwidth=%.3f Gbit/s' % (report.bisection_bits_per_s / 1e9))

    def _generate(self, options):
        n = options['nodes']
        if options['kind'] == 'mesh':
            shape = None
            if options['shape']:
                try:
                    shape = tuple(int(side) for side in options['shape'].split(','))
                except ValueError:
                    self.usage('--shape must be comma separated integers, got %r' % options['shape'])
                options['dims'] = len(shape)
            return mesh_emulation_schedule(n, options['dims'], shape, options['cycles'])
        if options['kind'] == 'broadcast':
            return broadcast_schedule(n, options['source'], options['cycles'])
        return all_to_all_schedule(n, options['cycles'])

    def schedule(self, options):
        topology = self.load_topology(options['topology']) if options['topology'] else None
        if options['input']:
            context = {'nodes': topology.n_nodes} if topology else {}
            schedule = self.deserialize(ScheduleSerializer, self.load_json(options['input']), **context)
        else:
            if options['nodes'] is None:
                if topology is None:
                    self.usage('give --nodes, --topology or --input')
                options['nodes'] = topology.n_nodes
            schedule = self._generate(options)
        self.stdout.write('%s schedule: %d slots, %d cycles' % (schedule.kind, len(schedule), schedule.total_cycles))
        for index, slot in enumerate(schedule.slots):
            self.stdout.write('slot %d %s: %s' % (index, slot.label or '-', list(slot.permutation.mapping)))
        if options['output']:
            self.write_json(options['output'], schedule.to_json())
        if topology is None:
            return
        report = validate_schedule(topology, schedule, simulate=not options['no_simulate'])
        if options['report']:
            self.write_json(options['report'], {
                'passed': report.passed,
                'issues': ScheduleIssueSerializer(report.issues, many=True).data,
            })
        for issue in report.failures():
            self.stdout.write('slot %d %s FAILED %s' % (issue.slot, issue.check, issue.detail))
        if options['run']:
            result = run_schedule(topology, schedule)
            for index, slot in enumerate(result.slots):
                self.stdout.write('slot %d: opened=%d delivered=%d/%d informed=%d'
                                  % (index, slot.opened, slot.delivered_bits, slot.payload_bits, slot.informed))
            self.stdout.write('utilization=%.4f' % result.utilization)
        if not report.passed:
            self.fail('schedule failed %d checks' % len(report.failures()))
