from noc.management.commands._base import NocCommand
from noc.models.diagram import FORMATS, emit_diagram
from noc.serializers.topology import TopologyConfigSerializer


class Command(NocCommand):
    help = 'Emit a TikZ or Graphviz DOT diagram of a topology.'

    def add_arguments(self, parser):
        parser.add_argument('topology', nargs='?', help='topology JSON file')
        parser.add_argument('--nodes', type=int)
        parser.add_argument('--switch-bits', type=int, default=1)
        parser.add_argument('--format', dest='fmt', default='dot', help='one of %s' % ', '.join(FORMATS))
        parser.add_argument('--output')

    def run(self, **options):
        if options['topology']:
            topology = self.load_topology(options['topology'])
        elif options['nodes'] is not None:
            topology = self.deserialize(TopologyConfigSerializer,
                                        {'nodes': options['nodes'], 'switch_bits': options['switch_bits']})
        else:
            self.usage('give a topology file or --nodes')
        self.write_output(options['output'], emit_diagram(topology, options['fmt']))
