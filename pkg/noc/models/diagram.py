import logging

from noc.exceptions import DiagramFormatError

logger = logging.getLogger(__name__)

FORMATS = ('dot', 'tikz')

# tikz layout, in cm
STAGE_PITCH = 3.0
PORT_PITCH = 0.5
SWITCH_WIDTH = 1.0


def switch_name(stage, switch):
    return 's%d_w%d' % (stage, switch)


def port_name(stage, switch, port):
    return 's%d_w%d_p%d' % (stage, switch, port)


def _switches(topology):
    for stage, spec in enumerate(topology.plan.stages):
        for switch in range(spec.switch_count):
            yield stage, switch, spec.degree


def _links(topology):
    """
    Inter-stage links as (stage, switch, out_port, next_switch, next_in_port),
    ordered by (stage, global output port).
    """
    for stage, boundary in enumerate(topology.wiring.boundaries):
        bits, next_bits = topology.port_bits(stage), topology.port_bits(stage + 1)
        for out, target in enumerate(boundary):
            yield (stage, out >> bits, out & ((1 << bits) - 1),
                   target >> next_bits, target & ((1 << next_bits) - 1))


def _dot(topology):
    n = topology.n_nodes
    last = topology.stage_count - 1
    first_bits, last_bits = topology.port_bits(0), topology.port_bits(last)
    lines = [
        'digraph mcenoc_n%d_p%d {' % (n, topology.spec.switch_bits),
        '  rankdir=LR;',
        '  node [shape=record, fontname="Helvetica"];',
    ]
    for q in range(n):
        lines.append('  src%d [shape=plaintext, label="node %d"];' % (q, q))
    for stage, switch, degree in _switches(topology):
        inputs = '|'.join('<i%d>%d' % (port, port) for port in range(degree))
        outputs = '|'.join('<p%d>%d' % (port, port) for port in range(degree))
        lines.append('  %s [label="{%s}|%s|{%s}"];' % (
            switch_name(stage, switch), inputs, switch_name(stage, switch), outputs))
    for q in range(n):
        lines.append('  dst%d [shape=plaintext, label="node %d"];' % (q, q))
    for q in range(n):
        lines.append('  src%d -> %s:i%d;' % (q, switch_name(0, q >> first_bits), q & ((1 << first_bits) - 1)))
    for stage, switch, out, next_switch, next_in in _links(topology):
        lines.append('  %s:p%d -> %s:i%d;' % (
            switch_name(stage, switch), out, switch_name(stage + 1, next_switch), next_in))
    for q in range(n):
        lines.append('  %s:p%d -> dst%d;' % (switch_name(last, q >> last_bits), q & ((1 << last_bits) - 1), q))
    lines.append('}')
    return '\n'.join(lines) + '\n'


def _tikz(topology):
    """
    Switches are drawn as boxes, one column per stage. Output ports are
    coordinates s<k>_w<w>_p<p> on the east side, input ports s<k>_w<w>_i<p>
    on the west side.
    """
    n = topology.n_nodes
    last = topology.stage_count - 1
    lines = [
        '% MCENoC N=' + str(n) + ', ' + topology.plan.describe(),
        '\\begin{tikzpicture}[x=1cm, y=1cm, every node/.style={font=\\scriptsize}]',
    ]
    for q in range(n):
        lines.append('  \\node[anchor=east] (node%d) at (%.2f, %.2f) {%d};' % (
            q, -1.0, -q * PORT_PITCH, q))
    for stage, switch, degree in _switches(topology):
        left = stage * STAGE_PITCH
        right = left + SWITCH_WIDTH
        top = -(switch * degree) * PORT_PITCH + PORT_PITCH / 2
        bottom = -((switch + 1) * degree - 1) * PORT_PITCH - PORT_PITCH / 2
        lines.append('  \\draw (%.2f, %.2f) rectangle (%.2f, %.2f) node[midway] {%s};' % (
            left, top, right, bottom, switch_name(stage, switch).replace('_', '\\_')))
        for port in range(degree):
            y = -(switch * degree + port) * PORT_PITCH
            lines.append('  \\coordinate (s%d_w%d_i%d) at (%.2f, %.2f);' % (stage, switch, port, left, y))
            lines.append('  \\coordinate (%s) at (%.2f, %.2f);' % (port_name(stage, switch, port), right, y))
    first_bits, last_bits = topology.port_bits(0), topology.port_bits(last)
    for q in range(n):
        lines.append('  \\draw[->] (node%d) -- (s0_w%d_i%d);' % (q, q >> first_bits, q & ((1 << first_bits) - 1)))
    for stage, switch, out, next_switch, next_in in _links(topology):
        lines.append('  \\draw[->] (%s) -- (s%d_w%d_i%d);' % (
            port_name(stage, switch, out), stage + 1, next_switch, next_in))
    edge = last * STAGE_PITCH + SWITCH_WIDTH + 1.0
    for q in range(n):
        lines.append('  \\draw[->] (%s) -- (%.2f, %.2f) node[anchor=west] {%d};' % (
            port_name(last, q >> last_bits, q & ((1 << last_bits) - 1)), edge, -q * PORT_PITCH, q))
    lines.append('\\end{tikzpicture}')
    return '\n'.join(lines) + '\n'


def emit_diagram(topology, fmt):
    if fmt == 'dot':
        text = _dot(topology)
    elif fmt == 'tikz':
        text = _tikz(topology)
    else:
        raise DiagramFormatError('unknown diagram format %r, expected one of %s' % (fmt, ', '.join(FORMATS)))
    logger.debug('emitted %s diagram, %d bytes', fmt, len(text))
    return text
