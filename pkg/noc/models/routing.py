"""
Offline route computation.

Permutations are routed with the looping algorithm generalised to 2^d-port
outer stages: the routes between an outer input switch and an outer output
switch are edge-coloured with 2^d colours by repeated Euler splits, each
colour selecting one of the 2^d inner subnetworks, which are routed
recursively.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from noc.exceptions import HeaderError, PermutationError
from noc.models.netsim import Close, Idle, InitiatorModel, Open, build_network, run
from noc.models.topology import join_header, trace_route

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    mapping: Tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(dst) for dst in self.mapping)
        object.__setattr__(self, 'mapping', mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise PermutationError('mapping %r is not a bijection on [0, %d)' % (list(mapping), len(mapping)))

    def __len__(self):
        return len(self.mapping)

    def __getitem__(self, source):
        return self.mapping[source]

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    @property
    def inverse(self):
        inverse = [0] * len(self.mapping)
        for src, dst in enumerate(self.mapping):
            inverse[dst] = src
        return Permutation(tuple(inverse))


def random_permutation(n, rng):
    return Permutation(tuple(rng.permutation(n).tolist()))


def complete_permutation(partial, n):
    """
    Extend a partial source -> destination map to a full permutation. Unused
    sources route to themselves where that destination is free, otherwise to
    the lowest free destination.
    """
    mapping = {}
    for src, dst in partial.items():
        if not (0 <= src < n and 0 <= dst < n):
            raise PermutationError('pair %d -> %d outside [0, %d)' % (src, dst, n))
        mapping[src] = dst
    if len(set(mapping.values())) != len(mapping):
        raise PermutationError('partial mapping sends two sources to one destination')
    taken = set(mapping.values())
    for src in range(n):
        if src not in mapping and src not in taken:
            mapping[src] = src
            taken.add(src)
    free = iter(sorted(set(range(n)) - taken))
    for src in range(n):
        if src not in mapping:
            mapping[src] = next(free)
    return Permutation(tuple(mapping[src] for src in range(n)))


@dataclass(frozen=True)
class RouteHeader:
    bits: str
    grouping: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'grouping', tuple(self.grouping))
        if len(self.bits) != sum(self.grouping):
            raise HeaderError('header %r has %d bits, grouping %r needs %d'
                              % (self.bits, len(self.bits), list(self.grouping), sum(self.grouping)))
        if set(self.bits) - {'0', '1'}:
            raise HeaderError('header %r is not a bit string' % self.bits)

    @property
    def groups(self):
        groups, offset = [], 0
        for width in self.grouping:
            groups.append(self.bits[offset:offset + width])
            offset += width
        return tuple(groups)

    def __str__(self):
        return '-'.join(self.groups)


@dataclass
class RouteSet:
    headers: Dict[int, RouteHeader] = field(default_factory=dict)

    def __len__(self):
        return len(self.headers)

    def to_json(self):
        return {str(src): header.bits for src, header in sorted(self.headers.items())}


def regroup_header(radix2_bits, plan):
    """
    The same bit string cut into the stage groups of another plan; both
    networks deliver it to the same node.
    """
    bits = getattr(radix2_bits, 'bits', radix2_bits)
    if len(bits) != plan.total_header_bits:
        raise HeaderError('header %r has %d bits, plan needs %d' % (bits, len(bits), plan.total_header_bits))
    return RouteHeader(bits, tuple(plan.port_bits))


def _split(edges, left, right, degree, colors, weight):
    """
    Euler split of a degree-regular bipartite multigraph: pair the edges at
    each vertex, then walk each alternating cycle from its lowest edge,
    upper half first.
    """
    if degree == 1:
        return
    in_partner, out_partner = {}, {}
    by_left, by_right = defaultdict(list), defaultdict(list)
    for edge in edges:
        by_left[left[edge]].append(edge)
        by_right[right[edge]].append(edge)
    for groups, partner in ((by_left, in_partner), (by_right, out_partner)):
        for members in groups.values():
            members.sort()
            for a, b in zip(members[0::2], members[1::2]):
                partner[a], partner[b] = b, a
    half = {}
    for start in sorted(edges):
        if start in half:
            continue
        edge = start
        while edge not in half:
            half[edge] = 0
            mate = out_partner[edge]
            half[mate] = 1
            edge = in_partner[mate]
    weight //= 2
    for bit in (0, 1):
        subset = [edge for edge in edges if half[edge] == bit]
        for edge in subset:
            colors[edge] += bit * weight
        _split(subset, left, right, degree // 2, colors, weight)


def _route(dests, port_bits):
    """
    Per-input lists of stage directions routing input i to dests[i] through a
    network with the given palindromic stage bits.
    """
    if len(port_bits) == 1:
        return [[dst] for dst in dests]
    outer = port_bits[0]
    degree = 1 << outer
    inputs = range(len(dests))
    left = [i >> outer for i in inputs]
    right = [dests[i] >> outer for i in inputs]
    colors = [0] * len(dests)
    _split(list(inputs), left, right, degree, colors, degree)

    inner = port_bits[1:-1]
    sub_size = len(dests) >> outer
    routes = [None] * len(dests)
    for color in range(degree):
        members = [i for i in inputs if colors[i] == color]
        sub_dests = [0] * sub_size
        for i in members:
            sub_dests[left[i]] = right[i]
        sub_routes = _route(sub_dests, inner)
        for i in members:
            routes[i] = [color] + sub_routes[left[i]] + [dests[i] & (degree - 1)]
    return routes


def route_permutation(topology, permutation):
    if len(permutation) != topology.n_nodes:
        raise PermutationError('permutation has %d entries, topology has %d nodes'
                               % (len(permutation), topology.n_nodes))
    port_bits = topology.plan.port_bits
    routes = _route(list(permutation.mapping), port_bits)
    grouping = tuple(port_bits)
    return RouteSet({src: RouteHeader(join_header(groups, port_bits), grouping)
                     for src, groups in enumerate(routes)})


def static_check(topology, routeset, permutation=None):
    """
    Trace every header through the wiring: true when no two routes share an
    output and every route lands on its expected node.
    """
    used = set()
    landed = set()
    for src, header in routeset.headers.items():
        path = trace_route(topology, src, header)
        links = path.links(topology)
        if used & links:
            return False
        used |= links
        if permutation is not None and path.destination != permutation[src]:
            return False
        landed.add(path.destination)
    return len(landed) == len(routeset.headers)


@dataclass(frozen=True)
class RouteOutcome:
    source: int
    header: str
    expected: int
    destination: Optional[int]
    outcome: str

    @property
    def correct(self):
        return self.outcome == 'opened' and self.destination == self.expected


@dataclass
class RouteReport:
    outcomes: List[RouteOutcome] = field(default_factory=list)
    cycles: int = 0

    @property
    def opened(self):
        return sum(1 for outcome in self.outcomes if outcome.outcome == 'opened')

    @property
    def rejected(self):
        return sum(1 for outcome in self.outcomes if outcome.outcome == 'rejected')

    @property
    def passed(self):
        return all(outcome.correct for outcome in self.outcomes)


def verify_routeset(topology, routeset, permutation=None, network=None):
    """
    Open every route at once in simulation and report, per source, whether
    it opened and where it landed. Without a permutation the expected
    destination is the one the header decodes to.
    """
    report = RouteReport()
    if not routeset.headers:
        return report
    network = network or build_network(topology)
    hold = topology.stage_count + 2
    initiators = [InitiatorModel(src, [Open(header.bits), Idle(hold), Close()])
                  for src, header in sorted(routeset.headers.items())]

    def settled(trace, net):
        return all(initiator.current is not None and initiator.current.outcome != 'pending'
                   for initiator in initiators)

    budget = 4 * (topology.header_bits + topology.stage_count) + hold
    trace = run(network, initiators, max_cycles=budget, stop=settled)
    landed = {}
    for event in trace.of_kind('route_opened'):
        src = event.detail[4:]
        if src != '?':
            landed[int(src)] = int(event.location[4:])
    for initiator in initiators:
        header = routeset.headers[initiator.node].bits
        if permutation is not None:
            expected = permutation[initiator.node]
        else:
            expected = trace_route(topology, initiator.node, header).destination
        route = initiator.current
        report.outcomes.append(RouteOutcome(
            source=initiator.node, header=header, expected=expected,
            destination=landed.get(initiator.node),
            outcome=route.outcome if route is not None else 'pending'))
    report.cycles = trace.summary['cycles']
    logger.debug('route set verified: %d opened, %d rejected', report.opened, report.rejected)
    return report
