import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple

from noc.exceptions import HeaderError, TopologyError, WiringError

logger = logging.getLogger(__name__)


def is_power_of_two(value):
    return value > 0 and value & (value - 1) == 0


def stage_bits(n_nodes, switch_bits):
    """
    Direction bits per stage for an N-node network of 2^switch_bits-port
    switches: 2X - 1 stages, outer stages of switch_bits bits and one middle
    stage of log2(N / B^(X-1)) bits. When B^x = N every stage is uniform.
    """
    log_n = n_nodes.bit_length() - 1
    x = -(-log_n // switch_bits)
    middle = log_n - (x - 1) * switch_bits
    outer = [switch_bits] * (x - 1)
    return outer + [middle] + outer[::-1]


@dataclass(frozen=True)
class NetworkSpec:
    n_nodes: int
    switch_bits: int

    def __post_init__(self):
        if not is_power_of_two(self.n_nodes):
            raise TopologyError('node count %r is not a power of two' % self.n_nodes)
        if self.n_nodes < 4:
            raise TopologyError('node count %d is below the 4-node minimum' % self.n_nodes)
        if self.switch_bits < 1:
            raise TopologyError('switch_bits must be at least 1, got %r' % self.switch_bits)
        if self.switch_degree > self.n_nodes:
            raise TopologyError('switch degree %d exceeds node count %d' % (self.switch_degree, self.n_nodes))

    @property
    def switch_degree(self):
        return 1 << self.switch_bits

    @classmethod
    def from_config(cls, config):
        return cls(n_nodes=config['nodes'], switch_bits=config['switch_bits'])

    def to_config(self):
        return {'nodes': self.n_nodes, 'switch_bits': self.switch_bits}


@dataclass(frozen=True)
class StageSpec:
    port_bits: int
    switch_count: int

    @property
    def degree(self):
        return 1 << self.port_bits


@dataclass(frozen=True)
class StagePlan:
    stages: Tuple[StageSpec, ...]
    total_header_bits: int

    @property
    def stage_count(self):
        return len(self.stages)

    @property
    def half_depth(self):
        return (self.stage_count - 1) // 2

    @property
    def port_bits(self):
        return [stage.port_bits for stage in self.stages]

    @property
    def switch_total(self):
        return sum(stage.switch_count for stage in self.stages)

    @property
    def is_uniform(self):
        return len(set(self.port_bits)) == 1

    def describe(self):
        """
        One-line summary, e.g. "5 stages: 4-port x8, 4-port x8, 2-port x16, 4-port x8, 4-port x8; P=9".
        """
        if self.is_uniform:
            head = '%d stage%s of %d-port switches' % (
                self.stage_count, '' if self.stage_count == 1 else 's', self.stages[0].degree)
        else:
            head = '%d stages: %s' % (self.stage_count, ', '.join(
                '%d-port ×%d' % (stage.degree, stage.switch_count) for stage in self.stages))
        return '%s; P=%d' % (head, self.total_header_bits)


def plan_stages(n_nodes, switch_bits):
    spec = NetworkSpec(n_nodes, switch_bits)
    stages = tuple(StageSpec(bits, spec.n_nodes >> bits) for bits in stage_bits(n_nodes, switch_bits))
    plan = StagePlan(stages=stages, total_header_bits=sum(stage.port_bits for stage in stages))
    logger.debug('N=%d p=%d -> %s', n_nodes, switch_bits, plan.describe())
    return plan


def wire_boundary(boundary_index, spec, plan):
    """
    Port connectivity across boundary n (n = 0 is adjacent to the middle
    stage): entry i is the port j in the outer stage wired to port i of the
    inner stage, j = ((k + k // b) mod b) + o with o = (i // b) * b and
    k = (i - o) * B.

    B is the degree of the outer-side stage and b = N / (product of the
    degrees of the stages outside it), which is min(B^(n+2), N) whenever
    B^x = N.
    """
    half = plan.half_depth
    if not 0 <= boundary_index < half:
        raise WiringError('boundary index %r outside [0, %d)' % (boundary_index, half))
    outer = half - 1 - boundary_index
    degree = plan.stages[outer].degree
    block = spec.n_nodes >> sum(plan.port_bits[:outer])
    mapping = []
    for i in range(spec.n_nodes):
        origin = (i // block) * block
        k = (i - origin) * degree
        mapping.append((k + k // block) % block + origin)
    return tuple(mapping)


def invert(mapping):
    inverse = [0] * len(mapping)
    for i, j in enumerate(mapping):
        inverse[j] = i
    return tuple(inverse)


@dataclass(frozen=True)
class WiringMap:
    """
    Forward port maps, one per boundary in signal order: boundaries[k][o] is
    the input port of stage k + 1 driven by output port o of stage k.
    """
    boundaries: Tuple[Tuple[int, ...], ...]

    @cached_property
    def inverses(self):
        return tuple(invert(boundary) for boundary in self.boundaries)


@dataclass(frozen=True)
class Topology:
    spec: NetworkSpec
    plan: StagePlan
    wiring: WiringMap
    folded: bool = True

    @property
    def n_nodes(self):
        return self.spec.n_nodes

    @property
    def stage_count(self):
        return self.plan.stage_count

    @property
    def header_bits(self):
        return self.plan.total_header_bits

    def port_bits(self, stage):
        return self.plan.stages[stage].port_bits

    @cached_property
    def reach(self):
        """
        reach[k][w]: bitmask of destination nodes reachable from switch w of stage k.
        """
        last = self.stage_count - 1
        masks = [None] * self.stage_count
        bits = self.port_bits(last)
        full = (1 << (1 << bits)) - 1
        masks[last] = tuple(full << (w << bits) for w in range(self.plan.stages[last].switch_count))
        for k in range(last - 1, -1, -1):
            bits, next_bits = self.port_bits(k), self.port_bits(k + 1)
            forward = self.wiring.boundaries[k]
            stage_masks = []
            for w in range(self.plan.stages[k].switch_count):
                mask = 0
                for r in range(1 << bits):
                    mask |= masks[k + 1][forward[(w << bits) | r] >> next_bits]
                stage_masks.append(mask)
            masks[k] = tuple(stage_masks)
        return tuple(masks)


def build_topology(spec):
    plan = plan_stages(spec.n_nodes, spec.switch_bits)
    half = plan.half_depth
    boundaries = []
    for position in range(plan.stage_count - 1):
        if position < half:
            boundaries.append(invert(wire_boundary(half - 1 - position, spec, plan)))
        else:
            boundaries.append(wire_boundary(position - half, spec, plan))
    topology = Topology(spec=spec, plan=plan, wiring=WiringMap(tuple(boundaries)))
    logger.info('built %d-node topology: %s', spec.n_nodes, plan.describe())
    return topology


@dataclass
class ValidationCheck:
    name: str
    passed: bool
    detail: str = ''


@dataclass
class ValidationReport:
    checks: List[ValidationCheck] = field(default_factory=list)
    routable: int = 0
    permutations: int = 0

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def add(self, name, passed, detail=''):
        self.checks.append(ValidationCheck(name, bool(passed), detail))


def validate(topology, exhaustive_limit=8):
    report = ValidationReport()
    n = topology.n_nodes
    plan = topology.plan
    identity = list(range(n))
    for position, boundary in enumerate(topology.wiring.boundaries):
        report.add('boundary %d bijection' % position, sorted(boundary) == identity)
    report.add('boundary count', len(topology.wiring.boundaries) == plan.stage_count - 1,
               '%d boundaries' % len(topology.wiring.boundaries))
    report.add('odd stage count', plan.stage_count % 2 == 1, 'S=%d' % plan.stage_count)
    report.add('palindromic stage plan', plan.port_bits == plan.port_bits[::-1], str(plan.port_bits))
    report.add('stage sizes', all(stage.switch_count * stage.degree == n for stage in plan.stages))
    report.add('header bits', plan.total_header_bits == sum(plan.port_bits), 'P=%d' % plan.total_header_bits)
    last = len(topology.wiring.boundaries) - 1
    mirrored = all(topology.wiring.boundaries[b] == invert(topology.wiring.boundaries[last - b])
                   for b in range(len(topology.wiring.boundaries)))
    report.add('mirror symmetry', mirrored)

    if n <= exhaustive_limit and report.passed:
        from noc.models.routing import Permutation, route_permutation, static_check

        for mapping in itertools.permutations(range(n)):
            permutation = Permutation(mapping)
            routeset = route_permutation(topology, permutation)
            report.permutations += 1
            if static_check(topology, routeset, permutation):
                report.routable += 1
        report.add('permutation routability', report.routable == report.permutations,
                   '%d/%d' % (report.routable, report.permutations))
    return report


@dataclass(frozen=True)
class Hop:
    stage: int
    switch: int
    in_port: int
    out_port: int

    def link(self, port_bits):
        return self.stage, (self.switch << port_bits) | self.out_port


@dataclass(frozen=True)
class Path:
    source: int
    hops: Tuple[Hop, ...]
    destination: int

    def links(self, topology):
        """
        The (stage, global output port) pairs this route occupies.
        """
        return frozenset(hop.link(topology.port_bits(hop.stage)) for hop in self.hops)


def split_header(bits, port_bits):
    if len(bits) != sum(port_bits):
        raise HeaderError('header %r has %d bits, plan needs %d' % (bits, len(bits), sum(port_bits)))
    if set(bits) - {'0', '1'}:
        raise HeaderError('header %r is not a bit string' % bits)
    groups, offset = [], 0
    for width in port_bits:
        groups.append(int(bits[offset:offset + width], 2))
        offset += width
    return groups


def join_header(groups, port_bits):
    return ''.join(format(group, '0%db' % width) for group, width in zip(groups, port_bits))


def trace_route(topology, source, header):
    """
    Follow a header through the static wiring and return the path it takes.
    """
    header = getattr(header, 'bits', header)
    groups = split_header(header, topology.plan.port_bits)
    port = source
    hops = []
    last = topology.stage_count - 1
    for stage, direction in enumerate(groups):
        bits = topology.port_bits(stage)
        switch = port >> bits
        hops.append(Hop(stage, switch, port & ((1 << bits) - 1), direction))
        out = (switch << bits) | direction
        if stage < last:
            port = topology.wiring.boundaries[stage][out]
        else:
            port = out
    return Path(source=source, hops=tuple(hops), destination=port)


def find_header(topology, source, destination, avoid=frozenset(), rng=None):
    """
    Search for a header routing source to destination while keeping off the
    (stage, output port) links in avoid. Ports are tried lowest first, or in
    rng order when a generator is given. Returns None if no header exists.
    """
    port_bits = topology.plan.port_bits
    last = topology.stage_count - 1
    reach = topology.reach

    def search(stage, port, prefix):
        bits = port_bits[stage]
        switch = port >> bits
        if not reach[stage][switch] >> destination & 1:
            return None
        order = range(1 << bits) if rng is None else rng.permutation(1 << bits).tolist()
        for direction in order:
            out = (switch << bits) | direction
            if (stage, out) in avoid:
                continue
            if stage == last:
                if out == destination:
                    return prefix + [direction]
                continue
            found = search(stage + 1, topology.wiring.boundaries[stage][out], prefix + [direction])
            if found is not None:
                return found
        return None

    groups = search(0, source, [])
    return None if groups is None else join_header(groups, port_bits)


def switch_count_table(nodes: Iterable[int], switch_bits: Sequence[int]):
    """
    Rows of (N, p, S, switches, P) for every valid combination.
    """
    rows = []
    for n in nodes:
        for bits in switch_bits:
            try:
                plan = plan_stages(n, bits)
            except TopologyError:
                continue
            rows.append((n, bits, plan.stage_count, plan.switch_total, plan.total_header_bits))
    return rows
