"""
Time-division multiplexed permutation schedules and the analytic models
around them (slot and cycle time, bisection bandwidth).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from noc.exceptions import ScheduleError
from noc.models.netsim import Close, Idle, InitiatorModel, Open, Send, build_network, run
from noc.models.routing import Permutation, route_permutation, verify_routeset
from noc.models.topology import is_power_of_two, stage_bits

logger = logging.getLogger(__name__)

DEFAULT_SLOT_CYCLES = 64
AXIS_NAMES = (('east', 'west'), ('north', 'south'))


@dataclass(frozen=True)
class TdmSlot:
    permutation: Permutation
    cycles: int = DEFAULT_SLOT_CYCLES
    priority: Optional[int] = None
    label: str = ''
    route_priorities: Optional[Tuple[int, ...]] = None
    route_order: Optional[Tuple[int, ...]] = None


@dataclass
class TdmSchedule:
    n_nodes: int
    slots: List[TdmSlot] = field(default_factory=list)
    kind: str = 'custom'
    source: Optional[int] = None

    def __len__(self):
        return len(self.slots)

    @property
    def total_cycles(self):
        return sum(slot.cycles for slot in self.slots)

    def to_json(self):
        rows = []
        for slot in self.slots:
            row = {'perm': list(slot.permutation.mapping), 'cycles': slot.cycles}
            if slot.priority is not None:
                row['priority'] = slot.priority
            if slot.label:
                row['label'] = slot.label
            if slot.route_priorities is not None:
                row['route_priorities'] = list(slot.route_priorities)
            if slot.route_order is not None:
                row['route_order'] = list(slot.route_order)
            rows.append(row)
        return rows


def all_to_all_schedule(n_nodes, cycles=DEFAULT_SLOT_CYCLES):
    """
    N rotations: in slot r every node sends to (node + r) mod N, so every
    ordered pair meets exactly once.
    """
    if n_nodes < 2:
        raise ScheduleError('all-to-all needs at least 2 nodes, got %d' % n_nodes)
    slots = [TdmSlot(Permutation(tuple((src + r) % n_nodes for src in range(n_nodes))), cycles,
                     label='rotate %d' % r)
             for r in range(n_nodes)]
    return TdmSchedule(n_nodes, slots, kind='all_to_all')


def grid_shape(n_nodes, dimensions):
    """
    Power-of-two side lengths for an N-node hypergrid, spreading the address
    bits as evenly as possible with the larger sides first.
    """
    if dimensions < 1:
        raise ScheduleError('a grid needs at least one dimension, got %d' % dimensions)
    if not is_power_of_two(n_nodes):
        raise ScheduleError('node count %d is not a power of two' % n_nodes)
    log_n = n_nodes.bit_length() - 1
    if log_n < dimensions:
        raise ScheduleError('%d nodes cannot form a %d-dimensional grid' % (n_nodes, dimensions))
    base, extra = divmod(log_n, dimensions)
    return tuple(1 << (base + (1 if k < extra else 0)) for k in range(dimensions))


def mesh_emulation_schedule(n_nodes, dimensions, shape=None, cycles=DEFAULT_SLOT_CYCLES):
    """
    Two cyclic neighbour shifts per grid dimension. Coordinates are mixed
    radix with dimension 0 least significant; edge nodes wrap around.
    """
    if shape is None:
        shape = grid_shape(n_nodes, dimensions)
    shape = tuple(shape)
    if len(shape) != dimensions:
        raise ScheduleError('shape %r does not have %d dimensions' % (list(shape), dimensions))
    if math.prod(shape) != n_nodes or not all(is_power_of_two(side) and side >= 2 for side in shape):
        raise ScheduleError('grid shape %r is not a factorization of %d into powers of two'
                            % (list(shape), n_nodes))
    strides = [math.prod(shape[:k]) for k in range(dimensions)]
    slots = []
    for k, side in enumerate(shape):
        names = AXIS_NAMES[k] if k < len(AXIS_NAMES) else ('dim%d+' % k, 'dim%d-' % k)
        for delta, name in zip((1, -1), names):
            mapping = []
            for node in range(n_nodes):
                coord = node // strides[k] % side
                moved = (coord + delta) % side
                mapping.append(node + (moved - coord) * strides[k])
            slots.append(TdmSlot(Permutation(tuple(mapping)), cycles, label=name))
    return TdmSchedule(n_nodes, slots, kind='mesh')


def broadcast_schedule(n_nodes, source=0, cycles=DEFAULT_SLOT_CYCLES):
    """
    Doubling broadcast: each slot pairs every informed node with an
    uninformed one (lowest ids first) and swaps them; the rest self-route.
    """
    if n_nodes < 2:
        raise ScheduleError('broadcast needs at least 2 nodes, got %d' % n_nodes)
    if not 0 <= source < n_nodes:
        raise ScheduleError('source %d outside [0, %d)' % (source, n_nodes))
    informed = [source]
    slots = []
    while len(informed) < n_nodes:
        waiting = [node for node in range(n_nodes) if node not in set(informed)]
        mapping = list(range(n_nodes))
        reached = []
        for sender, receiver in zip(informed, waiting):
            mapping[sender], mapping[receiver] = receiver, sender
            reached.append(receiver)
        informed.extend(reached)
        slots.append(TdmSlot(Permutation(tuple(mapping)), cycles, label='broadcast %d' % len(slots)))
    return TdmSchedule(n_nodes, slots, kind='broadcast', source=source)


def overhead_cycles(n_nodes, switch_bits=1):
    """
    Route setup cost P + S for an N-node network of 2^switch_bits-port switches.
    """
    if not is_power_of_two(n_nodes) or n_nodes < 2:
        raise ScheduleError('node count %r is not a power of two >= 2' % n_nodes)
    bits = stage_bits(n_nodes, switch_bits)
    return sum(bits) + len(bits)


@dataclass(frozen=True)
class TimingModel:
    frequency_hz: float
    efficiency: float
    n_nodes: int
    switch_bits: int = 1

    def __post_init__(self):
        if not 0 < self.efficiency < 1:
            raise ScheduleError('efficiency %r outside (0, 1)' % self.efficiency)
        if self.frequency_hz <= 0:
            raise ScheduleError('frequency must be positive, got %r' % self.frequency_hz)

    @property
    def switch_degree(self):
        return 1 << self.switch_bits


@dataclass(frozen=True)
class CycleTime:
    overhead_cycles: int
    slot_cycles: float
    slot_seconds: float
    cycle_seconds: float


def tdm_cycle_time(model):
    overhead = overhead_cycles(model.n_nodes, model.switch_bits)
    slot_cycles = overhead / (1 - model.efficiency)
    slot_seconds = slot_cycles / model.frequency_hz
    return CycleTime(overhead, slot_cycles, slot_seconds, model.n_nodes * slot_seconds)


def slot_cycles_for(n_nodes, switch_bits, efficiency):
    """
    Whole slot length in cycles that reaches the requested payload efficiency.
    """
    cycle_time = tdm_cycle_time(TimingModel(1.0, efficiency, n_nodes, switch_bits))
    return math.ceil(round(cycle_time.slot_cycles, 9))


@dataclass(frozen=True)
class BandwidthReport:
    bisection_bits_per_s: float
    per_node_per_bit: float


def bisection_bandwidth(frequency_hz, width, ports):
    if frequency_hz < 0 or width < 0 or ports < 0:
        raise ScheduleError('bandwidth inputs must not be negative')
    return BandwidthReport(frequency_hz * width * ports, frequency_hz)


def model_rows(nodes, efficiencies, frequency_hz, switch_bits=1):
    """
    Rows of (N, B, efficiency, f_Hz, slot_us, cycle_us) over a parameter sweep.
    """
    rows = []
    for n in nodes:
        for efficiency in efficiencies:
            cycle_time = tdm_cycle_time(TimingModel(frequency_hz, efficiency, n, switch_bits))
            rows.append({
                'N': n,
                'B': 1 << switch_bits,
                'efficiency': efficiency,
                'f_Hz': frequency_hz,
                'slot_us': cycle_time.slot_seconds * 1e6,
                'cycle_us': cycle_time.cycle_seconds * 1e6,
            })
    return rows


@dataclass(frozen=True)
class ScheduleIssue:
    slot: int
    check: str
    passed: bool
    detail: str = ''


@dataclass
class ScheduleReport:
    issues: List[ScheduleIssue] = field(default_factory=list)

    def add(self, slot, check, passed, detail=''):
        self.issues.append(ScheduleIssue(slot, check, bool(passed), detail))

    @property
    def passed(self):
        return all(issue.passed for issue in self.issues)

    def failures(self, check=None):
        return [issue for issue in self.issues if not issue.passed and (check is None or issue.check == check)]

    def checked(self, check):
        return sum(1 for issue in self.issues if issue.check == check)


def _ordering_violation(slot):
    """
    First pair in route_order where a less critical route (larger rank) is
    created before a more critical one, or None.
    """
    if slot.route_priorities is None or slot.route_order is None:
        return None
    ranks = [slot.route_priorities[src] for src in slot.route_order]
    for position in range(1, len(ranks)):
        if ranks[position] < ranks[position - 1]:
            return slot.route_order[position - 1], slot.route_order[position]
    return None


def validate_schedule(topology, schedule, simulate=True):
    """
    Per slot: the permutation routes cleanly in simulation, the slot is long
    enough for route setup, and route creation respects priority order.
    Ranks are 0 for the most critical traffic.
    """
    report = ScheduleReport()
    setup = topology.header_bits + topology.stage_count
    network = build_network(topology) if simulate else None
    previous_rank = None
    for index, slot in enumerate(schedule.slots):
        if len(slot.permutation) != topology.n_nodes:
            report.add(index, 'permutation', False, '%d entries for %d nodes'
                       % (len(slot.permutation), topology.n_nodes))
            continue
        if simulate:
            routes = verify_routeset(topology, route_permutation(topology, slot.permutation),
                                     slot.permutation, network)
            report.add(index, 'routing', routes.passed, '%d/%d opened' % (routes.opened, len(routes.outcomes)))
        report.add(index, 'setup', slot.cycles >= setup, 'cycles=%d P+S=%d' % (slot.cycles, setup))
        if slot.priority is not None:
            in_order = previous_rank is None or slot.priority >= previous_rank
            report.add(index, 'S4', in_order, 'slot rank %d after %s' % (slot.priority, previous_rank))
            previous_rank = slot.priority
        if slot.route_order is not None and slot.route_priorities is not None:
            violation = _ordering_violation(slot)
            detail = '' if violation is None else 'route %d created before more critical route %d' % violation
            report.add(index, 'S4', violation is None, detail)
    logger.info('schedule of %d slots validated: %d failures', len(schedule), len(report.failures()))
    return report


@dataclass
class SlotResult:
    label: str
    opened: int
    payload_bits: int
    delivered_bits: int
    cycles: int
    informed: int

    @property
    def utilization(self):
        return self.delivered_bits / float(self.cycles * max(self.opened, 1))


@dataclass
class ScheduleRun:
    slots: List[SlotResult] = field(default_factory=list)
    cycles: int = 0

    @property
    def utilization(self):
        if not self.slots:
            return 0.0
        return min(slot.utilization for slot in self.slots)

    @property
    def informed_sizes(self):
        return [slot.informed for slot in self.slots]


def run_schedule(topology, schedule, source=None, payload_bit='1', network=None):
    """
    Simulate a schedule: in each slot every node opens its route, streams
    cycles - (P + S) payload bits, closes and idles S - 1 cycles. Tracks how
    far a message from source has spread (broadcast schedules).
    """
    setup = topology.header_bits + topology.stage_count
    scripts = {node: [] for node in range(topology.n_nodes)}
    starts = []
    clock = 0
    for slot in schedule.slots:
        if slot.cycles < setup:
            raise ScheduleError('slot of %d cycles is shorter than route setup (%d)' % (slot.cycles, setup))
        routes = route_permutation(topology, slot.permutation)
        payload = payload_bit * (slot.cycles - setup)
        for node, script in scripts.items():
            script.extend([Open(routes.headers[node].bits), Send(payload), Close(),
                           Idle(topology.stage_count - 1)])
        starts.append(clock)
        clock += slot.cycles
    network = network or build_network(topology)
    initiators = [InitiatorModel(node, script) for node, script in scripts.items()]
    trace = run(network, initiators, max_cycles=clock + 4 * setup)

    result = ScheduleRun(cycles=trace.summary['cycles'])
    source = schedule.source if source is None else source
    informed = set() if source is None else {source}
    for index, slot in enumerate(schedule.slots):
        begin, end = starts[index], starts[index] + slot.cycles
        opened = {}
        for event in trace.events:
            if begin <= event.cycle < end and event.kind == 'route_opened' and event.detail != 'src=?':
                opened[int(event.location[4:])] = int(event.detail[4:])
        delivered = {}
        for event in trace.events:
            if begin <= event.cycle < end and event.kind == 'bit_delivered':
                node = int(event.location[4:])
                delivered[node] = delivered.get(node, 0) + 1
        reached = {dst for dst, src in opened.items() if src in informed and delivered.get(dst)}
        informed |= reached
        result.slots.append(SlotResult(
            label=slot.label, opened=len(opened), payload_bits=(slot.cycles - setup) * len(opened),
            delivered_bits=sum(delivered.values()), cycles=slot.cycles, informed=len(informed)))
    logger.info('schedule run: %d slots, utilization %.4f', len(result.slots), result.utilization)
    return result
