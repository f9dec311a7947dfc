"""
Cycle-stepped network of switches with endpoint models.

Inter-stage links are the switches' output registers, so every stage adds
one cycle in each direction. Endpoints connect without a register: a target
sees the last stage's forward register and answers with err/cts in the same
cycle, an initiator drives stage 0 directly and reads its backward register.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from noc.exceptions import NoConflictError, ScenarioError
from noc.models.switch import (
    ERROR_BACKWARD, IDLE_FORWARD, BackwardSignals, ForwardSignals, PortState, Switch,
)
from noc.models.topology import find_header, join_header, split_header, trace_route

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Open:
    header: str


@dataclass(frozen=True)
class Send:
    bits: str


@dataclass(frozen=True)
class Idle:
    cycles: int


@dataclass(frozen=True)
class Close:
    pass


@dataclass
class RouteAttempt:
    header: str
    open_cycle: int
    outcome: str = 'pending'
    outcome_cycle: Optional[int] = None
    sent: List[str] = field(default_factory=list)
    sent_cycles: List[int] = field(default_factory=list)

    @property
    def latency(self):
        if self.outcome_cycle is None:
            return None
        return self.outcome_cycle - self.open_cycle + 1


@dataclass
class InitiatorModel:
    """
    A source node running a script of Open/Send/Idle/Close actions.

    The initiator never asserts act while the cts it reads is low. When it
    reads err on an open route it drops clm and skips to the action after
    the next Close.
    """
    node: int
    script: Sequence[object]
    start_cycle: int = 0
    routes: List[RouteAttempt] = field(default_factory=list, init=False)

    def __post_init__(self):
        self.reset()

    def reset(self):
        self.routes = []
        self._index = 0
        self._offset = 0
        self._holding = False

    @property
    def done(self):
        return self._index >= len(self.script) and not self._holding

    @property
    def current(self):
        return self.routes[-1] if self.routes else None

    def _advance(self):
        self._index += 1
        self._offset = 0

    def _abandon(self):
        self._holding = False
        while self._index < len(self.script):
            action = self.script[self._index]
            self._advance()
            if isinstance(action, Close):
                break

    def drive(self, cycle, backward, trace):
        if cycle < self.start_cycle:
            return IDLE_FORWARD
        if self._holding and backward.err:
            route = self.current
            if route is not None and route.outcome in ('pending', 'opened'):
                route.outcome = 'rejected' if route.outcome == 'pending' else 'aborted'
                route.outcome_cycle = cycle
            trace.add(cycle, 'err_observed', 'node%d' % self.node, 'route=%d' % (len(self.routes) - 1))
            self._abandon()
            return IDLE_FORWARD

        while self._index < len(self.script):
            action = self.script[self._index]
            if isinstance(action, Open):
                if self._offset == 0:
                    if self._holding:
                        raise ScenarioError('node %d opens a route while one is held' % self.node)
                    self._holding = True
                    self.routes.append(RouteAttempt(header=action.header, open_cycle=cycle))
                return self._emit(action.header, cycle, backward, payload=False)
            if isinstance(action, Send):
                if not action.bits:
                    self._advance()
                    continue
                if not self._holding:
                    raise ScenarioError('node %d sends without an open route' % self.node)
                return self._emit(action.bits, cycle, backward, payload=True)
            if isinstance(action, Idle):
                if self._offset >= action.cycles:
                    self._advance()
                    continue
                self._offset += 1
                return ForwardSignals(clm=1) if self._holding else IDLE_FORWARD
            self._holding = False
            self._advance()
            return IDLE_FORWARD
        return IDLE_FORWARD

    def _emit(self, bits, cycle, backward, payload):
        if not backward.cts:
            return ForwardSignals(clm=1)
        bit = bits[self._offset]
        if payload:
            self.current.sent.append(bit)
            self.current.sent_cycles.append(cycle)
        self._offset += 1
        if self._offset >= len(bits):
            self._advance()
        return ForwardSignals(clm=1, act=1, dat=int(bit))


@dataclass
class TargetModel:
    """
    A destination node with a FIFO drained at consume_rate bits per cycle.
    cts is low whenever the free space is below cts_threshold. A refusing
    target answers every arriving route with err.
    """
    node: int
    fifo_capacity: int = 64
    consume_rate: Fraction = Fraction(1)
    cts_threshold: int = 0
    refuse: bool = False
    received: List[List[str]] = field(default_factory=list, init=False)
    dropped: int = field(default=0, init=False)

    def __post_init__(self):
        self.consume_rate = Fraction(self.consume_rate)
        self.reset()

    def reset(self):
        self.received = []
        self.dropped = 0
        self._fifo = 0
        self._credit = Fraction(0)
        self._open = False

    @property
    def free(self):
        return self.fifo_capacity - self._fifo

    def absorb(self, cycle, signals, trace):
        location = 'node%d' % self.node
        if not signals.clm:
            if self._open:
                trace.add(cycle, 'route_closed', location, 'bits=%d' % len(self.received[-1]))
            self._open = False
        else:
            if not self._open:
                self._open = True
                self.received.append([])
            if self.refuse:
                return ERROR_BACKWARD
            if signals.act:
                if self._fifo < self.fifo_capacity:
                    self._fifo += 1
                    self.received[-1].append(str(signals.dat))
                    trace.add(cycle, 'bit_delivered', location, 'bit=%d' % signals.dat)
                else:
                    self.dropped += 1
                    trace.add(cycle, 'bit_dropped', location, 'bit=%d' % signals.dat)
        self._credit += self.consume_rate
        while self._credit >= 1 and self._fifo:
            self._fifo -= 1
            self._credit -= 1
        if not self._fifo:
            self._credit = min(self._credit, Fraction(1))
        return BackwardSignals(err=0, cts=int(self.free >= self.cts_threshold))


@dataclass(frozen=True)
class TraceEvent:
    cycle: int
    kind: str
    location: str
    detail: str = ''

    def as_line(self):
        return '%d,%s,%s,%s' % (self.cycle, self.kind, self.location, self.detail)


@dataclass(frozen=True)
class TraceRecord:
    cycle: int
    location: str
    signal: str
    value: int


@dataclass
class Trace:
    events: List[TraceEvent] = field(default_factory=list)
    records: List[TraceRecord] = field(default_factory=list)
    summary: Dict[str, object] = field(default_factory=dict)

    def add(self, cycle, kind, location, detail=''):
        self.events.append(TraceEvent(cycle, kind, location, detail))

    def of_kind(self, kind):
        return [event for event in self.events if event.kind == kind]

    def lines(self):
        return [event.as_line() for event in self.events]

    def write_events(self, stream):
        for line in self.lines():
            stream.write(line + '\n')

    def records_at(self, locations):
        locations = set(locations)
        return [record for record in self.records if record.location in locations]

    def write_vcd(self, stream, timescale='1 ns'):
        from vcd import VCDWriter

        variables = {}
        with VCDWriter(stream, timescale=timescale, date='today') as writer:
            for record in self.records:
                key = (record.location, record.signal)
                if key not in variables:
                    init = 1 if record.signal == 'cts_out' else 0
                    variables[key] = writer.register_var(record.location, record.signal, 'wire', size=1, init=init)
            for record in self.records:
                writer.change(variables[(record.location, record.signal)], record.cycle, record.value)
        logger.info('wrote %d signal changes as VCD', len(self.records))


def port_location(stage, switch, port):
    return 's%d_w%d_p%d' % (stage, switch, port)


class Network:
    """
    Switch states for every stage plus the cycle counter. One Switch logic
    object per stage is shared by all switches of that stage.
    """

    def __init__(self, topology, switch_factory=Switch):
        self.topology = topology
        self.switch_factory = switch_factory
        self.logic = tuple(switch_factory(stage.port_bits) for stage in topology.plan.stages)
        self._feeders = [None]
        self._sinks = []
        plan = topology.plan
        for k in range(1, plan.stage_count):
            bits, prev_bits = plan.stages[k].port_bits, plan.stages[k - 1].port_bits
            inverse = topology.wiring.inverses[k - 1]
            self._feeders.append(tuple(
                tuple((inverse[(w << bits) | q] >> prev_bits, inverse[(w << bits) | q] & ((1 << prev_bits) - 1))
                      for q in range(1 << bits))
                for w in range(plan.stages[k].switch_count)))
        for k in range(plan.stage_count - 1):
            bits, next_bits = plan.stages[k].port_bits, plan.stages[k + 1].port_bits
            forward = topology.wiring.boundaries[k]
            self._sinks.append(tuple(
                tuple((forward[(w << bits) | r] >> next_bits, forward[(w << bits) | r] & ((1 << next_bits) - 1))
                      for r in range(1 << bits))
                for w in range(plan.stages[k].switch_count)))
        self.reset()

    def reset(self):
        self.cycle = 0
        self._rejected = set()
        self.states = [[logic.reset() for _ in range(stage.switch_count)]
                       for logic, stage in zip(self.logic, self.topology.plan.stages)]

    @property
    def switch_total(self):
        return sum(len(row) for row in self.states)

    @property
    def idle(self):
        return all(state.idle for row in self.states for state in row)

    def last_forward(self):
        last = self.topology.stage_count - 1
        return [signals for state in self.states[last] for signals in state.forward]

    def first_backward(self):
        return [signals for state in self.states[0] for signals in state.backward]

    def source_of(self, stage, switch, port):
        """
        Follow owners back from an input port to the node driving it.
        """
        plan = self.topology.plan
        g = (switch << plan.stages[stage].port_bits) | port
        while stage > 0:
            prev_bits = plan.stages[stage - 1].port_bits
            out = self.topology.wiring.inverses[stage - 1][g]
            sw, r = out >> prev_bits, out & ((1 << prev_bits) - 1)
            owner = self.states[stage - 1][sw].owner[r]
            if owner is None:
                return None
            g = (sw << prev_bits) | owner
            stage -= 1
        return g

    def step(self, drive, target_backward, trace, monitors=(), dump=False):
        cycle = self.cycle
        last = self.topology.stage_count - 1
        states = self.states
        new_states = []
        for k, logic in enumerate(self.logic):
            degree = logic.degree
            row = []
            for w, state in enumerate(states[k]):
                if k == 0:
                    forward_in = drive[w * degree:(w + 1) * degree]
                else:
                    prev = states[k - 1]
                    forward_in = [prev[sw].forward[sp] for sw, sp in self._feeders[k][w]]
                if k == last:
                    backward_in = target_backward[w * degree:(w + 1) * degree]
                else:
                    nxt = states[k + 1]
                    backward_in = [nxt[nw].backward[np] for nw, np in self._sinks[k][w]]
                after, _ = logic.step(state, forward_in, backward_in)
                for monitor in monitors:
                    monitor.observe(cycle, k, w, state, forward_in, backward_in, after)
                row.append(after)
            new_states.append(row)
        self.states = new_states
        self.cycle = cycle + 1
        self._record(states, trace, dump)

    def _record(self, before, trace, dump):
        cycle = self.cycle
        last = self.topology.stage_count - 1
        for k, row in enumerate(self.states):
            for w, after in enumerate(row):
                prior = before[k][w]
                if after is prior:
                    continue
                for q, port in enumerate(after.ports):
                    if port is prior.ports[q]:
                        continue
                    if port is PortState.ACCEPT and k == last:
                        r = after.direction[q]
                        dst = (w << after.port_bits) | r
                        trace.add(cycle, 'route_opened', 'node%d' % dst, 'src=%s' % self._fmt(self.source_of(k, w, q)))
                    elif port is PortState.REJECT:
                        source = self.source_of(k, w, q)
                        if k > 0 and source is not None:
                            self._rejected.add(source)
                        trace.add(cycle, 'route_rejected', port_location(k, w, q), 'src=%s' % self._fmt(source))
                    elif port is PortState.ABORT and k == 0:
                        source = (w << after.port_bits) | q
                        # upstream teardown of a downstream reject is already traced as route_rejected
                        if source in self._rejected:
                            self._rejected.discard(source)
                        else:
                            trace.add(cycle, 'route_aborted', port_location(k, w, q), 'src=%d' % source)
                    elif port is PortState.WAIT and k == 0:
                        self._rejected.discard((w << after.port_bits) | q)
                if dump:
                    self._dump(trace, cycle, k, w, prior, after)

    @staticmethod
    def _fmt(source):
        return '?' if source is None else str(source)

    @staticmethod
    def _dump(trace, cycle, k, w, prior, after):
        for p in range(after.degree):
            location = port_location(k, w, p)
            old, new = prior.forward[p], after.forward[p]
            for name in ('clm', 'act', 'dat'):
                if getattr(old, name) != getattr(new, name):
                    trace.records.append(TraceRecord(cycle, location, name + '_out', getattr(new, name)))
            old, new = prior.backward[p], after.backward[p]
            for name in ('err', 'cts'):
                if getattr(old, name) != getattr(new, name):
                    trace.records.append(TraceRecord(cycle, location, name + '_out', getattr(new, name)))


def build_network(topology, switch_factory=Switch):
    network = Network(topology, switch_factory)
    logger.debug('network ready: %d switches, %d boundaries',
                 network.switch_total, len(topology.wiring.boundaries))
    return network


def default_target(node, topology, **overrides):
    """
    A target sized to the flow-control rule: 2S bits of buffer, cts threshold 2S.
    """
    bound = 2 * topology.stage_count
    values = {'fifo_capacity': bound, 'cts_threshold': bound, 'consume_rate': Fraction(1)}
    values.update(overrides)
    return TargetModel(node=node, **values)


def run(network, initiators, targets=(), max_cycles=10000, stop=None, full_dump=False, monitors=None):
    """
    Reset the network and simulate until every script has finished and the
    network is idle, stop(trace, network) returns true, or max_cycles pass.
    """
    topology = network.topology
    n = topology.n_nodes
    seen = set()
    for initiator in initiators:
        if not 0 <= initiator.node < n:
            raise ScenarioError('initiator node %d outside [0, %d)' % (initiator.node, n))
        if initiator.node in seen:
            raise ScenarioError('two initiators on node %d' % initiator.node)
        seen.add(initiator.node)
    by_target = {}
    for target in targets:
        if not 0 <= target.node < n:
            raise ScenarioError('target node %d outside [0, %d)' % (target.node, n))
        if target.node in by_target:
            raise ScenarioError('two targets on node %d' % target.node)
        by_target[target.node] = target
    endpoints = [by_target.get(d) or default_target(d, topology) for d in range(n)]
    drivers = [None] * n
    for initiator in initiators:
        drivers[initiator.node] = initiator

    network.reset()
    for initiator in initiators:
        initiator.reset()
    for target in endpoints:
        target.reset()
    monitors = list(monitors or ())
    trace = Trace()
    trace.add(0, 'reset', 'network', 'N=%d S=%d P=%d' % (n, topology.stage_count, topology.header_bits))

    completed = False
    while network.cycle < max_cycles:
        cycle = network.cycle
        last_forward = network.last_forward()
        target_backward = [endpoints[d].absorb(cycle, last_forward[d], trace) for d in range(n)]
        if all(initiator.done for initiator in initiators) and network.idle:
            completed = True
            break
        if stop is not None and stop(trace, network):
            break
        first_backward = network.first_backward()
        drive = [IDLE_FORWARD if driver is None else driver.drive(cycle, first_backward[q], trace)
                 for q, driver in enumerate(drivers)]
        marker = len(trace.events)
        network.step(drive, target_backward, trace, monitors, full_dump)
        for event in trace.events[marker:]:
            if event.kind == 'route_opened' and event.detail != 'src=?':
                route = drivers[int(event.detail[4:])]
                if route is not None and route.current is not None and route.current.outcome == 'pending':
                    route.current.outcome = 'opened'
                    route.current.outcome_cycle = event.cycle

    trace.summary = summarize(trace, network, initiators, endpoints, completed)
    logger.info('simulated %d cycles: %s', network.cycle, trace.summary)
    return trace


def summarize(trace, network, initiators, targets, completed):
    topology = network.topology
    setup = [route.latency for initiator in initiators for route in initiator.routes
             if route.outcome == 'opened']
    errors = [route.latency for initiator in initiators for route in initiator.routes
              if route.outcome in ('rejected', 'aborted')]
    return {
        'cycles': network.cycle,
        'completed': completed,
        'pending': sum(1 for initiator in initiators if not initiator.done),
        'routes_opened': len(trace.of_kind('route_opened')),
        'routes_rejected': len(trace.of_kind('route_rejected')),
        'routes_aborted': len(trace.of_kind('route_aborted')),
        'bits_delivered': len(trace.of_kind('bit_delivered')),
        'bits_dropped': sum(target.dropped for target in targets),
        'max_setup_latency': max(setup) if setup else None,
        'max_error_latency': max(errors) if errors else None,
        'setup_bound': topology.header_bits + topology.stage_count,
        'error_bound': 2 * topology.header_bits + topology.stage_count,
    }


@dataclass(frozen=True)
class Latency:
    cycles: int
    outcome: str


def stop_on(kind, location=None):
    """
    Stop predicate for run(): true once an event of this kind (at this
    location) has been traced.
    """
    scanned = [0]

    def predicate(trace, network):
        events = trace.events
        hit = any(event.kind == kind and (location is None or event.location == location)
                  for event in events[scanned[0]:])
        scanned[0] = len(events)
        return hit
    return predicate


def measure_setup_latency(network, source, header):
    """
    Inclusive cycle count from the first header bit to the cycle the last
    stage holds the route. A rejected route reports its rejection latency.
    """
    topology = network.topology
    hold = topology.stage_count + 2
    initiator = InitiatorModel(source, [Open(header), Idle(hold), Close()])
    budget = 4 * (topology.header_bits + topology.stage_count) + hold
    run(network, [initiator], max_cycles=budget)
    route = initiator.routes[0]
    if route.outcome == 'opened':
        return Latency(route.latency, 'opened')
    if route.outcome in ('rejected', 'aborted'):
        return Latency(route.latency, route.outcome)
    raise ScenarioError('route from node %d did not settle within %d cycles' % (source, budget))


@dataclass(frozen=True)
class ConflictScenario:
    holder: int
    holder_header: str
    challenger: int
    challenger_header: str
    stage: int


def _path_to_switch(topology, source, stage, switch, avoid, rng):
    boundaries = topology.wiring.boundaries

    def search(k, port, prefix):
        bits = topology.port_bits(k)
        here = port >> bits
        if k == stage:
            return prefix if here == switch else None
        order = range(1 << bits) if rng is None else rng.permutation(1 << bits).tolist()
        for r in order:
            out = (here << bits) | r
            if (k, out) in avoid:
                continue
            found = search(k + 1, boundaries[k][out], prefix + [r])
            if found is not None:
                return found
        return None

    return search(0, source, [])


def engineer_conflict(topology, stage, rng=None):
    """
    Two routes whose first shared output is at the given stage: the holder
    from node 0 and a challenger from the lowest node that can reach the
    holder's switch at that stage over links the holder does not use.
    """
    if not 0 <= stage < topology.stage_count:
        raise ScenarioError('stage %d outside [0, %d)' % (stage, topology.stage_count))
    n = topology.n_nodes
    destination = 0 if rng is None else int(rng.integers(n))
    holder_header = find_header(topology, 0, destination, rng=rng)
    path = trace_route(topology, 0, holder_header)
    holder_groups = split_header(holder_header, topology.plan.port_bits)
    port_bits = topology.plan.port_bits
    earlier = frozenset(hop.link(port_bits[hop.stage]) for hop in path.hops[:stage])
    target_switch = path.hops[stage].switch
    for challenger in range(1, n):
        prefix = _path_to_switch(topology, challenger, stage, target_switch, earlier, rng)
        if prefix is None:
            continue
        groups = prefix + [holder_groups[stage]] + [0] * (topology.stage_count - stage - 1)
        return ConflictScenario(0, holder_header, challenger, join_header(groups, port_bits), stage)
    raise NoConflictError('no challenger can meet node 0 at stage %d' % stage)


def measure_error_latency(network, scenario):
    """
    Inclusive cycle count from the challenger's first header bit until its
    source reads err. The challenger starts once the holder's route is up.
    """
    topology = network.topology
    setup = topology.header_bits + topology.stage_count
    hold = 2 * setup + 2 * topology.stage_count + 4
    holder = InitiatorModel(scenario.holder, [Open(scenario.holder_header), Idle(hold), Close()])
    challenger = InitiatorModel(
        scenario.challenger, [Open(scenario.challenger_header), Idle(hold), Close()], start_cycle=setup)
    run(network, [holder, challenger], max_cycles=setup + 2 * hold + 10,
        stop=stop_on('err_observed', 'node%d' % scenario.challenger))
    route = challenger.routes[0] if challenger.routes else None
    if route is None or route.outcome not in ('rejected', 'aborted'):
        raise NoConflictError('challenger from node %d was never rejected' % scenario.challenger)
    return route.latency


def measure_data_latency(network, source, header, payload='1011'):
    """
    Cycles between driving a payload bit and its arrival at the target.
    """
    topology = network.topology
    initiator = InitiatorModel(source, [Open(header), Send(payload), Close()])
    trace = run(network, [initiator], max_cycles=4 * (topology.header_bits + topology.stage_count) + len(payload))
    delivered = trace.of_kind('bit_delivered')
    route = initiator.routes[0]
    if not delivered or route.outcome != 'opened':
        raise ScenarioError('payload from node %d was not delivered' % source)
    return delivered[0].cycle - route.sent_cycles[0]


def flow_scenario(network, payload, consume_rate, fifo_capacity=None, cts_threshold=None, source=0,
                  destination=None):
    rate = Fraction(consume_rate)
    if rate <= 0:
        raise ScenarioError('consume rate must be positive, got %s' % rate)
    topology = network.topology
    destination = topology.n_nodes - 1 if destination is None else destination
    header = find_header(topology, source, destination)
    target = default_target(destination, topology, consume_rate=rate)
    if fifo_capacity is not None:
        target.fifo_capacity = fifo_capacity
    if cts_threshold is not None:
        target.cts_threshold = cts_threshold
    initiator = InitiatorModel(source, [Open(header), Send(payload), Close()])
    budget = int(len(payload) / rate) + 8 * (topology.header_bits + topology.stage_count) + 16
    trace = run(network, [initiator], [target], max_cycles=budget)
    return trace, initiator, target


def check_no_loss(network, payload, consume_rate, fifo_capacity=None, cts_threshold=None, source=0,
                  destination=None):
    """
    True iff the whole payload reaches the target once and in order while the
    target throttles the source through cts.
    """
    if not payload:
        return True
    trace, initiator, target = flow_scenario(network, payload, consume_rate, fifo_capacity, cts_threshold,
                                             source, destination)
    received = ''.join(target.received[0]) if target.received else ''
    return target.dropped == 0 and received == payload and trace.summary['completed']
