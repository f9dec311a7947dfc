"""
Verification campaigns: bounded exhaustive and seeded random runs of the
switch and network models with the property monitors attached.
"""
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from noc.exceptions import ExhaustiveLimitError, NoConflictError
from noc.models.monitors import switch_monitors
from noc.models.mutants import MUTANTS
from noc.models.netsim import (
    Close, Idle, InitiatorModel, Open, Send, TargetModel, build_network, check_no_loss,
    engineer_conflict, flow_scenario, measure_error_latency, measure_setup_latency, port_location, run,
)
from noc.models.properties import PROPERTIES, CheckReport, Legality, Stimulus, merge_reports
from noc.models.routing import (
    Permutation, random_permutation, regroup_header, route_permutation, verify_routeset,
)
from noc.models.switch import BackwardSignals, ForwardSignals, Switch
from noc.models.tdm import TdmSlot, all_to_all_schedule, validate_schedule
from noc.models.topology import NetworkSpec, build_topology, find_header, trace_route

logger = logging.getLogger(__name__)

WINDOW = 12


def _collect(report, monitors):
    for monitor in monitors:
        report.results[monitor.property_id] = report.result(monitor.property_id).merge(monitor.result)
    return report


def run_partitioned(task, partitions, workers=1):
    """
    Run task(*args) for each partition, in worker processes when workers > 1,
    and merge the reports in partition order.
    """
    if workers <= 1 or len(partitions) <= 1:
        return merge_reports(task(*args) for args in partitions)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return merge_reports(pool.map(task, *zip(*partitions)))


class _ProtocolDriver:
    """
    Legal environment for a lone switch: each input opens a claim, stalls at
    random, streams data while cts is high and drops clm on err or after a
    random hold (some inputs keep clm a few cycles after err); each output
    raises err at random while it is claimed.
    """

    def __init__(self, degree, port_bits, rng):
        self.degree = degree
        self.port_bits = port_bits
        self.rng = rng
        self.phase = ['idle'] * degree
        self.remaining = [0] * degree
        self.err = [0] * degree

    def inputs(self, state):
        u = self.rng.random((self.degree, 4))
        forward_in = []
        for q in range(self.degree):
            back = state.backward[q]
            phase = self.phase[q]
            if phase in ('header', 'hold') and back.err:
                if u[q, 2] < 0.5:
                    self.phase[q] = 'idle'
                    forward_in.append(ForwardSignals())
                else:
                    self.phase[q], self.remaining[q] = 'drain', 1 + int(u[q, 3] * 3)
                    forward_in.append(ForwardSignals(clm=1))
                continue
            if phase == 'drain':
                self.remaining[q] -= 1
                if not self.remaining[q]:
                    self.phase[q] = 'idle'
                forward_in.append(ForwardSignals(clm=int(bool(self.remaining[q]))))
                continue
            if phase == 'idle':
                if u[q, 0] < 0.3:
                    self.phase[q], self.remaining[q] = 'header', self.port_bits
                forward_in.append(ForwardSignals())
            elif phase == 'header':
                if u[q, 1] < 0.2:
                    forward_in.append(ForwardSignals(clm=1))
                    continue
                self.remaining[q] -= 1
                if not self.remaining[q]:
                    self.phase[q], self.remaining[q] = 'hold', 1 + int(u[q, 2] * 12)
                forward_in.append(ForwardSignals(clm=1, act=1, dat=int(u[q, 3] < 0.5)))
            else:
                self.remaining[q] -= 1
                if not self.remaining[q]:
                    self.phase[q] = 'idle'
                    forward_in.append(ForwardSignals())
                elif back.cts and u[q, 1] < 0.7:
                    forward_in.append(ForwardSignals(clm=1, act=1, dat=int(u[q, 3] < 0.5)))
                else:
                    forward_in.append(ForwardSignals(clm=1))
        v = self.rng.random((self.degree, 2))
        backward_in = []
        for r in range(self.degree):
            claimed = state.forward[r].clm
            if not claimed:
                self.err[r] = 0
            elif v[r, 0] < 0.08:
                self.err[r] = 1
            backward_in.append(BackwardSignals(err=self.err[r], cts=int(not self.err[r] and v[r, 1] < 0.9)))
        return forward_in, backward_in


class _RandomDriver:
    """
    Unconstrained environment: every signal is an independent fair coin.
    """

    def __init__(self, degree, port_bits, rng):
        self.degree = degree
        self.rng = rng

    def inputs(self, state):
        bits = self.rng.integers(0, 2, size=(self.degree, 5))
        forward_in = [ForwardSignals(clm=int(row[0]), act=int(row[1]), dat=int(row[2])) for row in bits]
        backward_in = [BackwardSignals(err=int(row[3]), cts=int(row[4])) for row in bits]
        return forward_in, backward_in


def check_core(switch_bits, stimulus, switch_factory=Switch):
    """
    Step one switch under the stimulus and evaluate C1, C15 and X1 at every cycle.
    """
    logic = switch_factory(switch_bits)
    state = logic.reset()
    rng = stimulus.rng()
    driver_class = _ProtocolDriver if stimulus.legality is Legality.PROTOCOL else _RandomDriver
    driver = driver_class(logic.degree, switch_bits, rng)
    monitors = switch_monitors()
    for cycle in range(stimulus.cycles):
        forward_in, backward_in = driver.inputs(state)
        after, _ = logic.step(state, forward_in, backward_in)
        for monitor in monitors:
            monitor.observe(cycle, 0, 0, state, forward_in, backward_in, after)
        state = after
    report = _collect(CheckReport(), monitors)
    report.notes.append('core p=%d: %d %s cycles, seed %d' % (
        switch_bits, stimulus.cycles, stimulus.legality.value, stimulus.seed))
    logger.info('core campaign p=%d done: %s', switch_bits,
                {pid: result.status for pid, result in report.results.items()})
    return report


def _header_pairs(topology, stimulus, exhaustive, samples):
    n, bits = topology.n_nodes, topology.header_bits
    if exhaustive:
        return [(src, format(value, '0%db' % bits)) for src in range(n) for value in range(1 << bits)]
    rng = stimulus.rng()
    sources = rng.integers(0, n, size=samples)
    values = rng.integers(0, 1 << bits, size=samples)
    return [(int(src), format(int(value), '0%db' % bits)) for src, value in zip(sources, values)]


def _network_chunk(n_nodes, switch_bits, pairs, inject_every, switch_factory):
    topology = build_topology(NetworkSpec(n_nodes, switch_bits))
    network = build_network(topology, switch_factory)
    report = CheckReport()
    n4 = report.result('N4')
    monitors = switch_monitors()
    hold = topology.stage_count + 2
    for index, (source, header) in enumerate(pairs):
        expected = trace_route(topology, source, header).destination
        refuse = bool(inject_every) and index % inject_every == inject_every - 1
        targets = [TargetModel(expected, refuse=True)] if refuse else []
        initiator = InitiatorModel(source, [Open(header), Idle(hold), Close()])
        trace = run(network, [initiator], targets, max_cycles=8 * (topology.header_bits + hold),
                    monitors=monitors)
        if refuse:
            continue
        route = initiator.routes[0]
        n4.hit()
        opened = trace.of_kind('route_opened')
        landed = [int(event.location[4:]) for event in opened if event.detail == 'src=%d' % source]
        if route.outcome != 'opened' or landed != [expected]:
            n4.fail(trace.summary['cycles'], 'node%d' % source,
                    'header %s from %d expected node %d, landed %r (%s)'
                    % (header, source, expected, landed, route.outcome),
                    trace.lines()[-WINDOW:])
    return _collect(report, monitors)


def check_network(topology, stimulus, exhaustive=False, samples=10000, inject_every=8, workers=1,
                  switch_factory=Switch):
    """
    Route single (source, header) pairs through the network and check N4
    plus the switch properties on every embedded switch. Every inject_every-th
    route meets a refusing target, which exercises C15 and leaves N4 unchecked.
    """
    pairs = _header_pairs(topology, stimulus, exhaustive, samples)
    chunks = [pairs[i::max(workers, 1)] for i in range(max(workers, 1))]
    partitions = [(topology.n_nodes, topology.spec.switch_bits, chunk, inject_every, switch_factory)
                  for chunk in chunks if chunk]
    report = run_partitioned(_network_chunk, partitions, workers)
    report.notes.append('network N=%d p=%d: %d %s (source, header) pairs' % (
        topology.n_nodes, topology.spec.switch_bits, len(pairs), 'exhaustive' if exhaustive else 'sampled'))
    return report


def _permutation_chunk(n_nodes, switch_bits, start, stop):
    topology = build_topology(NetworkSpec(n_nodes, switch_bits))
    network = build_network(topology)
    report = CheckReport()
    x2 = report.result('X2')
    for mapping in itertools.islice(itertools.permutations(range(n_nodes)), start, stop):
        _check_permutation(topology, network, Permutation(mapping), x2)
    return report


def _check_permutation(topology, network, permutation, result):
    routes = verify_routeset(topology, route_permutation(topology, permutation), permutation, network)
    result.hit()
    if not routes.passed or routes.rejected:
        result.fail(routes.cycles, 'permutation', 'permutation %r: %d/%d correct, %d rejected' % (
            list(permutation.mapping), sum(1 for o in routes.outcomes if o.correct), len(routes.outcomes),
            routes.rejected))


def exhaustive_small(n_nodes, switch_bits=1, limit=8, workers=1):
    """
    Route and simulate every permutation of an N-node network.
    """
    if n_nodes > limit or n_nodes < 4:
        raise ExhaustiveLimitError(
            'exhaustive mode covers N in [4, %d]; use the randomized campaign '
            '(verify --level network --samples K) for %d nodes' % (limit, n_nodes))
    total = math.factorial(n_nodes)
    parts = max(workers, 1)
    bounds = [total * i // parts for i in range(parts + 1)]
    partitions = [(n_nodes, switch_bits, bounds[i], bounds[i + 1]) for i in range(parts) if bounds[i] < bounds[i + 1]]
    report = run_partitioned(_permutation_chunk, partitions, workers)
    report.notes.append('exhaustive N=%d p=%d: %d permutations' % (n_nodes, switch_bits, total))
    return report


def _random_permutation_chunk(n_nodes, switch_bits, count, seed):
    topology = build_topology(NetworkSpec(n_nodes, switch_bits))
    network = build_network(topology)
    rng = np.random.default_rng(seed)
    report = CheckReport()
    x2 = report.result('X2')
    for _ in range(count):
        _check_permutation(topology, network, random_permutation(n_nodes, rng), x2)
    return report


def check_random_permutations(topology, stimulus, count, workers=1):
    parts = max(workers, 1)
    seeds = np.random.SeedSequence(stimulus.seed).spawn(parts)
    sizes = [count // parts + (1 if i < count % parts else 0) for i in range(parts)]
    partitions = [(topology.n_nodes, topology.spec.switch_bits, size, seed.generate_state(1)[0])
                  for size, seed in zip(sizes, seeds) if size]
    report = run_partitioned(_random_permutation_chunk, partitions, workers)
    report.notes.append('random permutations N=%d p=%d: %d' % (topology.n_nodes, topology.spec.switch_bits, count))
    return report


def check_setup_latency(topology, stimulus, routes=1000):
    rng = stimulus.rng()
    network = build_network(topology)
    report = CheckReport()
    x3 = report.result('X3')
    bound = topology.header_bits + topology.stage_count
    for _ in range(routes):
        source, destination = (int(value) for value in rng.integers(0, topology.n_nodes, size=2))
        header = find_header(topology, source, destination, rng=rng)
        latency = measure_setup_latency(network, source, header)
        x3.hit()
        if latency.outcome != 'opened' or latency.cycles > bound:
            x3.fail(latency.cycles, 'node%d' % source, 'header %s: %s after %d cycles, bound %d'
                    % (header, latency.outcome, latency.cycles, bound))
    return report


def check_error_latency(topology, stimulus, scenarios=1000, stage=None):
    rng = stimulus.rng()
    network = build_network(topology)
    report = CheckReport()
    x4 = report.result('X4')
    stage = topology.stage_count - 1 if stage is None else stage
    bound = 2 * topology.header_bits + topology.stage_count
    for _ in range(scenarios):
        try:
            scenario = engineer_conflict(topology, stage, rng)
            latency = measure_error_latency(network, scenario)
        except NoConflictError as exc:
            x4.fail(0, 'stage%d' % stage, str(exc))
            continue
        x4.hit()
        if latency > bound:
            x4.fail(latency, 'node%d' % scenario.challenger, 'err after %d cycles, bound %d' % (latency, bound))
    return report


def check_flow(topology, stimulus, scenarios=1000, max_payload=256):
    rng = stimulus.rng()
    network = build_network(topology)
    report = CheckReport()
    x5 = report.result('X5')
    n = topology.n_nodes
    for _ in range(scenarios):
        length = int(rng.integers(1, max_payload + 1))
        payload = ''.join('1' if bit else '0' for bit in rng.integers(0, 2, size=length))
        rate = Fraction(1, int(rng.integers(1, 17)))
        source, destination = (int(value) for value in rng.integers(0, n, size=2))
        x5.hit()
        if not check_no_loss(network, payload, rate, source=source, destination=destination):
            x5.fail(0, 'node%d' % destination, 'lost bits: %d-bit payload at rate %s' % (length, rate))
    trace, _, target = flow_scenario(network, '10' * 128, Fraction(1, 4), fifo_capacity=1, cts_threshold=1)
    x5.checks += 1
    if not target.dropped:
        x5.fail(trace.summary['cycles'], 'node%d' % target.node, 'undersized buffer lost nothing')
    else:
        report.notes.append('undersized buffer (1 bit) dropped %d of 256 bits' % target.dropped)
    return report


def _path_signals(path):
    keys = set()
    for hop in path.hops:
        out_location = port_location(hop.stage, hop.switch, hop.out_port)
        in_location = port_location(hop.stage, hop.switch, hop.in_port)
        keys.update((out_location, name) for name in ('clm_out', 'act_out', 'dat_out'))
        keys.update((in_location, name) for name in ('err_out', 'cts_out'))
    return keys


def check_isolation(topology, stimulus, pairs=1000):
    """
    Differential runs: route A alone, then A together with a route B that
    shares no link with it; A's signals and delivered bits must match.
    """
    rng = stimulus.rng()
    network = build_network(topology)
    report = CheckReport()
    x6 = report.result('X6')
    n = topology.n_nodes
    for _ in range(pairs):
        a_src, a_dst = (int(value) for value in rng.integers(0, n, size=2))
        a_header = find_header(topology, a_src, a_dst, rng=rng)
        a_path = trace_route(topology, a_src, a_header)
        others = [node for node in range(n) if node != a_src]
        b_src = int(rng.choice(others))
        b_dst = int(rng.choice([node for node in range(n) if node != a_dst]))
        b_header = find_header(topology, b_src, b_dst, avoid=a_path.links(topology), rng=rng)
        if b_header is None:
            continue
        length = int(rng.integers(1, 65))
        a_payload = ''.join('1' if bit else '0' for bit in rng.integers(0, 2, size=length))
        b_payload = ''.join('1' if bit else '0' for bit in rng.integers(0, 2, size=int(rng.integers(1, 65))))
        b_start = int(rng.integers(0, topology.header_bits + topology.stage_count + 1))

        def scenario(with_b):
            a = InitiatorModel(a_src, [Open(a_header), Send(a_payload), Close()])
            initiators = [a]
            if with_b:
                initiators.append(InitiatorModel(b_src, [Open(b_header), Send(b_payload), Close()],
                                                 start_cycle=b_start))
            return run(network, initiators, max_cycles=16 * (topology.header_bits + topology.stage_count) + 256,
                       full_dump=True)

        alone, together = scenario(False), scenario(True)
        keys = _path_signals(a_path)
        signature = [(r.cycle, r.location, r.signal, r.value) for r in alone.records if (r.location, r.signal) in keys]
        shared = [(r.cycle, r.location, r.signal, r.value) for r in together.records
                  if (r.location, r.signal) in keys]
        delivered = [e for e in alone.events if e.location == 'node%d' % a_dst and e.kind == 'bit_delivered']
        delivered_b = [e for e in together.events if e.location == 'node%d' % a_dst and e.kind == 'bit_delivered']
        x6.hit()
        if signature != shared or delivered != delivered_b:
            x6.fail(0, 'node%d' % a_src, 'route %s from %d disturbed by route %s from %d'
                    % (a_header, a_src, b_header, b_src))
    return report


def check_equivalence(stimulus=None, n_nodes=8):
    """
    Every (source, header) pair on the 2-port network and the same bits
    regrouped for the 4-port network land on the same node in simulation.
    """
    narrow = build_topology(NetworkSpec(n_nodes, 1))
    wide = build_topology(NetworkSpec(n_nodes, 2))
    report = CheckReport()
    x7 = report.result('X7')
    if narrow.header_bits != wide.header_bits:
        report.notes.append('N=%d: header lengths differ (%d vs %d), equivalence not applicable'
                            % (n_nodes, narrow.header_bits, wide.header_bits))
        return report
    networks = (build_network(narrow), build_network(wide))
    hold = max(narrow.stage_count, wide.stage_count) + 2
    for source in range(n_nodes):
        for value in range(1 << narrow.header_bits):
            bits = format(value, '0%db' % narrow.header_bits)
            landed = []
            for network in networks:
                header = regroup_header(bits, network.topology.plan)
                trace = run(network, [InitiatorModel(source, [Open(header.bits), Idle(hold), Close()])],
                            max_cycles=8 * (network.topology.header_bits + hold))
                opened = trace.of_kind('route_opened')
                landed.append(int(opened[0].location[4:]) if opened else None)
            x7.hit()
            if landed[0] is None or landed[0] != landed[1]:
                x7.fail(0, 'node%d' % source, 'header %s lands on %r' % (bits, landed))
    return report


def check_schedule(topology, stimulus=None):
    """
    S4 on an all-to-all schedule with slot ranks and per-route priorities
    set in creation order.
    """
    schedule = all_to_all_schedule(topology.n_nodes, cycles=2 * (topology.header_bits + topology.stage_count))
    ranked = []
    for index, slot in enumerate(schedule.slots):
        priorities = tuple(src % 3 for src in range(topology.n_nodes))
        order = tuple(sorted(range(topology.n_nodes), key=lambda src: (priorities[src], src)))
        ranked.append(TdmSlot(slot.permutation, slot.cycles, index // 2, slot.label, priorities, order))
    schedule.slots = ranked
    checked = validate_schedule(topology, schedule, simulate=False)
    report = CheckReport()
    s4 = report.result('S4')
    for issue in checked.issues:
        if issue.check != 'S4':
            continue
        s4.hit()
        if not issue.passed:
            s4.fail(issue.slot, 'slot%d' % issue.slot, issue.detail)
    report.notes.append('S4 is an ordering rule on schedule scripts, checked statically')
    return report


@dataclass
class MutationResult:
    mutant: str
    property_id: str
    killed: bool


def mutation_check(seed=0, cycles=20000, samples=256):
    """
    Run each documented mutant against the property meant to kill it.
    """
    results = []
    for mutant in MUTANTS.values():
        if mutant.killed_by == 'N4':
            topology = build_topology(NetworkSpec(16, 2))
            report = check_network(topology, Stimulus(seed, samples), samples=samples, inject_every=0,
                                   switch_factory=mutant.factory)
        else:
            report = check_core(1, Stimulus(seed, cycles), switch_factory=mutant.factory)
        killed = report.status(mutant.killed_by) == 'fail'
        logger.info('mutant %s vs %s: %s', mutant.name, mutant.killed_by, 'killed' if killed else 'survived')
        results.append(MutationResult(mutant.name, mutant.killed_by, killed))
    return results


@dataclass
class CoverageRow:
    property_id: str
    name: str
    checked_by: str
    hits: int
    status: str


def coverage_report(*reports):
    """
    One row per known criterion. Criteria no report exercised are 'uncovered'.
    """
    merged = merge_reports(reports)
    rows = []
    for spec in PROPERTIES.values():
        result = merged.results.get(spec.id)
        if result is None:
            rows.append(CoverageRow(spec.id, spec.name, spec.checked_by, 0, 'uncovered'))
        else:
            rows.append(CoverageRow(spec.id, spec.name, spec.checked_by, result.hits, result.status))
    return rows


def format_table(rows):
    widths = (4, 26, 46, 9, 9)
    header = ('id', 'name', 'checked by', 'hits', 'status')
    lines = ['  '.join(text.ljust(width) for text, width in zip(header, widths)).rstrip()]
    for row in rows:
        cells = (row.property_id, row.name, row.checked_by, str(row.hits), row.status)
        lines.append('  '.join(text.ljust(width) for text, width in zip(cells, widths)).rstrip())
    return '\n'.join(lines)
