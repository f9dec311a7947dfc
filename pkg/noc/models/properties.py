"""
Specification criteria and the report types campaigns fill in.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

logger = logging.getLogger(__name__)

MAX_COUNTEREXAMPLES = 5


class Level(enum.Enum):
    CORE = 'core'
    NETWORK = 'network'
    SYSTEM = 'system'


class Legality(enum.Enum):
    PROTOCOL = 'protocol'
    UNCONSTRAINED = 'unconstrained'


@dataclass(frozen=True)
class PropertySpec:
    id: str
    name: str
    level: Level
    description: str
    checked_by: str
    formal: bool = False


PROPERTIES = {spec.id: spec for spec in (
    PropertySpec('C1', 'no_shared_direction', Level.CORE,
                 'No two active inputs can share the same output channel.',
                 'C1Monitor on every switch step', True),
    PropertySpec('C15', 'reject_on_err', Level.CORE,
                 'Accept and rising err_in: next cycle Abort with err_out, one cycle later '
                 'clm, act and dat de-asserted on the claimed output.',
                 'C15Monitor on every switch step', True),
    PropertySpec('N4', 'route_reaches_destination', Level.NETWORK,
                 'A conflict-free, error-free route lands on the node its header decodes to.',
                 'check_network endpoint campaign', True),
    PropertySpec('S4', 'priority_route_order', Level.SYSTEM,
                 'Higher priority routes are created before lower priority ones.',
                 'validated statically in tdm', True),
    PropertySpec('X1', 'reject_hold', Level.CORE,
                 'A rejected or aborted input keeps err_out high until clm drops.',
                 'RejectHoldMonitor on every switch step'),
    PropertySpec('X2', 'permutation_routable', Level.NETWORK,
                 'Every permutation routes with zero rejects to the right destinations.',
                 'exhaustive_small / random permutation campaign'),
    PropertySpec('X3', 'setup_latency_bound', Level.NETWORK,
                 'A conflict-free route is established within P + S cycles.',
                 'check_setup_latency campaign'),
    PropertySpec('X4', 'error_latency_bound', Level.NETWORK,
                 'A source reads err within 2P + S cycles of a final-stage conflict.',
                 'check_error_latency campaign'),
    PropertySpec('X5', 'no_data_loss', Level.NETWORK,
                 'With 2S bits of buffer and threshold 2S no payload bit is lost; '
                 'a smaller buffer loses bits.',
                 'check_flow campaign'),
    PropertySpec('X6', 'non_interference', Level.SYSTEM,
                 'A disjoint route changes no signal on an existing route.',
                 'check_isolation differential campaign'),
    PropertySpec('X7', 'route_equivalence', Level.NETWORK,
                 'A header regrouped for the 4-port variant reaches the same node.',
                 'check_equivalence campaign'),
)}


@dataclass(frozen=True)
class Stimulus:
    seed: int
    cycles: int
    legality: Legality = Legality.PROTOCOL

    def rng(self):
        return np.random.default_rng(self.seed)


@dataclass
class Counterexample:
    cycle: int
    location: str
    detail: str
    window: List[str] = field(default_factory=list)

    def to_json(self):
        return {'cycle': self.cycle, 'location': self.location, 'detail': self.detail, 'window': self.window}


@dataclass
class PropertyResult:
    property_id: str
    hits: int = 0
    checks: int = 0
    failure_count: int = 0
    failures: List[Counterexample] = field(default_factory=list)

    @property
    def status(self):
        if self.failure_count:
            return 'fail'
        if not self.hits:
            return 'vacuous'
        return 'pass'

    def hit(self):
        self.hits += 1
        self.checks += 1

    def fail(self, cycle, location, detail, window=()):
        self.failure_count += 1
        if len(self.failures) < MAX_COUNTEREXAMPLES:
            self.failures.append(Counterexample(cycle, location, detail, list(window)))

    def merge(self, other):
        merged = PropertyResult(self.property_id, self.hits + other.hits, self.checks + other.checks,
                                self.failure_count + other.failure_count)
        merged.failures = (self.failures + other.failures)[:MAX_COUNTEREXAMPLES]
        return merged

    def to_json(self):
        return {
            'status': self.status,
            'hits': self.hits,
            'checks': self.checks,
            'failures': self.failure_count,
            'counterexamples': [failure.to_json() for failure in self.failures],
        }


@dataclass
class CheckReport:
    results: Dict[str, PropertyResult] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def result(self, property_id):
        if property_id not in self.results:
            self.results[property_id] = PropertyResult(property_id)
        return self.results[property_id]

    def merge(self, other):
        merged = CheckReport(dict(self.results), self.notes + [note for note in other.notes
                                                               if note not in self.notes])
        for property_id, result in other.results.items():
            mine = merged.results.get(property_id)
            merged.results[property_id] = result if mine is None else mine.merge(result)
        return merged

    @property
    def passed(self):
        return not any(result.status == 'fail' for result in self.results.values())

    def status(self, property_id):
        result = self.results.get(property_id)
        return None if result is None else result.status

    def to_json(self):
        return {
            'passed': self.passed,
            'properties': {pid: result.to_json() for pid, result in sorted(self.results.items())},
            'notes': self.notes,
        }


def merge_reports(reports):
    merged = CheckReport()
    for report in reports:
        merged = merged.merge(report)
    return merged
