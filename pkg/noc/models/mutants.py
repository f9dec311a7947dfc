"""
Single-line mutants of the switch state machine. Each one breaks exactly
one rule, and the property listed next to it must catch it.
"""
from dataclasses import dataclass

from noc.models.switch import Switch


class IgnoreOwner(Switch):
    """Grants a claim even when the output already has an owner."""

    def _output_busy(self, state, direction):
        return False


class ForwardOnAbort(Switch):
    """Keeps driving the claimed output after an inbound err."""

    def _abort_forward(self, signals):
        return signals


class LsbFirst(Switch):
    """Collects configuration bits least significant first."""

    def _shift(self, accumulator, bit, bits_seen):
        return accumulator | (bit << bits_seen)


class ReleaseReject(Switch):
    """Leaves Reject/Abort after one cycle even while clm is held."""

    def _leaves_hold(self, signals):
        return True


@dataclass(frozen=True)
class Mutant:
    name: str
    factory: type
    killed_by: str


MUTANTS = {
    'IGNORE_OWNER': Mutant('IGNORE_OWNER', IgnoreOwner, 'C1'),
    'FORWARD_ON_ABORT': Mutant('FORWARD_ON_ABORT', ForwardOnAbort, 'C15'),
    'LSB_FIRST': Mutant('LSB_FIRST', LsbFirst, 'N4'),
    'RELEASE_REJECT': Mutant('RELEASE_REJECT', ReleaseReject, 'X1'),
}
