"""
Cycle-accurate switching element.

A switch of 2^p ports takes p configuration bits on each input, most
significant first, then claims the addressed output. Every output is a
one-deep register: forward signals (clm, act, dat) cross the switch in one
cycle and backward signals (err, cts) return in one cycle.
"""
import enum
import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Tuple

logger = logging.getLogger(__name__)


class PortState(enum.Enum):
    WAIT = 'wait'
    ACCEPT = 'accept'
    REJECT = 'reject'
    ABORT = 'abort'


@dataclass(frozen=True)
class ForwardSignals:
    clm: int = 0
    act: int = 0
    dat: int = 0

    @property
    def quiet(self):
        return not (self.clm or self.act or self.dat)


@dataclass(frozen=True)
class BackwardSignals:
    err: int = 0
    cts: int = 1


IDLE_FORWARD = ForwardSignals()
READY_BACKWARD = BackwardSignals()
ERROR_BACKWARD = BackwardSignals(err=1, cts=0)
HOLD_FORWARD = ForwardSignals(clm=1)


@dataclass(frozen=True)
class SwitchState:
    port_bits: int
    ports: Tuple[PortState, ...]
    bits_seen: Tuple[int, ...]
    accumulator: Tuple[int, ...]
    direction: Tuple[Optional[int], ...]
    clm_seen: Tuple[int, ...]
    owner: Tuple[Optional[int], ...]
    draining: Tuple[bool, ...]
    forward: Tuple[ForwardSignals, ...]
    backward: Tuple[BackwardSignals, ...]

    @classmethod
    def reset(cls, port_bits):
        degree = 1 << port_bits
        return cls(
            port_bits=port_bits,
            ports=(PortState.WAIT,) * degree,
            bits_seen=(0,) * degree,
            accumulator=(0,) * degree,
            direction=(None,) * degree,
            clm_seen=(0,) * degree,
            owner=(None,) * degree,
            draining=(False,) * degree,
            forward=(IDLE_FORWARD,) * degree,
            backward=(READY_BACKWARD,) * degree,
        )

    @property
    def degree(self):
        return 1 << self.port_bits

    @cached_property
    def idle(self):
        return (all(port is PortState.WAIT for port in self.ports)
                and not any(self.bits_seen) and not any(self.clm_seen)
                and not any(self.draining)
                and all(owner is None for owner in self.owner)
                and all(signals.quiet for signals in self.forward))


@dataclass(frozen=True)
class SwitchOutputs:
    forward: Tuple[ForwardSignals, ...]
    backward: Tuple[BackwardSignals, ...]


class Switch:
    """
    Transition logic for one switch size. Instances hold no simulation state
    and may be shared by every switch of a stage.

    The protected hooks are the single points the documented mutants override.
    """

    def __init__(self, port_bits):
        if port_bits < 1:
            raise ValueError('port_bits must be at least 1, got %r' % port_bits)
        self.port_bits = port_bits
        self.degree = 1 << port_bits

    def __repr__(self):
        return '%s(port_bits=%d)' % (type(self).__name__, self.port_bits)

    def reset(self):
        return SwitchState.reset(self.port_bits)

    def _shift(self, accumulator, bit, bits_seen):
        return (accumulator << 1) | bit

    def _output_busy(self, state, direction):
        return state.owner[direction] is not None or state.draining[direction]

    def _leaves_hold(self, signals):
        return not signals.clm

    def _abort_forward(self, signals):
        return IDLE_FORWARD

    def step(self, state, forward_in, backward_in):
        """
        Advance one clock cycle. forward_in is indexed by input port and
        backward_in by output port; both are the values sampled this cycle.
        """
        if state.idle and not any(signals.clm for signals in forward_in):
            return state, SwitchOutputs(state.forward, state.backward)

        degree = self.degree
        ports = list(state.ports)
        bits_seen = list(state.bits_seen)
        accumulator = list(state.accumulator)
        direction = list(state.direction)
        owner = list(state.owner)
        forward = list(state.forward)
        backward = list(state.backward)
        draining = [False] * degree
        claims = {}

        for q in range(degree):
            signals = forward_in[q]
            port = state.ports[q]
            if port is PortState.WAIT:
                if not signals.clm:
                    bits_seen[q] = accumulator[q] = 0
                elif signals.act:
                    accumulator[q] = self._shift(accumulator[q], signals.dat & 1, bits_seen[q])
                    bits_seen[q] += 1
                    if bits_seen[q] == self.port_bits:
                        claims.setdefault(accumulator[q], []).append(q)
                backward[q] = READY_BACKWARD
            elif port is PortState.ACCEPT:
                r = state.direction[q]
                if not signals.clm:
                    ports[q] = PortState.WAIT
                    direction[q] = None
                    owner[r] = None
                    forward[r] = IDLE_FORWARD
                    backward[q] = READY_BACKWARD
                elif backward_in[r].err:
                    ports[q] = PortState.ABORT
                    owner[r] = None
                    draining[r] = True
                    forward[r] = self._abort_forward(signals)
                    backward[q] = ERROR_BACKWARD
                else:
                    forward[r] = signals
                    backward[q] = BackwardSignals(err=0, cts=backward_in[r].cts)
            else:
                if self._leaves_hold(signals):
                    ports[q] = PortState.WAIT
                    direction[q] = None
                    bits_seen[q] = accumulator[q] = 0
                    backward[q] = READY_BACKWARD
                else:
                    backward[q] = ERROR_BACKWARD
                    if port is PortState.ABORT and state.direction[q] is not None:
                        leaked = self._abort_forward(signals)
                        if not leaked.quiet:
                            forward[state.direction[q]] = leaked

        for r, claimants in claims.items():
            for q in claimants:
                bits_seen[q] = accumulator[q] = 0
            winner = None if self._output_busy(state, r) else min(claimants)
            for q in claimants:
                if q == winner:
                    ports[q] = PortState.ACCEPT
                    direction[q] = r
                    owner[r] = q
                    forward[r] = HOLD_FORWARD
                    backward[q] = BackwardSignals(err=0, cts=backward_in[r].cts)
                else:
                    ports[q] = PortState.REJECT
                    direction[q] = None
                    backward[q] = ERROR_BACKWARD
                    logger.debug('input %d rejected claiming output %d', q, r)

        next_state = SwitchState(
            port_bits=self.port_bits,
            ports=tuple(ports),
            bits_seen=tuple(bits_seen),
            accumulator=tuple(accumulator),
            direction=tuple(direction),
            clm_seen=tuple(signals.clm for signals in forward_in),
            owner=tuple(owner),
            draining=tuple(draining),
            forward=tuple(forward),
            backward=tuple(backward),
        )
        return next_state, SwitchOutputs(next_state.forward, next_state.backward)


_SWITCHES = {}


def switch_for(port_bits):
    if port_bits not in _SWITCHES:
        _SWITCHES[port_bits] = Switch(port_bits)
    return _SWITCHES[port_bits]


def step(state, forward_in, backward_in):
    return switch_for(state.port_bits).step(state, forward_in, backward_in)


def is_idle(state):
    """
    True when every input is in Wait with no claim bits collected and no
    clm asserted.
    """
    return state.idle


def with_ports(state, **changes):
    """
    Copy of state with some per-port tuples replaced; used to set up test scenarios.
    """
    return replace(state, **{key: tuple(value) for key, value in changes.items()})
