"""
Per-step switch monitors. Each observes (cycle, stage, switch, state before
the step, forward inputs, backward inputs, state after the step) and only
writes to its own PropertyResult.
"""
from noc.models.properties import PropertyResult
from noc.models.switch import PortState


def _location(stage, switch, port):
    return 's%d_w%d_p%d' % (stage, switch, port)


class C1Monitor:
    property_id = 'C1'

    def __init__(self):
        self.result = PropertyResult(self.property_id)

    def observe(self, cycle, stage, switch, before, forward_in, backward_in, after):
        directions = [after.direction[q] for q, port in enumerate(after.ports) if port is PortState.ACCEPT]
        if not directions:
            return
        self.result.hit()
        if len(set(directions)) != len(directions):
            self.result.fail(cycle + 1, 's%d_w%d' % (stage, switch),
                             'accepted inputs share an output: %r' % directions)


class C15Monitor:
    """
    Accept and rising err_in on the claimed output at cycle t implies Abort
    with err_out at t + 1 and a quiet claimed output at t + 2.
    """
    property_id = 'C15'

    def __init__(self):
        self.result = PropertyResult(self.property_id)
        self._last_err = {}
        self._pending = {}

    def observe(self, cycle, stage, switch, before, forward_in, backward_in, after):
        key = (stage, switch)
        last_err = self._last_err.get(key)
        due = self._pending.pop(key, ())
        for q, r in due:
            self.result.checks += 1
            if not after.forward[r].quiet:
                self.result.fail(cycle + 1, _location(stage, switch, r),
                                 'output still driven %r after abort of input %d' % (after.forward[r], q))
        pending = []
        for q, port in enumerate(before.ports):
            if port is not PortState.ACCEPT:
                continue
            r = before.direction[q]
            rose = backward_in[r].err and not (last_err is not None and last_err[r])
            if not rose or not forward_in[q].clm:
                continue
            self.result.hit()
            if after.ports[q] is not PortState.ABORT or not after.backward[q].err:
                self.result.fail(cycle + 1, _location(stage, switch, q),
                                 'expected Abort with err_out, got %s err_out=%d'
                                 % (after.ports[q].value, after.backward[q].err))
            pending.append((q, r))
        if pending:
            self._pending[key] = tuple(pending)
        self._last_err[key] = tuple(signals.err for signals in backward_in)


class RejectHoldMonitor:
    property_id = 'X1'

    def __init__(self):
        self.result = PropertyResult(self.property_id)

    def observe(self, cycle, stage, switch, before, forward_in, backward_in, after):
        for q, port in enumerate(before.ports):
            if port not in (PortState.REJECT, PortState.ABORT) or not forward_in[q].clm:
                continue
            self.result.hit()
            if after.ports[q] is not port or not after.backward[q].err:
                self.result.fail(cycle + 1, _location(stage, switch, q),
                                 '%s released while clm held' % port.value)


def switch_monitors():
    return [C1Monitor(), C15Monitor(), RejectHoldMonitor()]
