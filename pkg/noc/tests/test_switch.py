from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from noc.models.switch import (
    ERROR_BACKWARD, HOLD_FORWARD, IDLE_FORWARD, READY_BACKWARD, BackwardSignals, ForwardSignals, PortState,
    Switch, is_idle, step, with_ports,
)

CLAIM_ONE = ForwardSignals(clm=1, act=1, dat=1)
CLAIM_ZERO = ForwardSignals(clm=1, act=1, dat=0)
READY = (READY_BACKWARD, READY_BACKWARD)


def drive(logic, state, *cycles, backward=None):
    for forward_in in cycles:
        state, _ = logic.step(state, forward_in, backward or (READY_BACKWARD,) * logic.degree)
    return state


class ClaimTests(SimpleTestCase):
    def setUp(self):
        self.logic = Switch(1)
        self.state = self.logic.reset()

    def test_reset_is_idle(self):
        self.assertTrue(is_idle(self.state))
        self.assertEqual(self.state.ports, (PortState.WAIT, PortState.WAIT))

    def test_idle_step_keeps_state(self):
        after, outputs = self.logic.step(self.state, (IDLE_FORWARD, IDLE_FORWARD), READY)
        self.assertIs(after, self.state)
        self.assertEqual(outputs.forward, (IDLE_FORWARD, IDLE_FORWARD))

    def test_single_claim_accepted(self):
        after, outputs = self.logic.step(self.state, (CLAIM_ONE, IDLE_FORWARD), READY)
        self.assertIs(after.ports[0], PortState.ACCEPT)
        self.assertEqual(after.direction[0], 1)
        self.assertEqual(after.owner[1], 0)
        self.assertEqual(outputs.forward[1], HOLD_FORWARD)
        self.assertEqual(outputs.backward[0], READY_BACKWARD)

    def test_simultaneous_claims_lowest_input_wins(self):
        after = drive(self.logic, self.state, (CLAIM_ONE, CLAIM_ONE))
        self.assertIs(after.ports[0], PortState.ACCEPT)
        self.assertIs(after.ports[1], PortState.REJECT)
        self.assertEqual(after.backward[1], ERROR_BACKWARD)

    def test_claim_on_owned_output_rejected(self):
        held = drive(self.logic, self.state, (CLAIM_ONE, IDLE_FORWARD))
        after = drive(self.logic, held, (HOLD_FORWARD, CLAIM_ONE))
        self.assertIs(after.ports[0], PortState.ACCEPT)
        self.assertIs(after.ports[1], PortState.REJECT)

    def test_distinct_outputs_both_accepted(self):
        after = drive(self.logic, self.state, (CLAIM_ONE, CLAIM_ZERO))
        self.assertEqual(after.ports, (PortState.ACCEPT, PortState.ACCEPT))
        self.assertEqual(after.direction, (1, 0))

    def test_reject_holds_until_clm_drops(self):
        rejected = drive(self.logic, self.state, (CLAIM_ONE, CLAIM_ONE))
        still = drive(self.logic, rejected, (HOLD_FORWARD, HOLD_FORWARD), (HOLD_FORWARD, HOLD_FORWARD))
        self.assertIs(still.ports[1], PortState.REJECT)
        self.assertEqual(still.backward[1].err, 1)
        released = drive(self.logic, still, (HOLD_FORWARD, IDLE_FORWARD))
        self.assertIs(released.ports[1], PortState.WAIT)
        self.assertEqual(released.backward[1], READY_BACKWARD)

    def test_data_forwarded_after_accept(self):
        held = drive(self.logic, self.state, (CLAIM_ONE, IDLE_FORWARD))
        payload = ForwardSignals(clm=1, act=1, dat=1)
        after = drive(self.logic, held, (payload, IDLE_FORWARD))
        self.assertEqual(after.forward[1], payload)

    def test_cts_passed_back(self):
        held = drive(self.logic, self.state, (CLAIM_ONE, IDLE_FORWARD))
        after, outputs = self.logic.step(held, (HOLD_FORWARD, IDLE_FORWARD),
                                         (READY_BACKWARD, BackwardSignals(err=0, cts=0)))
        self.assertEqual(outputs.backward[0], BackwardSignals(err=0, cts=0))

    def test_release_on_clm_drop(self):
        held = drive(self.logic, self.state, (CLAIM_ONE, IDLE_FORWARD))
        after = drive(self.logic, held, (IDLE_FORWARD, IDLE_FORWARD))
        self.assertTrue(is_idle(after))


class AbortTests(SimpleTestCase):
    def setUp(self):
        self.logic = Switch(1)
        self.held = drive(self.logic, self.logic.reset(), (CLAIM_ONE, IDLE_FORWARD))

    def test_err_aborts_route(self):
        after, outputs = self.logic.step(self.held, (HOLD_FORWARD, IDLE_FORWARD),
                                         (READY_BACKWARD, ERROR_BACKWARD))
        self.assertIs(after.ports[0], PortState.ABORT)
        self.assertEqual(outputs.backward[0], ERROR_BACKWARD)
        self.assertEqual(outputs.forward[1], IDLE_FORWARD)
        self.assertIsNone(after.owner[1])
        self.assertTrue(after.draining[1])

    def test_draining_output_refuses_new_claim(self):
        aborted = drive(self.logic, self.held, (HOLD_FORWARD, IDLE_FORWARD),
                        backward=(READY_BACKWARD, ERROR_BACKWARD))
        after = drive(self.logic, aborted, (HOLD_FORWARD, CLAIM_ONE))
        self.assertIs(after.ports[1], PortState.REJECT)

    def test_abort_holds_until_clm_drops(self):
        aborted = drive(self.logic, self.held, (HOLD_FORWARD, IDLE_FORWARD),
                        backward=(READY_BACKWARD, ERROR_BACKWARD))
        held = drive(self.logic, aborted, (HOLD_FORWARD, IDLE_FORWARD))
        self.assertIs(held.ports[0], PortState.ABORT)
        self.assertEqual(held.backward[0].err, 1)
        self.assertTrue(held.forward[1].quiet)
        released = drive(self.logic, held, (IDLE_FORWARD, IDLE_FORWARD))
        self.assertTrue(is_idle(released))


class WideSwitchTests(SimpleTestCase):
    def test_direction_bits_most_significant_first(self):
        logic = Switch(2)
        idle = (IDLE_FORWARD,) * 4
        state = drive(logic, logic.reset(), (CLAIM_ONE,) + idle[1:], (CLAIM_ZERO,) + idle[1:])
        self.assertIs(state.ports[0], PortState.ACCEPT)
        self.assertEqual(state.direction[0], 2)

    def test_stall_does_not_shift(self):
        logic = Switch(2)
        idle = (IDLE_FORWARD,) * 4
        stall = ForwardSignals(clm=1, act=0, dat=0)
        state = drive(logic, logic.reset(), (CLAIM_ZERO,) + idle[1:], (stall,) + idle[1:], (CLAIM_ONE,) + idle[1:])
        self.assertEqual(state.direction[0], 1)

    def test_clm_drop_clears_partial_claim(self):
        logic = Switch(2)
        idle = (IDLE_FORWARD,) * 4
        state = drive(logic, logic.reset(), (CLAIM_ONE,) + idle[1:], idle)
        self.assertEqual(state.bits_seen[0], 0)

    def test_module_level_step(self):
        state = Switch(1).reset()
        after, _ = step(state, (CLAIM_ZERO, IDLE_FORWARD), READY)
        self.assertEqual(after.direction[0], 0)

    def test_with_ports(self):
        state = with_ports(Switch(1).reset(), ports=[PortState.REJECT, PortState.WAIT])
        self.assertIs(state.ports[0], PortState.REJECT)
        self.assertIsInstance(state.ports, tuple)


class RandomInputTests(SimpleTestCase):
    signals = st.builds(ForwardSignals, st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))
    backward = st.builds(BackwardSignals, st.integers(0, 1), st.integers(0, 1))

    @given(st.lists(st.tuples(st.tuples(signals, signals, signals, signals),
                              st.tuples(backward, backward, backward, backward)), max_size=40))
    @settings(max_examples=100, deadline=None)
    def test_no_two_accepted_inputs_share_an_output(self, cycles):
        logic = Switch(2)
        state = logic.reset()
        for forward_in, backward_in in cycles:
            state, _ = logic.step(state, forward_in, backward_in)
            directions = [state.direction[q] for q, port in enumerate(state.ports) if port is PortState.ACCEPT]
            self.assertEqual(len(directions), len(set(directions)))
            for q, port in enumerate(state.ports):
                if port in (PortState.REJECT, PortState.ABORT):
                    self.assertEqual(state.backward[q].err, 1)

    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1),
                              st.tuples(signals, signals, signals), st.tuples(backward, backward, backward)),
                    min_size=1, max_size=40))
    @settings(max_examples=100, deadline=None)
    def test_noise_on_other_ports_leaves_connection_alone(self, cycles):
        logic = Switch(2)
        idle = (IDLE_FORWARD,) * 3
        connected = drive(logic, logic.reset(), (CLAIM_ONE,) + idle, (CLAIM_ZERO,) + idle)
        self.assertIs(connected.ports[0], PortState.ACCEPT)
        self.assertEqual(connected.direction[0], 2)
        quiet, noisy = connected, connected
        for bit, cts, other_in, other_back in cycles:
            data = ForwardSignals(clm=1, act=1, dat=bit)
            link = BackwardSignals(err=0, cts=cts)
            quiet, quiet_out = logic.step(quiet, (data,) + idle, (READY_BACKWARD, READY_BACKWARD, link, READY_BACKWARD))
            noisy, noisy_out = logic.step(noisy, (data,) + other_in, other_back[:2] + (link,) + other_back[2:])
            self.assertIs(noisy.ports[0], PortState.ACCEPT)
            self.assertEqual(noisy.direction[0], 2)
            self.assertEqual(noisy.owner[2], 0)
            self.assertEqual(noisy_out.forward[2], quiet_out.forward[2])
            self.assertEqual(noisy_out.backward[0], quiet_out.backward[0])
