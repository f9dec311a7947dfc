from django.test import SimpleTestCase

from noc.exceptions import ScheduleError
from noc.models.routing import Permutation
from noc.models.tdm import (
    TdmSchedule, TdmSlot, TimingModel, all_to_all_schedule, bisection_bandwidth, broadcast_schedule, grid_shape,
    mesh_emulation_schedule, model_rows, overhead_cycles, run_schedule, slot_cycles_for, tdm_cycle_time,
    validate_schedule,
)
from noc.models.topology import NetworkSpec, build_topology

FREQUENCY = 364e6


class TimingModelTests(SimpleTestCase):
    def test_128_node_cycle(self):
        cycle_time = tdm_cycle_time(TimingModel(FREQUENCY, 0.99, 128))
        self.assertEqual(cycle_time.overhead_cycles, 26)
        self.assertAlmostEqual(cycle_time.slot_seconds * 1e6, 7.1429, delta=0.01)
        self.assertAlmostEqual(cycle_time.cycle_seconds * 1e6, 914.0, delta=914.0 * 0.005)

    def test_65536_node_cycle(self):
        cycle_time = tdm_cycle_time(TimingModel(FREQUENCY, 0.99, 65536))
        self.assertEqual(cycle_time.overhead_cycles, 62)
        self.assertAlmostEqual(cycle_time.slot_seconds * 1e6, 17.03, delta=17.03 * 0.005)
        self.assertAlmostEqual(cycle_time.cycle_seconds, 1.12, delta=1.12 * 0.005)

    def test_two_node_half_efficiency(self):
        self.assertEqual(overhead_cycles(2), 2)
        self.assertEqual(slot_cycles_for(2, 1, 0.5), 4)

    def test_wider_switches_cut_overhead(self):
        self.assertEqual(overhead_cycles(32, 2), 14)
        self.assertLess(overhead_cycles(32, 2), overhead_cycles(32, 1))

    def test_efficiency_must_be_inside_unit_interval(self):
        for efficiency in (0, 1, 1.5, -0.1):
            with self.assertRaises(ScheduleError):
                TimingModel(FREQUENCY, efficiency, 8)

    def test_model_rows(self):
        rows = model_rows([8, 128], [0.9, 0.99], FREQUENCY)
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[-1]['N'], 128)
        self.assertEqual(rows[-1]['B'], 2)
        self.assertAlmostEqual(rows[-1]['cycle_us'], 914.29, delta=0.01)

    def test_bisection_bandwidth(self):
        self.assertAlmostEqual(bisection_bandwidth(FREQUENCY, 1, 8).bisection_bits_per_s, 2.912e9)
        self.assertAlmostEqual(bisection_bandwidth(FREQUENCY, 1, 32).bisection_bits_per_s, 11.648e9)
        self.assertEqual(bisection_bandwidth(FREQUENCY, 1, 32).per_node_per_bit, FREQUENCY)
        with self.assertRaises(ScheduleError):
            bisection_bandwidth(FREQUENCY, -1, 8)


class ScheduleGeneratorTests(SimpleTestCase):
    def test_all_to_all_covers_every_pair(self):
        schedule = all_to_all_schedule(8)
        pairs = {(src, slot.permutation[src]) for slot in schedule.slots for src in range(8)}
        self.assertEqual(len(schedule), 8)
        self.assertEqual(len(pairs), 64)

    def test_grid_shape(self):
        self.assertEqual(grid_shape(16, 2), (4, 4))
        self.assertEqual(grid_shape(32, 2), (8, 4))
        self.assertEqual(grid_shape(8, 3), (2, 2, 2))
        with self.assertRaises(ScheduleError):
            grid_shape(4, 3)

    def test_mesh_slot_counts(self):
        self.assertEqual(len(mesh_emulation_schedule(16, 2)), 4)
        self.assertEqual(len(mesh_emulation_schedule(64, 3)), 6)
        self.assertEqual(len(mesh_emulation_schedule(8, 1)), 2)

    def test_mesh_shifts_wrap(self):
        schedule = mesh_emulation_schedule(16, 2)
        self.assertEqual([slot.label for slot in schedule.slots], ['east', 'west', 'north', 'south'])
        east, west, north = schedule.slots[0].permutation, schedule.slots[1].permutation, schedule.slots[2].permutation
        self.assertEqual(east[0], 1)
        self.assertEqual(east[3], 0)
        self.assertEqual(west[0], 3)
        self.assertEqual(north[0], 4)
        self.assertEqual(north[12], 0)

    def test_bad_mesh_shape(self):
        with self.assertRaises(ScheduleError):
            mesh_emulation_schedule(16, 2, shape=(2, 4))

    def test_broadcast_slots(self):
        schedule = broadcast_schedule(8, source=0)
        self.assertEqual(len(schedule), 3)
        self.assertEqual(schedule.source, 0)
        self.assertEqual(schedule.slots[0].permutation[0], 1)
        self.assertEqual(len(broadcast_schedule(1024)), 10)
        with self.assertRaises(ScheduleError):
            broadcast_schedule(8, source=8)

    def test_schedule_json(self):
        rows = all_to_all_schedule(4, cycles=32).to_json()
        self.assertEqual(rows[1], {'perm': [1, 2, 3, 0], 'cycles': 32, 'label': 'rotate 1'})


class ValidateScheduleTests(SimpleTestCase):
    def setUp(self):
        self.topology = build_topology(NetworkSpec(8, 1))

    def test_all_to_all_validates_in_simulation(self):
        report = validate_schedule(self.topology, all_to_all_schedule(8))
        self.assertTrue(report.passed)
        self.assertEqual(report.checked('routing'), 8)

    def test_short_slot_fails_setup_check(self):
        report = validate_schedule(self.topology, all_to_all_schedule(8, cycles=9), simulate=False)
        self.assertEqual(len(report.failures('setup')), 8)

    def test_slot_priorities_must_not_rise(self):
        slots = [TdmSlot(Permutation.identity(8), 64, priority=1), TdmSlot(Permutation.identity(8), 64, priority=0)]
        report = validate_schedule(self.topology, TdmSchedule(8, slots), simulate=False)
        self.assertEqual([issue.slot for issue in report.failures('S4')], [1])

    def test_route_order_follows_priorities(self):
        ordered = TdmSlot(Permutation.identity(8), 64, route_priorities=(1, 0) * 4,
                          route_order=(1, 3, 5, 7, 0, 2, 4, 6))
        unordered = TdmSlot(Permutation.identity(8), 64, route_priorities=(1, 0) * 4,
                            route_order=tuple(range(8)))
        report = validate_schedule(self.topology, TdmSchedule(8, [ordered, unordered]), simulate=False)
        self.assertEqual([issue.slot for issue in report.failures('S4')], [1])

    def test_wrong_size_slot(self):
        report = validate_schedule(self.topology, all_to_all_schedule(4), simulate=False)
        self.assertEqual(len(report.failures('permutation')), 4)


class RunScheduleTests(SimpleTestCase):
    def test_broadcast_doubles_informed_set(self):
        topology = build_topology(NetworkSpec(8, 1))
        result = run_schedule(topology, broadcast_schedule(8, cycles=20))
        self.assertEqual(result.informed_sizes, [2, 4, 8])

    def test_all_to_all_delivers_every_payload_bit(self):
        topology = build_topology(NetworkSpec(8, 1))
        result = run_schedule(topology, all_to_all_schedule(8, cycles=30))
        for slot in result.slots:
            self.assertEqual(slot.opened, 8)
            self.assertEqual(slot.delivered_bits, slot.payload_bits)
        self.assertAlmostEqual(result.utilization, 20 / 30)

    def test_slot_shorter_than_setup(self):
        with self.assertRaises(ScheduleError):
            run_schedule(build_topology(NetworkSpec(8, 1)), all_to_all_schedule(8, cycles=5))
