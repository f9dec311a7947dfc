from dataclasses import replace

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from noc.exceptions import HeaderError, TopologyError, WiringError
from noc.models.topology import (
    NetworkSpec, WiringMap, build_topology, find_header, plan_stages, split_header, stage_bits,
    switch_count_table, trace_route, validate, wire_boundary,
)

NETWORKS = [(4, 1), (8, 1), (8, 2), (16, 1), (16, 2), (32, 2), (32, 3), (64, 2)]


class StagePlanTests(SimpleTestCase):
    def test_stage_bits(self):
        self.assertEqual(stage_bits(32, 2), [2, 2, 1, 2, 2])
        self.assertEqual(stage_bits(8, 2), [2, 1, 2])
        self.assertEqual(stage_bits(4, 1), [1, 1, 1])
        self.assertEqual(stage_bits(16, 2), [2, 2, 2])
        self.assertEqual(len(stage_bits(64, 1)), 11)

    def test_describe_mixed_plan(self):
        self.assertEqual(plan_stages(32, 2).describe(),
                         '5 stages: 4-port ×8, 4-port ×8, 2-port ×16, 4-port ×8, 4-port ×8; P=9')

    def test_describe_uniform_plan(self):
        self.assertEqual(plan_stages(8, 1).describe(), '5 stages of 2-port switches; P=5')

    def test_header_bits(self):
        self.assertEqual(plan_stages(4, 1).total_header_bits, 3)
        self.assertEqual(plan_stages(8, 2).total_header_bits, 5)
        self.assertEqual(plan_stages(64, 1).total_header_bits, 11)

    def test_invalid_specs(self):
        for nodes, bits in ((6, 1), (2, 1), (0, 1), (4, 3), (8, 0)):
            with self.assertRaises(TopologyError):
                NetworkSpec(nodes, bits)

    def test_switch_count_table(self):
        self.assertEqual(switch_count_table([8], [1]), [(8, 1, 5, 20, 5)])
        rows = switch_count_table([4, 8], [1, 2, 3])
        self.assertIn((8, 2, 3, 8, 5), rows)
        self.assertIn((8, 3, 1, 1, 3), rows)
        self.assertNotIn(4, [row[0] for row in rows if row[1] == 3])


class WiringTests(SimpleTestCase):
    def test_four_node_boundary(self):
        spec = NetworkSpec(4, 1)
        self.assertEqual(wire_boundary(0, spec, plan_stages(4, 1)), (0, 2, 1, 3))

    def test_eight_node_outer_boundary(self):
        spec = NetworkSpec(8, 1)
        self.assertEqual(wire_boundary(1, spec, plan_stages(8, 1))[4], 1)

    def test_boundary_index_out_of_range(self):
        spec = NetworkSpec(8, 1)
        with self.assertRaises(WiringError):
            wire_boundary(2, spec, plan_stages(8, 1))

    def test_eight_node_network_size(self):
        topology = build_topology(NetworkSpec(8, 1))
        self.assertEqual(topology.plan.switch_total, 20)
        self.assertEqual(len(topology.wiring.boundaries), 4)
        for boundary in topology.wiring.boundaries:
            self.assertEqual(sorted(boundary), list(range(8)))

    def test_every_first_stage_switch_reaches_every_node(self):
        for nodes, bits in NETWORKS:
            topology = build_topology(NetworkSpec(nodes, bits))
            self.assertEqual(set(topology.reach[0]), {(1 << nodes) - 1}, (nodes, bits))

    def test_validate_structure(self):
        for nodes, bits in NETWORKS:
            report = validate(build_topology(NetworkSpec(nodes, bits)), exhaustive_limit=0)
            self.assertTrue(report.passed, [check for check in report.checks if not check.passed])

    def test_validate_routes_every_permutation_of_four_nodes(self):
        report = validate(build_topology(NetworkSpec(4, 1)))
        self.assertTrue(report.passed)
        self.assertEqual(report.permutations, 24)
        self.assertEqual(report.routable, 24)

    def test_duplicated_boundary_entry_fails_bijection(self):
        topology = build_topology(NetworkSpec(8, 1))
        boundaries = [list(boundary) for boundary in topology.wiring.boundaries]
        boundaries[0][1] = boundaries[0][0]
        broken = replace(topology, wiring=WiringMap(tuple(tuple(boundary) for boundary in boundaries)))
        report = validate(broken)
        self.assertFalse(report.passed)
        failed = [check.name for check in report.checks if not check.passed]
        self.assertIn('boundary 0 bijection', failed)
        self.assertNotIn('boundary 1 bijection', failed)
        self.assertEqual(report.permutations, 0)


class HeaderTests(SimpleTestCase):
    def test_known_headers(self):
        self.assertEqual(trace_route(build_topology(NetworkSpec(8, 1)), 0, '10001').destination, 1)
        self.assertEqual(trace_route(build_topology(NetworkSpec(8, 2)), 0, '10001').destination, 1)

    def test_path_hops(self):
        path = trace_route(build_topology(NetworkSpec(8, 1)), 0, '10001')
        self.assertEqual([hop.stage for hop in path.hops], [0, 1, 2, 3, 4])
        self.assertEqual([hop.out_port for hop in path.hops], [1, 0, 0, 0, 1])
        self.assertEqual(len(path.links(build_topology(NetworkSpec(8, 1)))), 5)

    def test_split_header(self):
        self.assertEqual(split_header('10001', [2, 1, 2]), [2, 0, 1])
        with self.assertRaises(HeaderError):
            split_header('1000', [2, 1, 2])
        with self.assertRaises(HeaderError):
            split_header('10a01', [2, 1, 2])

    def test_avoiding_every_first_link_finds_nothing(self):
        topology = build_topology(NetworkSpec(8, 1))
        self.assertIsNone(find_header(topology, 0, 5, avoid=frozenset({(0, 0), (0, 1)})))

    @given(st.sampled_from(NETWORKS), st.data())
    @settings(max_examples=60, deadline=None)
    def test_found_header_reaches_destination(self, network, data):
        topology = build_topology(NetworkSpec(*network))
        source = data.draw(st.integers(0, topology.n_nodes - 1))
        destination = data.draw(st.integers(0, topology.n_nodes - 1))
        header = find_header(topology, source, destination)
        self.assertEqual(len(header), topology.header_bits)
        self.assertEqual(trace_route(topology, source, header).destination, destination)
