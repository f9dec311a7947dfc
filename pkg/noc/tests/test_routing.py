import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from noc.exceptions import HeaderError, PermutationError
from noc.models.routing import (
    Permutation, RouteHeader, RouteSet, complete_permutation, random_permutation, regroup_header,
    route_permutation, static_check, verify_routeset,
)
from noc.models.topology import NetworkSpec, build_topology, plan_stages, trace_route

NETWORKS = [(4, 1), (8, 1), (8, 2), (16, 1), (16, 2), (32, 2), (32, 3), (64, 2)]


class PermutationTests(SimpleTestCase):
    def test_bijection_required(self):
        with self.assertRaises(PermutationError):
            Permutation((0, 0, 1, 2))
        with self.assertRaises(PermutationError):
            Permutation((0, 1, 4, 2))

    def test_inverse(self):
        permutation = Permutation((2, 0, 3, 1))
        self.assertEqual(permutation.inverse.mapping, (1, 3, 0, 2))
        self.assertEqual(Permutation.identity(3).mapping, (0, 1, 2))

    def test_random_permutation_is_seeded(self):
        first = random_permutation(16, np.random.default_rng(7))
        second = random_permutation(16, np.random.default_rng(7))
        self.assertEqual(first, second)

    def test_complete_permutation(self):
        self.assertEqual(complete_permutation({0: 1}, 4).mapping, (1, 0, 2, 3))
        self.assertEqual(complete_permutation({0: 1, 1: 2}, 4).mapping, (1, 2, 0, 3))
        with self.assertRaises(PermutationError):
            complete_permutation({0: 1, 2: 1}, 4)


class HeaderTests(SimpleTestCase):
    def test_grouped_rendering(self):
        self.assertEqual(str(RouteHeader('10001', (2, 1, 2))), '10-0-01')
        self.assertEqual(RouteHeader('10001', (1,) * 5).groups, ('1', '0', '0', '0', '1'))

    def test_bad_header(self):
        with self.assertRaises(HeaderError):
            RouteHeader('1001', (2, 1, 2))

    def test_regrouped_header_reaches_same_node(self):
        narrow = build_topology(NetworkSpec(8, 1))
        wide = build_topology(NetworkSpec(8, 2))
        header = regroup_header('10001', plan_stages(8, 2))
        self.assertEqual(str(header), '10-0-01')
        self.assertEqual(trace_route(narrow, 0, '10001').destination, trace_route(wide, 0, header).destination)

    def test_routeset_json(self):
        routeset = RouteSet({0: RouteHeader('10001', (1,) * 5)})
        self.assertEqual(routeset.to_json(), {'0': '10001'})


class RoutePermutationTests(SimpleTestCase):
    def test_identity_routes_in_simulation(self):
        topology = build_topology(NetworkSpec(8, 1))
        permutation = Permutation.identity(8)
        routeset = route_permutation(topology, permutation)
        self.assertEqual(len(routeset), 8)
        report = verify_routeset(topology, routeset, permutation)
        self.assertTrue(report.passed)
        self.assertEqual(report.opened, 8)
        self.assertEqual(report.rejected, 0)

    def test_route_from_zero_to_one(self):
        topology = build_topology(NetworkSpec(8, 1))
        permutation = Permutation((1, 0, 3, 2, 5, 4, 7, 6))
        routeset = route_permutation(topology, permutation)
        self.assertEqual(trace_route(topology, 0, routeset.headers[0]).destination, 1)
        self.assertTrue(verify_routeset(topology, routeset, permutation).passed)

    def test_size_mismatch(self):
        with self.assertRaises(PermutationError):
            route_permutation(build_topology(NetworkSpec(8, 1)), Permutation.identity(4))

    def test_empty_routeset_verifies_trivially(self):
        report = verify_routeset(build_topology(NetworkSpec(4, 1)), RouteSet())
        self.assertTrue(report.passed)
        self.assertEqual(report.outcomes, [])

    def test_conflicting_routeset_detected(self):
        topology = build_topology(NetworkSpec(8, 1))
        clash = RouteSet({0: RouteHeader('10001', (1,) * 5), 1: RouteHeader('10001', (1,) * 5)})
        self.assertFalse(static_check(topology, clash))
        report = verify_routeset(topology, clash)
        self.assertFalse(report.passed)
        self.assertEqual(report.rejected, 1)

    @given(st.sampled_from(NETWORKS), st.randoms(use_true_random=False))
    @settings(max_examples=80, deadline=None)
    def test_every_permutation_routes_statically(self, network, random):
        topology = build_topology(NetworkSpec(*network))
        mapping = list(range(topology.n_nodes))
        random.shuffle(mapping)
        permutation = Permutation(tuple(mapping))
        self.assertTrue(static_check(topology, route_permutation(topology, permutation), permutation))

    @given(st.permutations(range(16)))
    @settings(max_examples=20, deadline=None)
    def test_random_permutations_open_without_rejects(self, mapping):
        topology = build_topology(NetworkSpec(16, 2))
        permutation = Permutation(tuple(mapping))
        report = verify_routeset(topology, route_permutation(topology, permutation), permutation)
        self.assertTrue(report.passed)
        self.assertEqual(report.rejected, 0)
