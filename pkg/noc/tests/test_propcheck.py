from django.test import SimpleTestCase

from noc.exceptions import ExhaustiveLimitError
from noc.models import propcheck
from noc.models.mutants import MUTANTS, IgnoreOwner
from noc.models.properties import PROPERTIES, CheckReport, Legality, PropertyResult, Stimulus, merge_reports
from noc.models.topology import NetworkSpec, build_topology


class ReportTests(SimpleTestCase):
    def test_status(self):
        result = PropertyResult('C1')
        self.assertEqual(result.status, 'vacuous')
        result.hit()
        self.assertEqual(result.status, 'pass')
        result.fail(3, 's0_w0', 'boom')
        self.assertEqual(result.status, 'fail')
        self.assertEqual(result.to_json()['counterexamples'][0]['cycle'], 3)

    def test_counterexamples_are_capped(self):
        result = PropertyResult('C1')
        for cycle in range(20):
            result.fail(cycle, 'x', 'y')
        self.assertEqual(result.failure_count, 20)
        self.assertEqual(len(result.failures), 5)

    def test_merge(self):
        first, second = CheckReport(), CheckReport()
        first.result('C1').hit()
        second.result('C1').hit()
        second.result('X1').fail(0, 'x', 'y')
        merged = merge_reports([first, second])
        self.assertEqual(merged.results['C1'].hits, 2)
        self.assertFalse(merged.passed)
        self.assertEqual(merged.status('X1'), 'fail')
        self.assertIsNone(merged.status('N4'))

    def test_empty_coverage_is_all_uncovered(self):
        rows = propcheck.coverage_report()
        self.assertEqual(len(rows), len(PROPERTIES))
        self.assertEqual({row.status for row in rows}, {'uncovered'})
        table = propcheck.format_table(rows)
        self.assertTrue(table.startswith('id'))
        self.assertIn('reject_on_err', table)


class CoreCampaignTests(SimpleTestCase):
    def test_protocol_stimulus(self):
        for bits in (1, 2):
            report = propcheck.check_core(bits, Stimulus(0, 5000))
            self.assertTrue(report.passed)
            for property_id in ('C1', 'C15', 'X1'):
                self.assertEqual(report.status(property_id), 'pass', (bits, property_id))

    def test_unconstrained_stimulus(self):
        report = propcheck.check_core(1, Stimulus(1, 3000, Legality.UNCONSTRAINED))
        self.assertTrue(report.passed)
        self.assertGreater(report.results['C1'].hits, 0)

    def test_same_seed_same_report(self):
        first = propcheck.check_core(1, Stimulus(5, 2000)).to_json()
        second = propcheck.check_core(1, Stimulus(5, 2000)).to_json()
        self.assertEqual(first, second)

    def test_ignore_owner_mutant_fails_c1(self):
        report = propcheck.check_core(1, Stimulus(0, 5000), switch_factory=IgnoreOwner)
        self.assertEqual(report.status('C1'), 'fail')
        self.assertTrue(report.results['C1'].failures[0].location.startswith('s0_w0'))


class NetworkCampaignTests(SimpleTestCase):
    def test_sampled_headers(self):
        report = propcheck.check_network(build_topology(NetworkSpec(8, 1)), Stimulus(0, 0), samples=64)
        self.assertTrue(report.passed)
        self.assertEqual(report.status('N4'), 'pass')
        self.assertEqual(report.status('C15'), 'pass')

    def test_exhaustive_headers(self):
        report = propcheck.check_network(build_topology(NetworkSpec(4, 1)), Stimulus(0, 0), exhaustive=True,
                                         inject_every=0)
        self.assertEqual(report.results['N4'].hits, 4 * 8)
        self.assertTrue(report.passed)

    def test_worker_processes(self):
        report = propcheck.check_network(build_topology(NetworkSpec(4, 1)), Stimulus(0, 0), samples=32,
                                         workers=2)
        self.assertTrue(report.passed)

    def test_exhaustive_permutations(self):
        report = propcheck.exhaustive_small(4)
        self.assertEqual(report.results['X2'].hits, 24)
        self.assertTrue(report.passed)

    def test_exhaustive_refused_beyond_limit(self):
        with self.assertRaises(ExhaustiveLimitError):
            propcheck.exhaustive_small(16)

    def test_random_permutations(self):
        report = propcheck.check_random_permutations(build_topology(NetworkSpec(16, 2)), Stimulus(3, 0), 10)
        self.assertEqual(report.results['X2'].hits, 10)
        self.assertTrue(report.passed)


class SystemCampaignTests(SimpleTestCase):
    def setUp(self):
        self.topology = build_topology(NetworkSpec(8, 1))
        self.stimulus = Stimulus(0, 0)

    def test_latency_bounds(self):
        self.assertEqual(propcheck.check_setup_latency(self.topology, self.stimulus, 20).status('X3'), 'pass')
        self.assertEqual(propcheck.check_error_latency(self.topology, self.stimulus, 10).status('X4'), 'pass')

    def test_flow(self):
        report = propcheck.check_flow(self.topology, self.stimulus, 8, max_payload=64)
        self.assertEqual(report.status('X5'), 'pass')
        self.assertTrue(any('undersized buffer' in note for note in report.notes))

    def test_isolation(self):
        self.assertEqual(propcheck.check_isolation(self.topology, self.stimulus, 10).status('X6'), 'pass')

    def test_equivalence(self):
        report = propcheck.check_equivalence(n_nodes=8)
        self.assertEqual(report.results['X7'].hits, 8 * 32)
        self.assertTrue(report.passed)

    def test_schedule_ordering(self):
        self.assertEqual(propcheck.check_schedule(self.topology).status('S4'), 'pass')


class MutationTests(SimpleTestCase):
    def test_every_mutant_is_killed(self):
        results = propcheck.mutation_check(seed=0, cycles=5000, samples=64)
        self.assertEqual({result.mutant for result in results}, set(MUTANTS))
        self.assertEqual([result.mutant for result in results if not result.killed], [])
