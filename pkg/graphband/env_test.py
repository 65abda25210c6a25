import unittest

import mock
import numpy as np

from graphband import env
from graphband import funcspace
from graphband import graph
from graphband import test_fixtures as fixtures
from graphband.graph import GraphSource
from graphband.policy import PolicyKind


def small_instance(class_size=3, action_count=4, seed=0, noise_sigma=1.0):
    return env.gen_instance(3, class_size, action_count, fixtures.rng(seed), noise_sigma)


def episode(instance, source, kind=PolicyKind.ADACBG, T=16, seed=7, keep_rounds=False,
            use_lp=True):
    params = fixtures.params(T=T, delta=0.1, use_lp=use_lp,
                             action_count=instance.action_count,
                             class_size=len(instance.function_class))
    return env.run_episode(instance, source, kind, T, params, fixtures.rng(seed),
                           keep_rounds=keep_rounds)


class InstanceTestCase(unittest.TestCase):
    def test_shapes(self):
        instance = small_instance(class_size=5, action_count=6)

        self.assertEqual(instance.actions.shape, (6, 3))
        self.assertEqual(len(instance.function_class), 5)
        self.assertTrue(0 <= instance.fstar < 5)
        self.assertTrue(np.all(np.abs(instance.actions) <= 1.0))

    def test_means_follow_fstar(self):
        function_class, actions = fixtures.two_member_class()
        instance = env.Instance(function_class, 1, actions)

        # Member 1 is centered at 2 e_0, so x = 3 e_0 scores +1 and -1.
        np.testing.assert_allclose(instance.means(3 * fixtures.unit(2, 0)), [1.0, -1.0])

    def test_rejects_bad_fstar(self):
        function_class, actions = fixtures.two_member_class()

        with self.assertRaises(ValueError):
            env.Instance(function_class, 2, actions)

    def test_rejects_dimension_mismatch(self):
        function_class, _ = fixtures.two_member_class()

        with self.assertRaises(ValueError):
            env.Instance(function_class, 0, np.eye(3))

    def test_rejects_empty_sizes(self):
        with self.assertRaises(ValueError):
            env.gen_instance(3, 0, 4, fixtures.rng())


class ObserveTestCase(unittest.TestCase):
    def setUp(self):
        function_class, actions = fixtures.two_member_class()
        self.instance = env.Instance(function_class, 0, actions, noise_sigma=0.0)
        self.x = fixtures.unit(2, 0)

    def test_identity_reveals_played_arm(self):
        observed = env.observe(self.instance, self.x, graph.FeedbackGraph.identity(2), 1,
                               fixtures.rng())

        self.assertEqual(observed, [(1, -1.0)])

    def test_complete_reveals_everything(self):
        observed = env.observe(self.instance, self.x, graph.gen_complete(2), 1,
                               fixtures.rng())

        self.assertEqual(observed, [(0, 1.0), (1, -1.0)])

    def test_noise_is_fresh_per_arm(self):
        self.instance.noise_sigma = 1.0

        observed = env.observe(self.instance, self.x, graph.gen_complete(2), 0,
                               fixtures.rng(3))

        residuals = [y - mean for (_, y), mean in zip(observed, [1.0, -1.0])]
        self.assertNotEqual(residuals[0], residuals[1])

    def test_instant_regret(self):
        self.assertEqual(env.instant_regret(self.instance, self.x, 0), 0.0)
        self.assertEqual(env.instant_regret(self.instance, self.x, 1), 2.0)


class SampleContextTestCase(unittest.TestCase):
    def test_standard_normal(self):
        rng = fixtures.rng(11)
        contexts = np.array([env.sample_context(4, rng) for _ in range(5000)])

        self.assertEqual(contexts.shape, (5000, 4))
        np.testing.assert_allclose(contexts.mean(axis=0), np.zeros(4), atol=0.06)
        np.testing.assert_allclose(contexts.std(axis=0), np.ones(4), atol=0.06)


class RunEpisodeTestCase(unittest.TestCase):
    def test_singleton_class_has_no_regret(self):
        instance = small_instance(class_size=1)
        source = GraphSource(GraphSource.RANDOM, n=4, density=0.3)

        for kind in (PolicyKind.ADACBG, PolicyKind.REGCBG):
            trace = episode(instance, source, kind=kind, T=32)
            self.assertEqual(trace.final, 0.0)
            self.assertEqual(len(trace), 32)

    def test_regret_is_nondecreasing(self):
        instance = small_instance(class_size=6, action_count=5)
        source = GraphSource(GraphSource.CLIQUE_GROUP, n=5, cliques=2)

        for kind in PolicyKind.KINDS:
            trace = episode(instance, source, kind=kind, T=40)
            self.assertTrue(np.all(np.diff(trace.cumulative) >= 0))
            self.assertTrue(trace.cumulative[0] >= 0)

    def test_deterministic(self):
        instance = small_instance(class_size=4)
        source = GraphSource(GraphSource.RANDOM, n=4, density=0.5)

        first = episode(instance, source, T=24, seed=5)
        second = episode(instance, source, T=24, seed=5)

        np.testing.assert_array_equal(first.cumulative, second.cumulative)
        self.assertEqual(first.observation_count, second.observation_count)

    def test_observation_count_matches_out_degrees(self):
        instance = small_instance(class_size=4)
        source = GraphSource(GraphSource.RANDOM, n=4, density=0.4)

        trace = episode(instance, source, T=20, keep_rounds=True)

        self.assertEqual(len(trace.rounds), 20)
        self.assertEqual(trace.observation_count,
                         sum(len(graph.out_neighbors(r.graph, r.a_t)) for r in trace.rounds))
        for record in trace.rounds:
            self.assertEqual([a for a, _ in record.observed],
                             sorted(graph.out_neighbors(record.graph, record.a_t)))

    def test_complete_graph_reveals_every_arm(self):
        instance = small_instance(action_count=4)
        source = GraphSource(GraphSource.COMPLETE, n=4)

        self.assertEqual(episode(instance, source, T=10).observation_count, 40)

    def test_fixed_graph_is_drawn_once(self):
        instance = small_instance()
        source = GraphSource(GraphSource.RANDOM, n=4, density=0.5, resample_each_round=False)

        with mock.patch.object(source, "draw", wraps=source.draw) as draw:
            trace = episode(instance, source, T=12, keep_rounds=True)

        self.assertEqual(draw.call_count, 1)
        self.assertEqual(len(set(record.graph for record in trace.rounds)), 1)

    def test_resampled_graph_is_drawn_each_round(self):
        instance = small_instance()
        source = GraphSource(GraphSource.RANDOM, n=4, density=0.5)

        with mock.patch.object(source, "draw", wraps=source.draw) as draw:
            episode(instance, source, T=12)

        self.assertEqual(draw.call_count, 12)

    def test_noiseless_rewards_pin_the_oracle_after_first_epoch(self):
        # The members differ by 2 on every action, so one noiseless observation
        # is enough to tell them apart.
        function_class, actions = fixtures.two_member_class()
        instance = env.Instance(function_class, 1, actions, noise_sigma=0.0)
        source = GraphSource(GraphSource.COMPLETE, n=2)

        trace = episode(instance, source, T=16)

        self.assertEqual([epoch.m for epoch in trace.epochs], [1, 2, 3, 4])
        self.assertEqual([epoch.fhat for epoch in trace.epochs[1:]], [instance.fstar] * 3)
        self.assertTrue(all(epoch.fstar_retained for epoch in trace.epochs))

    def test_epoch_summaries(self):
        instance = small_instance(class_size=5)
        source = GraphSource(GraphSource.STAR, n=4)

        trace = episode(instance, source, T=16)

        self.assertEqual([epoch.m for epoch in trace.epochs], [1, 2, 3, 4])
        self.assertEqual(trace.epochs[0].lambda_m, 1.0)
        self.assertEqual(trace.epochs[0].conf_size, 5)
        self.assertTrue(trace.epochs[0].fstar_retained)

    def test_counts_nesting_violations(self):
        instance = small_instance(class_size=2)
        source = GraphSource(GraphSource.COMPLETE, n=4)
        growing = [funcspace.ConfidenceSet([0], 0.0), funcspace.ConfidenceSet([0, 1], 0.0)]

        with mock.patch.object(funcspace, "confidence_set", side_effect=growing):
            trace = episode(instance, source, T=4)

        self.assertEqual(trace.nesting_violations, 1)

    def test_rejects_mismatched_source(self):
        with self.assertRaises(ValueError):
            episode(small_instance(action_count=4), GraphSource(GraphSource.COMPLETE, n=5))


class RetentionTestCase(unittest.TestCase):
    def test_fraction_over_all_epochs(self):
        traces = [fixtures.trace([0.0, 1.0], retained=(True, False)),
                  fixtures.trace([0.0, 1.0], retained=(True,))]

        self.assertAlmostEqual(env.retention_fraction(traces), 2 / 3)

    def test_no_epochs(self):
        self.assertEqual(env.retention_fraction([]), 1.0)


if __name__ == '__main__':
    unittest.main()
