import unittest

import numpy as np

from graphband import funcspace
from graphband import graph
from graphband import selftest
from graphband import test_fixtures as fixtures
from graphband.policy import ActionDistribution


class SuitesTestCase(unittest.TestCase):
    def test_small_run_is_clean(self):
        results = selftest.run_selftest(master_seed=4, greedy_count=30, lp_count=30,
                                        iop_count=30)

        self.assertEqual([result.name for result in results], ["greedy", "lp", "iop"])
        self.assertEqual([result.checked for result in results], [30, 30, 30])
        for result in results:
            self.assertTrue(result.passed, str(result))

    def test_summary_line(self):
        self.assertEqual(str(selftest.SuiteResult("lp", 10, 2)), "lp: 10 checked, 2 violations")


class GreedyViolationsTestCase(unittest.TestCase):
    def test_clean_set(self):
        g = graph.gen_star(4)

        self.assertEqual(selftest.greedy_violations(g, [0, 1, 2, 3], [0.5, 0.0, 0.1, 0.2],
                                                    [1, 2, 3]), 0)

    def test_dependent_set(self):
        g = graph.gen_star(4)

        # Each arm observes the other.
        self.assertEqual(selftest.greedy_violations(g, [0, 1], [0.0, 0.1], [0, 1]), 2)

    def test_undominated_candidate(self):
        g = graph.FeedbackGraph.identity(3)

        self.assertEqual(selftest.greedy_violations(g, [0, 1, 2], [0.0, 0.2, 0.1], [0, 1]), 1)


class IOPViolationsTestCase(unittest.TestCase):
    def dist(self, p, q, gaps, gamma, exploration_set):
        return ActionDistribution(np.asarray(p), np.asarray(q), exploration_set, gamma, 0,
                                  np.asarray(gaps))

    def test_clean_distribution(self):
        # Two arms, gamma = 2: p = (2/3, 1/3) is the inverse-gap weighting.
        dist = self.dist([2 / 3, 1 / 3], [2 / 3, 1 / 3], [0.0, 0.5], 2.0, [0, 1])

        self.assertEqual(selftest.iop_violations(dist, [0, 1]), 0)

    def test_excess_regret(self):
        dist = self.dist([0.0, 1.0], [0.0, 1.0], [0.0, 0.5], 4.0, [0, 1])

        # 0.5 > 1/4 and arm 0 is never observed.
        self.assertEqual(selftest.iop_violations(dist, [0, 1]), 2)

    def test_underobserved_candidate(self):
        dist = self.dist([0.9, 0.1], [0.9, 0.1], [0.0, 0.0], 0.0, [0, 1])

        self.assertEqual(selftest.iop_violations(dist, [0, 1]), 1)


class RandomEpochStateTestCase(unittest.TestCase):
    def test_later_epoch(self):
        rng = fixtures.rng(2)
        function_class, _ = funcspace.gen_function_class(3, 6, rng)
        params = fixtures.params(T=64, action_count=4, class_size=6)

        for _ in range(20):
            state = selftest.random_epoch_state(rng, function_class, params)
            self.assertTrue(2 <= state.m <= 6)
            self.assertTrue(len(state.conf) >= 1)
            self.assertTrue(state.lambda_m > 0)


if __name__ == '__main__':
    unittest.main()
