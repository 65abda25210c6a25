import unittest

import mock
import numpy as np
from scipy.optimize import linprog

from graphband import graph
from graphband import lp
from graphband import test_fixtures as fixtures
from graphband.lp import DenseLP, LPStatus


def star3_lp():
    return lp.build_sampling_lp(graph.gen_star(3), [0.1, 0.0, 0.3], [0.0, 0.8, 0.2], 1)


class SimplexTestCase(unittest.TestCase):
    def test_two_variables(self):
        solution = lp.simplex_solve(DenseLP([1.0, 0.0], []))

        self.assertTrue(solution.optimal)
        np.testing.assert_allclose(solution.x, [0.0, 1.0])
        self.assertAlmostEqual(solution.objective, 0.0)

    def test_face_of_simplex(self):
        problem = DenseLP([0.1, 0.0, 0.3], [([1.0, 0.0, 1.0], 0.2)])

        solution = lp.simplex_solve(problem)

        self.assertTrue(solution.optimal)
        np.testing.assert_allclose(solution.x, [0.2, 0.8, 0.0], atol=1e-12)
        self.assertAlmostEqual(solution.objective, 0.02)

    def test_infeasible(self):
        solution = lp.simplex_solve(DenseLP([0.0, 0.0], [([1.0, 0.0], 2.0)]))

        self.assertEqual(solution.status, LPStatus.INFEASIBLE)
        self.assertFalse(solution.optimal)

    def test_negative_coefficients(self):
        # x0 - x1 >= 0.5 with x0 + x1 = 1 forces x0 >= 0.75.
        solution = lp.simplex_solve(DenseLP([1.0, 0.0], [([1.0, -1.0], 0.5)]))

        np.testing.assert_allclose(solution.x, [0.75, 0.25])

    def test_variable_cap(self):
        with self.assertRaises(lp.LPTooLargeError):
            lp.simplex_solve(DenseLP(np.zeros(5), []), max_variables=4)

    def test_iteration_cap(self):
        problem = star3_lp()

        self.assertEqual(lp.simplex_solve(problem, max_iterations=0).status,
                         LPStatus.NUMERICAL_FAILURE)

    def test_non_finite_rhs(self):
        with self.assertRaises(ValueError):
            DenseLP([0.0, 1.0], [([1.0, 0.0], float("inf"))])

    def test_agrees_with_scipy(self):
        rng = fixtures.rng(31)
        for _ in range(50):
            n = int(rng.integers(2, 15))
            g = graph.FeedbackGraph(rng.random((n, n)) < 0.3)
            a_hat = int(rng.integers(n))
            gaps = rng.random(n)
            gaps[a_hat] = 0.0
            problem = lp.build_sampling_lp(g, gaps, rng.dirichlet(np.ones(n)), a_hat)

            solution = lp.simplex_solve(problem)
            reference = linprog(problem.costs,
                                A_ub=-problem.geq_matrix, b_ub=-problem.geq_rhs,
                                A_eq=np.ones((1, n)), b_eq=[1.0],
                                bounds=[(0, None)] * n, method="highs")

            self.assertTrue(solution.optimal)
            self.assertAlmostEqual(solution.objective, reference.fun, places=8)


class VertexEnumerationTestCase(unittest.TestCase):
    def test_star_lp(self):
        solution = lp.vertex_enumerate_oracle(star3_lp())

        self.assertAlmostEqual(solution.objective, 0.02)
        np.testing.assert_allclose(solution.x, [0.2, 0.8, 0.0], atol=1e-12)

    def test_unique_feasible_point(self):
        # Every coordinate is pinned from below and the bounds add up to 1.
        p_tilde = np.array([0.5, 0.3, 0.2])
        problem = DenseLP([0.0, 0.2, 0.7], [(row, p) for row, p in zip(np.eye(3), p_tilde)])

        solution = lp.vertex_enumerate_oracle(problem)

        np.testing.assert_allclose(solution.x, p_tilde)

    def test_refuses_large(self):
        with self.assertRaises(lp.LPTooLargeError):
            lp.vertex_enumerate_oracle(DenseLP(np.zeros(7), []))

    def test_infeasible(self):
        self.assertEqual(lp.vertex_enumerate_oracle(DenseLP([0.0], [([1.0], 2.0)])).status,
                         LPStatus.INFEASIBLE)

    def test_random_lps_match_simplex(self):
        rng = fixtures.rng(32)
        for _ in range(500):
            n = int(rng.integers(1, 7))
            g = graph.FeedbackGraph(rng.random((n, n)) < rng.uniform(0.0, 0.7))
            a_hat = int(rng.integers(n))
            gaps = rng.random(n)
            gaps[a_hat] = 0.0
            p_tilde = rng.dirichlet(np.ones(n))
            problem = lp.build_sampling_lp(g, gaps, p_tilde, a_hat)

            solution = lp.simplex_solve(problem)
            oracle = lp.vertex_enumerate_oracle(problem)

            self.assertTrue(solution.optimal)
            self.assertAlmostEqual(solution.objective, oracle.objective, delta=1e-8)
            self.assertLessEqual(solution.objective,
                                 lp.lp_objective(problem, p_tilde) + 1e-9)
            self.assertLessEqual(max(lp.lp_residuals(problem, solution.x)), 1e-9)
            self.assertAlmostEqual(np.sum(solution.x), 1.0, delta=1e-9)
            self.assertTrue(np.all(solution.x >= 0))


class SamplingLPTestCase(unittest.TestCase):
    def test_identity_graph_keeps_baseline(self):
        p_tilde = np.array([0.5, 0.2, 0.3])
        problem = lp.build_sampling_lp(graph.FeedbackGraph.identity(3), [0.0, 0.4, 0.9],
                                       p_tilde, 0)

        self.assertEqual(len(problem.geq_constraints), 2)
        np.testing.assert_allclose(lp.simplex_solve(problem).x, p_tilde)

    def test_center_absorbs_leaf(self):
        solution = lp.simplex_solve(star3_lp())

        np.testing.assert_allclose(solution.x, [0.2, 0.8, 0.0], atol=1e-12)
        self.assertAlmostEqual(solution.objective, 0.02)

    def test_baseline_is_feasible(self):
        rng = fixtures.rng(33)
        for _ in range(100):
            n = int(rng.integers(1, 10))
            g = graph.FeedbackGraph(rng.random((n, n)) < 0.4)
            p_tilde = rng.dirichlet(np.ones(n))
            a_hat = int(rng.integers(n))
            problem = lp.build_sampling_lp(g, rng.random(n), p_tilde, a_hat, cover_greedy=True)

            self.assertLessEqual(lp.lp_residuals(problem, p_tilde)[0], 1e-12)

    def test_cover_greedy_adds_row(self):
        problem = lp.build_sampling_lp(graph.gen_star(3), [0.1, 0.0, 0.3], [0.0, 0.8, 0.2], 1,
                                       cover_greedy=True)

        self.assertEqual(len(problem.geq_constraints), 3)

    def test_fallback_on_failure(self):
        fallback = [0.0, 0.8, 0.2]
        failed = lp.LPSolution(None, None, LPStatus.NUMERICAL_FAILURE)

        with self.assertLogs("graphband.lp", level="WARNING"):
            with mock.patch.object(lp, "simplex_solve", return_value=failed):
                p = lp.solve_sampling_lp(star3_lp(), fallback)

        np.testing.assert_allclose(p, fallback)


if __name__ == '__main__':
    unittest.main()
