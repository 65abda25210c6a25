"""Property suites that check the combinatorial and LP pieces against oracles.

Each suite draws random instances from its own seeded stream and counts
violations; a healthy build reports zero everywhere.
"""
import logging

import numpy as np

from graphband import funcspace
from graphband import graph
from graphband import lp
from graphband import policy
from graphband.util import derive_rng

logger = logging.getLogger(__name__)

GREEDY_SUITE_COUNT = 200
LP_SUITE_COUNT = 500
IOP_SUITE_COUNT = 10000

OBJECTIVE_TOLERANCE = 1e-8
FEASIBILITY_TOLERANCE = 1e-9
IOP_REGRET_TOLERANCE = 1e-9
IOP_OBSERVATION_TOLERANCE = 1e-6


class SuiteResult(object):
    def __init__(self, name, checked, violations):
        self.name = name
        self.checked = checked
        self.violations = violations

    @property
    def passed(self):
        return self.violations == 0

    def __str__(self):
        return "{}: {} checked, {} violations".format(
                self.name, self.checked, self.violations)


def greedy_violations(g, candidates, gaps, exploration_set):
    """Independence, domination by a no-larger gap, and |S| <= alpha(g)."""
    violations = 0
    chosen = set(exploration_set)
    for s in exploration_set:
        if graph.out_neighbors(g, s) & (chosen - {s}):
            violations += 1
    for c in set(candidates) - chosen:
        if not any(g.adj[s, c] and gaps[s] <= gaps[c] for s in exploration_set):
            violations += 1
    if len(exploration_set) > graph.independence_number_bruteforce(g):
        violations += 1
    return violations


def greedy_suite(rng, count=GREEDY_SUITE_COUNT, max_nodes=12):
    violations = 0
    for _ in range(count):
        n = int(rng.integers(1, max_nodes + 1))
        g = graph.gen_random(n, rng.uniform(0.0, 0.6), rng)
        candidates = set(np.flatnonzero(rng.random(n) < 0.7).tolist()) or {0}
        gaps = rng.random(n)
        exploration_set = graph.greedy_exploration_set(g, candidates, gaps)
        violations += greedy_violations(g, candidates, gaps, exploration_set)
    return SuiteResult("greedy", count, violations)


def random_sampling_lp(rng, max_nodes=6):
    n = int(rng.integers(1, max_nodes + 1))
    g = graph.FeedbackGraph(rng.random((n, n)) < rng.uniform(0.0, 0.7))
    a_hat = int(rng.integers(n))
    gaps = rng.random(n)
    gaps[a_hat] = 0.0
    p_tilde = rng.dirichlet(np.ones(n))
    return lp.build_sampling_lp(g, gaps, p_tilde, a_hat), p_tilde


def lp_violations(sampling_lp, p_tilde):
    solution = lp.simplex_solve(sampling_lp)
    if not solution.optimal:
        return 1
    oracle = lp.vertex_enumerate_oracle(sampling_lp)
    violations = 0
    if not oracle.optimal or abs(solution.objective - oracle.objective) > OBJECTIVE_TOLERANCE:
        violations += 1
    if solution.objective > lp.lp_objective(sampling_lp, p_tilde) + FEASIBILITY_TOLERANCE:
        violations += 1
    if max(lp.lp_residuals(sampling_lp, solution.x)) > FEASIBILITY_TOLERANCE:
        violations += 1
    return violations


def lp_suite(rng, count=LP_SUITE_COUNT, max_nodes=6):
    violations = 0
    for _ in range(count):
        violations += lp_violations(*random_sampling_lp(rng, max_nodes))
    return SuiteResult("lp", count, violations)


def iop_violations(dist, candidates):
    """Both per-context inequalities behind the exploration guarantee."""
    violations = 0
    size = len(dist.exploration_set)
    if dist.gamma > 0:
        expected_gap = float(np.dot(dist.p, dist.gaps))
        if expected_gap > (size - 1) / dist.gamma + IOP_REGRET_TOLERANCE:
            violations += 1
    for b in candidates:
        if dist.q[b] <= 0 or (1.0 / dist.q[b] >
                              size + dist.gamma * dist.gaps[b] + IOP_OBSERVATION_TOLERANCE):
            violations += 1
    return violations


def random_epoch_state(rng, function_class, params):
    m = int(rng.integers(2, policy.epoch_count(params.T) + 1))
    members = np.flatnonzero(rng.random(len(function_class)) < 0.5).tolist()
    fhat = int(rng.integers(len(function_class)))
    conf = funcspace.ConfidenceSet(members or [fhat], 0.0)
    tau_prev, tau_prev2 = 2 ** (m - 1), (2 ** (m - 2) if m > 2 else 0)
    return policy.EpochState(m, tau_prev, tau_prev2, (tau_prev + tau_prev2) // 2,
                             fhat, conf, 0.0, 1.0, 1.0, rng.uniform(0.05, 5.0),
                             0.0, 0.0)


def iop_suite(rng, count=IOP_SUITE_COUNT, max_actions=8, d=4, class_size=8):
    violations = 0
    for _ in range(count):
        n = int(rng.integers(2, max_actions + 1))
        function_class, _ = funcspace.gen_function_class(d, class_size, rng)
        actions = rng.uniform(-1.0, 1.0, size=(n, d))
        params = policy.AlgorithmParams(2 ** 11, 1.0, 0.1, True, n, class_size)
        state = random_epoch_state(rng, function_class, params)
        g = graph.FeedbackGraph(rng.random((n, n)) < rng.uniform(0.0, 0.7))
        x = rng.standard_normal(d)

        dist = policy.action_distribution_adacbg(
                state, x, g, actions, function_class, params, use_lp=True)
        candidates = funcspace.candidate_actions(
                function_class, state.conf.member_indices, x, actions)
        candidates.add(dist.a_hat)
        violations += iop_violations(dist, candidates)
    return SuiteResult("iop", count, violations)


def run_selftest(master_seed=0, greedy_count=GREEDY_SUITE_COUNT,
                 lp_count=LP_SUITE_COUNT, iop_count=IOP_SUITE_COUNT):
    results = [
        greedy_suite(derive_rng(master_seed, 0), greedy_count),
        lp_suite(derive_rng(master_seed, 1), lp_count),
        iop_suite(derive_rng(master_seed, 2), iop_count),
    ]
    for result in results:
        logger.info("%s", result)
    return results
