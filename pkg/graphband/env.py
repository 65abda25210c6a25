"""The simulated environment: instances, contexts, graph feedback and regret."""
import logging

import numpy as np

from graphband import funcspace
from graphband import graph
from graphband import policy

logger = logging.getLogger(__name__)


class Instance(object):
    def __init__(self, function_class, fstar, actions, noise_sigma=1.0):
        actions = np.asarray(actions, dtype=float)
        if not 0 <= fstar < len(function_class):
            raise ValueError("fstar {} is not a member index".format(fstar))
        if actions.ndim != 2 or actions.shape[0] < 1:
            raise ValueError("need a non-empty action matrix")
        if actions.shape[1] != function_class.d:
            raise ValueError("actions and function class differ in dimension")
        self.function_class = function_class
        self.fstar = fstar
        self.actions = actions
        self.noise_sigma = noise_sigma

    @property
    def d(self):
        return self.function_class.d

    @property
    def action_count(self):
        return self.actions.shape[0]

    def means(self, x):
        """f*(x, a) for every action."""
        return self.function_class.values(x, self.actions, [self.fstar])[0]

    def __repr__(self):
        return "Instance(d={}, |F|={}, |A|={}, fstar={})".format(
                self.d, len(self.function_class), self.action_count, self.fstar)


class RoundRecord(object):
    def __init__(self, t, x, graph, a_t, observed, instant_regret):
        self.t = t
        self.x = x
        self.graph = graph
        self.a_t = a_t
        self.observed = observed
        self.instant_regret = instant_regret


class EpochSummary(object):
    def __init__(self, m, fhat, conf_size, lambda_m, fstar_retained):
        self.m = m
        self.fhat = fhat
        self.conf_size = conf_size
        self.lambda_m = lambda_m
        self.fstar_retained = fstar_retained

    def __repr__(self):
        return "EpochSummary(m={}, fhat={}, |F_m|={}, retained={})".format(
                self.m, self.fhat, self.conf_size, self.fstar_retained)


class RegretTrace(object):
    def __init__(self, cumulative, observation_count, epochs, nesting_violations=0,
                 rounds=None):
        self.cumulative = cumulative
        self.observation_count = observation_count
        self.epochs = epochs
        self.nesting_violations = nesting_violations
        self.rounds = rounds or []

    @property
    def final(self):
        return float(self.cumulative[-1])

    def __len__(self):
        return len(self.cumulative)


def gen_instance(d, class_size, action_count, rng, noise_sigma=1.0):
    if d < 1 or class_size < 1 or action_count < 1:
        raise ValueError("d, class_size and action_count must all be at least 1")
    function_class, fstar = funcspace.gen_function_class(d, class_size, rng)
    actions = rng.uniform(-1.0, 1.0, size=(action_count, d))
    return Instance(function_class, fstar, actions, noise_sigma)


def sample_context(d, rng):
    return rng.standard_normal(d)


def observe(instance, x, g, a_t, rng):
    """Noisy rewards of every out-neighbor of the played arm, one fresh draw each."""
    revealed = sorted(graph.out_neighbors(g, a_t))
    means = instance.means(x)[revealed]
    rewards = means + instance.noise_sigma * rng.standard_normal(len(revealed))
    return [(a, float(y)) for a, y in zip(revealed, rewards)]


def instant_regret(instance, x, a_t):
    means = instance.means(x)
    return float(np.max(means) - means[a_t])


def run_episode(instance, source, kind, T, params, rng, keep_rounds=False):
    if source.n != instance.action_count:
        raise ValueError("graph source has {} nodes but the instance has {} actions"
                         .format(source.n, instance.action_count))

    function_class = instance.function_class
    dataset = funcspace.Dataset(instance.actions, function_class)
    fixed_graph = None if source.resample_each_round else source.draw(rng)

    cumulative = np.zeros(T)
    total = 0.0
    epochs = []
    rounds = []
    nesting_violations = 0
    state = None
    for tau_prev, _, tau in policy.epoch_schedule(T):
        prev_conf = state.conf if state is not None else None
        state = policy.begin_epoch(dataset, function_class, params, state)
        if prev_conf is not None and not (
                set(state.conf.member_indices) <= set(prev_conf.member_indices)):
            nesting_violations += 1
            logger.debug("epoch %d: confidence set is not nested in epoch %d's",
                         state.m, state.m - 1)
        epochs.append(EpochSummary(state.m, state.fhat, len(state.conf),
                                   state.lambda_m, instance.fstar in state.conf))

        for t in range(tau_prev + 1, tau + 1):
            g = fixed_graph if fixed_graph is not None else source.draw(rng)
            x = sample_context(instance.d, rng)
            dist = policy.action_distribution(
                    kind, state, x, g, instance.actions, function_class, params)
            a_t = policy.sample_action(dist, rng)
            observed = observe(instance, x, g, a_t, rng)
            dataset.append(funcspace.ObservationRecord(x, observed))

            regret = instant_regret(instance, x, a_t)
            total += regret
            cumulative[t - 1] = total
            if keep_rounds:
                rounds.append(RoundRecord(t, x, g, a_t, observed, regret))

    return RegretTrace(cumulative, dataset.observation_count, epochs,
                       nesting_violations, rounds)


def retention_fraction(traces):
    """Share of (run, epoch) pairs whose confidence set kept f*."""
    flags = [epoch.fstar_retained for trace in traces for epoch in trace.epochs]
    if not flags:
        return 1.0
    return sum(flags) / float(len(flags))
