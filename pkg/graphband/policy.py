"""Sampling rules: AdaCB.G and the policies it is compared against.

Every policy works epoch by epoch. begin_epoch refits the oracle and the
confidence set at each epoch boundary; the action_distribution_* functions turn
one context and one feedback graph into sampling probabilities.
"""
import logging
import math

import numpy as np

from graphband import funcspace
from graphband import graph
from graphband import lp
from graphband.util import ceil_log2

logger = logging.getLogger(__name__)


class PolicyKind(object):
    ADACBG = "adacbg"
    ADACBG_FULL = "adacbg_full"
    FALCON = "falcon"
    REGCBG = "regcbg"
    KINDS = (ADACBG, ADACBG_FULL, FALCON, REGCBG)

    # Prefixes used in curve file names.
    LABELS = {
        ADACBG: "ada",
        ADACBG_FULL: "full",
        FALCON: "org",
        REGCBG: "ind",
    }

    @classmethod
    def label(cls, kind):
        return cls.LABELS[kind]


class AlgorithmParams(object):
    def __init__(self, T, eta, delta, use_lp, action_count, class_size):
        if T < 1:
            raise ValueError("T must be at least 1")
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if eta <= 0:
            raise ValueError("eta must be positive")
        self.T = T
        self.eta = eta
        self.delta = delta
        self.use_lp = use_lp
        self.action_count = action_count
        self.class_size = class_size

    def log_term(self):
        """ln(2 |A| |F| T^2 / delta), the denominator shared by every gamma."""
        return math.log(2.0 / self.delta * self.action_count * self.class_size *
                        self.T ** 2)

    def __repr__(self):
        return "AlgorithmParams(T={}, eta={}, delta={}, use_lp={})".format(
                self.T, self.eta, self.delta, self.use_lp)


class EpochState(object):
    def __init__(self, m, tau_prev, tau_prev2, t_split, fhat, conf, beta, mu,
                 mu_prev, lambda_m, prev_disagreement, disagreement):
        self.m = m
        self.tau_prev = tau_prev
        self.tau_prev2 = tau_prev2
        self.t_split = t_split
        self.fhat = fhat
        self.conf = conf
        self.beta = beta
        self.mu = mu
        self.mu_prev = mu_prev
        self.lambda_m = lambda_m
        self.prev_disagreement = prev_disagreement
        self.disagreement = disagreement

    def __repr__(self):
        return "EpochState(m={}, fhat={}, |F_m|={}, lambda={:.4g})".format(
                self.m, self.fhat, len(self.conf), self.lambda_m)


class ActionDistribution(object):
    def __init__(self, p, q, exploration_set, gamma, a_hat, gaps):
        self.p = p
        self.q = q
        self.exploration_set = exploration_set
        self.gamma = gamma
        self.a_hat = a_hat
        self.gaps = gaps

    def __repr__(self):
        return "ActionDistribution(|S|={}, gamma={:.4g}, a_hat={})".format(
                len(self.exploration_set), self.gamma, self.a_hat)


# Epochs

def _tau(m):
    return 0 if m <= 0 else 2 ** m


def _t_split(m):
    # t_0 = 0; t_m = (tau_m + tau_{m-1}) / 2 otherwise.
    return 0 if m <= 0 else (_tau(m) + _tau(m - 1)) // 2


def epoch_count(T):
    return max(1, ceil_log2(T))


def epoch_schedule(T):
    """(tau_{m-1}, t_m, tau_m) for m = 1..M; only tau_M is cut back to T."""
    if T < 1:
        raise ValueError("T must be at least 1")
    return [(_tau(m - 1), _t_split(m), min(_tau(m), T))
            for m in range(1, epoch_count(T) + 1)]


def disagreement_rate(function_class, member_indices, contexts, actions):
    """Fraction of contexts where the members disagree on the best action."""
    if not contexts:
        return 0.0
    disagreeing = sum(
            1 for x in contexts
            if len(funcspace.candidate_actions(
                function_class, member_indices, x, actions)) > 1)
    return disagreeing / float(len(contexts))


def begin_epoch(dataset, function_class, params, prev_state=None):
    """State for the epoch starting at round tau_{m-1} + 1."""
    m = 1 if prev_state is None else prev_state.m + 1
    tau_prev = _tau(m - 1)
    tau_prev2 = _tau(m - 2)
    t_split = _t_split(m - 1)

    beta = funcspace.beta_m(params.T, m, params.class_size, params.action_count,
                            params.delta)
    mu = funcspace.mu_m(m, params.T, params.delta)
    fhat = funcspace.oracle_fit(function_class, dataset, tau_prev)
    conf = funcspace.confidence_set(function_class, dataset, t_split, beta)

    window = dataset.contexts(t_split, tau_prev)
    disagreement = disagreement_rate(
            function_class, conf.member_indices, window, dataset.actions)

    if prev_state is None:
        lambda_m = 1.0
        prev_disagreement = 0.0
        mu_prev = None
    else:
        prev_disagreement = prev_state.disagreement
        mu_prev = prev_state.mu
        if window:
            lambda_m = (disagreement + mu) / math.sqrt(prev_disagreement + mu_prev)
        else:
            lambda_m = prev_state.lambda_m

    state = EpochState(m, tau_prev, tau_prev2, t_split, fhat, conf, beta, mu,
                       mu_prev, lambda_m, prev_disagreement, disagreement)
    logger.debug("epoch %d: fhat=%d |F_m|=%d beta=%.4g mu=%.4g lambda=%.4g",
                 m, fhat, len(conf), beta, mu, lambda_m)
    return state


# Exploration rates

def gamma_t(state, s_size, params, lambda_m=None):
    if state.m == 1:
        return 0.0
    if lambda_m is None:
        lambda_m = state.lambda_m
    spacing = state.tau_prev - state.tau_prev2
    return lambda_m * math.sqrt(
            params.eta * s_size * spacing / (2.0 * params.log_term()))


def full_igw_gamma(state, params):
    return math.sqrt(params.eta * params.action_count * state.tau_prev /
                     (2.0 * params.log_term()))


def baseline_probs(fhat_values, exploration_set, gamma):
    """Inverse gap weighting over the exploration set; the greedy arm takes the rest."""
    fhat_values = np.asarray(fhat_values, dtype=float)
    a_hat = int(np.argmax(fhat_values))
    if a_hat not in exploration_set:
        raise ValueError("the greedy action {} must be in the exploration set".format(a_hat))
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")

    size = len(exploration_set)
    p = np.zeros(fhat_values.shape[0])
    for a in exploration_set:
        if a != a_hat:
            p[a] = 1.0 / (size + gamma * (fhat_values[a_hat] - fhat_values[a]))
    p[a_hat] = 1.0 - np.sum(p)
    return p


# Distributions

def _greedy_view(state, x, actions, function_class):
    values = function_class.values(x, actions, [state.fhat])[0]
    a_hat = funcspace.greedy_action(function_class, state.fhat, x, actions)
    return values, a_hat, values[a_hat] - values


def _point_mass(g, a_hat, gaps, gamma):
    p = np.zeros(g.n)
    p[a_hat] = 1.0
    return ActionDistribution(p, graph.observation_probs(g, p), [a_hat], gamma,
                              a_hat, gaps)


def _candidates(state, x, actions, function_class, a_hat):
    candidates = funcspace.candidate_actions(
            function_class, state.conf.member_indices, x, actions)
    candidates.add(a_hat)
    return candidates


def action_distribution_adacbg(state, x, g, actions, function_class, params,
                               use_lp=True):
    values, a_hat, gaps = _greedy_view(state, x, actions, function_class)
    candidates = _candidates(state, x, actions, function_class, a_hat)
    if len(candidates) == 1:
        return _point_mass(g, a_hat, gaps, gamma_t(state, 1, params))

    exploration_set = graph.greedy_exploration_set(g, candidates, gaps)
    gamma = gamma_t(state, len(exploration_set), params)
    p = baseline_probs(values, exploration_set, gamma)
    if use_lp:
        p = lp.solve_sampling_lp(
                lp.build_sampling_lp(g, gaps, p, a_hat, cover_greedy=True), p)
    return ActionDistribution(p, graph.observation_probs(g, p), exploration_set,
                              gamma, a_hat, gaps)


def action_distribution_full_igw(state, x, g, actions, function_class, params,
                                 use_lp=False):
    values, a_hat, gaps = _greedy_view(state, x, actions, function_class)
    exploration_set = list(range(len(actions)))
    gamma = full_igw_gamma(state, params)
    p = baseline_probs(values, exploration_set, gamma)
    if use_lp:
        p = lp.solve_sampling_lp(
                lp.build_sampling_lp(g, gaps, p, a_hat, cover_greedy=True), p)
    return ActionDistribution(p, graph.observation_probs(g, p), exploration_set,
                              gamma, a_hat, gaps)


def action_distribution_falcon(state, x, g, actions, function_class, params):
    # Sampling ignores the graph; the extra observations still reach the oracle.
    return action_distribution_full_igw(state, x, g, actions, function_class, params,
                                        use_lp=False)


def action_distribution_regcbg(state, x, g, actions, function_class, params):
    values, a_hat, gaps = _greedy_view(state, x, actions, function_class)
    candidates = _candidates(state, x, actions, function_class, a_hat)
    if len(candidates) == 1:
        return _point_mass(g, a_hat, gaps, gamma_t(state, 1, params, lambda_m=1.0))

    exploration_set = graph.greedy_exploration_set(g, candidates, gaps, by_gap=False)
    gamma = gamma_t(state, len(exploration_set), params, lambda_m=1.0)
    p = baseline_probs(values, exploration_set, gamma)
    return ActionDistribution(p, graph.observation_probs(g, p), exploration_set,
                              gamma, a_hat, gaps)


def action_distribution(kind, state, x, g, actions, function_class, params):
    if kind == PolicyKind.ADACBG:
        return action_distribution_adacbg(
                state, x, g, actions, function_class, params, params.use_lp)
    elif kind == PolicyKind.ADACBG_FULL:
        return action_distribution_full_igw(
                state, x, g, actions, function_class, params, params.use_lp)
    elif kind == PolicyKind.FALCON:
        return action_distribution_falcon(
                state, x, g, actions, function_class, params)
    elif kind == PolicyKind.REGCBG:
        return action_distribution_regcbg(
                state, x, g, actions, function_class, params)
    raise ValueError("unknown policy kind {!r}".format(kind))


def sample_action(dist, rng):
    """Inverse-CDF draw; never lands on a zero-probability tail action."""
    cdf = np.cumsum(dist.p)
    u = rng.random() * cdf[-1]
    a = int(np.searchsorted(cdf, u, side="right"))
    return min(a, int(np.flatnonzero(dist.p > 0)[-1]))
