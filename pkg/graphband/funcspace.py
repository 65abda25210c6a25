"""The finite bilinear function class and the offline least-squares oracle.

Members are f(x, a) = (x - x0)^T (a - a0). The oracle is exact enumeration over
the class; a Dataset keeps running per-member losses so prefix queries are cheap.
"""
import math

import numpy as np


class BilinearFunction(object):
    def __init__(self, x0, a0):
        self.x0 = np.asarray(x0, dtype=float)
        self.a0 = np.asarray(a0, dtype=float)
        if self.x0.shape != self.a0.shape or self.x0.ndim != 1:
            raise ValueError("x0 and a0 must be vectors of the same dimension")

    @property
    def d(self):
        return self.x0.shape[0]

    def __call__(self, x, a):
        return evaluate(self, x, a)

    def __repr__(self):
        return "BilinearFunction(d={})".format(self.d)


def evaluate(f, x, a):
    return float(np.dot(np.asarray(x, dtype=float) - f.x0,
                        np.asarray(a, dtype=float) - f.a0))


class FunctionClass(object):
    """An ordered, immutable list of BilinearFunctions sharing one dimension."""

    def __init__(self, members):
        members = list(members)
        if not members:
            raise ValueError("a function class needs at least one member")
        d = members[0].d
        if any(f.d != d for f in members):
            raise ValueError("all members must share the dimension")
        self.members = members
        self.d = d
        self._x0 = np.array([f.x0 for f in members])
        self._a0 = np.array([f.a0 for f in members])
        self._x0.setflags(write=False)
        self._a0.setflags(write=False)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, index):
        return self.members[index]

    def values(self, x, actions, indices=None):
        """Matrix of f(x, a): one row per member (or per index given), one column per action."""
        x0 = self._x0 if indices is None else self._x0[list(indices)]
        a0 = self._a0 if indices is None else self._a0[list(indices)]
        w = np.asarray(x, dtype=float)[None, :] - x0
        return w @ np.asarray(actions, dtype=float).T - np.sum(w * a0, axis=1)[:, None]


def gen_function_class(d, size, rng):
    if size < 1:
        raise ValueError("class size must be at least 1")
    x0s = rng.standard_normal((size, d))
    a0s = rng.standard_normal((size, d))
    function_class = FunctionClass(
            BilinearFunction(x0, a0) for x0, a0 in zip(x0s, a0s))
    return function_class, int(rng.integers(size))


def greedy_action(function_class, index, x, actions):
    """pi_f(x); ties go to the lowest action index."""
    return int(np.argmax(function_class.values(x, actions, [index])[0]))


class ObservationRecord(object):
    """The context of one round and every (action index, reward) it revealed."""

    def __init__(self, x, observed):
        if not observed:
            raise ValueError("a round always observes at least the played arm")
        self.x = np.asarray(x, dtype=float)
        self.observed = list(observed)

    def __repr__(self):
        return "ObservationRecord(observed={})".format(self.observed)


class Dataset(object):
    """Logged observations, one record per round.

    With a function class attached, per-member cumulative losses are kept for
    every prefix length.
    """

    def __init__(self, actions, function_class=None):
        self.actions = np.asarray(actions, dtype=float)
        self.records = []
        self._function_class = function_class
        self._prefix_losses = None
        if function_class is not None:
            self._prefix_losses = [np.zeros(len(function_class))]

    def __len__(self):
        return len(self.records)

    @property
    def observation_count(self):
        return sum(len(record.observed) for record in self.records)

    def append(self, record):
        self.records.append(record)
        if self._prefix_losses is not None:
            self._prefix_losses.append(
                    self._prefix_losses[-1] +
                    record_losses(self._function_class, record, self.actions))

    def contexts(self, start, stop):
        """Contexts of rounds start+1..stop (1-based rounds)."""
        return [record.x for record in self.records[start:stop]]

    def losses(self, function_class, upto):
        if upto > len(self.records):
            raise ValueError("prefix {} exceeds dataset length {}".format(
                upto, len(self.records)))
        if self._prefix_losses is not None and function_class is self._function_class:
            return self._prefix_losses[upto]
        return member_losses(function_class, self, upto)


def record_losses(function_class, record, actions):
    indices = [a for a, _ in record.observed]
    rewards = np.array([y for _, y in record.observed])
    predictions = function_class.values(record.x, actions[indices])
    return np.sum((predictions - rewards[None, :]) ** 2, axis=1)


def member_losses(function_class, dataset, upto):
    total = np.zeros(len(function_class))
    for record in dataset.records[:upto]:
        total += record_losses(function_class, record, dataset.actions)
    return total


def cumulative_sq_loss(f, dataset, upto):
    if upto > len(dataset):
        raise ValueError("prefix exceeds dataset length")
    loss = 0.0
    for record in dataset.records[:upto]:
        for a, y in record.observed:
            loss += (evaluate(f, record.x, dataset.actions[a]) - y) ** 2
    return loss


def oracle_fit(function_class, dataset, upto):
    """Index of the least-squares member on the prefix; lowest index on ties."""
    return int(np.argmin(dataset.losses(function_class, upto)))


class ConfidenceSet(object):
    def __init__(self, member_indices, beta):
        self.member_indices = list(member_indices)
        self.beta = beta

    def __contains__(self, index):
        return index in self.member_indices

    def __len__(self):
        return len(self.member_indices)

    def __repr__(self):
        return "ConfidenceSet(size={}, beta={})".format(len(self), self.beta)


def plausible_members(losses, beta):
    return np.flatnonzero(losses <= np.min(losses) + beta).tolist()


def confidence_set(function_class, dataset, upto, beta):
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return ConfidenceSet(
            plausible_members(dataset.losses(function_class, upto), beta), beta)


def candidate_actions(function_class, member_indices, x, actions):
    """Union of argmax actions over the given members (one per member)."""
    if not member_indices:
        raise ValueError("need at least one member")
    values = function_class.values(x, actions, member_indices)
    return set(np.argmax(values, axis=1).tolist())


def beta_m(T, m, class_size, action_count, delta):
    remaining = math.log2(T) - m + 1
    return 16.0 * remaining * math.log(
            2.0 * class_size * action_count ** 2 * T ** 2 / delta)


def mu_m(m, T, delta):
    # log2 T is floored at 1 so that the single-round horizon stays finite.
    epoch_length = 2 ** m - (2 ** (m - 1) if m > 1 else 0)
    return 64.0 * math.log(4.0 / delta * max(math.log2(T), 1.0)) / epoch_length
