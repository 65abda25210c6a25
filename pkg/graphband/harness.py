"""Experiment orchestration: repeats in a worker pool, aggregation and curve files."""
import logging

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from graphband import curve_writer
from graphband import env
from graphband import graph
from graphband import util
from graphband.config import ConfigError
from graphband.policy import PolicyKind
from graphband.pool_store import PoolStore

logger = logging.getLogger(__name__)

# Random streams derived from (master_seed, repeat, stream).
INSTANCE_STREAM = 0
EPISODE_STREAM = 1
# Pools are shared by every repeat: (master_seed, POOL_STREAM).
POOL_STREAM = 2 ** 31

SWEEP_SUMMARY_FILE = "sweep_summary.csv"
DEFAULT_SWEEP_ACTION_COUNTS = (20, 40, 60, 80, 100)
ROUND_LOG_COLUMNS = ["t", "action", "observed", "instant_regret", "cumulative_regret"]


class AggregateCurves(object):
    def __init__(self, mean, std, final_values, retention, nesting_violations=0):
        self.mean = mean
        self.std = std
        self.upper = mean + std
        self.lower = mean - std
        self.final_mean = float(np.mean(final_values))
        self.final_std = float(np.std(final_values))
        self.retention = retention
        self.nesting_violations = nesting_violations

    @property
    def T(self):
        return len(self.mean)

    def series(self, stat):
        return {"mean": self.mean, "upper": self.upper, "lower": self.lower}[stat]

    def __repr__(self):
        return "AggregateCurves(T={}, final={:.2f} ({:.2f}))".format(
                self.T, self.final_mean, self.final_std)


def aggregate(traces):
    """Pointwise mean and population std across repeats, ordered by repeat."""
    if not traces:
        raise ValueError("nothing to aggregate")
    matrix = np.vstack([trace.cumulative for trace in traces])
    return AggregateCurves(
            matrix.mean(axis=0),
            matrix.std(axis=0),
            matrix[:, -1],
            env.retention_fraction(traces),
            sum(trace.nesting_violations for trace in traces))


def run_repeat(config, source, kind, repeat, keep_rounds=False):
    """One fresh instance and one episode; depends only on (config, kind, repeat)."""
    instance = env.gen_instance(
            config.d, config.class_size, config.action_count,
            util.derive_rng(config.master_seed, repeat, INSTANCE_STREAM),
            noise_sigma=config.noise_sigma)
    return env.run_episode(
            instance, source, kind, config.T, config.algorithm_params(),
            util.derive_rng(config.master_seed, repeat, EPISODE_STREAM),
            keep_rounds=keep_rounds)


def round_table(trace):
    """One row per kept round: the played arm, what it revealed and the regret."""
    rows = [(record.t, record.a_t, len(record.observed), record.instant_regret,
             float(trace.cumulative[record.t - 1]))
            for record in trace.rounds]
    return pd.DataFrame(rows, columns=ROUND_LOG_COLUMNS)


def build_graph_source(config):
    if config.graph != graph.GraphSource.POOL:
        return graph.GraphSource(
                config.graph,
                n=config.action_count,
                cliques=config.cliques,
                density=config.density,
                resample_each_round=config.resample,
                shuffle_labels=config.shuffle_labels,
                label=config.graph_label)

    if config.pool_dir and PoolStore(config.pool_dir).names():
        source = PoolStore(config.pool_dir).to_source(
                label=config.graph_label or graph.GraphSource.POOL)
    elif config.edges:
        source = graph.build_pool(
                graph.load_edge_list(config.edges),
                config.pool_size,
                config.subgraph_size,
                util.derive_rng(config.master_seed, POOL_STREAM),
                label=config.graph_label or graph.GraphSource.POOL)
    else:
        raise ConfigError("pool_dir", config.pool_dir, "no stored graphs found")

    if source.n != config.action_count:
        raise ConfigError("action_count", config.action_count,
                          "pool graphs have {} nodes".format(source.n))
    source.resample_each_round = config.resample
    source.shuffle_labels = config.shuffle_labels
    return source


def run_experiment(config, kind=None, source=None):
    kind = kind or config.policies[0]
    source = source or build_graph_source(config)
    traces = Parallel(n_jobs=config.worker_count())(
            delayed(run_repeat)(config, source, kind, repeat)
            for repeat in range(config.repeats))
    curves = aggregate(traces)
    logger.info("%s on %s: final regret %.2f (%.2f), retention %.3f",
                kind, source.label, curves.final_mean, curves.final_std,
                curves.retention)
    return curves


class Experiment(object):
    """Every configured policy on the same seeded instances, with curve files."""

    def __init__(self, config, writer):
        self._config = config
        self._writer = writer

        self._source_cache = None

    def graph_source(self):
        if self._source_cache is None:
            self._source_cache = build_graph_source(self._config)
        return self._source_cache

    def graph_label(self):
        return self.graph_source().label

    def curve_names(self, kind):
        return dict(
                (stat, curve_writer.curve_filename(
                    PolicyKind.label(kind), stat, self.graph_label(),
                    self._config.repeats, self._config.action_count))
                for stat in curve_writer.CURVE_STATS)

    def write_curves(self, kind, curves):
        names = self.curve_names(kind)
        return [self._writer.write_curve(curves.series(stat), names[stat])
                for stat in curve_writer.CURVE_STATS]

    def write_round_log(self, kind):
        """Per-round table of the first repeat."""
        trace = run_repeat(self._config, self.graph_source(), kind, 0, keep_rounds=True)
        name = curve_writer.round_log_filename(
                PolicyKind.label(kind), self.graph_label(), self._config.action_count)
        return self._writer.write_table(round_table(trace), name)

    def run(self):
        results = {}
        for kind in self._config.policies:
            curves = run_experiment(self._config, kind, self.graph_source())
            self.write_curves(kind, curves)
            if self._config.round_log:
                self.write_round_log(kind)
            results[kind] = curves
        return results


def sweep(config, writer, action_counts=DEFAULT_SWEEP_ACTION_COUNTS):
    """One experiment per action count; returns the summary table."""
    rows = []
    for action_count in action_counts:
        results = Experiment(
                config.with_overrides(action_count=action_count), writer).run()
        for kind in config.policies:
            curves = results[kind]
            rows.append({
                "policy": kind,
                "actions": action_count,
                "mean": curves.final_mean,
                "std": curves.final_std,
                "cell": "{:.2f} ({:.2f})".format(curves.final_mean, curves.final_std),
            })
    summary = pd.DataFrame(rows, columns=["policy", "actions", "mean", "std", "cell"])
    writer.write_table(summary, SWEEP_SUMMARY_FILE)
    return summary


def monotonicity_remarks(summary):
    """Soft check: final regret is expected to shrink or hold as actions grow."""
    remarks = []
    for kind, rows in summary.groupby("policy", sort=False):
        rows = rows.sort_values("actions")
        means = rows["mean"].tolist()
        counts = rows["actions"].tolist()
        for i in range(1, len(means)):
            if means[i] > means[i - 1]:
                remarks.append("{}: regret rose from {:.2f} at |A|={} to {:.2f} at |A|={}"
                               .format(kind, means[i - 1], counts[i - 1],
                                       means[i], counts[i]))
    return remarks
