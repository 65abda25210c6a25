import os

import pandas as pd

from graphband import util

CURVE_FILE_TEMPLATE = "{policy}_{stat}_regret_gtype_{gtype}_repeat_{repeats}_K_{actions}.csv"
CURVE_STATS = ("mean", "upper", "lower")
ROUND_LOG_TEMPLATE = "{policy}_rounds_gtype_{gtype}_K_{actions}.csv"


def curve_filename(policy_label, stat, graph_label, repeats, action_count):
    if stat not in CURVE_STATS:
        raise ValueError("unknown curve statistic {!r}".format(stat))
    return CURVE_FILE_TEMPLATE.format(
            policy=policy_label,
            stat=stat,
            gtype=util.file_safe_name(graph_label),
            repeats=repeats,
            actions=action_count)


def round_log_filename(policy_label, graph_label, action_count):
    return ROUND_LOG_TEMPLATE.format(
            policy=policy_label,
            gtype=util.file_safe_name(graph_label),
            actions=action_count)


def curve_frame(values):
    """Rows (t, value) for t = 1..len(values)."""
    return pd.DataFrame({"t": range(1, len(values) + 1), "value": list(values)})


def write_csv(series, path):
    """Header-free "t,value" lines from (t, value) pairs."""
    frame = pd.DataFrame(list(series), columns=["t", "value"])
    frame.to_csv(path, header=False, index=False, lineterminator="\n")


def read_csv(path):
    frame = pd.read_csv(path, header=None, names=["t", "value"])
    return list(zip(frame["t"].tolist(), frame["value"].tolist()))


class CurveWriter(object):
    """Writes result files under one directory.

    It supports two additional options:
      dump_csv will print the path of every file written.
      dry computes the content but never touches the disk.
    """

    def __init__(self, output_dir, dump_csv=False, dry=False):
        self._output_dir = output_dir
        self._dump_csv = dump_csv
        self._dry = dry

        self._num_writes = 0
        self._num_written = 0

    @property
    def num_writes(self):
        """Number of writes issued."""
        return self._num_writes

    @property
    def num_written(self):
        """Number of files actually written."""
        return self._num_written

    def path(self, name):
        return os.path.join(self._output_dir, name)

    def _announce(self, path):
        if self._dump_csv:
            if self._dry:
                print("# " + path)
            else:
                print(path)

    def _ensure_dir(self):
        if not os.path.isdir(self._output_dir):
            os.makedirs(self._output_dir)

    def write_curve(self, values, name):
        """One curve as "t,value" lines; returns the path."""
        self._num_writes += 1
        path = self.path(name)
        self._announce(path)
        if not self._dry:
            self._ensure_dir()
            write_csv(curve_frame(values).itertuples(index=False, name=None), path)
            self._num_written += 1
        return path

    def write_table(self, frame, name):
        """A table with its header row, for summaries."""
        self._num_writes += 1
        path = self.path(name)
        self._announce(path)
        if not self._dry:
            self._ensure_dir()
            frame.to_csv(path, index=False, lineterminator="\n")
            self._num_written += 1
        return path
