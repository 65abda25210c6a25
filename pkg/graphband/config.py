import copy

from graphband import graph
from graphband import policy
from graphband import util

TRUE_STRINGS = ("1", "true", "yes", "on")
FALSE_STRINGS = ("0", "false", "no", "off")


class ConfigError(Exception):
    def __init__(self, key, value, reason):
        super(ConfigError, self).__init__(
                "Invalid value {!r} for {}: {}".format(value, key, reason))
        self.key = key
        self.value = value


class ConfigField(object):
    """One experiment setting: how to parse it, its default and its constraint.

    check(value) returns None when the value is acceptable, otherwise a reason.
    """

    def __init__(self, name, parse, default=None, check=None, aliases=(), help=None):
        self.name = name
        self._parse = parse
        self.default = default
        self._check = check
        self.aliases = tuple(aliases)
        self.help = help

    def flags(self):
        names = [self.name]
        if "_" in self.name:
            names.append(self.name.replace("_", "-"))
        names.extend(self.aliases)
        return ["--" + name for name in names]

    def get_value(self, raw):
        data = raw.get(self.name)
        if data is None:
            return self.default
        if isinstance(data, str):
            try:
                data = self._parse(data.strip())
            except ValueError as error:
                raise ConfigError(self.name, data, str(error))
        if self._check is not None:
            reason = self._check(data)
            if reason:
                raise ConfigError(self.name, data, reason)
        return data


def parse_bool(text):
    lowered = text.lower()
    if lowered in TRUE_STRINGS:
        return True
    if lowered in FALSE_STRINGS:
        return False
    raise ValueError("expected a boolean")


def parse_optional(parse):
    def parse_or_none(text):
        if text.lower() in ("", "none"):
            return None
        return parse(text)
    return parse_or_none


def parse_policies(text):
    kinds = [kind.strip() for kind in text.split(",") if kind.strip()]
    if not kinds:
        raise ValueError("at least one policy is required")
    for kind in kinds:
        if kind not in policy.PolicyKind.KINDS:
            raise ValueError("unknown policy {!r}, choose from {}".format(
                kind, ", ".join(policy.PolicyKind.KINDS)))
    return kinds


def at_least(minimum):
    def check(value):
        if value is not None and value < minimum:
            return "must be at least {}".format(minimum)
    return check


def one_of(choices):
    def check(value):
        if value not in choices:
            return "choose from {}".format(", ".join(choices))
    return check


def _open_unit_interval(value):
    if not 0 < value < 1:
        return "must lie strictly between 0 and 1"


def _positive(value):
    if value <= 0:
        return "must be positive"


def _nonnegative(value):
    if value < 0:
        return "must be nonnegative"


def default_fields():
    return [
        ConfigField("T", int, 2048, at_least(1), help="Number of rounds."),
        ConfigField("repeats", int, 40, at_least(1),
                    help="Independent instances per policy."),
        ConfigField("d", int, 10, at_least(1), help="Context and action dimension."),
        ConfigField("class_size", int, 50, at_least(1),
                    help="Members of the function class."),
        ConfigField("action_count", int, 20, at_least(1), aliases=("actions",),
                    help="Number of actions (graph nodes)."),
        ConfigField("graph", str, graph.GraphSource.CLIQUE_GROUP,
                    one_of(graph.GraphSource.KINDS), help="Feedback graph kind."),
        ConfigField("cliques", int, 5, at_least(1),
                    help="Clique count for clique_group graphs."),
        ConfigField("density", float, 0.1, _nonnegative,
                    help="Dense factor for random graphs."),
        ConfigField("edges", parse_optional(str), None,
                    help="Edge-list file to carve a subgraph pool from."),
        ConfigField("pool_dir", parse_optional(str), None,
                    help="Directory of a persisted subgraph pool."),
        ConfigField("pool_size", int, 100, at_least(1),
                    help="Subgraphs in a pool built from an edge list."),
        ConfigField("subgraph_size", int, 100, at_least(1),
                    help="Nodes per pooled subgraph."),
        ConfigField("resample", parse_bool, True,
                    help="Draw a fresh graph every round."),
        ConfigField("shuffle_labels", parse_bool, False,
                    help="Randomly relabel graph nodes on every draw."),
        ConfigField("graph_label", parse_optional(str), None,
                    help="Graph tag used in output file names."),
        ConfigField("policy", parse_policies, [policy.PolicyKind.ADACBG],
                    aliases=("policies",),
                    help="Comma-separated policies to run on the same instances."),
        ConfigField("eta", float, 1.0, _positive, help="Exploration constant."),
        ConfigField("delta", float, 0.1, _open_unit_interval,
                    help="Confidence parameter."),
        ConfigField("use_lp", parse_bool, True,
                    help="Refine sampling probabilities with the LP."),
        ConfigField("noise_sigma", float, 1.0, _nonnegative,
                    help="Standard deviation of reward noise."),
        ConfigField("master_seed", int, 0, at_least(0), aliases=("seed",),
                    help="Seed every random stream derives from."),
        ConfigField("output_dir", str, ".", help="Where curve files are written."),
        ConfigField("round_log", parse_bool, False,
                    help="Also write a per-round table for the first repeat of each policy."),
        ConfigField("threads", parse_optional(int), None, at_least(1),
                    help="Worker cap; defaults to $" + util.THREADS_ENV_VAR + "."),
    ]


class ExperimentConfig(object):
    def __init__(self, raw=None, fields=None):
        raw = raw or {}
        self._fields = fields if fields is not None else default_fields()
        known = set(field.name for field in self._fields)
        for key in raw:
            if key not in known:
                raise ConfigError(key, raw[key], "unknown setting")
        for field in self._fields:
            setattr(self, field.name, field.get_value(raw))
        self._validate()

    def _validate(self):
        if self.graph == graph.GraphSource.POOL and not (self.edges or self.pool_dir):
            raise ConfigError("graph", self.graph, "pool graphs need edges or pool_dir")
        if self.graph == graph.GraphSource.CLIQUE_GROUP and self.cliques > self.action_count:
            raise ConfigError("cliques", self.cliques,
                              "cannot exceed action_count ({})".format(self.action_count))
        if self.graph == graph.GraphSource.STAR and self.action_count < 2:
            raise ConfigError("action_count", self.action_count, "a star needs 2 nodes")

    @property
    def policies(self):
        return self.policy

    def worker_count(self, environ=None):
        cap = self.threads if self.threads is not None else util.thread_cap(environ)
        return max(1, min(self.repeats, cap))

    def algorithm_params(self):
        return policy.AlgorithmParams(self.T, self.eta, self.delta, self.use_lp,
                                      self.action_count, self.class_size)

    def with_overrides(self, **values):
        overridden = copy.copy(self)
        for key, value in values.items():
            if not hasattr(self, key):
                raise ConfigError(key, value, "unknown setting")
            setattr(overridden, key, value)
        overridden._validate()
        return overridden

    def items(self):
        return [(field.name, getattr(self, field.name)) for field in self._fields]

    def describe(self):
        return "\n".join("{} = {}".format(name, ",".join(value)
                                          if isinstance(value, list) else value)
                         for name, value in self.items())


def load_config_file(path):
    """Raw settings from a flat 'key = value' file."""
    raw = {}
    with open(path) as config_file:
        for line_number, line in enumerate(config_file, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError("{}:{}".format(path, line_number), stripped,
                                  "expected key = value")
            key, value = stripped.split("=", 1)
            raw[key.strip()] = value.strip()
    return raw


def resolve_config(file_values=None, flag_values=None, fields=None):
    """Defaults < config file < flags; flags left as None do not override."""
    merged = dict(file_values or {})
    for key, value in (flag_values or {}).items():
        if value is not None:
            merged[key] = value
    return ExperimentConfig(merged, fields)
