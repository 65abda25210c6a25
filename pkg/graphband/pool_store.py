import os

from graphband import graph

INDEX_FILE_NAME = "index.txt"
GRAPH_FILE_TEMPLATE = "graph_{:03d}.txt"


class PoolIndexParseError(Exception):
    def __init__(self, path, line_number, line):
        super(PoolIndexParseError, self).__init__(
                "{}:{}: expected 'filename node_count', got {!r}".format(
                    path, line_number, line))
        self.path = path
        self.line_number = line_number


class PoolStore(object):
    """A directory of persisted subgraphs.

    Each graph lives in its own directed edge-list file; index.txt lists
    "filename node_count" per graph since isolated nodes leave no edge lines.
    """

    def __init__(self, directory, dry=False):
        self._directory = directory
        self._dry = dry

        self._cache = None

    def _index_path(self):
        return os.path.join(self._directory, INDEX_FILE_NAME)

    def _prime_cache(self):
        cache = {}
        if os.path.exists(self._index_path()):
            self._read_index(cache)
        self._cache = cache

    def _read_index(self, cache):
        with open(self._index_path()) as index_file:
            for line_number, line in enumerate(index_file, 1):
                tokens = line.split()
                if not tokens:
                    continue
                if len(tokens) != 2 or not tokens[1].isdigit():
                    raise PoolIndexParseError(self._index_path(), line_number, line.strip())
                name, node_count = tokens[0], int(tokens[1])
                pairs = graph.read_edge_pairs(os.path.join(self._directory, name))
                cache[name] = graph.FeedbackGraph.from_edges(node_count, pairs)

    def _write_and_cache(self, name, feedback_graph):
        if not self._dry:
            if not os.path.isdir(self._directory):
                os.makedirs(self._directory)
            with open(os.path.join(self._directory, name), "w") as graph_file:
                graph_file.write("# nodes {}\n".format(feedback_graph.n))
                for u, v in feedback_graph.edges():
                    graph_file.write("{} {}\n".format(u, v))
        self._cache[name] = feedback_graph

    def _write_index(self):
        if self._dry:
            return
        with open(self._index_path(), "w") as index_file:
            for name in sorted(self._cache):
                index_file.write("{} {}\n".format(name, self._cache[name].n))

    def names(self):
        if self._cache is None:
            self._prime_cache()
        return sorted(self._cache)

    def get(self, name):
        if self._cache is None:
            self._prime_cache()

        return self._cache.get(name)

    def add(self, name, feedback_graph):
        """Store a graph; returns True when anything was (re)written."""
        if self._cache is None:
            self._prime_cache()

        if self._cache.get(name) == feedback_graph:
            return False
        self._write_and_cache(name, feedback_graph)
        self._write_index()
        return True

    def save_source(self, source):
        written = 0
        for i, feedback_graph in enumerate(source.pool):
            if self.add(GRAPH_FILE_TEMPLATE.format(i), feedback_graph):
                written += 1
        return written

    def to_source(self, label="pool"):
        graphs = [self.get(name) for name in self.names()]
        return graph.GraphSource.from_pool(graphs, label=label)
