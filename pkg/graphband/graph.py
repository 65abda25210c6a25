"""Feedback graphs over the action set.

A FeedbackGraph is a directed adjacency matrix over actions with every self-loop
present: playing action u reveals the reward of every v with adj[u][v] set.
"""
import logging
import math

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

logger = logging.getLogger(__name__)

BRUTEFORCE_NODE_LIMIT = 20


class EdgeListParseError(Exception):
    def __init__(self, path, line_number, line):
        super(EdgeListParseError, self).__init__(
                "{}:{}: expected two integer node ids, got {!r}".format(
                    path, line_number, line))
        self.path = path
        self.line_number = line_number


class EmptyGraphError(Exception):
    def __init__(self, path):
        super(EmptyGraphError, self).__init__(
                "No edges found in {}".format(path))


class NoLargeComponentError(Exception):
    def __init__(self, size, largest):
        super(NoLargeComponentError, self).__init__(
                "No connected component with {} nodes (largest has {})".format(
                    size, largest))
        self.size = size
        self.largest = largest


class GraphTooLargeError(Exception):
    def __init__(self, n, limit):
        super(GraphTooLargeError, self).__init__(
                "Exhaustive search refused for {} nodes (limit {})".format(n, limit))


class FeedbackGraph(object):
    """Immutable directed graph over actions 0..n-1; the diagonal is always set."""

    def __init__(self, adj):
        adj = np.array(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise ValueError("adjacency must be a non-empty square matrix")
        np.fill_diagonal(adj, True)
        adj.setflags(write=False)
        self._adj = adj

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n, dtype=bool))

    @classmethod
    def from_edges(cls, n, pairs, symmetric=False):
        adj = np.eye(n, dtype=bool)
        for u, v in pairs:
            adj[u, v] = True
            if symmetric:
                adj[v, u] = True
        return cls(adj)

    @property
    def adj(self):
        return self._adj

    @property
    def n(self):
        return self._adj.shape[0]

    def edges(self):
        """Directed (u, v) pairs with u != v, in row-major order."""
        rows, cols = np.nonzero(self._adj)
        return [(int(u), int(v)) for u, v in zip(rows, cols) if u != v]

    def is_symmetric(self):
        return bool(np.array_equal(self._adj, self._adj.T))

    def __eq__(self, other):
        return (isinstance(other, FeedbackGraph) and
                np.array_equal(self._adj, other._adj))

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.n, self._adj.tobytes()))

    def __repr__(self):
        return "FeedbackGraph(n={}, edges={})".format(self.n, len(self.edges()))


class UndirectedEdgeList(object):
    """Edges of an undirected network, node ids relabeled to 0..node_count-1."""

    def __init__(self, node_count, edges):
        self.node_count = node_count
        self.edges = sorted(set(
                (min(u, v), max(u, v)) for u, v in edges if u != v))

    def __repr__(self):
        return "UndirectedEdgeList(node_count={}, edges={})".format(
                self.node_count, len(self.edges))


def out_neighbors(g, a):
    return set(np.flatnonzero(g.adj[a]).tolist())


def in_neighbors(g, a):
    return set(np.flatnonzero(g.adj[:, a]).tolist())


def observation_probs(g, p):
    """q(a) = sum of p(j) over the in-neighbors j of a."""
    return np.asarray(p, dtype=float) @ g.adj


def induced_subgraph(g, nodes):
    nodes = list(nodes)
    return FeedbackGraph(g.adj[np.ix_(nodes, nodes)])


def permute(g, perm):
    """Relabel so that new node i is old node perm[i]."""
    return induced_subgraph(g, perm)


def is_connected(g):
    undirected = g.adj | g.adj.T
    return nx.is_connected(nx.from_numpy_array(undirected.astype(int)))


# Generators

def gen_complete(n):
    return FeedbackGraph(np.ones((n, n), dtype=bool))


def gen_clique_group(n, c):
    if not 1 <= c <= n:
        raise ValueError("need 1 <= cliques <= n, got c={} n={}".format(c, n))
    adj = np.zeros((n, n), dtype=bool)
    for block in np.array_split(np.arange(n), c):
        adj[np.ix_(block, block)] = True
    return FeedbackGraph(adj)


def gen_star(n):
    if n < 2:
        raise ValueError("a star needs at least 2 nodes")
    adj = np.eye(n, dtype=bool)
    adj[0, :] = True
    adj[:, 0] = True
    return FeedbackGraph(adj)


def random_pair_count(n, density):
    # Every draw counts, repeats included, until the counter reaches density * n^2.
    return int(math.ceil(round(density * n * n, 9)))


def gen_random(n, density, rng):
    if density < 0:
        raise ValueError("density must be nonnegative")
    adj = np.eye(n, dtype=bool)
    pairs = rng.integers(0, n, size=(random_pair_count(n, density), 2))
    adj[pairs[:, 0], pairs[:, 1]] = True
    adj[pairs[:, 1], pairs[:, 0]] = True
    return FeedbackGraph(adj)


class GraphSource(object):
    """Where each round's feedback graph comes from."""

    COMPLETE = "complete"
    CLIQUE_GROUP = "clique_group"
    STAR = "star"
    RANDOM = "random"
    POOL = "pool"
    KINDS = (COMPLETE, CLIQUE_GROUP, STAR, RANDOM, POOL)

    DEFAULT_LABELS = {
        COMPLETE: "complete",
        CLIQUE_GROUP: "clique_group",
        STAR: "Ktree",
        RANDOM: "random",
        POOL: "pool",
    }

    def __init__(self, kind, n=None, cliques=None, density=None, pool=None,
                 resample_each_round=True, shuffle_labels=False, label=None):
        if kind not in self.KINDS:
            raise ValueError("unknown graph kind {!r}".format(kind))
        if kind == self.POOL:
            if not pool:
                raise ValueError("a pool source needs at least one graph")
            sizes = set(g.n for g in pool)
            if len(sizes) != 1:
                raise ValueError("pool graphs differ in size: {}".format(sorted(sizes)))
            n = pool[0].n
        if n is None or n < 1:
            raise ValueError("graph source needs n >= 1")
        if kind == self.CLIQUE_GROUP and (cliques is None or not 1 <= cliques <= n):
            raise ValueError("clique_group needs 1 <= cliques <= n")
        if kind == self.RANDOM and (density is None or density < 0):
            raise ValueError("random graphs need a nonnegative density")

        self.kind = kind
        self.n = n
        self.cliques = cliques
        self.density = density
        self.pool = list(pool) if pool else None
        self.resample_each_round = resample_each_round
        self.shuffle_labels = shuffle_labels
        self.label = label or self.DEFAULT_LABELS[kind]

    @classmethod
    def from_pool(cls, graphs, label=None):
        return cls(cls.POOL, pool=graphs, resample_each_round=True, label=label)

    def draw(self, rng):
        """Draw one graph. Stateless: callers decide whether to redraw each round."""
        if self.kind == self.COMPLETE:
            g = gen_complete(self.n)
        elif self.kind == self.CLIQUE_GROUP:
            g = gen_clique_group(self.n, self.cliques)
        elif self.kind == self.STAR:
            g = gen_star(self.n)
        elif self.kind == self.RANDOM:
            g = gen_random(self.n, self.density, rng)
        else:
            g = self.pool[int(rng.integers(len(self.pool)))]

        if self.shuffle_labels:
            g = permute(g, rng.permutation(self.n))
        return g

    def __repr__(self):
        return "GraphSource(kind={}, n={}, label={})".format(
                self.kind, self.n, self.label)


# Edge-list ingestion

def read_edge_pairs(path):
    """Yield raw (u, v) integer pairs; '#' lines and blank lines are skipped."""
    with open(path, "rb") as edge_file:
        for line_number, raw_line in enumerate(edge_file, 1):
            try:
                stripped = raw_line.decode("utf-8").strip()
            except UnicodeDecodeError:
                raise EdgeListParseError(path, line_number, raw_line.strip())
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if len(tokens) != 2:
                raise EdgeListParseError(path, line_number, stripped)
            try:
                pair = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise EdgeListParseError(path, line_number, stripped)
            yield pair


def load_edge_list(path):
    pairs = list(read_edge_pairs(path))
    if not pairs:
        raise EmptyGraphError(path)

    ids = sorted(set(node for pair in pairs for node in pair))
    relabel = {node_id: i for i, node_id in enumerate(ids)}
    return UndirectedEdgeList(
            len(ids), [(relabel[u], relabel[v]) for u, v in pairs])


class SubgraphSampler(object):
    """Carves connected induced subgraphs out of one undirected network.

    Components are found once with union-find; each sample starts at a uniform
    node of a large enough component and grows by picking uniformly from the
    current frontier.
    """

    def __init__(self, edge_list):
        self._graph = nx.Graph()
        self._graph.add_nodes_from(range(edge_list.node_count))
        self._graph.add_edges_from(edge_list.edges)

        components = UnionFind(range(edge_list.node_count))
        for u, v in edge_list.edges:
            components.union(u, v)
        self._components = sorted(
                (sorted(c) for c in components.to_sets()), key=lambda c: c[0])

    @property
    def component_sizes(self):
        return [len(c) for c in self._components]

    def sample(self, size, rng):
        eligible = sorted(node for c in self._components if len(c) >= size
                          for node in c)
        if size < 1 or not eligible:
            raise NoLargeComponentError(size, max(self.component_sizes))

        start = eligible[int(rng.integers(len(eligible)))]
        chosen = [start]
        seen = {start}
        frontier = []
        self._extend_frontier(start, seen, frontier)
        while len(chosen) < size:
            i = int(rng.integers(len(frontier)))
            node = frontier[i]
            frontier[i] = frontier[-1]
            frontier.pop()
            chosen.append(node)
            self._extend_frontier(node, seen, frontier)

        nodes = sorted(chosen)
        adj = nx.to_numpy_array(
                self._graph.subgraph(nodes), nodelist=nodes, dtype=bool, weight=None)
        return FeedbackGraph(adj)

    def _extend_frontier(self, node, seen, frontier):
        for neighbor in sorted(self._graph.neighbors(node)):
            if neighbor not in seen:
                seen.add(neighbor)
                frontier.append(neighbor)


def sample_connected_subgraph(edge_list, size, rng):
    return SubgraphSampler(edge_list).sample(size, rng)


def build_pool(edge_list, pool_size, subgraph_size, rng, label="pool"):
    sampler = SubgraphSampler(edge_list)
    graphs = [sampler.sample(subgraph_size, rng) for _ in range(pool_size)]
    logger.debug("built pool of %d subgraphs with %d nodes", pool_size, subgraph_size)
    return GraphSource.from_pool(graphs, label=label)


# Exploration sets

def greedy_exploration_set(g, candidates, gaps, by_gap=True):
    """Greedy independence set over the candidates.

    Candidates are visited in ascending (gap, index) order, or with by_gap=False
    zero-gap arms first and the rest by index. An arm is kept unless an earlier
    kept arm observes it.
    """
    if by_gap:
        key = lambda a: (gaps[a], a)
    else:
        key = lambda a: (gaps[a] > 0, a)

    blocked = set()
    chosen = []
    for a in sorted(candidates, key=key):
        if a in blocked:
            continue
        chosen.append(a)
        blocked.update(out_neighbors(g, a))
    return chosen


def independence_number_bruteforce(g):
    if g.n > BRUTEFORCE_NODE_LIMIT:
        raise GraphTooLargeError(g.n, BRUTEFORCE_NODE_LIMIT)

    undirected = g.adj | g.adj.T
    neighbor_masks = []
    for u in range(g.n):
        mask = 0
        for v in np.flatnonzero(undirected[u]):
            if v != u:
                mask |= 1 << int(v)
        neighbor_masks.append(mask)

    def largest(remaining):
        if not remaining:
            return 0
        v = (remaining & -remaining).bit_length() - 1
        without_v = remaining & ~(1 << v)
        with_v = 1 + largest(without_v & ~neighbor_masks[v])
        if not remaining & neighbor_masks[v]:
            return with_v
        return max(with_v, largest(without_v))

    return largest((1 << g.n) - 1)
