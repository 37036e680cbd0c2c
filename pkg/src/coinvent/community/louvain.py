"""Louvain community detection: local moves plus graph aggregation passes.

Each pass sweeps nodes in a seeded random order and moves a node to the
neighboring community with the largest positive modularity gain, so Q never
decreases. When a pass makes no move, communities are collapsed into
supernodes (keeping internal weight as self-loops) and the procedure
recurses on the aggregated graph.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError, EmptyGraph
from ..graph import WeightedGraph
from .partition import Partition, dense_labels

_MAX_SWEEPS = 1000


class _LevelGraph:
    """Aggregated graph: adjacency dicts, per-node self-loop weight, stationary mass."""

    def __init__(self, adj, loops):
        self.adj = adj
        self.loops = loops
        self.n = len(adj)
        self.k = [sum(nbrs.values()) + 2.0 * loop for nbrs, loop in zip(adj, loops)]


def _one_level(level: _LevelGraph, two_m: float, rng: np.random.Generator):
    """Local-move phase; returns (labels, improved)."""
    n = level.n
    comm = np.arange(n)
    sigma_tot = np.array(level.k, dtype=float)
    improved = False
    for _ in range(_MAX_SWEEPS):
        moved = 0
        for v in rng.permutation(n):
            old = comm[v]
            k_v = level.k[v]
            # weight from v into each adjacent community
            w_to: dict[int, float] = {}
            for u, w in level.adj[v].items():
                w_to[comm[u]] = w_to.get(comm[u], 0.0) + w
            sigma_tot[old] -= k_v
            base = w_to.get(old, 0.0) - k_v * sigma_tot[old] / two_m
            best_comm, best_gain = old, base
            for c in sorted(w_to):
                if c == old:
                    continue
                gain = w_to[c] - k_v * sigma_tot[c] / two_m
                if gain > best_gain or (gain == best_gain and c < best_comm):
                    best_comm, best_gain = c, gain
            if best_comm != old and best_gain > base:
                comm[v] = best_comm
                moved += 1
                improved = True
            sigma_tot[comm[v]] += k_v
        if moved == 0:
            return comm, improved
    raise ConvergenceError("louvain local-move phase failed to stabilize")


def _aggregate(level: _LevelGraph, labels: np.ndarray) -> _LevelGraph:
    n_comms = int(labels.max()) + 1
    adj: list[dict[int, float]] = [dict() for _ in range(n_comms)]
    loops = [0.0] * n_comms
    for v in range(level.n):
        loops[labels[v]] += level.loops[v]
    for v in range(level.n):
        cv = labels[v]
        for u, w in level.adj[v].items():
            if u < v:
                continue
            cu = labels[u]
            if cu == cv:
                loops[cv] += w
            else:
                adj[cv][cu] = adj[cv].get(cu, 0.0) + w
                adj[cu][cv] = adj[cu].get(cv, 0.0) + w
    return _LevelGraph(adj, loops)


def detect_louvain(graph: WeightedGraph, seed: int = 0) -> Partition:
    """Run Louvain on the weighted graph; deterministic given the seed."""
    n = graph.num_nodes()
    if n == 0:
        raise EmptyGraph("cannot detect communities on an empty graph")
    m = graph.total_weight()
    if m == 0.0:
        return Partition(graph.nodes, np.arange(n, dtype=np.int64), "louvain", seed)

    rng = np.random.default_rng(seed)
    two_m = 2.0 * m
    level = _LevelGraph([dict(nbrs) for nbrs in graph.adj], [0.0] * n)
    node_to_comm = np.arange(n)
    levels = 0
    while True:
        labels, improved = _one_level(level, two_m, rng)
        if not improved:
            break
        labels = dense_labels(labels)
        node_to_comm = labels[node_to_comm]
        level = _aggregate(level, labels)
        levels += 1
    return Partition(
        graph.nodes,
        dense_labels(node_to_comm),
        "louvain",
        seed,
        meta={"levels": levels},
    )
