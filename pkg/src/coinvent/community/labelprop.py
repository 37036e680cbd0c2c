"""Asynchronous label propagation with weighted-majority updates.

Every node starts with its own label. Sweeps visit nodes in a fresh seeded
random order; a node adopts a uniformly random label from the set of
maximal-weight neighbor labels unless its current label is already maximal,
in which case it keeps it. The loop stops when a full sweep changes nothing,
which is exactly the stability condition: every node's label is a
weighted-majority label among its neighbors.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError, EmptyGraph
from ..graph import WeightedGraph
from .partition import Partition, dense_labels

_MAX_SWEEPS = 500


def detect_label_propagation(graph: WeightedGraph, seed: int = 0) -> Partition:
    n = graph.num_nodes()
    if n == 0:
        raise EmptyGraph("cannot detect communities on an empty graph")
    rng = np.random.default_rng(seed)
    labels = np.arange(n, dtype=np.int64)

    def maximal_labels(v) -> list[int]:
        tally: dict[int, float] = {}
        for u, w in graph.adj[v].items():
            lu = int(labels[u])
            tally[lu] = tally.get(lu, 0.0) + w
        if not tally:
            return [int(labels[v])]  # isolated node is trivially stable
        top = max(tally.values())
        return sorted(l for l, w in tally.items() if w == top)

    for _ in range(_MAX_SWEEPS):
        changed = 0
        for v in rng.permutation(n):
            best = maximal_labels(v)
            if int(labels[v]) in best:
                continue
            labels[v] = best[int(rng.integers(len(best)))]
            changed += 1
        if changed == 0:
            break
    else:
        raise ConvergenceError("label propagation did not stabilize")

    # stability holds by construction of the terminating sweep; verify anyway
    for v in range(n):
        assert int(labels[v]) in maximal_labels(v)
    return Partition(graph.nodes, dense_labels(labels), "labelprop", seed)
