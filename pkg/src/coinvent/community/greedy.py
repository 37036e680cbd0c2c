"""Fast greedy agglomerative modularity maximization (CNM).

Starts from singleton communities and repeatedly merges the connected pair
with the largest modularity gain, tracking Q along the whole merge path and
returning the partition at its maximum. Deterministic for a fixed node
ordering: equal gains resolve to the lowest community-id pair, and the
surviving community keeps the smaller id.
"""

from __future__ import annotations

import heapq

import numpy as np

from ..errors import EmptyGraph
from ..graph import WeightedGraph
from .partition import Partition, dense_labels


def _singleton(graph: WeightedGraph, algorithm: str, seed) -> Partition:
    n = graph.num_nodes()
    return Partition(graph.nodes, np.arange(n, dtype=np.int64), algorithm, seed)


def detect_greedy(graph: WeightedGraph, seed: int | None = None) -> Partition:
    """CNM agglomeration on the weighted graph.

    The seed is recorded for provenance but unused; the algorithm is
    deterministic given the node ordering.
    """
    n = graph.num_nodes()
    if n == 0:
        raise EmptyGraph("cannot detect communities on an empty graph")
    m = graph.total_weight()
    if m == 0.0:
        return _singleton(graph, "greedy", seed)

    two_m = 2.0 * m
    # e[i][j] = (weight between communities i and j) / 2m for i != j
    e: list[dict[int, float]] = [dict() for _ in range(n)]
    a = np.zeros(n)
    for i, j, w in graph.edges():
        e[i][j] = w / two_m
        e[j][i] = w / two_m
        a[i] += w / two_m
        a[j] += w / two_m

    alive = np.ones(n, dtype=bool)
    current_dq: dict[tuple[int, int], float] = {}
    heap: list[tuple[float, int, int]] = []
    for i in range(n):
        for j, eij in e[i].items():
            if i < j:
                dq = 2.0 * (eij - a[i] * a[j])
                current_dq[(i, j)] = dq
                heap.append((-dq, i, j))
    heapq.heapify(heap)

    q = float(-np.sum(a * a))  # singleton partition, no internal weight
    q_trace = [q]
    merges: list[tuple[int, int]] = []

    while heap:
        neg_dq, i, j = heapq.heappop(heap)
        if not (alive[i] and alive[j]):
            continue
        if current_dq.get((i, j)) != -neg_dq:
            continue  # stale entry superseded by a later update
        dq = -neg_dq
        # merge j into i (i < j by construction)
        q += dq
        merges.append((i, j))
        q_trace.append(q)
        alive[j] = False
        a[i] += a[j]
        neighbors = (set(e[i]) | set(e[j])) - {i, j}
        old_i = e[i]
        e_j = e[j]
        e[i] = {}
        for x in neighbors:
            exi = old_i.get(x, 0.0) + e_j.get(x, 0.0)
            e[i][x] = exi
            e[x].pop(j, None)
            e[x][i] = exi
            lo, hi = (i, x) if i < x else (x, i)
            ndq = 2.0 * (exi - a[i] * a[x])
            current_dq[(lo, hi)] = ndq
            heapq.heappush(heap, (-ndq, lo, hi))
        e[j] = {}

    best_step = int(np.argmax(q_trace))
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in merges[:best_step]:
        parent[find(j)] = find(i)
    labels = dense_labels([find(i) for i in range(n)])
    return Partition(graph.nodes, labels, "greedy", seed, meta={"merge_steps": best_step})
