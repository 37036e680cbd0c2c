"""Partition quality functions: weighted modularity and the two-level map equation."""

from __future__ import annotations

import math

import numpy as np

from ..errors import EmptyGraph
from ..graph import WeightedGraph
from .partition import Partition, check_same_nodes


def modularity(graph: WeightedGraph, partition: Partition) -> float:
    """Weighted Newman-Girvan modularity.

    Q = (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j) with A the
    weight matrix, k the weighted degrees, and m the total edge weight.
    Invariant under community relabeling and under uniform scaling of all
    weights; lies in [-1/2, 1).
    """
    if tuple(partition.nodes) != tuple(graph.nodes):
        check_same_nodes(partition, Partition(graph.nodes, np.zeros(graph.num_nodes(), dtype=np.int64)))
    m = graph.total_weight()
    if m <= 0:
        raise EmptyGraph("total edge weight is zero")
    labels = partition.labels
    n_comms = partition.num_communities
    internal = np.zeros(n_comms)
    degree_sum = np.zeros(n_comms)
    for i, nbrs in enumerate(graph.adj):
        c = labels[i]
        for j, w in nbrs.items():
            degree_sum[c] += w
            if labels[j] == c:
                internal[c] += w
    # internal counted both directions, degree_sum = sum of k_i per community
    two_m = 2.0 * m
    return float(np.sum(internal / two_m) - np.sum((degree_sum / two_m) ** 2))


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def map_equation(graph: WeightedGraph, partition: Partition) -> float:
    """Two-level map equation L(M) in bits per step.

    Uses the stationary distribution of the weighted random walk,
    p_i = k_i / 2m, and per-module exit probabilities q_c = (boundary
    weight of c) / 2m. The one-module partition gives L = H(P), the
    entropy of the stationary distribution.
    """
    m = graph.total_weight()
    if m <= 0:
        raise EmptyGraph("total edge weight is zero")
    two_m = 2.0 * m
    labels = partition.labels
    n_comms = partition.num_communities
    p = np.array(graph.degrees()) / two_m
    exit_w = np.zeros(n_comms)
    for i, j, w in graph.edges():
        if labels[i] != labels[j]:
            exit_w[labels[i]] += w
            exit_w[labels[j]] += w
    q = exit_w / two_m
    p_module = np.zeros(n_comms)
    np.add.at(p_module, labels, p)
    q_total = float(q.sum())
    term_modules = sum(_plogp(qc + pc) - 2.0 * _plogp(qc) for qc, pc in zip(q, p_module))
    term_nodes = sum(_plogp(pi) for pi in p)
    return _plogp(q_total) + term_modules - term_nodes
