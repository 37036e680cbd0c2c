"""Random-walk community detection (Walktrap).

Short random walks of length t give each node a probability vector over the
graph; communities are grown by Ward-style agglomeration of the walk
distances, merging only adjacent communities, and the merge sequence is cut
at the partition of maximum modularity. Exact vectors are kept, so memory
is O(n^2); fine for component sizes up to the tens of thousands.
"""

from __future__ import annotations

import heapq

import numpy as np
from scipy import sparse

from ..errors import EmptyGraph
from ..graph import WeightedGraph, connected_components, induced_subgraph
from .partition import Partition, dense_labels


def detect_random_walks(graph: WeightedGraph, steps: int = 4, seed: int | None = None) -> Partition:
    """Walktrap with walk length ``steps`` (source default t=4).

    Deterministic given the node ordering; the seed is recorded only.
    Disconnected input is handled by running per component and uniting the
    per-component partitions (flagged in the result metadata).
    """
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    n = graph.num_nodes()
    if n == 0:
        raise EmptyGraph("cannot detect communities on an empty graph")
    labeling = connected_components(graph)
    if labeling.num_components() > 1:
        labels = _per_component(graph, labeling, lambda g: _walktrap_connected(g, steps))
        return Partition(graph.nodes, labels, "walktrap", seed,
                         params={"steps": steps}, meta={"disconnected_input": True})
    labels = _walktrap_connected(graph, steps)
    return Partition(graph.nodes, labels, "walktrap", seed, params={"steps": steps})


def _per_component(graph, labeling, solve) -> np.ndarray:
    labels = np.zeros(graph.num_nodes(), dtype=np.int64)
    offset = 0
    for comp in range(labeling.num_components()):
        members = [i for i, c in enumerate(labeling.component_id) if c == comp]
        sub = induced_subgraph(graph, [graph.nodes[i] for i in members])
        sub_labels = solve(sub)
        remap = {node: lbl for node, lbl in zip(sub.nodes, sub_labels)}
        for i in members:
            labels[i] = offset + remap[graph.nodes[i]]
        offset += int(max(sub_labels)) + 1 if len(sub_labels) else 0
    return dense_labels(labels)


def _walktrap_connected(graph: WeightedGraph, steps: int) -> np.ndarray:
    n = graph.num_nodes()
    if n == 1:
        return np.zeros(1, dtype=np.int64)

    deg = np.array(graph.degrees())
    inv_deg = 1.0 / deg
    # t-step transition probabilities, rows are per-node walk distributions;
    # propagate the sparse one-step matrix to keep peak memory at two dense
    # n x n arrays for large components
    rows, cols, vals = [], [], []
    for i, j, w in graph.edges():
        rows += [i, j]
        cols += [j, i]
        vals += [w * inv_deg[i], w * inv_deg[j]]
    trans = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    walk = trans.toarray()
    for _ in range(steps - 1):
        walk = trans @ walk

    m = graph.total_weight()
    two_m = 2.0 * m

    vec: dict[int, np.ndarray] = {i: walk[i] for i in range(n)}
    size = {i: 1 for i in range(n)}
    neighbors: dict[int, set[int]] = {i: set(graph.adj[i]) for i in range(n)}
    alive = [True] * n

    # modularity bookkeeping, same normalization as the greedy detector
    e_between: list[dict[int, float]] = [dict() for _ in range(n)]
    a = np.zeros(n)
    for i, j, w in graph.edges():
        e_between[i][j] = w / two_m
        e_between[j][i] = w / two_m
        a[i] += w / two_m
        a[j] += w / two_m

    def ward_distance(c1, c2) -> float:
        diff = vec[c1] - vec[c2]
        r2 = float(np.sum(diff * diff * inv_deg))
        return (size[c1] * size[c2]) / (size[c1] + size[c2]) * r2 / n

    current_ds: dict[tuple[int, int], float] = {}
    heap: list[tuple[float, int, int]] = []
    for i, j, _ in graph.edges():
        ds = ward_distance(i, j)
        current_ds[(i, j)] = ds
        heap.append((ds, i, j))
    heapq.heapify(heap)

    q = float(-np.sum(a * a))
    q_trace = [q]
    merges: list[tuple[int, int]] = []

    while len(merges) < n - 1:
        ds, i, j = heapq.heappop(heap)
        if not (alive[i] and alive[j]) or current_ds.get((i, j)) != ds:
            continue
        si, sj = size[i], size[j]
        q += 2.0 * (e_between[i].get(j, 0.0) - a[i] * a[j])
        merges.append((i, j))
        q_trace.append(q)

        # fold j into i
        alive[j] = False
        vec[i] = (si * vec[i] + sj * vec[j]) / (si + sj)
        del vec[j]
        size[i] = si + sj
        a[i] += a[j]
        both = neighbors[i] & neighbors[j]
        merged_nbrs = (neighbors[i] | neighbors[j]) - {i, j}
        neighbors[i] = merged_nbrs
        old_ei, old_ej = e_between[i], e_between[j]
        e_between[i] = {}
        for x in merged_nbrs:
            neighbors[x].discard(j)
            neighbors[x].add(i)
            exi = old_ei.get(x, 0.0) + old_ej.get(x, 0.0)
            e_between[i][x] = exi
            e_between[x].pop(j, None)
            e_between[x][i] = exi
            if x in both:
                # Lance-Williams style update from the two previous distances
                d1 = current_ds[(min(i, x), max(i, x))]
                d2 = current_ds[(min(j, x), max(j, x))]
                nds = ((si + size[x]) * d1 + (sj + size[x]) * d2 - size[x] * ds) / (
                    size[i] + size[x]
                )
            else:
                nds = ward_distance(i, x)
            lo, hi = (i, x) if i < x else (x, i)
            current_ds[(lo, hi)] = nds
            heapq.heappush(heap, (nds, lo, hi))
        e_between[j] = {}
        neighbors[j] = set()

    best_step = int(np.argmax(q_trace))
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in merges[:best_step]:
        parent[find(j)] = find(i)
    return dense_labels([find(i) for i in range(n)])
