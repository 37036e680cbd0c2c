"""Independent brute-force oracles used to cross-check the implementations.

Everything here is deliberately written from first principles (double loops,
exact rationals, exhaustive enumeration) and stays independent of the code
paths under test.
"""

from fractions import Fraction

import numpy as np


def projection_weights_bruteforce(patent_inventors):
    """Exact co-invention weights via a double loop over inventor pairs.

    ``patent_inventors`` is a list of inventor-id collections, one per
    patent. Returns {(u, v): Fraction} with u < v.
    """
    inventors = sorted({inv for team in patent_inventors for inv in team})
    weights = {}
    for a_idx, u in enumerate(inventors):
        for v in inventors[a_idx + 1:]:
            total = Fraction(0)
            for team in patent_inventors:
                n = len(set(team))
                if n > 1 and u in team and v in team:
                    total += Fraction(1, n - 1)
            if total:
                weights[(u, v)] = total
    return weights


def weight_conservation_identity(patent_inventors):
    """Both sides of sum_edges w = sum_{n_a >= 2} n_a / 2 in exact arithmetic."""
    lhs = sum(projection_weights_bruteforce(patent_inventors).values(), Fraction(0))
    rhs = sum(
        (Fraction(len(set(team)), 2) for team in patent_inventors if len(set(team)) > 1),
        Fraction(0),
    )
    return lhs, rhs


def modularity_bruteforce(adj_matrix, labels):
    """Direct double-sum evaluation of the weighted modularity formula."""
    a = np.asarray(adj_matrix, dtype=float)
    n = a.shape[0]
    k = a.sum(axis=1)
    two_m = k.sum()
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += a[i, j] - k[i] * k[j] / two_m
    return q / two_m


def ari_paircount(labels1, labels2):
    """ARI from explicit pair counting (independent of the contingency form)."""
    n = len(labels1)
    both_same = same_diff = diff_same = both_diff = 0
    for i in range(n):
        for j in range(i + 1, n):
            s1 = labels1[i] == labels1[j]
            s2 = labels2[i] == labels2[j]
            if s1 and s2:
                both_same += 1
            elif s1:
                same_diff += 1
            elif s2:
                diff_same += 1
            else:
                both_diff += 1
    a, b, c, d = both_same, same_diff, diff_same, both_diff
    denom = (a + b) * (b + d) + (a + c) * (c + d)
    if denom == 0:
        return 1.0
    return 2.0 * (a * d - b * c) / denom


def map_equation_bruteforce(adj_matrix, labels):
    """Textbook two-level map equation: q H(Q) + sum_M p_M H(P^M)."""
    a = np.asarray(adj_matrix, dtype=float)
    k = a.sum(axis=1)
    two_m = k.sum()
    p = k / two_m
    modules = sorted(set(labels))
    q_exit = {}
    for m in modules:
        inside = [i for i, l in enumerate(labels) if l == m]
        outside = [i for i, l in enumerate(labels) if l != m]
        q_exit[m] = sum(a[i, j] for i in inside for j in outside) / two_m
    q_total = sum(q_exit.values())

    def entropy(probs):
        return -sum(x * np.log2(x) for x in probs if x > 0)

    index_codebook = 0.0
    if q_total > 0:
        index_codebook = q_total * entropy([q_exit[m] / q_total for m in modules])
    module_codebooks = 0.0
    for m in modules:
        inside = [i for i, l in enumerate(labels) if l == m]
        visit = q_exit[m] + sum(p[i] for i in inside)
        if visit == 0:
            continue
        probs = [q_exit[m] / visit] + [p[i] / visit for i in inside]
        module_codebooks += visit * entropy(probs)
    return index_codebook + module_codebooks


def set_partitions(items):
    """All partitions of ``items`` (restricted-growth enumeration)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        for k in range(len(sub)):
            yield sub[:k] + [[first] + sub[k]] + sub[k + 1:]
        yield [[first]] + sub


def max_modularity_bruteforce(adj_matrix):
    """Exhaustive search for the best-modularity partition (n <= ~10).

    Evaluates Q = sum_{ij in same block} (A_ij - k_i k_j / 2m) / 2m for
    every set partition, with the bracket precomputed once.
    """
    a = np.asarray(adj_matrix, dtype=float)
    n = a.shape[0]
    k = a.sum(axis=1)
    two_m = k.sum()
    bracket = (a - np.outer(k, k) / two_m) / two_m
    best = -np.inf
    labels = np.empty(n, dtype=int)
    for parts in set_partitions(range(n)):
        for c, block in enumerate(parts):
            for i in block:
                labels[i] = c
        same = labels[:, None] == labels[None, :]
        q = float(bracket[same].sum())
        if q > best:
            best = q
    return best


def histogram_naive(lags, bin_width):
    """Per-element binning loop; bin k covers [k*w - w/2, k*w + w/2)."""
    counts = {}
    for lag in lags:
        k = int(np.floor((lag + bin_width / 2.0) / bin_width))
        counts[k] = counts.get(k, 0) + 1
    return {k * bin_width: v for k, v in sorted(counts.items())}


def welch_by_hand(a, b):
    """Welch statistic and df from the bare formulas (no scipy, no numpy)."""
    na, nb = len(a), len(b)
    ma = sum(a) / na
    mb = sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    se2 = va / na + vb / nb
    t = (ma - mb) / se2**0.5
    df = se2**2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return t, df


def random_connected_graph(rng, n, extra_edge_prob=0.3, max_weight=3.0):
    """Random connected weighted graph: a random spanning tree plus extras."""
    edges = {}
    order = rng.permutation(n)
    for idx in range(1, n):
        u = int(order[idx])
        v = int(order[rng.integers(idx)])
        edges[(min(u, v), max(u, v))] = float(rng.uniform(0.5, max_weight))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_edge_prob:
                edges[(u, v)] = float(rng.uniform(0.5, max_weight))
    return edges


def edges_to_matrix(n, edges):
    a = np.zeros((n, n))
    for (u, v), w in edges.items():
        a[u, v] = w
        a[v, u] = w
    return a
