"""Adjusted Rand index between partitions (Hubert-Arabie form)."""

from __future__ import annotations

from .partition import Partition, check_same_nodes


def _comb2(n: int) -> int:
    return n * (n - 1) // 2


def adjusted_rand_index(p1: Partition, p2: Partition) -> float:
    """Chance-corrected partition similarity in [-1, 1].

    Computed from the contingency table with exact integer pair counts, so
    identical partitions (up to relabeling) score exactly 1.0. Both
    partitions must cover the same node set in the same order.
    """
    check_same_nodes(p1, p2)
    n = len(p1.nodes)
    contingency: dict[tuple[int, int], int] = {}
    row_sums: dict[int, int] = {}
    col_sums: dict[int, int] = {}
    for a, b in zip(p1.labels, p2.labels):
        key = (int(a), int(b))
        contingency[key] = contingency.get(key, 0) + 1
        row_sums[int(a)] = row_sums.get(int(a), 0) + 1
        col_sums[int(b)] = col_sums.get(int(b), 0) + 1
    index = sum(_comb2(v) for v in contingency.values())
    sum_a = sum(_comb2(v) for v in row_sums.values())
    sum_b = sum(_comb2(v) for v in col_sums.values())
    total_pairs = _comb2(n)
    if total_pairs == 0:
        return 1.0
    expected = sum_a * sum_b / total_pairs
    max_index = 0.5 * (sum_a + sum_b)
    denom = max_index - expected
    if denom == 0.0:
        # both partitions trivial (all singletons or all one community),
        # which also means they are identical up to relabeling
        return 1.0
    return (index - expected) / denom


def pairwise_ari_matrix(partitions: dict[str, Partition]) -> dict[str, dict[str, float]]:
    """Symmetric ARI matrix keyed by partition name."""
    names = sorted(partitions)
    matrix: dict[str, dict[str, float]] = {a: {} for a in names}
    for i, a in enumerate(names):
        for b in names[i:]:
            score = 1.0 if a == b else adjusted_rand_index(partitions[a], partitions[b])
            matrix[a][b] = score
            matrix[b][a] = score
    return matrix


def multirun_self_similarity(graph, detector, runs: int, seed: int, **kwargs) -> float:
    """Mean pairwise ARI across ``runs`` seeded runs of one detector.

    Seeds are seed, seed+1, ..., seed+runs-1. This is the self-consistency
    number reported on the comparison table's diagonal.
    """
    if runs < 2:
        raise ValueError("need at least 2 runs to compare")
    results = [detector(graph, seed=seed + r, **kwargs) for r in range(runs)]
    scores = []
    for i in range(len(results)):
        for j in range(i + 1, len(results)):
            scores.append(adjusted_rand_index(results[i], results[j]))
    return sum(scores) / len(scores)
