import numpy as np
import pytest

from coinvent.community import (
    DETECTORS,
    Partition,
    detect,
    detect_greedy,
    detect_infomap,
    detect_label_propagation,
    detect_louvain,
    detect_random_walks,
    map_equation,
    modularity,
    multirun_self_similarity,
)
from coinvent.errors import EmptyGraph
from coinvent.graph import WeightedGraph

from conftest import clique_membership, ring_of_cliques
from oracles import (
    edges_to_matrix,
    map_equation_bruteforce,
    max_modularity_bruteforce,
    random_connected_graph,
)

TWO_CLIQUE_LABELS = [0, 0, 0, 0, 1, 1, 1, 1]


def as_blocks(partition):
    blocks = {}
    for node, label in zip(partition.nodes, partition.labels):
        blocks.setdefault(int(label), set()).add(node)
    return {frozenset(b) for b in blocks.values()}


@pytest.mark.parametrize("name", sorted(DETECTORS))
def test_partition_invariants_on_random_graphs(name):
    rng = np.random.default_rng(17)
    for trial in range(10):
        n = int(rng.integers(2, 25))
        edges = random_connected_graph(rng, n)
        nodes = [f"n{i}" for i in range(n)]
        graph = WeightedGraph.from_edges(
            nodes, [(f"n{u}", f"n{v}", w) for (u, v), w in edges.items()]
        )
        part = detect(graph, name, seed=trial)
        assert len(part.labels) == graph.num_nodes()
        labels = set(int(l) for l in part.labels)
        assert labels == set(range(part.num_communities))  # dense ids
        assert part.algorithm in name or name in part.algorithm


@pytest.mark.parametrize("name", sorted(DETECTORS))
def test_detectors_reject_empty_graph(name):
    empty = WeightedGraph.from_edges([], [])
    with pytest.raises(EmptyGraph):
        detect(empty, name, seed=0)


@pytest.mark.parametrize("fn", [detect_greedy, detect_louvain, detect_label_propagation])
def test_two_disconnected_cliques_recovered(fn, two_cliques):
    part = fn(two_cliques, seed=1)
    assert as_blocks(part) == {
        frozenset({"n0", "n1", "n2", "n3"}),
        frozenset({"n4", "n5", "n6", "n7"}),
    }


def test_greedy_louvain_beat_singletons(two_cliques):
    singles = Partition(two_cliques.nodes, np.arange(8))
    q0 = modularity(two_cliques, singles)
    for fn in (detect_greedy, detect_louvain):
        assert modularity(two_cliques, fn(two_cliques, seed=0)) >= q0


def test_walktrap_two_cliques_weak_bridge():
    nodes = [f"n{i}" for i in range(8)]
    edges = []
    edge_map = {}
    for base in (0, 4):
        for a in range(4):
            for b in range(a + 1, 4):
                edges.append((f"n{base + a}", f"n{base + b}", 1.0))
                edge_map[(base + a, base + b)] = 1.0
    edges.append(("n0", "n4", 0.25))
    edge_map[(0, 4)] = 0.25
    graph = WeightedGraph.from_edges(nodes, edges)
    part = detect_random_walks(graph, seed=0)
    assert as_blocks(part) == {
        frozenset({"n0", "n1", "n2", "n3"}),
        frozenset({"n4", "n5", "n6", "n7"}),
    }
    # the recovered split is the exhaustive-enumeration modularity optimum
    q_opt = max_modularity_bruteforce(edges_to_matrix(8, edge_map))
    assert modularity(graph, part) == pytest.approx(q_opt, abs=1e-12)


def test_walktrap_single_node():
    graph = WeightedGraph.from_edges(["solo"], [])
    part = detect_random_walks(graph, seed=0)
    assert part.num_communities == 1


def test_walktrap_disconnected_runs_per_component(two_cliques):
    part = detect_random_walks(two_cliques, seed=0)
    assert part.meta.get("disconnected_input") is True
    assert part.num_communities == 2


def test_label_propagation_single_edge_merges():
    graph = WeightedGraph.from_edges(["a", "b"], [("a", "b", 1.0)])
    for seed in range(5):
        part = detect_label_propagation(graph, seed=seed)
        assert part.num_communities == 1


def test_label_propagation_stability_condition():
    rng = np.random.default_rng(4)
    n = 20
    edges = random_connected_graph(rng, n)
    nodes = [f"n{i}" for i in range(n)]
    graph = WeightedGraph.from_edges(
        nodes, [(f"n{u}", f"n{v}", w) for (u, v), w in edges.items()]
    )
    part = detect_label_propagation(graph, seed=3)
    labels = {node: int(l) for node, l in zip(part.nodes, part.labels)}
    for i, nbrs in enumerate(graph.adj):
        tally = {}
        for j, w in nbrs.items():
            tally[labels[graph.nodes[j]]] = tally.get(labels[graph.nodes[j]], 0.0) + w
        top = max(tally.values())
        assert tally.get(labels[graph.nodes[i]], 0.0) == top


def test_infomap_ring_of_four_k5_cliques():
    graph = ring_of_cliques(4, 5)
    part = detect_infomap(graph, seed=0)
    assert as_blocks(part) == {
        frozenset(n for n in graph.nodes if clique_membership(n) == f"c{c:02d}")
        for c in range(4)
    }
    # exhaustive check over all groupings of whole cliques: separate wins
    from oracles import set_partitions

    clique_ids = [f"c{c:02d}" for c in range(4)]
    node_clique = [clique_membership(n) for n in graph.nodes]
    best = None
    for grouping in set_partitions(clique_ids):
        assign = {}
        for gid, block in enumerate(grouping):
            for cid in block:
                assign[cid] = gid
        labels = np.array([assign[c] for c in node_clique])
        L = map_equation(graph, Partition(graph.nodes, labels))
        if best is None or L < best[0]:
            best = (L, len(grouping))
    assert best[1] == 4  # the four-clique grouping minimizes L


def test_infomap_complete_graph_single_module():
    nodes = list("abcd")
    edges = [(u, v, 1.0) for i, u in enumerate(nodes) for v in nodes[i + 1:]]
    graph = WeightedGraph.from_edges(nodes, edges)
    part = detect_infomap(graph, seed=0)
    assert part.num_communities == 1
    one = Partition(graph.nodes, np.zeros(4, dtype=int))
    assert part.meta["codelength"] == pytest.approx(map_equation(graph, one), abs=1e-12)


def test_infomap_codelength_not_worse_than_one_module():
    rng = np.random.default_rng(23)
    for trial in range(10):
        n = int(rng.integers(3, 20))
        edges = random_connected_graph(rng, n)
        nodes = [f"n{i}" for i in range(n)]
        graph = WeightedGraph.from_edges(
            nodes, [(f"n{u}", f"n{v}", w) for (u, v), w in edges.items()]
        )
        part = detect_infomap(graph, seed=trial)
        one = Partition(graph.nodes, np.zeros(n, dtype=int))
        l_one = map_equation(graph, one)
        assert part.meta["codelength"] <= l_one + 1e-12
        ref = map_equation_bruteforce(
            edges_to_matrix(n, edges), [int(l) for l in part.labels]
        )
        assert part.meta["codelength"] == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("name", sorted(DETECTORS))
def test_detectors_deterministic_given_seed(name, two_cliques):
    a = detect(two_cliques, name, seed=42)
    b = detect(two_cliques, name, seed=42)
    assert np.array_equal(a.labels, b.labels)


def test_greedy_louvain_near_bruteforce_optimum():
    rng = np.random.default_rng(31)
    hits = {"greedy": 0, "louvain": 0}
    trials = 20
    for trial in range(trials):
        n = int(rng.integers(4, 9))
        edges = random_connected_graph(rng, n)
        nodes = [f"n{i}" for i in range(n)]
        graph = WeightedGraph.from_edges(
            nodes, [(f"n{u}", f"n{v}", w) for (u, v), w in edges.items()]
        )
        q_best = max_modularity_bruteforce(edges_to_matrix(n, edges))
        for name in hits:
            q = modularity(graph, detect(graph, name, seed=trial))
            if q >= 0.95 * q_best - 1e-12:
                hits[name] += 1
    assert hits["greedy"] >= trials - 2
    assert hits["louvain"] >= trials - 2


def test_multirun_self_similarity_bounds(two_cliques):
    score = multirun_self_similarity(two_cliques, detect_louvain, runs=4, seed=0)
    assert score == pytest.approx(1.0)


def test_detect_dispatch_unknown_name(two_cliques):
    with pytest.raises(ValueError):
        detect(two_cliques, "spectral", seed=0)
