"""Bipartite patent-inventor network and its weighted one-mode projection.

The co-inventor graph weights an edge between inventors i and j by summing
1/(n_a - 1) over every shared patent a with n_a listed inventors; patents
listing a single inventor contribute nothing. Connectivity for component
extraction ignores weights (any positive weight is an edge).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping
from xml.sax.saxutils import escape

from .errors import EmptyGraph, UnknownNode
from .ingest import InventorLink, PatentRecord


@dataclass
class BipartiteNetwork:
    """Patent-inventor incidence restricted to a cohort.

    ``incidence[k]`` lists inventor indices for ``patents[k]``. Links that
    referenced a patent outside the cohort are excluded and counted.
    """

    patents: tuple
    inventors: tuple
    incidence: tuple
    excluded_links: int = 0

    def inventor_count(self) -> int:
        return len(self.inventors)


def build_bipartite(
    cohort: Mapping[str, PatentRecord] | Iterable[PatentRecord],
    links: Iterable[InventorLink],
) -> BipartiteNetwork:
    """Assemble the incidence structure for a patent cohort.

    Every inventor appearing on at least one cohort patent becomes a node,
    including inventors of single-inventor patents (they end up isolated in
    the projection).
    """
    if isinstance(cohort, Mapping):
        cohort_ids = set(cohort.keys())
    else:
        cohort_ids = {p.patent_id for p in cohort}
    per_patent: dict[str, set] = {}
    excluded = 0
    inventor_keys = set()
    for link in links:
        if link.patent_id not in cohort_ids:
            excluded += 1
            continue
        per_patent.setdefault(link.patent_id, set()).add(link.inventor_id)
        inventor_keys.add(link.inventor_id)
    inventors = tuple(sorted(inventor_keys))
    inv_index = {inv: i for i, inv in enumerate(inventors)}
    patents = tuple(sorted(cohort_ids))
    incidence = tuple(
        tuple(sorted(inv_index[inv] for inv in per_patent.get(pid, ())))
        for pid in patents
    )
    return BipartiteNetwork(patents, inventors, incidence, excluded)


@dataclass
class WeightedGraph:
    """Undirected weighted graph over ordered node keys.

    Edges are stored canonically with u < v by node index; no self-loops,
    no parallel edges, all weights positive. Instances are immutable by
    convention after construction and safe to share across threads.
    """

    nodes: tuple
    adj: tuple  # adj[i] is a dict {j: weight}
    _index: dict = field(repr=False, default_factory=dict)

    @classmethod
    def from_edges(cls, nodes: Iterable, edges: Iterable[tuple]) -> "WeightedGraph":
        node_list = tuple(sorted(set(nodes)))
        index = {n: i for i, n in enumerate(node_list)}
        adj: list[dict] = [dict() for _ in node_list]
        for u, v, w in edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if w <= 0:
                raise ValueError(f"nonpositive weight {w} on ({u!r}, {v!r})")
            i, j = index[u], index[v]
            if j in adj[i]:
                raise ValueError(f"parallel edge ({u!r}, {v!r})")
            adj[i][j] = w
            adj[j][i] = w
        return cls(node_list, tuple(adj), index)

    def __post_init__(self):
        if not self._index:
            self._index = {n: i for i, n in enumerate(self.nodes)}

    def index_of(self, node) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise UnknownNode(repr(node)) from None

    def num_nodes(self) -> int:
        return len(self.nodes)

    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj) // 2

    def edges(self):
        """Yield (i, j, weight) with i < j by node index."""
        for i, nbrs in enumerate(self.adj):
            for j, w in nbrs.items():
                if i < j:
                    yield i, j, w

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges())

    def degrees(self):
        """Weighted degree per node index."""
        return [sum(nbrs.values()) for nbrs in self.adj]


def project(bipartite: BipartiteNetwork) -> WeightedGraph:
    """Project the bipartite network onto inventors with co-invention weights.

    Each multi-inventor patent with n listed inventors adds 1/(n - 1) to the
    weight of every inventor pair it lists. Accumulation runs in ascending
    patent order so repeated runs are bit-identical.
    """
    weights: dict[tuple[int, int], float] = {}
    for members in bipartite.incidence:
        n = len(members)
        if n <= 1:
            continue
        contrib = 1.0 / (n - 1)
        for a in range(n):
            for b in range(a + 1, n):
                key = (members[a], members[b])
                weights[key] = weights.get(key, 0.0) + contrib
    edges = [
        (bipartite.inventors[i], bipartite.inventors[j], w)
        for (i, j), w in weights.items()
    ]
    return WeightedGraph.from_edges(bipartite.inventors, edges)


@dataclass
class ComponentLabeling:
    component_id: list
    sizes: list

    def num_components(self) -> int:
        return len(self.sizes)

    def largest(self) -> list[int]:
        """Node indices of the largest component (smallest id wins ties)."""
        if not self.sizes:
            return []
        best = max(range(len(self.sizes)), key=lambda c: (self.sizes[c], -c))
        return [i for i, c in enumerate(self.component_id) if c == best]


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1


def connected_components(graph: WeightedGraph) -> ComponentLabeling:
    """Standard undirected connectivity; weights are ignored."""
    n = graph.num_nodes()
    uf = _UnionFind(n)
    for i, j, _ in graph.edges():
        uf.union(i, j)
    root_to_comp: dict[int, int] = {}
    component_id = [0] * n
    sizes: list[int] = []
    for i in range(n):
        root = uf.find(i)
        comp = root_to_comp.get(root)
        if comp is None:
            comp = len(sizes)
            root_to_comp[root] = comp
            sizes.append(0)
        component_id[i] = comp
        sizes[comp] += 1
    return ComponentLabeling(component_id, sizes)


def largest_connected_component(graph: WeightedGraph) -> WeightedGraph:
    labeling = connected_components(graph)
    if labeling.num_components() == 0:
        raise EmptyGraph("graph has no nodes")
    keep = [graph.nodes[i] for i in labeling.largest()]
    return induced_subgraph(graph, keep)


def induced_subgraph(graph: WeightedGraph, nodes: Iterable) -> WeightedGraph:
    """Subgraph on ``nodes`` keeping exactly the edges with both endpoints inside."""
    wanted = set(nodes)
    for node in wanted:
        graph.index_of(node)  # raises UnknownNode for strangers
    keep_idx = {graph.index_of(n) for n in wanted}
    edges = [
        (graph.nodes[i], graph.nodes[j], w)
        for i, j, w in graph.edges()
        if i in keep_idx and j in keep_idx
    ]
    return WeightedGraph.from_edges(wanted, edges)


def composition_by_attribute(nodes: Iterable, attribute: Mapping) -> dict:
    """Share of nodes per attribute label; unlabeled nodes get their own bucket.

    Shares sum to 1 across labeled and unlabeled buckets.
    """
    counts: dict = {}
    total = 0
    for node in nodes:
        label = attribute.get(node)
        key = label if label is not None else "(unlabeled)"
        counts[key] = counts.get(key, 0) + 1
        total += 1
    if total == 0:
        return {}
    return {label: count / total for label, count in counts.items()}


def write_edge_list(path, graph: WeightedGraph) -> None:
    """Weighted edge list, one ``u<TAB>v<TAB>weight`` row per edge."""
    with open(path, "w", encoding="utf-8") as handle:
        for i, j, w in sorted(graph.edges()):
            handle.write(f"{graph.nodes[i]}\t{graph.nodes[j]}\t{w!r}\n")


def load_edge_list(path) -> WeightedGraph:
    nodes = set()
    edges = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            u, v, w = line.split("\t")
            nodes.update((u, v))
            edges.append((u, v, float(w)))
    return WeightedGraph.from_edges(nodes, edges)


def write_graphml(path, graph: WeightedGraph, partition=None) -> None:
    """GraphML export for external visualization tools.

    When ``partition`` (node -> community id) is given, each node carries a
    ``community`` attribute.
    """
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="w" for="edge" attr.name="weight" attr.type="double"/>',
    ]
    if partition is not None:
        lines.append('  <key id="c" for="node" attr.name="community" attr.type="int"/>')
    lines.append('  <graph edgedefault="undirected">')
    for node in graph.nodes:
        nid = escape(str(node), {'"': "&quot;"})
        if partition is not None:
            lines.append(f'    <node id="{nid}"><data key="c">{partition[node]}</data></node>')
        else:
            lines.append(f'    <node id="{nid}"/>')
    for i, j, w in sorted(graph.edges()):
        u = escape(str(graph.nodes[i]), {'"': "&quot;"})
        v = escape(str(graph.nodes[j]), {'"': "&quot;"})
        lines.append(f'    <edge source="{u}" target="{v}"><data key="w">{w!r}</data></edge>')
    lines.append("  </graph>")
    lines.append("</graphml>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
