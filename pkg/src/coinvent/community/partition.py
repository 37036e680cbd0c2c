"""Partition type shared by all community detectors, plus partition-level ops."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import NodeSetMismatch


@dataclass
class Partition:
    """Node-to-community assignment over an ordered node tuple.

    Community ids are dense in [0, num_communities); every node is assigned
    exactly once. ``algorithm`` and ``seed`` record provenance; ``params``
    and ``meta`` carry detector parameters and diagnostics (modularity,
    map-equation value, disconnected-input flag).
    """

    nodes: tuple
    labels: np.ndarray
    algorithm: str = ""
    seed: int | None = None
    params: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.labels) != len(self.nodes):
            raise ValueError("labels length differs from node count")

    @property
    def num_communities(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    def assignment(self) -> dict:
        if not hasattr(self, "_assignment"):
            self._assignment = {node: int(label) for node, label in zip(self.nodes, self.labels)}
        return self._assignment

    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.num_communities).tolist()

    def largest_size(self) -> int:
        sizes = self.sizes()
        return max(sizes) if sizes else 0

    def communities(self) -> list[list]:
        groups: list[list] = [[] for _ in range(self.num_communities)]
        for node, label in zip(self.nodes, self.labels):
            groups[label].append(node)
        return groups

    def community_of(self, node) -> int:
        # dict lookup beats tuple.index for repeated queries
        if not hasattr(self, "_node_index"):
            self._node_index = {n: i for i, n in enumerate(self.nodes)}
        return int(self.labels[self._node_index[node]])


def dense_labels(raw_labels) -> np.ndarray:
    """Relabel communities to dense ids ordered by first occurrence."""
    raw = np.asarray(raw_labels)
    mapping: dict = {}
    out = np.empty(len(raw), dtype=np.int64)
    for i, label in enumerate(raw):
        key = label.item() if hasattr(label, "item") else label
        if key not in mapping:
            mapping[key] = len(mapping)
        out[i] = mapping[key]
    return out


def check_same_nodes(p1: Partition, p2: Partition) -> None:
    if p1.nodes != p2.nodes:
        if set(p1.nodes) == set(p2.nodes):
            raise NodeSetMismatch("same node set but different node order")
        raise NodeSetMismatch("partitions cover different node sets")


def randomize_within_structure(partition: Partition, seed: int) -> Partition:
    """Shuffle which node holds which assignment, keeping community sizes.

    The high-level morphology (number of communities and their sizes) is
    unchanged; the grouping of nodes becomes a uniformly random permutation
    into the existing size slots. Deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    shuffled = partition.labels.copy()
    rng.shuffle(shuffled)
    return Partition(
        nodes=partition.nodes,
        labels=dense_labels(shuffled),
        algorithm=partition.algorithm + "+randomized",
        seed=seed,
        params=dict(partition.params),
        meta={"randomized_from": partition.algorithm},
    )


@dataclass
class SizeHistogram:
    """Community-size counts per fixed-width size bin.

    Bin k covers sizes [k*width + 1, (k+1)*width]. Community sizes above
    ``max_size`` (when set) are listed individually in ``oversize`` instead
    of being binned, mirroring how plots annotate off-scale communities.
    """

    bin_width: int
    counts: list
    oversize: list
    total_communities: int

    def bin_ranges(self) -> list[tuple[int, int]]:
        return [
            (k * self.bin_width + 1, (k + 1) * self.bin_width)
            for k in range(len(self.counts))
        ]


def size_distribution(partition: Partition, bin_width: int, max_size: int | None = None) -> SizeHistogram:
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")
    sizes = partition.sizes()
    oversize = sorted(s for s in sizes if max_size is not None and s > max_size)
    binned = [s for s in sizes if max_size is None or s <= max_size]
    if binned:
        n_bins = (max(binned) - 1) // bin_width + 1
    else:
        n_bins = 0
    counts = [0] * n_bins
    for s in binned:
        counts[(s - 1) // bin_width] += 1
    return SizeHistogram(bin_width, counts, oversize, len(sizes))


def write_partition(path, partition: Partition) -> None:
    """``node<TAB>community`` rows plus a JSON sidecar with provenance."""
    with open(path, "w", encoding="utf-8") as handle:
        for node, label in zip(partition.nodes, partition.labels):
            handle.write(f"{node}\t{int(label)}\n")
    sidecar = {
        **partition.meta,
        "algorithm": partition.algorithm,
        "seed": partition.seed,
        "params": partition.params,
        "num_communities": partition.num_communities,
        "largest_community": partition.largest_size(),
    }
    with open(str(path) + ".json", "w", encoding="utf-8") as handle:
        json.dump(sidecar, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_partition(path) -> Partition:
    nodes = []
    labels = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            node, label = line.split("\t")
            nodes.append(node)
            labels.append(int(label))
    meta = {}
    algorithm = ""
    seed = None
    params: dict = {}
    try:
        with open(str(path) + ".json", encoding="utf-8") as handle:
            sidecar = json.load(handle)
        algorithm = sidecar.pop("algorithm", "")
        seed = sidecar.pop("seed", None)
        params = sidecar.pop("params", {})
        meta = sidecar
    except FileNotFoundError:
        pass
    return Partition(tuple(nodes), dense_labels(labels), algorithm, seed, params, meta)
