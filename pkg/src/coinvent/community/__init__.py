"""Community detection on the weighted co-inventor graph.

Five detectors (greedy agglomeration, Louvain, Infomap, random walks, label
propagation), quality functions (modularity, map equation), partition
similarity (ARI), size distributions, and the randomized-structure control.
"""

from .ari import adjusted_rand_index, multirun_self_similarity, pairwise_ari_matrix
from .greedy import detect_greedy
from .infomap import detect_infomap
from .labelprop import detect_label_propagation
from .louvain import detect_louvain
from .partition import (
    Partition,
    SizeHistogram,
    dense_labels,
    load_partition,
    randomize_within_structure,
    size_distribution,
    write_partition,
)
from .quality import map_equation, modularity
from .walktrap import detect_random_walks

DETECTORS = {
    "greedy": detect_greedy,
    "louvain": detect_louvain,
    "infomap": detect_infomap,
    "walktrap": detect_random_walks,
    "labelprop": detect_label_propagation,
}


def detect(graph, algorithm: str, seed: int, **params):
    """Dispatch to a detector by name (see ``DETECTORS`` for valid names)."""
    try:
        fn = DETECTORS[algorithm]
    except KeyError:
        raise ValueError(
            f"unknown detector {algorithm!r}; expected one of {sorted(DETECTORS)}"
        ) from None
    return fn(graph, seed=seed, **params)


__all__ = [
    "DETECTORS",
    "Partition",
    "SizeHistogram",
    "adjusted_rand_index",
    "dense_labels",
    "detect",
    "detect_greedy",
    "detect_infomap",
    "detect_label_propagation",
    "detect_louvain",
    "detect_random_walks",
    "load_partition",
    "map_equation",
    "modularity",
    "multirun_self_similarity",
    "pairwise_ari_matrix",
    "randomize_within_structure",
    "size_distribution",
    "write_partition",
]
