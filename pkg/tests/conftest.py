import sys
from datetime import date
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coinvent.graph import WeightedGraph
from coinvent.ingest import PatentRecord


@pytest.fixture
def two_cliques():
    """Two disconnected unit-weight K4 cliques."""
    nodes = [f"n{i}" for i in range(8)]
    edges = []
    for base in (0, 4):
        for a in range(4):
            for b in range(a + 1, 4):
                edges.append((f"n{base + a}", f"n{base + b}", 1.0))
    return WeightedGraph.from_edges(nodes, edges)


@pytest.fixture
def triangle():
    return WeightedGraph.from_edges(
        ["A", "B", "C"], [("A", "B", 1.0), ("B", "C", 2.0), ("A", "C", 0.5)]
    )


def make_patent(pid, granted="1996-06-01", applied="1995-01-01", klass="257", assignee=None):
    return PatentRecord(pid, date.fromisoformat(granted), date.fromisoformat(applied),
                        klass, assignee)


def ring_of_cliques(n_cliques, clique_size):
    """K_{clique_size} cliques joined in a ring by single unit edges."""
    nodes = [f"c{c:02d}n{i}" for c in range(n_cliques) for i in range(clique_size)]
    edges = []
    for c in range(n_cliques):
        for a in range(clique_size):
            for b in range(a + 1, clique_size):
                edges.append((f"c{c:02d}n{a}", f"c{c:02d}n{b}", 1.0))
        edges.append((f"c{c:02d}n0", f"c{(c + 1) % n_cliques:02d}n1", 1.0))
    return WeightedGraph.from_edges(nodes, edges)


def clique_membership(node):
    return node.split("n")[0]
