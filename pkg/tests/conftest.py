import itertools
import os

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from walklab.graph import Graph, sample_gnp

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def from_nx(h: nx.Graph) -> Graph:
    mapping = {v: k for k, v in enumerate(sorted(h.nodes()))}
    return Graph.from_edges(h.number_of_nodes(), [(mapping[a], mapping[b]) for a, b in h.edges()])


def connected_catalogue(max_n: int = 6, min_n: int = 2) -> list[Graph]:
    """Every connected graph (up to isomorphism) on ``min_n..max_n`` vertices."""
    out = []
    for h in nx.graph_atlas_g():
        k = h.number_of_nodes()
        if min_n <= k <= max_n and nx.is_connected(h):
            out.append(from_nx(h))
    return out


def double_binary_tree() -> Graph:
    """Depth-3 binary trees rooted at 0 and 15 plus all 64 leaf-to-leaf edges."""
    edges = []
    for base in (0, 15):
        for i in range(7):
            edges += [(base + i, base + 2 * i + 1), (base + i, base + 2 * i + 2)]
    edges += [(a, b) for a in range(7, 15) for b in range(22, 30)]
    return Graph.from_edges(30, edges)


def random_connected(rng: np.random.Generator, n_lo: int, n_hi: int) -> Graph:
    """Connected G(n, p) with random n and p (rejection on connectivity)."""
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        p = float(rng.uniform(0.25, 0.9))
        g = sample_gnp(n, p, int(rng.integers(2 ** 63)))
        if nx.is_connected(to_nx(g)):
            return g


@st.composite
def graphs(draw, min_n=1, max_n=9, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, keep in zip(pairs, mask) if keep]
    if connected:
        # a random spanning path keeps the graph connected
        order = draw(st.permutations(range(n)))
        extra = {tuple(sorted((order[t], order[t + 1]))) for t in range(n - 1)}
        edges = sorted(set(edges) | extra)
    return Graph.from_edges(n, edges)


@pytest.fixture(scope="session")
def catalogue():
    return connected_catalogue(6)


@pytest.fixture
def dbt():
    return double_binary_tree()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
