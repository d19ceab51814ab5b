import os

import numpy as np
import pytest

from coarsewalk.graph import Graph

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def data_path(name):
    return os.path.abspath(os.path.join(DATA_DIR, name))


def require_dataset(name, hint):
    path = data_path(name)
    if not os.path.exists(path):
        pytest.skip(f"dataset {name} not present ({hint}); "
                    "run scripts/fetch_datasets.py where network is available")
    return path


def random_graph(rng, n, p, weighted=False):
    """Erdos-Renyi-style seeded graph with at least one edge."""
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                w = float(rng.integers(1, 5)) if weighted else 1.0
                edges.append((u, v, w))
    if not edges:
        edges.append((0, min(1, n - 1), 1.0))
    return Graph.build(n, edges)


def adjacency_sets(g):
    return [set(g.neighbor_ids(u).tolist()) for u in range(g.num_nodes)]


def ring_of_cliques(num_cliques, clique_size, bridge_every=1):
    """Cliques joined in a ring; returns (graph, clique id per vertex).

    Clique members share almost all neighbors, so compression collapses
    each clique while the ring keeps the graph connected.
    """
    edges = []
    community = []
    ids = []
    n = 0
    for c in range(num_cliques):
        block = list(range(n, n + clique_size))
        n += clique_size
        ids.append(block)
        community += [c] * clique_size
        for i in range(clique_size):
            for j in range(i + 1, clique_size):
                edges.append((block[i], block[j], 1.0))
    for c in range(num_cliques):
        edges.append((ids[c][0], ids[(c + 1) % num_cliques][0], 1.0))
    return Graph.build(n, edges), community


def planted_twins_graph(rng, blocks=6, per_block=150, twin_fraction=0.4,
                        p_in=0.08, p_out=0.002):
    """Stochastic block model plus twin vertices with identical neighborhoods.

    Twins are the redundancy the compressor is built to find: each one
    scores Dice 1.0 against its source, so compression removes them
    without losing any class structure. Returns (graph, community ids).
    """
    n0 = blocks * per_block
    community = np.repeat(np.arange(blocks), per_block)
    iu, iv = np.triu_indices(n0, k=1)
    prob = np.where(community[iu] == community[iv], p_in, p_out)
    mask = rng.random(len(iu)) < prob
    edges = [(int(u), int(v), 1.0) for u, v in zip(iu[mask], iv[mask])]

    nbrs = [set() for _ in range(n0)]
    for u, v, _ in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    sources = rng.choice([v for v in range(n0) if nbrs[v]],
                         size=int(twin_fraction * n0), replace=False)
    community = community.tolist()
    n = n0
    for src in sources:
        for w in nbrs[int(src)]:
            edges.append((n, int(w), 1.0))
        community.append(community[int(src)])
        n += 1
    return Graph.build(n, edges), community


@pytest.fixture(scope="session")
def lesmis():
    nx = pytest.importorskip("networkx")
    g = nx.les_miserables_graph()
    names = sorted(g.nodes())
    idx = {name: i for i, name in enumerate(names)}
    edges = [(idx[a], idx[b], 1.0) for a, b in g.edges()]
    return Graph.build(len(names), edges, names)


@pytest.fixture(scope="session")
def karate():
    nx = pytest.importorskip("networkx")
    g = nx.karate_club_graph()
    edges = [(a, b, 1.0) for a, b in g.edges()]
    return Graph.build(g.number_of_nodes(), edges)
