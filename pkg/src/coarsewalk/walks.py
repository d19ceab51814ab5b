"""Random-walk corpus generation over a weighted graph.

Two step rules: "uniform" picks the next vertex with probability
proportional to edge weight (the one-step transition row), "biased"
additionally reweights by the node2vec-style return parameter p and
in-out parameter q given the previous vertex. The corpus is a pure
function of (graph, config): every walk draws from its own RNG substream
keyed by (seed, epoch, start vertex).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._io import atomic_write
from .graph import Graph


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 40
    walk_length: int = 10      # steps per walk; a walk has at most walk_length+1 vertices
    strategy: str = "uniform"  # "uniform" | "biased"
    p: float = 1.0             # return parameter (biased only)
    q: float = 1.0             # in-out parameter (biased only)
    seed: int = 42

    def __post_init__(self):
        if self.walks_per_node < 1 or self.walk_length < 1:
            raise ValueError("walks_per_node and walk_length must be >= 1")
        if self.strategy not in ("uniform", "biased"):
            raise ValueError(f"unknown walk strategy {self.strategy!r}")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")


@dataclass
class WalkCorpus:
    walks: list[list[int]]
    graph_fingerprint: str = ""

    def __len__(self):
        return len(self.walks)


class AliasSampler:
    """Per-vertex alias tables for O(1) weighted next-step sampling."""

    def __init__(self, g: Graph):
        self.g = g
        n_entries = len(g.neighbors)
        self.prob = np.zeros(n_entries, dtype=np.float64)
        self.alias = np.zeros(n_entries, dtype=np.int64)
        for u in range(g.num_nodes):
            s, e = g.offsets[u], g.offsets[u + 1]
            if e > s:
                self._build(g.weights[s:e], self.prob[s:e], self.alias[s:e])

    @staticmethod
    def _build(weights, prob_out, alias_out):
        # Vose's method
        k = len(weights)
        scaled = weights * (k / weights.sum())
        small = [i for i in range(k) if scaled[i] < 1.0]
        large = [i for i in range(k) if scaled[i] >= 1.0]
        scaled = scaled.copy()
        while small and large:
            s = small.pop()
            l = large.pop()
            prob_out[s] = scaled[s]
            alias_out[s] = l
            scaled[l] = scaled[l] - (1.0 - scaled[s])
            (small if scaled[l] < 1.0 else large).append(l)
        for i in large:
            prob_out[i] = 1.0
        for i in small:
            prob_out[i] = 1.0

    def step(self, u, rng) -> int:
        s = self.g.offsets[u]
        d = self.g.offsets[u + 1] - s
        i = s + rng.integers(d)
        if rng.random() >= self.prob[i]:
            i = s + self.alias[i]
        return int(self.g.neighbors[i])


def uniform_walk(g: Graph, start: int, length: int, rng, sampler: AliasSampler | None = None):
    """Weighted random walk of `length` steps starting at `start`.

    The step distribution at u equals g.transition_row(u). An isolated
    start yields the degenerate single-vertex walk [start].
    """
    if g.degree(start) == 0:
        return [int(start)]
    if sampler is None:
        sampler = AliasSampler(g)
    walk = [int(start)]
    cur = start
    for _ in range(length):
        cur = sampler.step(cur, rng)
        walk.append(cur)
    return walk


def biased_step_distribution(g: Graph, prev: int, cur: int, p: float, q: float):
    """Next-step distribution at `cur` given the walk came from `prev`.

    Edge weight to x is scaled by 1/p if x == prev, by 1 if x is a
    neighbor of prev, and by 1/q otherwise. Returns (targets, probs).
    """
    nbrs = g.neighbor_ids(cur)
    w = g.edge_weights(cur).astype(np.float64, copy=True)
    back_one_hop = np.isin(nbrs, g.neighbor_ids(prev), assume_unique=True)
    alpha = np.where(back_one_hop, 1.0, 1.0 / q)
    alpha[nbrs == prev] = 1.0 / p
    w *= alpha
    return nbrs, w / w.sum()


def biased_walk(g: Graph, start: int, length: int, p: float, q: float, rng,
                sampler: AliasSampler | None = None):
    """p/q-biased random walk; the first step uses the uniform weighted rule."""
    if g.degree(start) == 0:
        return [int(start)]
    if sampler is None:
        sampler = AliasSampler(g)
    walk = [int(start), sampler.step(start, rng)]
    for _ in range(length - 1):
        targets, probs = biased_step_distribution(g, walk[-2], walk[-1], p, q)
        i = np.searchsorted(np.cumsum(probs), rng.random())
        walk.append(int(targets[min(i, len(targets) - 1)]))
    return walk


def _walk_rng(seed, *key):
    return np.random.default_rng(np.random.SeedSequence((seed, *key)))


def generate_corpus(g: Graph, cfg: WalkConfig) -> WalkCorpus:
    """Sample cfg.walks_per_node walks from every non-isolated vertex.

    One pass ("epoch") per walk index: each epoch visits the vertices in
    a seeded shuffled order and appends one walk per vertex, so the
    corpus order mixes vertices for downstream SGD. Walk contents come
    from per-(epoch, vertex) substreams, making the corpus reproducible
    from (graph, config) alone.
    """
    if g.num_nodes == 0:
        raise ValueError("cannot generate a corpus on an empty graph")
    sampler = AliasSampler(g)
    active = np.flatnonzero(np.diff(g.offsets) > 0)
    walks: list[list[int]] = []
    for epoch in range(cfg.walks_per_node):
        order = _walk_rng(cfg.seed, epoch).permutation(active)
        for v in order:
            rng = _walk_rng(cfg.seed, epoch, int(v))
            if cfg.strategy == "uniform":
                walks.append(uniform_walk(g, int(v), cfg.walk_length, rng, sampler))
            else:
                walks.append(biased_walk(g, int(v), cfg.walk_length, cfg.p, cfg.q,
                                         rng, sampler))
    return WalkCorpus(walks, g.fingerprint())


def save_corpus(corpus: WalkCorpus, g: Graph, path):
    """Dump one walk per line as space-separated vertex labels."""
    with atomic_write(path) as f:
        for walk in corpus.walks:
            f.write(" ".join(g.labels[v] for v in walk) + "\n")
