"""Similarity-based graph compression.

Vertices whose neighbor sets are nearly identical produce nearly
identical random walks, so walking and training on each of them
separately is wasted work. This module scores 2-hop vertex pairs with
the Dice coefficient of their neighbor sets,

    score(u, v) = 2 |N(u) ∩ N(v)| / (|N(u)| + |N(v)|),

merges every pair scoring strictly above a threshold into super-nodes
(transitively, via union-find), and emits a weighted summary graph in
which a super-edge weight is the summed weight of the original edges
crossing between the two member sets. Walks on the summary graph then
reproduce the original transition statistics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ._io import atomic_write
from .graph import Graph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimilarityPair:
    u: int
    v: int          # always u < v
    score: float    # in (0, 1]


@dataclass(frozen=True)
class Mapping:
    """Surjective map original vertex -> super-node.

    assignment[v] is the super-node id of vertex v; members[s] lists the
    vertices of super-node s (sorted). members partitions the vertex set.
    """

    assignment: np.ndarray
    members: list[np.ndarray]

    @property
    def num_super_nodes(self) -> int:
        return len(self.members)

    def save(self, path, labels):
        """One line per super-node: "super_id<TAB>member,member,..." using
        original vertex labels."""
        with atomic_write(path) as f:
            for sid, mem in enumerate(self.members):
                f.write(f"{sid}\t{','.join(labels[v] for v in mem)}\n")

    @classmethod
    def load(cls, path, graph: Graph) -> "Mapping":
        assignment = np.full(graph.num_nodes, -1, dtype=np.int64)
        members = []
        with open(path, "r", encoding="utf-8") as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    sid_str, member_str = line.split("\t")
                    sid = int(sid_str)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: expected 'id<TAB>members'") from None
                if sid != len(members):
                    raise ValueError(f"{path}:{lineno}: super-node ids must be dense")
                ids = np.array(sorted(graph.id_of(lab) for lab in member_str.split(",")),
                               dtype=np.int64)
                members.append(ids)
                assignment[ids] = sid
        if (assignment < 0).any():
            missing = int((assignment < 0).sum())
            raise ValueError(f"{path}: mapping misses {missing} vertices of the graph")
        return cls(assignment, members)


@dataclass(frozen=True)
class CompressionStats:
    original_nodes: int
    original_edges: int
    compressed_nodes: int
    compressed_edges: int
    merged_pairs: int          # union operations that actually joined two groups
    internal_edges_dropped: int

    def summary_line(self) -> str:
        return (f"nodes {self.original_nodes} -> {self.compressed_nodes}, "
                f"edges {self.original_edges} -> {self.compressed_edges}, "
                f"{self.merged_pairs} merges, "
                f"{self.internal_edges_dropped} internal edges dropped")


@dataclass(frozen=True)
class CompressionResult:
    summary: Graph
    mapping: Mapping
    lam: float
    stats: CompressionStats = field(repr=False)


def neighborhood_similarity(g: Graph, u: int, v: int) -> float:
    """Dice coefficient of the (unweighted) neighbor sets of u and v."""
    if u == v:
        raise ValueError("neighborhood similarity is undefined for u == v")
    du, dv = g.degree(u), g.degree(v)
    if du == 0 or dv == 0:
        raise ValueError("neighborhood similarity requires degree >= 1 on both vertices")
    common = np.intersect1d(g.neighbor_ids(u), g.neighbor_ids(v), assume_unique=True)
    return 2.0 * len(common) / (du + dv)


def candidate_pairs(g: Graph) -> list[SimilarityPair]:
    """Score every 2-hop vertex pair.

    Only pairs with a common neighbor can score above zero, so instead of
    all |V|^2 pairs we accumulate, for every hub vertex, one shared-neighbor
    count per pair of its neighbors. Returned pairs are deduplicated,
    (u < v)-ordered and sorted, with score > 0.
    """
    if g.num_nodes == 0:
        raise ValueError("candidate_pairs requires a nonempty graph")
    common: dict[tuple[int, int], int] = {}
    for hub in range(g.num_nodes):
        nbrs = g.neighbor_ids(hub)
        d = len(nbrs)
        for i in range(d):
            a = int(nbrs[i])
            for j in range(i + 1, d):
                key = (a, int(nbrs[j]))  # nbrs sorted, so a < nbrs[j]
                common[key] = common.get(key, 0) + 1
    deg = np.diff(g.offsets)
    return [SimilarityPair(u, v, 2.0 * c / (int(deg[u]) + int(deg[v])))
            for (u, v), c in sorted(common.items())]


class _UnionFind:
    """Union-find with path compression; roots canonicalized afterwards."""

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def compress(g: Graph, lam: float) -> CompressionResult:
    """Merge all vertex pairs with neighborhood similarity > lam.

    Merging is transitive: if u~v and v~x both exceed the threshold, u, v
    and x end up in one super-node. Scores are computed on the original
    graph only, and pairs are processed in ascending (u, v) order, so the
    result is deterministic and independent of merge order. Cross-group
    edge weights are summed; edges internal to a group are dropped
    (counted in stats).
    """
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"similarity threshold must be in (0, 1], got {lam}")

    uf = _UnionFind(g.num_nodes)
    merged_pairs = 0
    for pair in candidate_pairs(g):
        if pair.score > lam and uf.union(pair.u, pair.v):
            merged_pairs += 1

    # super-node ids in order of first appearance of each group's root
    root_to_sid: dict[int, int] = {}
    assignment = np.zeros(g.num_nodes, dtype=np.int64)
    for v in range(g.num_nodes):
        r = uf.find(v)
        sid = root_to_sid.get(r)
        if sid is None:
            sid = len(root_to_sid)
            root_to_sid[r] = sid
        assignment[v] = sid
    num_super = len(root_to_sid)
    members = [[] for _ in range(num_super)]
    for v in range(g.num_nodes):
        members[assignment[v]].append(v)
    mapping = Mapping(assignment, [np.array(m, dtype=np.int64) for m in members])

    super_edges: dict[tuple[int, int], float] = {}
    internal = 0
    for u, v, w in g.edge_iter():
        su, sv = int(assignment[u]), int(assignment[v])
        if su == sv:
            internal += 1
            continue
        key = (su, sv) if su < sv else (sv, su)
        super_edges[key] = super_edges.get(key, 0.0) + w
    summary = Graph.build(num_super,
                          [(u, v, w) for (u, v), w in super_edges.items()],
                          labels=[str(i) for i in range(num_super)])

    stats = CompressionStats(
        original_nodes=g.num_nodes,
        original_edges=g.num_edges,
        compressed_nodes=summary.num_nodes,
        compressed_edges=summary.num_edges,
        merged_pairs=merged_pairs,
        internal_edges_dropped=internal,
    )
    log.info("compressed at threshold %.3g: %s", lam, stats.summary_line())
    return CompressionResult(summary, mapping, lam, stats)
