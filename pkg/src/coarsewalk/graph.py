"""Weighted undirected simple graph with transition-probability utilities.

The graph is stored in CSR form (offsets / neighbors / weights) with
neighbor lists sorted ascending, which makes membership tests and
set intersections cheap. Vertices are dense integer ids 0..n-1; the
original string labels from an edge-list file are kept for I/O.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass

import numpy as np

from ._io import atomic_write

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransitionRow:
    """One-step transition distribution out of a single vertex."""

    node: int
    targets: np.ndarray  # neighbor ids, sorted ascending
    probs: np.ndarray    # aligned with targets, sums to 1

    def as_pairs(self):
        return list(zip(self.targets.tolist(), self.probs.tolist()))


class Graph:
    """Immutable weighted undirected simple graph.

    Invariants: no self-loops, no parallel edges, every weight > 0, and
    (u,v,w) is stored iff (v,u,w) is. Construct via :meth:`build` or
    :func:`load_edge_list`; the raw constructor assumes valid CSR arrays.
    """

    __slots__ = ("offsets", "neighbors", "weights", "labels",
                 "_label_to_id", "self_loops_dropped")

    def __init__(self, offsets, neighbors, weights, labels, self_loops_dropped=0):
        self.offsets = offsets
        self.neighbors = neighbors
        self.weights = weights
        self.labels = labels
        self._label_to_id = {lab: i for i, lab in enumerate(labels)}
        self.self_loops_dropped = self_loops_dropped

    # -- construction -------------------------------------------------

    @classmethod
    def build(cls, num_nodes, edges, labels=None):
        """Build a graph from an iterable of (u, v, weight) int-id triples.

        Self-loops are dropped (counted), parallel edges are merged by
        summing their weights, and the edge set is symmetrized.
        """
        if labels is None:
            labels = [str(i) for i in range(num_nodes)]
        if len(labels) != num_nodes:
            raise ValueError("labels length must equal num_nodes")

        merged: dict[tuple[int, int], float] = {}
        self_loops = 0
        for u, v, w in edges:
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise ValueError(f"edge ({u},{v}) out of range for {num_nodes} nodes")
            if w <= 0:
                raise ValueError(f"edge ({u},{v}) has non-positive weight {w}")
            if u == v:
                self_loops += 1
                continue
            key = (u, v) if u < v else (v, u)
            merged[key] = merged.get(key, 0.0) + float(w)
        if self_loops:
            log.warning("dropped %d self-loop(s)", self_loops)

        deg = np.zeros(num_nodes, dtype=np.int64)
        for (u, v) in merged:
            deg[u] += 1
            deg[v] += 1
        offsets = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(deg, out=offsets[1:])
        neighbors = np.zeros(offsets[-1], dtype=np.int64)
        weights = np.zeros(offsets[-1], dtype=np.float64)
        cursor = offsets[:-1].copy()
        for (u, v), w in merged.items():
            neighbors[cursor[u]] = v
            weights[cursor[u]] = w
            cursor[u] += 1
            neighbors[cursor[v]] = u
            weights[cursor[v]] = w
            cursor[v] += 1
        # sort each adjacency slice by neighbor id
        for u in range(num_nodes):
            s, e = offsets[u], offsets[u + 1]
            order = np.argsort(neighbors[s:e], kind="stable")
            neighbors[s:e] = neighbors[s:e][order]
            weights[s:e] = weights[s:e][order]

        neighbors.setflags(write=False)
        weights.setflags(write=False)
        offsets.setflags(write=False)
        return cls(offsets, neighbors, weights, list(labels), self_loops)

    # -- basic queries ------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.offsets) - 1

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return len(self.neighbors) // 2

    @property
    def total_edge_weight(self) -> float:
        """Sum of weights over undirected edges (each edge counted once)."""
        return float(self.weights.sum()) / 2.0

    def degree(self, u) -> int:
        return int(self.offsets[u + 1] - self.offsets[u])

    def weighted_degree(self, u) -> float:
        return float(self.weights[self.offsets[u]:self.offsets[u + 1]].sum())

    def neighbor_ids(self, u) -> np.ndarray:
        """Sorted neighbor ids of u (read-only view)."""
        return self.neighbors[self.offsets[u]:self.offsets[u + 1]]

    def edge_weights(self, u) -> np.ndarray:
        """Weights aligned with :meth:`neighbor_ids` (read-only view)."""
        return self.weights[self.offsets[u]:self.offsets[u + 1]]

    def has_edge(self, u, v) -> bool:
        nbrs = self.neighbor_ids(u)
        i = np.searchsorted(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def id_of(self, label) -> int:
        return self._label_to_id[label]

    def label_of(self, u) -> str:
        return self.labels[u]

    def edge_iter(self):
        """Yield each undirected edge once as (u, v, w) with u < v."""
        for u in range(self.num_nodes):
            s, e = self.offsets[u], self.offsets[u + 1]
            for v, w in zip(self.neighbors[s:e], self.weights[s:e]):
                if u < v:
                    yield u, int(v), float(w)

    # -- transition probabilities --------------------------------------

    def transition_row(self, u) -> TransitionRow:
        """One-step random-walk distribution out of u: weight / weighted degree."""
        if self.degree(u) == 0:
            raise ValueError(f"vertex {u} is isolated: no outgoing transition exists")
        w = self.edge_weights(u)
        return TransitionRow(int(u), self.neighbor_ids(u), w / w.sum())

    def cosine_transition_similarity(self, u, v) -> float:
        """Cosine (Euclidean-norm) similarity of the transition rows of u and v.

        On an unweighted graph this equals |N(u) ∩ N(v)| / sqrt(|N(u)| |N(v)|).
        """
        ru = self.transition_row(u)
        rv = self.transition_row(v)
        common, iu, iv = np.intersect1d(ru.targets, rv.targets,
                                        assume_unique=True, return_indices=True)
        if len(common) == 0:
            return 0.0
        dot = float(np.dot(ru.probs[iu], rv.probs[iv]))
        return dot / (float(np.linalg.norm(ru.probs)) * float(np.linalg.norm(rv.probs)))

    # -- identity / serialization --------------------------------------

    def fingerprint(self) -> str:
        """Short structural hash (ignores labels)."""
        h = hashlib.sha256()
        h.update(self.offsets.tobytes())
        h.update(self.neighbors.tobytes())
        h.update(self.weights.tobytes())
        return h.hexdigest()[:16]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.labels == other.labels
                and np.array_equal(self.offsets, other.offsets)
                and np.array_equal(self.neighbors, other.neighbors)
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash(self.fingerprint())

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"

    def save_edge_list(self, path):
        """Write one "label_u label_v weight" line per undirected edge.

        Weights keep full decimal precision so a reload reproduces the
        graph exactly.
        """
        with atomic_write(path) as f:
            for u, v, w in self.edge_iter():
                f.write(f"{self.labels[u]} {self.labels[v]} {w!r}\n")


def load_edge_list(path, weighted: bool = False) -> Graph:
    """Load a whitespace-separated edge list into a :class:`Graph`.

    Each non-comment line is "u v" or "u v w"; lines starting with '#'
    are ignored. With weighted=False any third column is ignored and all
    edges get weight 1. Duplicate edges are merged by summing weights and
    self-loops are dropped with a logged count.
    """
    labels: list[str] = []
    label_to_id: dict[str, int] = {}

    def intern(lab):
        i = label_to_id.get(lab)
        if i is None:
            i = len(labels)
            label_to_id[lab] = i
            labels.append(lab)
        return i

    edges = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(
                    f"{path}:{lineno}: expected 'u v' or 'u v w', got {len(parts)} fields")
            w = 1.0
            if weighted and len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: weight {parts[2]!r} is not a number") from None
                if w <= 0:
                    raise ValueError(f"{path}:{lineno}: weight must be > 0, got {w}")
            edges.append((intern(parts[0]), intern(parts[1]), w))

    return Graph.build(len(labels), edges, labels)
