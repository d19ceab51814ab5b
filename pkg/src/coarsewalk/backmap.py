"""Expansion of super-node vectors back to the original vertex set.

Every original vertex receives a copy of its super-node's vector, so all
members of a super-node share one representation and downstream mutation
of one row cannot corrupt its siblings.
"""

from __future__ import annotations

import numpy as np

from .compression import Mapping


def expand(mapping: Mapping, super_vectors: np.ndarray) -> np.ndarray:
    """Per-original-vertex matrix: row v = super_vectors[mapping.assignment[v]].

    Raises if the mapping references a super-node with no vector.
    """
    super_vectors = np.asarray(super_vectors)
    if super_vectors.ndim != 2:
        raise ValueError("super_vectors must be a 2-d (num_super x dim) array")
    highest = int(mapping.assignment.max())
    if highest >= super_vectors.shape[0]:
        raise KeyError(f"super-node {highest} has no vector "
                       f"(matrix has {super_vectors.shape[0]} rows)")
    return super_vectors[mapping.assignment].copy()
