"""Skip-gram with negative sampling (SGNS) over a walk corpus.

Each walk is treated as a sentence: every (center, context) pair within
the window is a positive example, pushed apart from k vertices sampled
from the unigram^0.75 corpus distribution. The per-pair update lives in
:func:`sgns_step` (plain numpy, the reference used by the gradient
tests); :func:`train` runs the same math in a numba kernel so full-size
corpora train in seconds. Negatives are drawn from a counter-based
splitmix64 stream keyed by (seed, global pair index), which makes
single-threaded training bit-reproducible and keeps the draws identical
in the optional multi-worker mode (where only row-update interleaving is
unsynchronized, hogwild style).
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from ._io import atomic_write

_U64 = np.uint64
_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1
_SEED_MASK = (1 << 63) - 1  # keep seeds in non-negative int64 range for the kernel


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 128
    window: int = 10
    negatives: int = 5
    epochs: int = 1
    lr_initial: float = 0.025
    lr_final: float = 0.001
    seed: int = 42
    workers: int = 1           # >1 enables the unsynchronized (non-reproducible) mode
    fast_sigmoid: bool = False  # clamp dot products to [-6, 6] before the sigmoid

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.negatives < 0:
            raise ValueError("dim and window must be >= 1, negatives >= 0")
        if not (self.lr_initial > self.lr_final > 0):
            raise ValueError("need lr_initial > lr_final > 0")
        if self.epochs < 0 or self.workers < 1:
            raise ValueError("epochs must be >= 0 and workers >= 1")


@dataclass
class EmbeddingMatrix:
    """Input (the embedding) and context vectors, one row per vertex."""

    vectors: np.ndarray   # |V| x d, returned as the representation
    context: np.ndarray   # |V| x d


def pair_stream(corpus, window: int):
    """Yield every (center, context) pair within `window` positions.

    For position i of each walk the pairs (walk[i], walk[j]) are emitted
    for all j != i with |i - j| <= window, clipped at walk boundaries.
    """
    for walk in corpus.walks:
        n = len(walk)
        for i in range(n):
            for j in range(max(0, i - window), min(n, i + window + 1)):
                if j != i:
                    yield walk[i], walk[j]


def count_pairs(corpus, window: int) -> int:
    total = 0
    for walk in corpus.walks:
        n = len(walk)
        w = min(window, n - 1)
        total += 2 * (w * n - w * (w + 1) // 2)
    return total


class NegativeTable:
    """Vertex distribution proportional to corpus frequency ** 0.75."""

    def __init__(self, corpus, num_nodes: int, power: float = 0.75):
        counts = np.zeros(num_nodes, dtype=np.float64)
        for walk in corpus.walks:
            for v in walk:
                counts[v] += 1
        if counts.sum() == 0:
            raise ValueError("corpus covers no vertices")
        self.frequencies = counts
        weights = counts ** power
        self.probs = weights / weights.sum()
        self.cdf = np.cumsum(self.probs)
        self.cdf[-1] = 1.0

    def sample(self, rng, k: int) -> np.ndarray:
        return np.searchsorted(self.cdf, rng.random(k), side="right").astype(np.int64)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


def sgns_step(mat: EmbeddingMatrix, center: int, context: int, negs, lr: float) -> float:
    """One SGD step on -log σ(φ_c·φ'_ctx) - Σ_neg log σ(-φ_c·φ'_neg).

    Touches exactly the center row of the input matrix and the context /
    negative rows of the context matrix. All dot products are evaluated
    before any row moves, so the step is one true gradient step even
    when a negative draw duplicates the context row. Returns the
    pre-step loss.
    """
    phi, ctx = mat.vectors, mat.context
    h = phi[center]

    rows = [context] + list(negs)
    dots = [float(h @ ctx[r]) for r in rows]
    loss = float(np.logaddexp(0.0, -dots[0]))
    gains = [_sigmoid(dots[0]) - 1.0]
    for d in dots[1:]:
        loss += float(np.logaddexp(0.0, d))
        gains.append(_sigmoid(d))

    grad_h = np.zeros_like(h)
    for r, g in zip(rows, gains):
        grad_h += g * ctx[r]
    h_old = h.copy()
    for r, g in zip(rows, gains):
        ctx[r] -= lr * g * h_old
    phi[center] -= lr * grad_h
    return loss


# -- counter-based RNG for negative draws (python + numba twins) --------

def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, 64-bit output)."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)

def pair_stream_state(seed: int, step: int) -> int:
    """Starting RNG state for the negatives of global pair index `step`."""
    _, mixed = splitmix64(((seed & _SEED_MASK) ^ 0x6A09E667F3BCC908) & _MASK)
    _, out = splitmix64((mixed ^ (step + 1)) & _MASK)
    return out

def negatives_for_step(seed: int, step: int, k: int, cdf: np.ndarray) -> list[int]:
    """The k negative vertex ids the trainer draws at global pair `step`."""
    state = pair_stream_state(seed, step)
    negs = []
    for _ in range(k):
        state, z = splitmix64(state)
        u = (z >> 11) * (1.0 / (1 << 53))
        negs.append(int(np.searchsorted(cdf, u, side="right")))
    return negs


@njit(cache=True, inline="always")
def _mix64(state):
    state = state + _U64(_GOLDEN)
    z = state
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return state, z ^ (z >> _U64(31))


@njit(cache=True)
def _train_walk(flat, s, e, window, k, phi, ctx, cdf, lr0, lr1, inv_denom,
                seed, base_step, fast, grad_h, negs, gains):
    d = phi.shape[1]
    step = base_step
    for i in range(s, e):
        center = flat[i]
        lo = i - window if i - window > s else s
        hi = i + window if i + window < e - 1 else e - 1
        for j in range(lo, hi + 1):
            if j == i:
                continue
            lr = lr0 + (lr1 - lr0) * (step * inv_denom)
            target = flat[j]
            # negatives from the counter-based stream (twin: negatives_for_step)
            _, mixed = _mix64(_U64(seed) ^ _U64(0x6A09E667F3BCC908))
            _, state = _mix64(mixed ^ _U64(step + 1))
            for r in range(k):
                state, z = _mix64(state)
                u = (z >> _U64(11)) * (1.0 / 9007199254740992.0)
                negs[r] = np.searchsorted(cdf, u, side="right")
            # all dot products against the pre-step rows
            dot = 0.0
            for t in range(d):
                dot += phi[center, t] * ctx[target, t]
            if fast:
                dot = min(6.0, max(-6.0, dot))
            gain0 = 1.0 / (1.0 + np.exp(-dot)) - 1.0
            for r in range(k):
                dot = 0.0
                for t in range(d):
                    dot += phi[center, t] * ctx[negs[r], t]
                if fast:
                    dot = min(6.0, max(-6.0, dot))
                gains[r] = 1.0 / (1.0 + np.exp(-dot))
            # one simultaneous gradient step
            for t in range(d):
                grad_h[t] = gain0 * ctx[target, t]
            for r in range(k):
                for t in range(d):
                    grad_h[t] += gains[r] * ctx[negs[r], t]
            for t in range(d):
                ctx[target, t] -= lr * gain0 * phi[center, t]
            for r in range(k):
                for t in range(d):
                    ctx[negs[r], t] -= lr * gains[r] * phi[center, t]
            for t in range(d):
                phi[center, t] -= lr * grad_h[t]
            step += 1
    return step


@njit(cache=True)
def _train_sequential(flat, offsets, window, k, phi, ctx, cdf, lr0, lr1,
                      inv_denom, seed, epochs, fast):
    d = phi.shape[1]
    grad_h = np.empty(d, dtype=np.float64)
    negs = np.empty(max(k, 1), dtype=np.int64)
    gains = np.empty(max(k, 1), dtype=np.float64)
    step = 0
    for _ep in range(epochs):
        for wi in range(offsets.size - 1):
            step = _train_walk(flat, offsets[wi], offsets[wi + 1], window, k,
                               phi, ctx, cdf, lr0, lr1, inv_denom, seed, step,
                               fast, grad_h, negs, gains)


@njit(cache=True, parallel=True)
def _train_hogwild(flat, offsets, pair_base, window, k, phi, ctx, cdf, lr0,
                   lr1, inv_denom, seed, epochs, pairs_per_epoch, fast):
    d = phi.shape[1]
    n_walks = offsets.size - 1
    for ep in range(epochs):
        epoch_base = ep * pairs_per_epoch
        for wi in prange(n_walks):
            grad_h = np.empty(d, dtype=np.float64)
            negs = np.empty(max(k, 1), dtype=np.int64)
            gains = np.empty(max(k, 1), dtype=np.float64)
            _train_walk(flat, offsets[wi], offsets[wi + 1], window, k, phi,
                        ctx, cdf, lr0, lr1, inv_denom, seed,
                        epoch_base + pair_base[wi], fast, grad_h, negs, gains)


def train(corpus, cfg: TrainConfig, num_nodes: int | None = None) -> EmbeddingMatrix:
    """Train embeddings on the corpus; returns the input vectors as φ.

    The learning rate decays linearly from lr_initial to lr_final over
    all (epoch, pair) steps. Input vectors start seeded uniform in
    [-0.5/d, 0.5/d], context vectors at zero. With epochs=0 the seeded
    initialization is returned unchanged; otherwise vertices that never
    appear in the corpus (isolated in the source graph) end with the
    zero vector.
    """
    if not corpus.walks:
        raise ValueError("cannot train on an empty corpus")
    if num_nodes is None:
        num_nodes = max(max(w) for w in corpus.walks) + 1

    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 0x1D17)))
    bound = 0.5 / cfg.dim
    phi = rng.uniform(-bound, bound, size=(num_nodes, cfg.dim))
    ctx = np.zeros((num_nodes, cfg.dim), dtype=np.float64)
    if cfg.epochs == 0:
        return EmbeddingMatrix(phi, ctx)

    flat = np.fromiter((v for walk in corpus.walks for v in walk), dtype=np.int64,
                       count=sum(len(w) for w in corpus.walks))
    if flat.min() < 0 or flat.max() >= num_nodes:
        raise ValueError(f"corpus vertex ids must lie in [0, {num_nodes})")
    table = NegativeTable(corpus, num_nodes)
    offsets = np.zeros(len(corpus.walks) + 1, dtype=np.int64)
    np.cumsum([len(w) for w in corpus.walks], out=offsets[1:])

    pairs_per_epoch = count_pairs(corpus, cfg.window)
    total_steps = pairs_per_epoch * cfg.epochs
    inv_denom = 1.0 / max(total_steps - 1, 1)

    seed = cfg.seed & _SEED_MASK
    if cfg.workers == 1:
        _train_sequential(flat, offsets, cfg.window, cfg.negatives, phi, ctx,
                          table.cdf, cfg.lr_initial, cfg.lr_final, inv_denom,
                          seed, cfg.epochs, cfg.fast_sigmoid)
    else:
        per_walk = np.array([_walk_pairs(int(offsets[i + 1] - offsets[i]), cfg.window)
                             for i in range(len(corpus.walks))], dtype=np.int64)
        pair_base = np.zeros(len(corpus.walks), dtype=np.int64)
        np.cumsum(per_walk[:-1], out=pair_base[1:])
        numba.set_num_threads(min(cfg.workers, numba.config.NUMBA_NUM_THREADS))
        _train_hogwild(flat, offsets, pair_base, cfg.window, cfg.negatives, phi,
                       ctx, table.cdf, cfg.lr_initial, cfg.lr_final, inv_denom,
                       seed, cfg.epochs, pairs_per_epoch, cfg.fast_sigmoid)

    phi[table.frequencies == 0] = 0.0
    ctx[table.frequencies == 0] = 0.0
    return EmbeddingMatrix(phi, ctx)


def _walk_pairs(n: int, window: int) -> int:
    w = min(window, n - 1)
    return 2 * (w * n - w * (w + 1) // 2)


def warmup():
    """Force numba compilation of the training kernels on a toy corpus,
    so timed runs do not pay the JIT cost."""
    from .walks import WalkCorpus
    tiny = WalkCorpus([[0, 1, 0], [1, 0, 1]])
    train(tiny, TrainConfig(dim=4, window=2, negatives=2, epochs=1,
                            lr_initial=0.025, lr_final=0.001, seed=0))
    train(tiny, TrainConfig(dim=4, window=2, negatives=2, epochs=1,
                            lr_initial=0.025, lr_final=0.001, seed=0, workers=2))


# -- text serialization ---------------------------------------------------

def save_embeddings(path, vectors: np.ndarray, labels):
    """First line "num_vectors dim", then "label v1 ... vd" per vertex
    with 6-decimal fixed-point values."""
    n, d = vectors.shape
    if len(labels) != n:
        raise ValueError("labels length must match number of vectors")
    with atomic_write(path) as f:
        f.write(f"{n} {d}\n")
        for lab, row in zip(labels, vectors):
            f.write(lab + " " + " ".join(f"{x:.6f}" for x in row) + "\n")


def load_embeddings(path):
    """Inverse of :func:`save_embeddings`; returns (labels, matrix)."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected 'num_vectors dim' header")
        n, d = int(header[0]), int(header[1])
        labels, rows = [], np.zeros((n, d), dtype=np.float64)
        for i in range(n):
            parts = f.readline().split()
            if len(parts) != d + 1:
                raise ValueError(f"{path}: row {i} has {len(parts) - 1} values, expected {d}")
            labels.append(parts[0])
            rows[i] = [float(x) for x in parts[1:]]
    return labels, rows
