"""Node-classification evaluation of embeddings.

Protocol: sample a seeded train/test split over the labeled vertices,
fit one L2-regularized logistic-regression model per label (one-vs-rest),
predict (argmax for single-label data, top-k with k = the vertex's true
label count for multi-label data), score macro/micro F1, repeat over
trials, and record walk/train wall-clock so a compressed pipeline can be
compared against the uncompressed baseline under identical seeds.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from ._io import atomic_write
from .backmap import expand
from .compression import Mapping, compress
from .embedding import TrainConfig, train, warmup
from .graph import Graph
from .walks import WalkConfig, generate_corpus

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledDataset:
    """Vertex id -> nonempty set of label ids, plus the label universe."""

    labels: dict[int, frozenset[int]]
    label_universe: tuple[int, ...]
    is_multilabel: bool

    @classmethod
    def from_dict(cls, labels, is_multilabel=None):
        labels = {int(v): frozenset(int(l) for l in ls) for v, ls in labels.items()}
        if any(not ls for ls in labels.values()):
            raise ValueError("every labeled vertex needs at least one label")
        universe = tuple(sorted(set().union(*labels.values())))
        if is_multilabel is None:
            is_multilabel = any(len(ls) > 1 for ls in labels.values())
        return cls(labels, universe, is_multilabel)

    @classmethod
    def from_file(cls, path, graph: Graph, is_multilabel=None):
        """Parse "vertex_label label_id [label_id ...]" lines.

        Graph vertices missing from the file are simply unlabeled
        (embedded but never split). Label rows naming vertices the graph
        does not contain are skipped with a warning; if no row matches
        the graph at all, the files almost certainly do not belong
        together and loading fails.
        """
        labels: dict[int, set[int]] = {}
        unknown = []
        with open(path, "r", encoding="utf-8") as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) < 2:
                    raise ValueError(f"{path}:{lineno}: expected 'vertex label [label ...]'")
                try:
                    v = graph.id_of(parts[0])
                except KeyError:
                    unknown.append(parts[0])
                    continue
                labels.setdefault(v, set()).update(int(x) for x in parts[1:])
        if unknown:
            log.warning("%s: skipped %d labeled vertices absent from the graph "
                        "(first: %s)", path, len(unknown), ", ".join(unknown[:3]))
        if not labels:
            raise ValueError(f"{path}: no labeled vertex matches the graph")
        return cls.from_dict(labels, is_multilabel)

    @property
    def vertices(self):
        return sorted(self.labels)


@dataclass(frozen=True)
class EvalConfig:
    train_ratios: tuple[float, ...] = (0.05,)
    repeats: int = 10
    reg: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if not all(0 < r < 1 for r in self.train_ratios):
            raise ValueError("train ratios must lie in (0, 1)")
        if self.repeats < 1 or self.reg <= 0:
            raise ValueError("repeats must be >= 1 and reg > 0")


def split(dataset: LabeledDataset, ratio: float, trial_seed: int):
    """Seeded uniform split of the labeled vertices, without replacement.

    Train size is round(ratio * n) clamped to >= 1; errors if the test
    side would be empty.
    """
    if not (0 < ratio < 1):
        raise ValueError(f"train ratio must be in (0, 1), got {ratio}")
    vertices = np.array(dataset.vertices, dtype=np.int64)
    n_train = max(1, int(round(ratio * len(vertices))))
    if n_train >= len(vertices):
        raise ValueError(f"ratio {ratio} leaves no test vertices ({len(vertices)} labeled)")
    perm = np.random.default_rng(np.random.SeedSequence(trial_seed)).permutation(vertices)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


@dataclass
class OvrClassifier:
    label_ids: tuple[int, ...]   # sorted ascending
    weights: np.ndarray          # num_labels x dim
    intercepts: np.ndarray       # num_labels

    def scores(self, X) -> np.ndarray:
        return X @ self.weights.T + self.intercepts

    def probabilities(self, X) -> np.ndarray:
        return expit(self.scores(X))


def _fit_binary_logreg(X, y, reg):
    """Minimize sum_i log(1+exp(-y_i (x_i.w + b))) + reg/2 ||w||^2 with
    L-BFGS-B (analytic gradient) to gradient norm 1e-6 or 1000 iterations.
    The intercept is not penalized."""
    n, d = X.shape

    def objective(theta):
        w, b = theta[:-1], theta[-1]
        z = y * (X @ w + b)
        loss = np.logaddexp(0.0, -z).sum() + 0.5 * reg * (w @ w)
        dz = -y * expit(-z)
        grad_w = X.T @ dz + reg * w
        grad_b = dz.sum()
        return loss, np.append(grad_w, grad_b)

    res = minimize(objective, np.zeros(d + 1), jac=True, method="L-BFGS-B",
                   options={"gtol": 1e-6, "maxiter": 1000, "ftol": 0.0})
    return res.x[:-1], float(res.x[-1])


def train_ovr_logreg(embeddings, train_nodes, dataset: LabeledDataset,
                     reg: float = 1.0) -> OvrClassifier:
    """One binary L2-regularized logistic model per label in the universe.

    A label with no positive training example gets a constant-negative
    model (zero weights, -inf intercept) and a logged warning.
    """
    X = embeddings[np.asarray(train_nodes)]
    label_ids = dataset.label_universe
    weights = np.zeros((len(label_ids), X.shape[1]))
    intercepts = np.zeros(len(label_ids))
    for li, label in enumerate(label_ids):
        y = np.array([1.0 if label in dataset.labels[v] else -1.0 for v in train_nodes])
        if not (y > 0).any():
            log.warning("label %d has no positive train examples; predicting negative", label)
            intercepts[li] = -np.inf
            continue
        weights[li], intercepts[li] = _fit_binary_logreg(X, y, reg)
    return OvrClassifier(tuple(label_ids), weights, intercepts)


def predict(clf: OvrClassifier, embeddings, test_nodes, dataset: LabeledDataset):
    """Predicted label set per test vertex.

    Single-label data: argmax of the per-label scores. Multi-label data:
    the top k_v labels where k_v is the vertex's true label count. Score
    ties break toward the lowest label id.
    """
    test_nodes = np.asarray(test_nodes)
    scores = clf.scores(embeddings[test_nodes])
    out: dict[int, tuple[int, ...]] = {}
    for row, v in enumerate(test_nodes):
        v = int(v)
        if dataset.is_multilabel:
            k = len(dataset.labels[v])
            order = np.argsort(-scores[row], kind="stable")[:k]
            out[v] = tuple(sorted(clf.label_ids[i] for i in order))
        else:
            out[v] = (clf.label_ids[int(np.argmax(scores[row]))],)
    return out


def f1_scores(predictions, truth, label_universe):
    """(macro F1, micro F1) from per-label confusion counts.

    Macro averages per-label F1 over the whole universe; a label with no
    true and no predicted occurrences contributes 0. Micro pools TP/FP/FN
    across labels.
    """
    if set(predictions) != set(truth):
        raise ValueError("predictions and truth must cover the same vertices")
    tp = {l: 0 for l in label_universe}
    fp = dict(tp)
    fn = dict(tp)
    for v, pred in predictions.items():
        pred = set(pred)
        true = set(truth[v])
        for l in pred & true:
            tp[l] += 1
        for l in pred - true:
            fp[l] += 1
        for l in true - pred:
            fn[l] += 1

    def f1(t, p, n):
        prec = t / (t + p) if t + p else 0.0
        rec = t / (t + n) if t + n else 0.0
        return 2 * prec * rec / (prec + rec) if prec + rec else 0.0

    macro = float(np.mean([f1(tp[l], fp[l], fn[l]) for l in label_universe]))
    total_tp = sum(tp.values())
    total_fp = sum(fp.values())
    total_fn = sum(fn.values())
    micro = f1(total_tp, total_fp, total_fn)
    return macro, micro


# -- pipeline comparison ---------------------------------------------------

@dataclass
class TrialScore:
    ratio: float
    trial: int
    macro_f1: float
    micro_f1: float


@dataclass
class ArmReport:
    """One pipeline run: optional compression, walks, training, evaluation."""

    lam: float | None                 # None = uncompressed baseline
    compress_seconds: float
    walk_seconds: float
    train_seconds: float
    compressed_nodes: int
    compressed_edges: int
    trials: list[TrialScore] = field(default_factory=list)
    vectors: np.ndarray | None = None
    mapping: Mapping | None = None

    @property
    def total_seconds(self) -> float:
        return self.compress_seconds + self.walk_seconds + self.train_seconds

    @property
    def embed_seconds(self) -> float:
        """Walk + train time, the quantity compared across arms."""
        return self.walk_seconds + self.train_seconds

    def mean_scores(self, ratio):
        ms = [t.macro_f1 for t in self.trials if t.ratio == ratio]
        mi = [t.micro_f1 for t in self.trials if t.ratio == ratio]
        return float(np.mean(ms)), float(np.mean(mi))


def _split_seed(eval_seed, ratio_index, trial):
    return (eval_seed, 0x5EED, ratio_index, trial)


def run_arm(g: Graph, dataset: LabeledDataset | None, lam, walk_cfg: WalkConfig,
            train_cfg: TrainConfig, eval_cfg: EvalConfig, keep_vectors=True) -> ArmReport:
    """Run one pipeline arm and evaluate it at every (ratio, trial)."""
    mapping = None
    compress_seconds = 0.0
    work = g
    if lam is not None:
        t0 = time.perf_counter()
        result = compress(g, lam)
        compress_seconds = time.perf_counter() - t0
        work = result.summary
        mapping = result.mapping

    t0 = time.perf_counter()
    corpus = generate_corpus(work, walk_cfg)
    walk_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    emb = train(corpus, train_cfg, work.num_nodes)
    train_seconds = time.perf_counter() - t0

    vectors = emb.vectors if mapping is None else expand(mapping, emb.vectors)
    report = ArmReport(lam, compress_seconds, walk_seconds, train_seconds,
                       work.num_nodes, work.num_edges,
                       vectors=vectors if keep_vectors else None,
                       mapping=mapping)

    if dataset is not None:
        for ri, ratio in enumerate(eval_cfg.train_ratios):
            for trial in range(eval_cfg.repeats):
                tr, te = split(dataset, ratio, _split_seed(eval_cfg.seed, ri, trial))
                clf = train_ovr_logreg(vectors, tr, dataset, eval_cfg.reg)
                preds = predict(clf, vectors, te, dataset)
                macro, micro = f1_scores(preds, {v: dataset.labels[v] for v in te},
                                         dataset.label_universe)
                report.trials.append(TrialScore(ratio, trial, macro, micro))
    return report


def run_comparison(g: Graph, dataset: LabeledDataset | None, lambdas,
                   walk_cfg: WalkConfig, train_cfg: TrainConfig,
                   eval_cfg: EvalConfig, include_baseline=True) -> list[ArmReport]:
    """Baseline plus one arm per threshold, identical seeds throughout.

    The numba kernels are warmed up first so wall-clock comparisons
    never include JIT compilation.
    """
    warmup()
    arms = []
    if include_baseline:
        log.info("running baseline arm")
        arms.append(run_arm(g, dataset, None, walk_cfg, train_cfg, eval_cfg))
    for lam in lambdas:
        log.info("running compressed arm at threshold %.3g", lam)
        arms.append(run_arm(g, dataset, lam, walk_cfg, train_cfg, eval_cfg))
    return arms


CSV_COLUMNS = ("dataset", "lambda", "ratio", "trial", "macro_f1", "micro_f1",
               "walk_s", "train_s", "total_s", "compressed_V", "compressed_E")


def write_report_csv(path, dataset_name: str, arms: list[ArmReport]):
    """One row per (arm, ratio, trial); baseline rows have an empty lambda."""
    with atomic_write(path) as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for arm in arms:
            lam = "" if arm.lam is None else f"{arm.lam:g}"
            for t in arm.trials:
                writer.writerow([dataset_name, lam, f"{t.ratio:g}", t.trial,
                                 f"{t.macro_f1:.6f}", f"{t.micro_f1:.6f}",
                                 f"{arm.walk_seconds:.4f}", f"{arm.train_seconds:.4f}",
                                 f"{arm.total_seconds:.4f}",
                                 arm.compressed_nodes, arm.compressed_edges])
            if not arm.trials:
                writer.writerow([dataset_name, lam, "", "", "", "",
                                 f"{arm.walk_seconds:.4f}", f"{arm.train_seconds:.4f}",
                                 f"{arm.total_seconds:.4f}",
                                 arm.compressed_nodes, arm.compressed_edges])


def gain_summary(baseline: ArmReport, compressed: ArmReport) -> str:
    """Relative changes of the compressed arm vs the baseline, in percent."""
    lines = [f"threshold {compressed.lam:g} vs baseline:"]
    dt = 100.0 * (baseline.embed_seconds - compressed.embed_seconds) / baseline.embed_seconds
    lines.append(f"  walk+train time {baseline.embed_seconds:.2f}s -> "
                 f"{compressed.embed_seconds:.2f}s (gain {dt:+.2f}%)")
    lines.append(f"  graph size {baseline.compressed_nodes}/{baseline.compressed_edges} -> "
                 f"{compressed.compressed_nodes}/{compressed.compressed_edges} (V/E)")
    for ratio in sorted({t.ratio for t in baseline.trials}):
        bma, bmi = baseline.mean_scores(ratio)
        cma, cmi = compressed.mean_scores(ratio)
        lines.append(f"  ratio {ratio:g}: macro F1 {bma:.4f} -> {cma:.4f} "
                     f"({100 * (cma - bma) / bma if bma else 0.0:+.2f}%), "
                     f"micro F1 {bmi:.4f} -> {cmi:.4f} "
                     f"({100 * (cmi - bmi) / bmi if bmi else 0.0:+.2f}%)")
    return "\n".join(lines)
