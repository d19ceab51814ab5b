"""Command-line interface.

Subcommands: compress, walk, embed, expand, classify, pipeline. Every
flag default can be overridden by an environment variable with the
COARSEWALK_ prefix (e.g. COARSEWALK_LAMBDA=0.6).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from ._io import atomic_write
from .backmap import expand
from .compression import Mapping, compress
from .embedding import (TrainConfig, load_embeddings, save_embeddings, train)
from .evaluation import (EvalConfig, LabeledDataset, gain_summary, run_arm,
                         run_comparison, write_report_csv)
from .graph import Graph, load_edge_list
from .walks import WalkConfig, WalkCorpus, generate_corpus, save_corpus

ENV_PREFIX = "COARSEWALK_"


def _env(flag, fallback):
    return os.environ.get(ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper(), fallback)


def _lambda_value(text):
    try:
        lam = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not (0.0 < lam <= 1.0):
        raise argparse.ArgumentTypeError(f"similarity threshold must be in (0, 1], got {lam}")
    return lam


def _add_edges_flags(p):
    p.add_argument("--edges", required=True, help="input edge-list file")
    p.add_argument("--weighted", action="store_true",
                   help="honor a third weight column (default: every edge weighs 1)")


def _add_walk_flags(p):
    p.add_argument("--walks", type=int, default=_env("walks", 40),
                   help="walks started per vertex (default 40)")
    p.add_argument("--walk-length", type=int, default=_env("walk-length", 10),
                   help="steps per walk (default 10)")
    p.add_argument("--strategy", choices=("uniform", "biased"),
                   default=_env("strategy", "uniform"),
                   help="next-step rule (default uniform)")
    p.add_argument("--p", type=float, default=_env("p", 1.0),
                   help="return parameter for biased walks (default 1.0)")
    p.add_argument("--q", type=float, default=_env("q", 1.0),
                   help="in-out parameter for biased walks (default 1.0)")


def _add_train_flags(p):
    p.add_argument("--dim", type=int, default=_env("dim", 128),
                   help="embedding dimension (default 128)")
    p.add_argument("--window", type=int, default=_env("window", 10),
                   help="skip-gram window (default 10)")
    p.add_argument("--negative", type=int, default=_env("negative", 5),
                   help="negative samples per pair (default 5)")
    p.add_argument("--epochs", type=int, default=_env("epochs", 1),
                   help="training epochs over the corpus (default 1)")
    p.add_argument("--lr-initial", type=float, default=_env("lr-initial", 0.025),
                   help="initial learning rate (default 0.025)")
    p.add_argument("--lr-final", type=float, default=_env("lr-final", 0.001),
                   help="final learning rate (default 0.001)")


def _add_common_flags(p):
    p.add_argument("--seed", type=int, default=_env("seed", 42),
                   help="master RNG seed (default 42, fixed so runs reproduce)")
    p.add_argument("--threads", type=int, default=_env("threads", 1),
                   help="worker cap; >1 trains in the unsynchronized mode (default 1)")


def _walk_config(args) -> WalkConfig:
    return WalkConfig(walks_per_node=args.walks, walk_length=args.walk_length,
                      strategy=args.strategy, p=args.p, q=args.q, seed=args.seed)


def _train_config(args) -> TrainConfig:
    return TrainConfig(dim=args.dim, window=args.window, negatives=args.negative,
                       epochs=args.epochs, lr_initial=args.lr_initial,
                       lr_final=args.lr_final, seed=args.seed, workers=args.threads)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coarsewalk",
        description="Compress a graph by merging vertices with similar neighborhoods, "
                    "embed the compressed graph with random walks + skip-gram, and map "
                    "the vectors back to the original vertices.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="merge similar vertices into super-nodes")
    _add_edges_flags(p)
    p.add_argument("--lambda", dest="lam", type=_lambda_value,
                   default=_env("lambda", "0.5"),
                   help="similarity threshold; pairs scoring strictly above it merge "
                        "(default 0.5)")
    p.add_argument("--summary", default="summary.edges", help="output summary edge list")
    p.add_argument("--mapping", default="mapping.tsv", help="output vertex->super-node map")
    p.set_defaults(handler=cmd_compress)

    p = sub.add_parser("walk", help="sample a random-walk corpus from a graph")
    _add_edges_flags(p)
    _add_walk_flags(p)
    _add_common_flags(p)
    p.add_argument("--output", default="corpus.txt", help="output corpus file")
    p.set_defaults(handler=cmd_walk)

    p = sub.add_parser("embed", help="train skip-gram embeddings on a walk corpus")
    p.add_argument("--corpus", required=True, help="corpus file, one walk per line")
    _add_train_flags(p)
    _add_common_flags(p)
    p.add_argument("--output", default="embeddings.txt", help="output embedding file")
    p.set_defaults(handler=cmd_embed)

    p = sub.add_parser("expand", help="copy super-node vectors to their member vertices")
    _add_edges_flags(p)
    p.add_argument("--embeddings", required=True, help="super-node embedding file")
    p.add_argument("--mapping", required=True, help="mapping file from `compress`")
    p.add_argument("--output", default="expanded.txt", help="output embedding file")
    p.set_defaults(handler=cmd_expand)

    p = sub.add_parser("classify", help="evaluate embeddings by node classification")
    p.add_argument("--embeddings", required=True, help="embedding file")
    p.add_argument("--labels", required=True, help="labels file: vertex label [label ...]")
    p.add_argument("--train-ratio", type=float, action="append", dest="train_ratios",
                   help="labeled fraction used for training; repeatable (default 0.05)")
    p.add_argument("--repeats", type=int, default=_env("repeats", 10),
                   help="trials per ratio (default 10)")
    p.add_argument("--reg", type=float, default=_env("reg", 1.0),
                   help="L2 regularization strength (default 1.0)")
    p.add_argument("--seed", type=int, default=_env("seed", 42),
                   help="split seed (default 42)")
    p.add_argument("--output", default="report.csv", help="output CSV report")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("pipeline", help="compress, walk, embed, expand and evaluate")
    _add_edges_flags(p)
    p.add_argument("--labels", help="labels file; omit to skip classification")
    p.add_argument("--mode", choices=("baseline", "compressed", "compare"),
                   default=_env("mode", "compare"),
                   help="which arms to run (default compare)")
    p.add_argument("--lambda", dest="lam", type=_lambda_value,
                   default=_env("lambda", "0.5"),
                   help="similarity threshold for the compressed arm (default 0.5)")
    _add_walk_flags(p)
    _add_train_flags(p)
    p.add_argument("--train-ratio", type=float, action="append", dest="train_ratios",
                   help="labeled fraction used for training; repeatable (default 0.05)")
    p.add_argument("--repeats", type=int, default=_env("repeats", 10),
                   help="trials per ratio (default 10)")
    p.add_argument("--reg", type=float, default=_env("reg", 1.0),
                   help="L2 regularization strength (default 1.0)")
    _add_common_flags(p)
    p.add_argument("--output-dir", default=".", help="directory for output files")
    p.add_argument("--name", default=None, help="dataset name used in the CSV")
    p.set_defaults(handler=cmd_pipeline)

    return parser


def _load_graph(args) -> Graph:
    if not os.path.exists(args.edges):
        raise FileNotFoundError(f"edge list not found: {args.edges}")
    return load_edge_list(args.edges, weighted=args.weighted)


def cmd_compress(args) -> int:
    g = _load_graph(args)
    result = compress(g, args.lam)
    result.summary.save_edge_list(args.summary)
    result.mapping.save(args.mapping, g.labels)
    print(f"compress: {result.stats.summary_line()}", file=sys.stderr)
    return 0


def cmd_walk(args) -> int:
    g = _load_graph(args)
    corpus = generate_corpus(g, _walk_config(args))
    save_corpus(corpus, g, args.output)
    print(f"walk: {len(corpus)} walks -> {args.output}", file=sys.stderr)
    return 0


def _load_corpus_file(path):
    """Corpus of label sequences -> (walks over dense ids, labels)."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"corpus not found: {path}")
    labels: list[str] = []
    ids: dict[str, int] = {}
    walks = []
    with open(path, "r", encoding="utf-8") as f:
        for raw in f:
            parts = raw.split()
            if not parts:
                continue
            walk = []
            for tok in parts:
                i = ids.get(tok)
                if i is None:
                    i = len(labels)
                    ids[tok] = i
                    labels.append(tok)
                walk.append(i)
            walks.append(walk)
    return WalkCorpus(walks), labels


def cmd_embed(args) -> int:
    corpus, labels = _load_corpus_file(args.corpus)
    emb = train(corpus, _train_config(args), len(labels))
    save_embeddings(args.output, emb.vectors, labels)
    print(f"embed: {len(labels)} vectors of dim {args.dim} -> {args.output}",
          file=sys.stderr)
    return 0


def cmd_expand(args) -> int:
    g = _load_graph(args)
    for path in (args.embeddings, args.mapping):
        if not os.path.exists(path):
            raise FileNotFoundError(f"input not found: {path}")
    mapping = Mapping.load(args.mapping, g)
    super_labels, super_vectors = load_embeddings(args.embeddings)
    # embedding rows may arrive in any order; align them to super ids
    order = np.array([int(lab) for lab in super_labels])
    aligned = np.zeros_like(super_vectors)
    aligned[order] = super_vectors
    vectors = expand(mapping, aligned)
    save_embeddings(args.output, vectors, g.labels)
    print(f"expand: {len(super_labels)} super-node vectors -> "
          f"{g.num_nodes} vertex vectors in {args.output}", file=sys.stderr)
    return 0


def cmd_classify(args) -> int:
    from .evaluation import f1_scores, predict, split, train_ovr_logreg

    for path in (args.embeddings, args.labels):
        if not os.path.exists(path):
            raise FileNotFoundError(f"input not found: {path}")
    labels, vectors = load_embeddings(args.embeddings)

    class _Keyed:
        def __init__(self, labs):
            self._ids = {lab: i for i, lab in enumerate(labs)}

        def id_of(self, lab):
            return self._ids[lab]

    dataset = LabeledDataset.from_file(args.labels, _Keyed(labels))
    cfg = EvalConfig(train_ratios=tuple(args.train_ratios or [0.05]),
                     repeats=args.repeats, reg=args.reg, seed=args.seed)
    rows = []
    for ri, ratio in enumerate(cfg.train_ratios):
        for trial in range(cfg.repeats):
            tr, te = split(dataset, ratio, (cfg.seed, 0x5EED, ri, trial))
            clf = train_ovr_logreg(vectors, tr, dataset, cfg.reg)
            preds = predict(clf, vectors, te, dataset)
            macro, micro = f1_scores(preds, {v: dataset.labels[v] for v in te},
                                     dataset.label_universe)
            rows.append((ratio, trial, macro, micro))
    with atomic_write(args.output) as f:
        f.write("ratio,trial,macro_f1,micro_f1\n")
        for ratio, trial, macro, micro in rows:
            f.write(f"{ratio:g},{trial},{macro:.6f},{micro:.6f}\n")
    for ratio in cfg.train_ratios:
        ms = [r[2] for r in rows if r[0] == ratio]
        mi = [r[3] for r in rows if r[0] == ratio]
        print(f"classify: ratio {ratio:g} macro F1 {np.mean(ms):.4f} "
              f"micro F1 {np.mean(mi):.4f} over {len(ms)} trials", file=sys.stderr)
    return 0


def cmd_pipeline(args) -> int:
    g = _load_graph(args)
    dataset = None
    if args.labels:
        if not os.path.exists(args.labels):
            raise FileNotFoundError(f"labels file not found: {args.labels}")
        dataset = LabeledDataset.from_file(args.labels, g)
    name = args.name or os.path.splitext(os.path.basename(args.edges))[0]
    walk_cfg = _walk_config(args)
    train_cfg = _train_config(args)
    eval_cfg = EvalConfig(train_ratios=tuple(args.train_ratios or [0.05]),
                          repeats=args.repeats, reg=args.reg, seed=args.seed)
    os.makedirs(args.output_dir, exist_ok=True)
    out = lambda fname: os.path.join(args.output_dir, fname)

    lambdas = [] if args.mode == "baseline" else [args.lam]
    arms = run_comparison(g, dataset, lambdas, walk_cfg, train_cfg, eval_cfg,
                          include_baseline=args.mode in ("baseline", "compare"))

    for arm in arms:
        tag = "baseline" if arm.lam is None else f"lambda{arm.lam:g}"
        save_embeddings(out(f"embeddings_{tag}.txt"), arm.vectors, g.labels)
        if arm.mapping is not None:
            arm.mapping.save(out(f"mapping_{tag}.tsv"), g.labels)
    if dataset is not None:
        write_report_csv(out("report.csv"), name, arms)
        print(f"pipeline: report written to {out('report.csv')}", file=sys.stderr)
    if args.mode == "compare":
        print(gain_summary(arms[0], arms[1]), file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"coarsewalk {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
