"""coarsewalk: graph embedding via neighborhood-similarity compression.

Pipeline: merge vertices whose neighbor sets are nearly identical into
weighted super-nodes, sample weighted random walks on the much smaller
summary graph, train skip-gram-with-negative-sampling embeddings on the
walk corpus, then hand every original vertex its super-node's vector.
The compressed pipeline reproduces the classification quality of
embedding the full graph at a fraction of the walking + training cost.
"""

__version__ = "0.1.0"

from .backmap import expand
from .compression import (CompressionResult, Mapping, SimilarityPair,
                          candidate_pairs, compress, neighborhood_similarity)
from .embedding import (EmbeddingMatrix, NegativeTable, TrainConfig,
                        load_embeddings, pair_stream, save_embeddings,
                        sgns_step, train)
from .evaluation import (EvalConfig, LabeledDataset, f1_scores, predict,
                         run_arm, run_comparison, split, train_ovr_logreg)
from .graph import Graph, TransitionRow, load_edge_list
from .walks import (WalkConfig, WalkCorpus, biased_walk, generate_corpus,
                    save_corpus, uniform_walk)

__all__ = [
    "Graph", "TransitionRow", "load_edge_list",
    "SimilarityPair", "Mapping", "CompressionResult",
    "neighborhood_similarity", "candidate_pairs", "compress",
    "WalkConfig", "WalkCorpus", "uniform_walk", "biased_walk",
    "generate_corpus", "save_corpus",
    "TrainConfig", "EmbeddingMatrix", "NegativeTable",
    "pair_stream", "sgns_step", "train", "save_embeddings", "load_embeddings",
    "expand",
    "LabeledDataset", "EvalConfig", "split", "train_ovr_logreg", "predict",
    "f1_scores", "run_arm", "run_comparison",
]
