"""kgforge: knowledge-graph embedding toolkit.

Translational models (TransE, TransH, TransR), walk and relabeling corpora
with word-embedding training, personalized-PageRank co-occurrence embeddings,
link-prediction evaluation, synthetic generators, and a batch CLI.
"""

from .graph import (CardinalityStats, GraphParseError, KnowledgeGraph,
                    load_graph, relation_stats, reverse_graph)
from .trans import (TrainConfig, TranslationalModel, corrupt_triple,
                    enforce_norm_constraints, hyperplane_project,
                    load_checkpoint, margin_loss, save_checkpoint,
                    train_translational, transe_score, transh_constraint_penalty,
                    transh_score, transr_score)
from .walks import WalkCorpus, build_corpus, enumerate_walks, wl_relabel
from .word2vec import (TokenEmbeddings, W2VConfig, negative_sample,
                       train_sequences)
from .kglove import (GloVeConfig, PaintResult, SparseCooccurrence,
                     WeightedGraph, approx_ppr, build_cooccurrence, exact_ppr,
                     train_glove, weigh_edges)
from .evaluation import (EvalReport, RankMetrics, aggregate_metrics, evaluate,
                         nearest_neighbors, rank_triple)
from .synth import (FailureLabeledGraph, failure_detection_demo,
                    generate_factory_graph, generate_one_to_many_kg,
                    generate_planted_kg)

__version__ = "0.1.0"

__all__ = [
    "CardinalityStats", "GraphParseError", "KnowledgeGraph", "load_graph",
    "relation_stats", "reverse_graph",
    "TrainConfig", "TranslationalModel", "corrupt_triple",
    "enforce_norm_constraints", "hyperplane_project", "load_checkpoint",
    "margin_loss", "save_checkpoint", "train_translational", "transe_score",
    "transh_constraint_penalty", "transh_score", "transr_score",
    "WalkCorpus", "build_corpus", "enumerate_walks", "wl_relabel",
    "TokenEmbeddings", "W2VConfig", "negative_sample", "train_sequences",
    "GloVeConfig", "PaintResult", "SparseCooccurrence", "WeightedGraph",
    "approx_ppr", "build_cooccurrence", "exact_ppr", "train_glove",
    "weigh_edges",
    "EvalReport", "RankMetrics", "aggregate_metrics", "evaluate",
    "nearest_neighbors", "rank_triple",
    "FailureLabeledGraph", "failure_detection_demo", "generate_factory_graph",
    "generate_one_to_many_kg", "generate_planted_kg",
    "__version__",
]
