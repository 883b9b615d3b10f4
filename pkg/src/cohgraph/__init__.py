"""Corpus-level structural-similarity graphs for document classification.

Pipeline: per-document sentence graphs from noun embedding similarity, a
census of small directed subgraph patterns, a corpus graph linking documents
to their patterns, and a dense two-layer GCN trained on the labeled rows.
"""

__version__ = "0.1.0"

from .census import (
    CensusConfig,
    Signature,
    SubgraphSet,
    canonical_signature,
    count_dag_classes,
    mine_subgraphs,
)
from .config import RunConfig
from .corpus import (
    Corpus,
    Document,
    EmbeddingTable,
    FeatureMatrix,
    FoldPlan,
    Sentence,
    load_corpus,
    load_embeddings,
    load_features,
    make_folds,
)
from .errors import CohgraphError, NumericError, ParseError, ValidationError
from .hetgraph import (
    HeteroGraph,
    SubgraphVocabulary,
    attach_document,
    build_hetero_graph,
    build_vocabulary,
    doc_subgraph_weight,
    normalize,
    normalize_adjacency,
    pmi_weight,
)
from .pipeline import (
    CorrelationEntry,
    CvReport,
    FoldResult,
    correlation_analysis,
    cross_validate,
    diagnostics,
    metrics,
    run_fold,
)
from .sentgraph import SentenceGraph, build_sentence_graph, max_noun_similarity

__all__ = [name for name in dir() if not name.startswith("_")]
