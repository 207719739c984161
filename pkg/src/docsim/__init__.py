"""Bag-of-words inter-document similarity: Sp, cosine, BM25 and Jaccard variants."""

from .corpus import (
    Corpus,
    CorpusError,
    Document,
    LabeledDocument,
    doc_length,
    parse_corpus,
    read_corpus,
    serialize_corpus,
    term_set,
    to_binary,
)
from .evaluation import (
    EvalReport,
    Hit,
    assign_folds,
    cross_validate,
    knn_classify,
    map_at_k,
    precision_at_k,
    top_k,
)
from .index import FrequencyIndex, build_index, range_count
from .measures import Bm25Params, bm25, cosine, jaccard, sp, sp_summands, weighted_jaccard
from .scoring import PRESETS, CollectionScorer, MeasureConfig
from .weighting import (
    ClassTermStats,
    WeightedVector,
    WeightingScheme,
    class_term_stats,
    icf,
    idf,
    idf_bm25,
    tf_factor,
    weigh,
)

__version__ = "0.1.0"
