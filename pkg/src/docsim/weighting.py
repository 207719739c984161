"""Term weighting: tf, idf, bm25-idf and icf factors and their composition.

All logarithms are natural logarithms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .corpus import Corpus, Document
from .index import FrequencyIndex


class WeightingError(ValueError):
    pass


class DocFactor(enum.Enum):
    RAW = "raw"
    LOG_TF = "log-tf"


class CollectionFactor(enum.Enum):
    NONE = "none"
    IDF = "idf"
    ICF = "icf"


@dataclass(frozen=True)
class WeightingScheme:
    doc_factor: DocFactor = DocFactor.RAW
    collection_factor: CollectionFactor = CollectionFactor.NONE

    @classmethod
    def from_name(cls, name: str) -> "WeightingScheme":
        try:
            return SCHEMES[name]
        except KeyError:
            raise WeightingError(
                f"unknown weighting {name!r}; expected one of {', '.join(SCHEMES)}"
            ) from None

    @property
    def name(self) -> str:
        for key, scheme in SCHEMES.items():
            if scheme == self:
                return key
        raise AssertionError(self)

    @property
    def is_identity(self) -> bool:
        return self == IDENTITY

    @property
    def needs_class_stats(self) -> bool:
        return self.collection_factor is CollectionFactor.ICF


IDENTITY = WeightingScheme()

SCHEMES = {
    "none": IDENTITY,
    "tf": WeightingScheme(DocFactor.LOG_TF, CollectionFactor.NONE),
    "idf": WeightingScheme(DocFactor.RAW, CollectionFactor.IDF),
    "tf-idf": WeightingScheme(DocFactor.LOG_TF, CollectionFactor.IDF),
    "icf": WeightingScheme(DocFactor.RAW, CollectionFactor.ICF),
    "tf-icf": WeightingScheme(DocFactor.LOG_TF, CollectionFactor.ICF),
}


@dataclass(frozen=True)
class WeightedVector:
    """Sparse term weights in ascending term order; zero weights are not stored."""

    terms: tuple[int, ...] = ()
    weights: tuple[float, ...] = ()

    @classmethod
    def from_pairs(cls, pairs) -> "WeightedVector":
        kept = sorted((int(t), float(w)) for t, w in pairs if w != 0.0)
        for t, w in kept:
            if not math.isfinite(w) or w < 0:
                raise WeightingError(f"invalid weight {w} for term {t}")
        return cls(tuple(t for t, _ in kept), tuple(w for _, w in kept))

    @classmethod
    def from_document(cls, doc: Document) -> "WeightedVector":
        return cls(doc.terms, tuple(float(c) for c in doc.counts))

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[int, float]]:
        return zip(self.terms, self.weights)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.terms, self.weights))


@dataclass(frozen=True, eq=False)
class ClassTermStats:
    """Number of classes ``c_i`` in which each term occurs, out of ``n_classes``."""

    n_classes: int
    class_freq: np.ndarray

    def cf(self, term: int) -> int:
        return int(self.class_freq[term]) if term < self.class_freq.shape[0] else 0


def tf_factor(count: int) -> float:
    return 1.0 + math.log(count) if count > 0 else 0.0


def idf(index: FrequencyIndex, term: int) -> float:
    n = index.df(term)
    if n == 0:
        raise WeightingError(f"idf undefined for term {term}: it occurs in no document")
    return math.log(index.n_docs / n)


def idf_bm25(index: FrequencyIndex, term: int) -> float:
    """BM25's idf; negative when the term occurs in more than half the documents."""
    n = index.df(term)
    if n == 0:
        raise WeightingError(f"bm25 idf undefined for term {term}: it occurs in no document")
    return math.log((index.n_docs - n + 0.5) / (n + 0.5))


def icf(stats: ClassTermStats, term: int) -> float:
    c = stats.cf(term)
    if c == 0:
        raise WeightingError(f"icf undefined for term {term}: it occurs in no class")
    return math.log(1.0 + stats.n_classes / c)


def class_term_stats(corpus: Corpus) -> ClassTermStats:
    csr = corpus.to_csr()
    present = np.zeros((corpus.n_classes, corpus.n_terms), dtype=bool)
    rows = np.repeat(corpus.labels, np.diff(csr.indptr))
    present[rows, csr.indices] = True
    return ClassTermStats(corpus.n_classes, present.sum(axis=0).astype(np.int64))


def collection_factors(
    scheme: WeightingScheme,
    index: FrequencyIndex,
    stats: ClassTermStats | None = None,
) -> list[float] | None:
    """Per-term collection factor for every dictionary term.

    Terms the factor is undefined for (unseen in the collection or in every
    class) get 0.0. Returns None for schemes without a collection factor.
    """
    cf = scheme.collection_factor
    if cf is CollectionFactor.NONE:
        return None
    if cf is CollectionFactor.IDF:
        return [idf(index, t) if index.df(t) else 0.0 for t in range(index.n_terms)]
    if stats is None:
        raise WeightingError("icf weighting needs class term statistics")
    return [icf(stats, t) if stats.cf(t) else 0.0 for t in range(index.n_terms)]


def weigh(
    doc: Document,
    scheme: WeightingScheme,
    index: FrequencyIndex | None = None,
    stats: ClassTermStats | None = None,
    factors: Sequence[float] | None = None,
) -> WeightedVector:
    """Weight each term of ``doc`` by doc factor times collection factor.

    Terms whose collection factor is zero or undefined are dropped: a term
    with ``n_i = N`` under idf, and any term of an out-of-collection document
    that the collection never saw. ``factors`` may carry the output of
    :func:`collection_factors` to avoid recomputing it per document.
    """
    if scheme.collection_factor is not CollectionFactor.NONE and factors is None:
        if index is None:
            raise WeightingError(f"{scheme.name} weighting needs a frequency index")
        if scheme.needs_class_stats and stats is None:
            raise WeightingError("icf weighting needs class term statistics")
        factors = collection_factors(scheme, index, stats)
    log_tf = scheme.doc_factor is DocFactor.LOG_TF
    terms = []
    weights = []
    for t, c in doc.items():
        w = tf_factor(c) if log_tf else float(c)
        if factors is not None:
            f = factors[t] if t < len(factors) else 0.0
            if f == 0.0:
                continue
            w = w * f
        terms.append(t)
        weights.append(w)
    return WeightedVector(tuple(terms), tuple(weights))
