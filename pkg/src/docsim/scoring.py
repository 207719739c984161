"""Scoring one query document against a whole collection at once.

The scorer walks the postings of the query's terms (a column-major view of
the collection) and accumulates per-document contributions with
``np.bincount``, which adds in input order. Postings are visited in
ascending term order, so each document's sum is formed in the same order as
the pairwise functions in :mod:`docsim.measures` and the scores agree bit
for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, Document, doc_length
from .index import FrequencyIndex, build_index
from .measures import Bm25Params, MeasureError, bm25_saturation_base, l2_norm, weight_sum
from .weighting import (
    IDENTITY,
    ClassTermStats,
    DocFactor,
    WeightingScheme,
    class_term_stats,
    collection_factors,
    idf_bm25,
    tf_factor,
    weigh,
)

MEASURES = ("cosine", "bm25", "jaccard", "wjaccard", "sp")
WEIGHTED_MEASURES = ("cosine", "wjaccard")

_SHORT_NAMES = {
    "cosine": "Cos",
    "bm25": "BM25",
    "jaccard": "Jac",
    "wjaccard": "WJac",
    "sp": "Sp",
}


@dataclass(frozen=True)
class MeasureConfig:
    """A measure together with its weighting scheme and BM25 parameters."""

    measure: str
    weighting: WeightingScheme = IDENTITY
    bm25: Bm25Params = field(default_factory=Bm25Params)

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise MeasureError(
                f"unknown measure {self.measure!r}; expected one of {', '.join(MEASURES)}"
            )
        if self.measure not in WEIGHTED_MEASURES and not self.weighting.is_identity:
            raise MeasureError(
                f"weighting {self.weighting.name!r} does not apply to {self.measure}"
            )

    @classmethod
    def from_names(
        cls, measure: str, weighting: str = "none", a: float = 1.2, b: float = 0.95
    ) -> "MeasureConfig":
        return cls(measure, WeightingScheme.from_name(weighting), Bm25Params(a, b))

    @property
    def needs_class_stats(self) -> bool:
        return self.weighting.needs_class_stats

    @property
    def name(self) -> str:
        short = _SHORT_NAMES[self.measure]
        if self.measure == "bm25" and self.bm25 != Bm25Params():
            return f"{short}(a={self.bm25.a:g},b={self.bm25.b:g})"
        if self.weighting.is_identity:
            return short
        return f"{short}.{self.weighting.name}"


def _preset(*items: str) -> tuple[MeasureConfig, ...]:
    out = []
    for item in items:
        measure, _, weighting = item.partition(":")
        out.append(MeasureConfig.from_names(measure, weighting or "none"))
    return tuple(out)


PRESETS = {
    "retrieval-tf": _preset(
        "bm25", "cosine:tf-idf", "cosine:tf", "wjaccard:tf-idf", "wjaccard:tf", "sp"
    ),
    "retrieval-binary": _preset(
        "bm25", "cosine:idf", "cosine", "wjaccard:idf", "wjaccard", "sp"
    ),
    "classification-tf": _preset(
        "bm25",
        "cosine:tf-icf",
        "cosine:tf-idf",
        "cosine:tf",
        "wjaccard:tf-icf",
        "wjaccard:tf-idf",
        "wjaccard:tf",
        "sp",
    ),
    "classification-binary": _preset(
        "bm25",
        "cosine:icf",
        "cosine:idf",
        "cosine",
        "wjaccard:icf",
        "wjaccard:idf",
        "wjaccard",
        "sp",
    ),
}


class CollectionScorer:
    """Scores arbitrary query documents against a fixed collection.

    ``doc_ids`` maps the collection's local positions to caller ids (for
    example positions in a larger corpus); ties are broken by ascending id,
    so ``doc_ids`` must be increasing.
    """

    def __init__(
        self,
        collection: Corpus,
        config: MeasureConfig,
        index: FrequencyIndex | None = None,
        stats: ClassTermStats | None = None,
        doc_ids=None,
    ):
        self.collection = collection
        self.config = config
        self.index = index if index is not None else build_index(collection)
        if config.needs_class_stats and stats is None:
            stats = class_term_stats(collection)
        self.stats = stats
        n = len(collection)
        self.doc_ids = np.arange(n) if doc_ids is None else np.asarray(doc_ids)
        if self.doc_ids.shape != (n,) or np.any(np.diff(self.doc_ids) <= 0):
            raise ValueError("doc_ids must be strictly increasing, one per document")

        csr = collection.to_csr()
        self._doc_nnz = np.diff(csr.indptr)
        csc = csr.tocsc()
        csc.sort_indices()
        self._indptr = csc.indptr
        self._rows = csc.indices.astype(np.int64)
        self._counts = csc.data.astype(np.int64)
        self._cols = np.repeat(np.arange(csc.shape[1], dtype=np.int64), np.diff(csc.indptr))

        measure = config.measure
        if measure in WEIGHTED_MEASURES:
            self._prepare_weights(csr)
        elif measure == "bm25":
            self._prepare_bm25()
        elif measure == "sp":
            n_docs = self.index.n_docs
            # log(N / c) for c = 0..N, with c = 0 floored to 1
            self._log_ratio = np.array(
                [math.log(n_docs)] + [math.log(n_docs / c) for c in range(1, n_docs + 1)]
            )
            # position of F_i[z] in the flat cumulative array, per posting
            self._cum_pos = self.index.offsets[self._cols] + self._counts

    def __len__(self) -> int:
        return len(self.collection)

    def _prepare_weights(self, csr) -> None:
        scheme = self.config.weighting
        self._factors = collection_factors(scheme, self.index, self.stats)
        top = int(self._counts.max()) if self._counts.size else 0
        if scheme.doc_factor is DocFactor.LOG_TF:
            doc_part = np.array([tf_factor(c) for c in range(top + 1)])
        else:
            doc_part = np.arange(top + 1, dtype=np.float64)
        w = doc_part[self._counts]
        if self._factors is not None:
            w = w * np.asarray(self._factors)[self._cols]
        self._weights = w
        # per-document reductions need row-major order
        order = np.lexsort((self._cols, self._rows))
        rows, wr = self._rows[order], w[order]
        n = len(self.collection)
        self._norms = np.sqrt(np.bincount(rows, weights=wr * wr, minlength=n))
        self._sums = np.bincount(rows, weights=wr, minlength=n)

    def _prepare_bm25(self) -> None:
        if self.index.avgdl == 0:
            raise MeasureError("bm25 undefined: average document length is 0")
        params = self.config.bm25
        dl = np.array([doc_length(d) for d in self.collection.documents], dtype=np.int64)
        k = params.a * ((1.0 - params.b) + params.b * dl / self.index.avgdl)
        a1 = params.a + 1.0
        self._bm25_doc = self._counts * a1 / (self._counts + k[self._rows])

    def _gather(self, query_terms):
        """Postings of the query's in-dictionary terms, in ascending term order.

        Returns (query positions of the terms that have postings, their
        posting list lengths, posting positions).
        """
        terms = np.asarray(query_terms, dtype=np.int64)
        qpos = np.flatnonzero(terms < self.index.n_terms)
        starts = self._indptr[terms[qpos]]
        lens = self._indptr[terms[qpos] + 1] - starts
        total = int(lens.sum())
        first = np.cumsum(lens) - lens
        postings = np.repeat(starts - first, lens) + np.arange(total)
        return qpos, lens, postings

    def score(self, query: Document) -> np.ndarray:
        """Similarity of ``query`` to every collection document."""
        n = len(self.collection)
        measure = self.config.measure
        if measure in WEIGHTED_MEASURES:
            return self._score_weighted(query, n)
        qpos, lens, post = self._gather(query.terms)
        docs = self._rows[post]
        if measure == "jaccard":
            shared = np.bincount(docs, minlength=n)
            union = len(query) + self._doc_nnz - shared
            return np.divide(shared, union, out=np.zeros(n), where=union > 0)
        if measure == "bm25":
            return self._score_bm25(query, qpos, lens, post, docs, n)
        return self._score_sp(query, qpos, lens, post, docs, n)

    def _score_weighted(self, query: Document, n: int) -> np.ndarray:
        qv = weigh(query, self.config.weighting, self.index, self.stats, factors=self._factors)
        if not len(qv):
            return np.zeros(n)
        qpos, lens, post = self._gather(qv.terms)
        docs = self._rows[post]
        qw = np.repeat(np.asarray(qv.weights)[qpos], lens)
        dw = self._weights[post]
        if self.config.measure == "cosine":
            dot = np.bincount(docs, weights=qw * dw, minlength=n)
            denom = l2_norm(qv.weights) * self._norms
            scores = np.divide(dot, denom, out=np.zeros(n), where=denom != 0.0)
        else:
            low = np.bincount(docs, weights=np.minimum(qw, dw), minlength=n)
            high = (weight_sum(qv.weights) + self._sums) - low
            scores = np.divide(low, high, out=np.zeros(n), where=high > 0.0)
        return np.minimum(scores, 1.0)

    def _score_bm25(self, query, qpos, lens, post, docs, n) -> np.ndarray:
        if not len(query):
            return np.zeros(n)
        params = self.config.bm25
        kq = bm25_saturation_base(doc_length(query), self.index.avgdl, params)
        a1 = params.a + 1.0
        front = np.array(
            [
                idf_bm25(self.index, t) * (c * a1 / (c + kq)) if self.index.df(t) else 0.0
                for t, c in query.items()
            ]
        )
        front = np.repeat(front[qpos], lens)
        return np.bincount(docs, weights=front * self._bm25_doc[post], minlength=n)

    def _score_sp(self, query, qpos, lens, post, docs, n) -> np.ndarray:
        index = self.index
        terms = np.asarray(query.terms, dtype=np.int64)[qpos]
        q = np.asarray(query.counts, dtype=np.int64)[qpos]
        base = index.offsets[terms]
        # the upper end is clamped to m_i; the lower end never exceeds a posting's count
        q_lo = np.repeat(base + q, lens)
        q_hi = np.repeat(base + np.minimum(q, index.max_freq[terms]), lens)
        z = self._cum_pos[post]
        cum = index.cumulative
        count = cum[np.maximum(q_hi, z)] - cum[np.minimum(q_lo, z) - 1]
        total = np.bincount(docs, weights=self._log_ratio[count], minlength=n)
        shared = np.bincount(docs, minlength=n)
        union = len(query) + self._doc_nnz - shared
        return np.divide(total, union, out=np.zeros(n), where=union > 0)

    def rank(self, query: Document, k: int | None = None, exclude=()) -> tuple[np.ndarray, np.ndarray]:
        """Top ``k`` (ids, scores) by descending score, ties by ascending id.

        ``exclude`` holds ids that are left out of the ranking.
        """
        if k is not None and k < 1:
            raise ValueError(f"k must be positive, got {k}")
        scores = self.score(query)
        ids = self.doc_ids
        if len(exclude):
            keep = ~np.isin(ids, np.fromiter(exclude, dtype=np.int64))
            ids, scores = ids[keep], scores[keep]
        if not ids.size:
            raise ValueError("empty collection view")
        order = np.lexsort((ids, -scores))
        if k is not None:
            order = order[:k]
        return ids[order], scores[order]
