"""Pairwise inter-document similarity measures.

Every measure returns 0.0 when either input is empty. Sums run over terms
in ascending id order; the collection scorer in :mod:`docsim.scoring`
reproduces the same operation order, so both give bit-identical scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .corpus import Document, doc_length
from .index import FrequencyIndex
from .weighting import WeightedVector, idf_bm25


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class Bm25Params:
    a: float = 1.2
    b: float = 0.95

    def __post_init__(self):
        if not self.a > 0:
            raise MeasureError(f"bm25 a must be positive, got {self.a}")
        if not 0.0 <= self.b <= 1.0:
            raise MeasureError(f"bm25 b must lie in [0, 1], got {self.b}")


def _shared(
    x_terms: tuple[int, ...], y_terms: tuple[int, ...]
) -> Iterator[tuple[int, int]]:
    """Positions ``(i, j)`` with ``x_terms[i] == y_terms[j]``, ascending."""
    i = j = 0
    while i < len(x_terms) and j < len(y_terms):
        a, b = x_terms[i], y_terms[j]
        if a == b:
            yield i, j
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1


def l2_norm(weights) -> float:
    total = 0.0
    for w in weights:
        total += w * w
    return math.sqrt(total)


def weight_sum(weights) -> float:
    total = 0.0
    for w in weights:
        total += w
    return total


def cosine(x: WeightedVector, y: WeightedVector) -> float:
    norm_x = l2_norm(x.weights)
    norm_y = l2_norm(y.weights)
    if norm_x == 0.0 or norm_y == 0.0:
        return 0.0
    dot = 0.0
    for i, j in _shared(x.terms, y.terms):
        dot += x.weights[i] * y.weights[j]
    return min(1.0, dot / (norm_x * norm_y))


def bm25_saturation_base(dl: int, avgdl: float, params: Bm25Params) -> float:
    """The length-normalized saturation constant ``a(1 - b + b dl / avgdl)``."""
    return params.a * ((1.0 - params.b) + params.b * dl / avgdl)


def bm25(
    x: Document,
    y: Document,
    index: FrequencyIndex,
    params: Bm25Params = Bm25Params(),
) -> float:
    """BM25 applied symmetrically to two documents.

    Shared terms occurring in more than half the collection have negative
    idf and pull the score down.
    """
    if index.avgdl == 0:
        raise MeasureError("bm25 undefined: average document length is 0")
    if not len(x) or not len(y):
        return 0.0
    kx = bm25_saturation_base(doc_length(x), index.avgdl, params)
    ky = bm25_saturation_base(doc_length(y), index.avgdl, params)
    a1 = params.a + 1.0
    total = 0.0
    for i, j in _shared(x.terms, y.terms):
        vx = x.counts[i]
        vy = y.counts[j]
        sx = vx * a1 / (vx + kx)
        sy = vy * a1 / (vy + ky)
        total += idf_bm25(index, x.terms[i]) * sx * sy
    return total


def jaccard(x: Document, y: Document) -> float:
    shared = sum(1 for _ in _shared(x.terms, y.terms))
    union = len(x) + len(y) - shared
    return shared / union if union else 0.0


def weighted_jaccard(x: WeightedVector, y: WeightedVector) -> float:
    """Sum of elementwise minima over sum of elementwise maxima.

    The max-sum is taken as ``sum(x) + sum(y) - sum(min)``.
    """
    low = 0.0
    for i, j in _shared(x.terms, y.terms):
        low += min(x.weights[i], y.weights[j])
    high = weight_sum(x.weights) + weight_sum(y.weights) - low
    if high <= 0.0:
        return 0.0
    return min(1.0, low / high)


def sp_summands(x: Document, y: Document, index: FrequencyIndex) -> list[tuple[int, float]]:
    """Per shared term, ``log(N / #docs with count between x_i and y_i)``.

    A zero count (possible only when neither document is in the collection)
    is floored at 1.
    """
    out = []
    n = index.n_docs
    for i, j in _shared(x.terms, y.terms):
        vx, vy = x.counts[i], y.counts[j]
        lo, hi = (vx, vy) if vx <= vy else (vy, vx)
        count = max(1, index.range_count(x.terms[i], lo, hi))
        out.append((x.terms[i], math.log(n / count)))
    return out


def sp(x: Document, y: Document, index: FrequencyIndex) -> float:
    summands = sp_summands(x, y, index)
    union = len(x) + len(y) - len(summands)
    if not union:
        return 0.0
    total = 0.0
    for _, s in summands:
        total += s
    return total / union
