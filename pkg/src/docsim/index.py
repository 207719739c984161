"""Per-term frequency statistics with constant-time frequency range counts.

For every term ``i`` the index keeps a cumulative count array ``F_i`` of
length ``m_i + 1`` where ``F_i[j]`` is the number of documents whose count of
term ``i`` is at most ``j``. The number of documents whose count lies in
``[lo, hi]`` is then ``F_i[hi] - F_i[lo - 1]``.

All ``F_i`` are stored back to back in one flat array; ``offsets[i]`` is the
position of ``F_i[0]``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus

MAGIC = "docsim-frequency-index"
FORMAT_VERSION = 1


class IndexFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FrequencyIndex:
    n_docs: int
    n_terms: int
    avgdl: float
    doc_freq: np.ndarray  # n_i
    max_freq: np.ndarray  # m_i
    offsets: np.ndarray  # start of F_i in cumulative, length M + 1
    cumulative: np.ndarray

    def __post_init__(self):
        for arr in (self.doc_freq, self.max_freq, self.offsets, self.cumulative):
            arr.setflags(write=False)

    def cumulative_counts(self, term: int) -> np.ndarray:
        """The array ``F_i`` for ``term``."""
        return self.cumulative[self.offsets[term] : self.offsets[term + 1]]

    def range_count(self, term: int, lo: int, hi: int) -> int:
        """Number of collection documents with ``lo <= count(term) <= hi``.

        ``hi`` is clamped to the largest count observed for the term. Terms
        outside the dictionary occur in no document.
        """
        if lo < 1 or hi < lo:
            raise ValueError(f"range_count needs 1 <= lo <= hi, got lo={lo}, hi={hi}")
        if term >= self.n_terms:
            return 0
        m = int(self.max_freq[term])
        if lo > m:
            return 0
        base = int(self.offsets[term])
        return int(self.cumulative[base + min(hi, m)] - self.cumulative[base + lo - 1])

    def df(self, term: int) -> int:
        return int(self.doc_freq[term]) if term < self.n_terms else 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FrequencyIndex):
            return NotImplemented
        return (
            self.n_docs == other.n_docs
            and self.n_terms == other.n_terms
            and self.avgdl == other.avgdl
            and np.array_equal(self.doc_freq, other.doc_freq)
            and np.array_equal(self.max_freq, other.max_freq)
            and np.array_equal(self.cumulative, other.cumulative)
        )

    __hash__ = None

    def save(self, path: str | os.PathLike) -> None:
        """Write the index as a versioned ``.npz`` archive.

        ``offsets`` are derived from ``max_freq`` and are not stored.
        """
        with open(path, "wb") as fh:
            np.savez(
                fh,
                magic=np.array(MAGIC),
                version=np.array(FORMAT_VERSION),
                n_docs=np.array(self.n_docs),
                n_terms=np.array(self.n_terms),
                avgdl=np.array(self.avgdl, dtype=np.float64),
                doc_freq=self.doc_freq,
                max_freq=self.max_freq,
                cumulative=self.cumulative,
            )

    @classmethod
    def load(cls, path: str | os.PathLike) -> "FrequencyIndex":
        try:
            archive = np.load(path, allow_pickle=False)
        except (OSError, ValueError) as exc:
            raise IndexFormatError(f"{path}: not an index file ({exc})") from exc
        with archive:
            if "magic" not in archive or str(archive["magic"]) != MAGIC:
                raise IndexFormatError(f"{path}: bad magic tag")
            version = int(archive["version"])
            if version != FORMAT_VERSION:
                raise IndexFormatError(
                    f"{path}: index format version {version}, expected {FORMAT_VERSION}"
                )
            max_freq = archive["max_freq"].astype(np.int64)
            offsets = _offsets(max_freq)
            cumulative = archive["cumulative"].astype(np.int64)
            if cumulative.shape[0] != offsets[-1]:
                raise IndexFormatError(f"{path}: truncated cumulative counts")
            return cls(
                n_docs=int(archive["n_docs"]),
                n_terms=int(archive["n_terms"]),
                avgdl=float(archive["avgdl"]),
                doc_freq=archive["doc_freq"].astype(np.int64),
                max_freq=max_freq,
                offsets=offsets,
                cumulative=cumulative,
            )


def _offsets(max_freq: np.ndarray) -> np.ndarray:
    offsets = np.zeros(max_freq.shape[0] + 1, dtype=np.int64)
    np.cumsum(max_freq + 1, out=offsets[1:])
    return offsets


def build_index(corpus: Corpus) -> FrequencyIndex:
    """Collect n_i, m_i, F_i and avgdl in one pass over the stored counts."""
    csc = corpus.to_csr().tocsc()
    n_docs, n_terms = csc.shape
    counts = csc.data
    cols = np.repeat(np.arange(n_terms, dtype=np.int64), np.diff(csc.indptr))

    doc_freq = np.diff(csc.indptr).astype(np.int64)
    max_freq = np.zeros(n_terms, dtype=np.int64)
    np.maximum.at(max_freq, cols, counts)
    offsets = _offsets(max_freq)

    # histogram of counts per term, with absent documents at position 0
    hist = np.bincount(offsets[cols] + counts, minlength=offsets[-1]).astype(np.int64)
    hist[offsets[:-1]] += n_docs - doc_freq
    cumulative = np.cumsum(hist)
    seg_start = np.repeat(offsets[:-1], max_freq + 1)
    before = np.concatenate(([0], cumulative))[seg_start]
    cumulative -= before

    avgdl = float(counts.sum()) / n_docs
    return FrequencyIndex(n_docs, n_terms, avgdl, doc_freq, max_freq, offsets, cumulative)


def range_count(index: FrequencyIndex, term: int, lo: int, hi: int) -> int:
    return index.range_count(term, lo, hi)
