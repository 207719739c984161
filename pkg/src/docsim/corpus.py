"""Documents, labeled collections and the sparse-labeled text format.

A corpus file holds one document per line::

    <label> <termid>:<count> [<termid>:<count> ...]

Term ids are 0-based non-negative integers, counts are positive integers and
lines starting with ``#`` are comments.
"""

from __future__ import annotations

import io
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, TextIO

import numpy as np
from scipy import sparse


class CorpusError(ValueError):
    """Raised for malformed corpus input or invalid corpus construction."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Document:
    """Sparse bag-of-words vector, stored as ascending term ids and counts.

    Zero counts are never stored. Two documents are equal when their
    canonical (sorted) forms are equal.
    """

    __slots__ = ("terms", "counts", "_hash")

    def __init__(self, entries: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        pairs = sorted((int(t), int(c)) for t, c in items)
        for i, (term, count) in enumerate(pairs):
            if term < 0:
                raise CorpusError(f"negative term id {term}")
            if count < 1:
                raise CorpusError(f"term {term} has non-positive count {count}")
            if i and pairs[i - 1][0] == term:
                raise CorpusError(f"duplicate term id {term}")
        self.terms: tuple[int, ...] = tuple(t for t, _ in pairs)
        self.counts: tuple[int, ...] = tuple(c for _, c in pairs)
        self._hash: int | None = None

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[int]:
        return iter(self.terms)

    def __contains__(self, term: object) -> bool:
        return term in self.as_dict()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Document):
            return NotImplemented
        return self.terms == other.terms and self.counts == other.counts

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.terms, self.counts))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{t}:{c}" for t, c in self.items())
        return f"Document({{{body}}})"

    def items(self) -> Iterator[tuple[int, int]]:
        return zip(self.terms, self.counts)

    def get(self, term: int, default: int = 0) -> int:
        return self.as_dict().get(term, default)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.terms, self.counts))

    @property
    def max_term(self) -> int:
        """Largest term id, or -1 for the empty document."""
        return self.terms[-1] if self.terms else -1


def doc_length(doc: Document) -> int:
    """Total number of term occurrences (the l1 norm of the raw vector)."""
    return sum(doc.counts)


def term_set(doc: Document) -> frozenset[int]:
    return frozenset(doc.terms)


@dataclass(frozen=True)
class LabeledDocument:
    doc: Document
    label: int
    source_id: str | None = None

    def __post_init__(self):
        if self.label < 0:
            raise CorpusError(f"negative label {self.label}")


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of labeled documents.

    ``n_terms`` is the dictionary size M and ``n_classes`` the class count C.
    """

    docs: tuple[LabeledDocument, ...]
    n_terms: int
    n_classes: int
    _csr: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "docs", tuple(self.docs))
        if not self.docs:
            raise CorpusError("empty corpus")
        top_term = max(d.doc.max_term for d in self.docs)
        if top_term >= self.n_terms:
            raise CorpusError(
                f"term id {top_term} out of range for dictionary size {self.n_terms}"
            )
        top_label = max(d.label for d in self.docs)
        if top_label >= self.n_classes:
            raise CorpusError(
                f"label {top_label} out of range for class count {self.n_classes}"
            )

    @classmethod
    def from_documents(
        cls,
        docs: Iterable[LabeledDocument | Document | Mapping[int, int]],
        n_terms: int | None = None,
        n_classes: int | None = None,
    ) -> "Corpus":
        """Build a corpus, deriving M and C from the data when not given.

        Plain documents or mappings get label 0.
        """
        items = []
        for d in docs:
            if isinstance(d, LabeledDocument):
                items.append(d)
            elif isinstance(d, Document):
                items.append(LabeledDocument(d, 0))
            else:
                items.append(LabeledDocument(Document(d), 0))
        if not items:
            raise CorpusError("empty corpus")
        if n_terms is None:
            n_terms = 1 + max(d.doc.max_term for d in items)
        if n_classes is None:
            n_classes = 1 + max(d.label for d in items)
        return cls(tuple(items), n_terms, n_classes)

    def __len__(self) -> int:
        return len(self.docs)

    def __getitem__(self, i: int) -> LabeledDocument:
        return self.docs[i]

    @property
    def documents(self) -> list[Document]:
        return [d.doc for d in self.docs]

    @property
    def labels(self) -> np.ndarray:
        return np.fromiter((d.label for d in self.docs), dtype=np.int64, count=len(self))

    def subset(self, indices: Iterable[int]) -> "Corpus":
        """Corpus view over ``indices`` keeping the dictionary size and class count."""
        return Corpus(tuple(self.docs[i] for i in indices), self.n_terms, self.n_classes)

    def to_csr(self) -> sparse.csr_matrix:
        """Document-term count matrix (N x M), cached."""
        if not self._csr:
            indptr = np.zeros(len(self) + 1, dtype=np.int64)
            np.cumsum([len(d.doc) for d in self.docs], out=indptr[1:])
            indices = np.fromiter(
                (t for d in self.docs for t in d.doc.terms), dtype=np.int64, count=indptr[-1]
            )
            data = np.fromiter(
                (c for d in self.docs for c in d.doc.counts), dtype=np.int64, count=indptr[-1]
            )
            self._csr.append(
                sparse.csr_matrix((data, indices, indptr), shape=(len(self), self.n_terms))
            )
        return self._csr[0]


def to_binary(corpus: Corpus) -> Corpus:
    """Replace every stored frequency by 1 (term presence only)."""
    docs = tuple(
        LabeledDocument(binarize(d.doc), d.label, d.source_id) for d in corpus.docs
    )
    return Corpus(docs, corpus.n_terms, corpus.n_classes)


def binarize(doc: Document) -> Document:
    return Document((t, 1) for t in doc.terms)


def parse_document_line(line: str, lineno: int | None = None) -> LabeledDocument:
    """Parse one ``<label> <termid>:<count> ...`` line."""
    fields = line.split()
    if not fields:
        raise CorpusError("empty document line", lineno)
    label = _parse_int(fields[0], "label", lineno)
    if label < 0:
        raise CorpusError(f"negative label {label}", lineno)
    entries: dict[int, int] = {}
    for tok in fields[1:]:
        term_s, sep, count_s = tok.partition(":")
        if not sep:
            raise CorpusError(f"expected <termid>:<count>, got {tok!r}", lineno)
        term = _parse_int(term_s, "term id", lineno)
        count = _parse_int(count_s, "count", lineno)
        if term < 0:
            raise CorpusError(f"negative term id {term}", lineno)
        if count < 1:
            raise CorpusError(f"count must be positive, got {count} for term {term}", lineno)
        if term in entries:
            raise CorpusError(f"duplicate term id {term}", lineno)
        entries[term] = count
    return LabeledDocument(Document(entries), label)


_INT_LIMIT = sys.maxsize


def _parse_int(text: str, what: str, lineno: int | None) -> int:
    if not text or not text.lstrip("+-").isdigit():
        raise CorpusError(f"invalid {what} {text!r}", lineno)
    value = int(text)
    if abs(value) > _INT_LIMIT:
        raise CorpusError(f"{what} {text} overflows the platform integer", lineno)
    return value


def parse_corpus(stream: TextIO | str, n_terms: int | None = None) -> Corpus:
    """Read a sparse-labeled corpus from a text stream (or a string).

    ``n_terms`` overrides the dictionary size, which otherwise is one more
    than the largest term id seen.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    docs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        docs.append(parse_document_line(line, lineno))
    if not docs:
        raise CorpusError("empty corpus")
    seen = 1 + max(d.doc.max_term for d in docs)
    if n_terms is None:
        n_terms = seen
    elif n_terms < seen:
        raise CorpusError(f"dictionary size {n_terms} smaller than largest term id {seen - 1}")
    return Corpus(tuple(docs), n_terms, 1 + max(d.label for d in docs))


def read_corpus(path, n_terms: int | None = None) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, n_terms=n_terms)


def format_document(doc: Document) -> str:
    return " ".join(f"{t}:{c}" for t, c in doc.items())


def serialize_corpus(corpus: Corpus) -> str:
    lines = []
    for d in corpus.docs:
        body = format_document(d.doc)
        lines.append(f"{d.label} {body}" if body else str(d.label))
    return "\n".join(lines) + "\n"
