"""Query-by-example retrieval, kNN classification and cross-validated reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .corpus import Corpus, Document
from .index import build_index
from .scoring import CollectionScorer, MeasureConfig
from .weighting import class_term_stats

log = logging.getLogger(__name__)

RETRIEVAL = "retrieval"
CLASSIFICATION = "classification"


class EvaluationError(ValueError):
    pass


class Hit(NamedTuple):
    doc: int
    score: float


def top_k(query: Document, scorer: CollectionScorer, k: int, exclude=()) -> list[Hit]:
    """The ``k`` best-scoring collection documents, ties by ascending id."""
    ids, scores = scorer.rank(query, k, exclude=exclude)
    return [Hit(int(i), float(s)) for i, s in zip(ids, scores)]


def precision_at_k(ranked: Sequence[Hit], query_label: int, labels, k: int) -> float:
    if k < 1 or k > len(ranked):
        raise EvaluationError(f"P@{k} needs 1 <= k <= {len(ranked)}")
    hits = sum(1 for h in ranked[:k] if labels[h.doc] == query_label)
    return hits / k


def precision_curve(relevant: Sequence[bool], k: int) -> list[float]:
    """P@1..P@k for a ranked relevance list.

    Past the end of a list shorter than ``k`` the precision stays at the
    value for the whole list.
    """
    out = []
    hits = 0
    for j in range(1, k + 1):
        if j <= len(relevant):
            hits += bool(relevant[j - 1])
        depth = min(j, len(relevant))
        out.append(hits / depth if depth else 0.0)
    return out


def average_precision_at_k(precisions: Sequence[float], k: int) -> float:
    """Mean of P@1..P@k for one query."""
    if k < 1:
        raise EvaluationError("k must be at least 1")
    return math.fsum(precisions[:k]) / k


def map_at_k(per_query: Sequence[Sequence[float]], k: int) -> float:
    """Mean over queries of the per-query mean of P@1..P@k."""
    if not per_query:
        return 0.0
    return math.fsum(average_precision_at_k(p, k) for p in per_query) / len(per_query)


def majority_label(neighbour_labels: Sequence[int]) -> int:
    """Most frequent label; a tie goes to the tied label seen first (nearest)."""
    if not neighbour_labels:
        raise EvaluationError("no neighbours to vote")
    votes = Counter(neighbour_labels)
    best = max(votes.values())
    for label in neighbour_labels:
        if votes[label] == best:
            return label
    raise AssertionError


def knn_classify(query: Document, scorer: CollectionScorer, k: int, labels, exclude=()) -> int:
    """Majority label among the ``k`` most similar collection documents.

    ``labels`` is indexed by collection id.
    """
    return majority_label([int(labels[h.doc]) for h in top_k(query, scorer, k, exclude)])


def assign_folds(n: int, folds: int, seed: int, labels=None) -> np.ndarray:
    """Seeded shuffle then round-robin fold ids.

    With ``labels`` the shuffle is done per class and the round-robin
    continues across classes, so every fold gets a near-equal share of each
    class and fold sizes still differ by at most one.
    """
    if folds < 2:
        raise EvaluationError(f"need at least 2 folds, got {folds}")
    if n < folds:
        raise EvaluationError(f"{n} documents cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    if labels is None:
        order = rng.permutation(n)
    else:
        labels = np.asarray(labels)
        order = np.concatenate(
            [rng.permutation(np.flatnonzero(labels == c)) for c in np.unique(labels)]
        )
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n) % folds
    return fold_of


def fold_splits(fold_of: np.ndarray):
    """Yield (train ids, test ids) per fold, both ascending."""
    for f in range(int(fold_of.max()) + 1):
        test = np.flatnonzero(fold_of == f)
        if not test.size:
            raise EvaluationError(f"fold {f} is empty")
        yield np.flatnonzero(fold_of != f), test


def standard_error(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return statistics.stdev(values) / math.sqrt(len(values))


def significantly_different(mean_a: float, se_a: float, mean_b: float, se_b: float) -> bool:
    """True when the mean +/- 2 se intervals do not overlap."""
    return abs(mean_a - mean_b) > 2.0 * se_a + 2.0 * se_b


@dataclass
class ConfigResult:
    name: str
    per_run: list[float]
    truncated: bool = False

    @property
    def mean(self) -> float:
        return math.fsum(self.per_run) / len(self.per_run)

    @property
    def se(self) -> float:
        return standard_error(self.per_run)


@dataclass
class EvalReport:
    task: str
    metric: str
    seed: int
    results: list[ConfigResult] = field(default_factory=list)

    def result(self, name: str) -> ConfigResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def verdicts(self) -> dict[tuple[str, str], bool]:
        return {
            (a.name, b.name): significantly_different(a.mean, a.se, b.mean, b.se)
            for a in self.results
            for b in self.results
        }

    def to_dict(self) -> dict:
        verdicts = self.verdicts()
        return {
            "task": self.task,
            "metric": self.metric,
            "seed": self.seed,
            "configs": [
                {
                    "config": r.name,
                    "per_run": r.per_run,
                    "mean": r.mean,
                    "se": r.se,
                    "truncated": r.truncated,
                }
                for r in self.results
            ],
            "significance": {
                a.name: {b.name: verdicts[a.name, b.name] for b in self.results}
                for a in self.results
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        runs = max(len(r.per_run) for r in self.results)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["config"] + [f"run_{i + 1}" for i in range(runs)] + ["mean", "se", "truncated"]
        )
        for r in self.results:
            writer.writerow(
                [r.name]
                + [f"{v:.6f}" for v in r.per_run]
                + [f"{r.mean:.6f}", f"{r.se:.6f}", int(r.truncated)]
            )
        return buf.getvalue()

    def significance_csv(self) -> str:
        """Square matrix; a cell is 1 when row and column differ by the two-se rule."""
        verdicts = self.verdicts()
        names = [r.name for r in self.results]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["config"] + names)
        for a in names:
            writer.writerow([a] + [int(verdicts[a, b]) for b in names])
        return buf.getvalue()


def _evaluate_fold(corpus, train, test, configs, task, k, threads):
    """Per-config list of per-query scores for one fold.

    Retrieval yields the query's mean of P@1..P@k, classification 1.0 for a
    correct prediction and 0.0 otherwise.
    """
    train_corpus = corpus.subset(train)
    index = build_index(train_corpus)
    stats = class_term_stats(train_corpus) if any(c.needs_class_stats for c in configs) else None
    labels = corpus.labels
    queries = [corpus[int(i)] for i in test]
    out = []
    truncated = len(train) < k
    for config in configs:
        scorer = CollectionScorer(train_corpus, config, index, stats, doc_ids=train)

        if task == RETRIEVAL:
            def run(q):
                ranked = top_k(q.doc, scorer, k)
                relevant = [labels[h.doc] == q.label for h in ranked]
                return average_precision_at_k(precision_curve(relevant, k), k)
        else:
            def run(q):
                return float(knn_classify(q.doc, scorer, k, labels) == q.label)

        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                values = list(pool.map(run, queries))
        else:
            values = [run(q) for q in queries]
        out.append(values)
    return out, truncated


def cross_validate(
    corpus: Corpus,
    configs: Sequence[MeasureConfig],
    task: str = RETRIEVAL,
    k: int = 25,
    folds: int = 10,
    seed: int = 0,
    stratified: bool = False,
    threads: int = 1,
) -> EvalReport:
    """k-fold evaluation: each fold in turn is the query/test set.

    All collection statistics (document frequencies, cumulative counts,
    average length, class statistics) come from the training folds only.
    A run's value is the mean over its queries of MAP@k (retrieval) or the
    kNN accuracy (classification).
    """
    if task not in (RETRIEVAL, CLASSIFICATION):
        raise EvaluationError(f"unknown task {task!r}")
    if k < 1:
        raise EvaluationError(f"k must be at least 1, got {k}")
    if task == CLASSIFICATION and corpus.n_classes < 2:
        raise EvaluationError("classification needs a labeled corpus with at least 2 classes")
    if not configs:
        raise EvaluationError("no measure configurations given")
    fold_of = assign_folds(len(corpus), folds, seed, corpus.labels if stratified else None)
    per_run = [[] for _ in configs]
    truncated = False
    for f, (train, test) in enumerate(fold_splits(fold_of)):
        fold_values, short = _evaluate_fold(corpus, train, test, configs, task, k, threads)
        truncated |= short
        for acc, values in zip(per_run, fold_values):
            acc.append(math.fsum(values) / len(values))
        log.info("fold %d/%d done (%d train, %d test)", f + 1, folds, len(train), len(test))
    if truncated:
        log.warning("some folds have fewer than k=%d training documents", k)
    metric = f"map@{k}" if task == RETRIEVAL else f"accuracy@{k}nn"
    report = EvalReport(task, metric, seed)
    for config, values in zip(configs, per_run):
        report.results.append(ConfigResult(config.name, values, truncated))
    return report
