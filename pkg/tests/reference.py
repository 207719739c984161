"""Brute-force reference evaluator.

Recomputes every collection statistic by scanning the training documents
(no cumulative-count arrays, no postings) and ranks with a plain ``sorted``.
Arithmetic is done term by term in ascending id order, like the library, so
scores agree exactly.
"""

import math
from collections import Counter


def _stats(train):
    n = len(train)
    df = Counter()
    for d in train:
        df.update(d.doc.as_dict().keys())
    classes = {}
    for d in train:
        for t in d.doc.terms:
            classes.setdefault(t, set()).add(d.label)
    avgdl = sum(sum(d.doc.counts) for d in train) / n
    return n, df, classes, avgdl


def _weights(doc, weighting, n, df, classes, n_classes):
    out = {}
    for t, c in doc.items():
        w = 1.0 + math.log(c) if weighting.startswith("tf") else float(c)
        if weighting.endswith("idf"):
            if not df[t]:
                continue
            f = math.log(n / df[t])
            if f == 0.0:
                continue
            w = w * f
        elif weighting.endswith("icf"):
            if t not in classes:
                continue
            w = w * math.log(1.0 + n_classes / len(classes[t]))
        out[t] = w
    return out


def _loop_sum(values):
    total = 0.0
    for v in values:
        total += v
    return total


def score(measure, weighting, q, d, train, n, df, classes, avgdl, n_classes, a=1.2, b=0.95):
    qd, dd = q.as_dict(), d.as_dict()
    shared = sorted(set(qd) & set(dd))
    union = len(set(qd) | set(dd))
    if measure == "jaccard":
        return len(shared) / union if union else 0.0
    if measure == "sp":
        if not union:
            return 0.0
        total = 0.0
        for t in shared:
            lo, hi = sorted((qd[t], dd[t]))
            count = sum(1 for z in train if lo <= z.doc.as_dict().get(t, 0) <= hi)
            total += math.log(n / max(1, count))
        return total / union
    if measure == "bm25":
        if not qd or not dd:
            return 0.0
        kq = a * ((1.0 - b) + b * sum(qd.values()) / avgdl)
        kd = a * ((1.0 - b) + b * sum(dd.values()) / avgdl)
        total = 0.0
        for t in shared:
            idf = math.log((n - df[t] + 0.5) / (df[t] + 0.5))
            total += idf * (qd[t] * (a + 1.0) / (qd[t] + kq)) * (dd[t] * (a + 1.0) / (dd[t] + kd))
        return total
    wq = _weights(q, weighting, n, df, classes, n_classes)
    wd = _weights(d, weighting, n, df, classes, n_classes)
    both = sorted(set(wq) & set(wd))
    if measure == "cosine":
        nq = math.sqrt(_loop_sum(wq[t] * wq[t] for t in sorted(wq)))
        nd = math.sqrt(_loop_sum(wd[t] * wd[t] for t in sorted(wd)))
        if nq == 0.0 or nd == 0.0:
            return 0.0
        return min(1.0, _loop_sum(wq[t] * wd[t] for t in both) / (nq * nd))
    low = _loop_sum(min(wq[t], wd[t]) for t in both)
    high = _loop_sum(wq[t] for t in sorted(wq)) + _loop_sum(wd[t] for t in sorted(wd)) - low
    return min(1.0, low / high) if high > 0.0 else 0.0


def reference_cross_validate(corpus, configs, fold_of, task, k):
    """Per config, the list of per-run values."""
    results = {c.name: [] for c in configs}
    for f in range(max(fold_of) + 1):
        train_ids = [i for i in range(len(corpus)) if fold_of[i] != f]
        test_ids = [i for i in range(len(corpus)) if fold_of[i] == f]
        train = [corpus[i] for i in train_ids]
        n, df, classes, avgdl = _stats(train)
        for c in configs:
            values = []
            for qi in test_ids:
                q = corpus[qi]
                scored = [
                    (score(c.measure, c.weighting.name, q.doc, z.doc, train, n, df, classes,
                           avgdl, corpus.n_classes, c.bm25.a, c.bm25.b), gid)
                    for z, gid in zip(train, train_ids)
                ]
                ranked = sorted(scored, key=lambda p: (-p[0], p[1]))[:k]
                labels = [corpus[gid].label for _, gid in ranked]
                if task == "retrieval":
                    precisions = []
                    for j in range(1, k + 1):
                        depth = min(j, len(labels))
                        hits = sum(1 for lab in labels[:depth] if lab == q.label)
                        precisions.append(hits / depth)
                    values.append(math.fsum(precisions) / k)
                else:
                    votes = Counter(labels)
                    top = max(votes.values())
                    predicted = next(lab for lab in labels if votes[lab] == top)
                    values.append(1.0 if predicted == q.label else 0.0)
            results[c.name].append(math.fsum(values) / len(values))
    return results
