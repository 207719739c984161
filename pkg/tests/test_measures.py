import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from docsim import (
    Bm25Params,
    Corpus,
    Document,
    bm25,
    build_index,
    class_term_stats,
    cosine,
    jaccard,
    parse_corpus,
    sp,
    sp_summands,
    to_binary,
    weigh,
    weighted_jaccard,
)
from docsim.measures import MeasureError
from docsim.scoring import PRESETS, CollectionScorer, MeasureConfig
from docsim.weighting import SCHEMES, WeightedVector, WeightingScheme

from conftest import brute_count, random_corpus

seeds = st.integers(0, 2**32 - 1)


def wv(mapping):
    return WeightedVector.from_pairs(mapping.items())


def test_cosine_examples():
    x = wv({1: 1.0, 2: 1.0})
    assert cosine(x, x) == pytest.approx(1.0, abs=1e-15)
    assert cosine(x, wv({3: 2.0})) == 0.0
    assert cosine(x, wv({1: 1.0})) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert cosine(x, WeightedVector()) == 0.0


def test_jaccard_examples(toy):
    d = toy.documents
    assert jaccard(d[0], d[3]) == pytest.approx(2 / 3, abs=1e-15)
    assert jaccard(d[3], d[3]) == 1.0
    assert jaccard(d[0], Document({9: 1})) == 0.0
    assert jaccard(Document(), Document()) == 0.0


def test_weighted_jaccard_examples():
    x = wv({1: 2.0})
    y = wv({1: 1.0, 2: 1.0})
    assert weighted_jaccard(x, y) == pytest.approx(1 / 3, abs=1e-15)
    assert weighted_jaccard(y, y) == 1.0
    assert weighted_jaccard(WeightedVector(), WeightedVector()) == 0.0


def test_bm25_self_similarity_of_d2(toy):
    ix = build_index(toy)
    d2 = toy[1].doc
    # hand evaluation: only t1 contributes, t3 has bm25 idf 0
    k = 1.2 * (0.05 + 0.95 * 2 / 3.25)
    w = 2.2 / (1 + k)
    expected = math.log(1.5 / 3.5) * w * w
    got = bm25(d2, d2, ix, Bm25Params(1.2, 0.95))
    assert got == pytest.approx(expected, abs=1e-12)
    assert got < 0


def test_bm25_disjoint_and_errors(toy):
    ix = build_index(toy)
    assert bm25(toy[0].doc, Document({0: 1}), ix) == 0.0
    empty = build_index(Corpus.from_documents([Document(), Document()], n_terms=2))
    with pytest.raises(MeasureError):
        bm25(Document({0: 1}), Document({0: 1}), empty)
    with pytest.raises(MeasureError):
        Bm25Params(0, 0.5)
    with pytest.raises(MeasureError):
        Bm25Params(1.2, 1.5)


def test_sp_examples(toy):
    ix = build_index(toy)
    d = toy.documents
    assert sp(d[0], d[3], ix) == pytest.approx((math.log(4 / 3) + math.log(2)) / 3, abs=1e-15)
    assert sp(d[0], d[3], ix) == pytest.approx(0.3269, abs=1e-4)
    assert sp(d[0], d[0], ix) == pytest.approx(math.log(2), abs=1e-15)
    assert sp(Document(), Document(), ix) == 0.0
    assert sp(d[0], Document({3: 1}), ix) == 0.0


def test_sp_floors_zero_counts(toy):
    ix = build_index(toy)
    # neither document is in the collection and no document has t3 >= 4
    x, y = Document({3: 5}), Document({3: 7})
    assert sp_summands(x, y, ix) == [(3, math.log(4))]


def test_sp_counts_unseen_terms_in_union(toy):
    ix = build_index(toy)
    q = Document({1: 1, 40: 3})
    # t1: two documents have count 1; union is {t1, t2, t40}
    assert sp(q, toy[0].doc, ix) == pytest.approx(math.log(2) / 3, abs=1e-15)


def scenario_idf():
    """N = 4: t_g (0) in half the documents with count 1; t_h (1) everywhere, count 1 except y."""
    corpus = parse_corpus("0 0:1 1:1\n0 0:1 1:10\n0 1:1\n0 1:1\n")
    x, y = corpus[0].doc, corpus[1].doc
    q = Document({0: 1, 1: 10})
    return corpus, q, x, y


def test_idf_scenario():
    corpus, q, x, y = scenario_idf()
    ix = build_index(corpus)
    assert brute_count(corpus.documents, 1, 10, 10) == 1
    assert brute_count(corpus.documents, 1, 1, 10) == 4
    assert sp(q, y, ix) > sp(q, x, ix)
    tfidf = WeightingScheme.from_name("tf-idf")
    cq, cx, cy = (weigh(d, tfidf, ix) for d in (q, x, y))
    assert abs(cosine(cq, cx) - cosine(cq, cy)) <= 1e-12


def test_tf_scenario():
    # q_r = y_r = 1, x_r = 10; x and y otherwise identical
    corpus = parse_corpus("0 0:10 1:2\n0 0:1 1:2\n0 0:3\n0 0:1 2:4\n0 2:1\n")
    x, y = corpus[0].doc, corpus[1].doc
    q = Document({0: 1, 1: 2})
    ix = build_index(corpus)
    assert sp(q, y, ix) > sp(q, x, ix)


def test_bm25_self_similarity_is_not_an_upper_bound():
    # short x with a single occurrence, longer y with many occurrences of the same rare term
    corpus = parse_corpus("0 0:1\n0 0:10\n0 1:5\n0 2:5\n0 3:5\n0 4:5\n")
    ix = build_index(corpus)
    x, y = corpus[0].doc, corpus[1].doc
    assert x != y
    assert bm25(x, y, ix) > bm25(x, x, ix)


def random_pairs(corpus):
    docs = corpus.documents
    return itertools.combinations_with_replacement(range(len(docs)), 2)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_symmetry_and_ranges(seed):
    rng = np.random.default_rng(seed)
    corpus = random_corpus(rng, 15, 12)
    ix = build_index(corpus)
    docs = corpus.documents
    tfidf = WeightingScheme.from_name("tf-idf")
    vecs = [weigh(d, tfidf, ix) for d in docs]
    for i, j in random_pairs(corpus):
        x, y = docs[i], docs[j]
        for f in (jaccard, lambda a, b: sp(a, b, ix), lambda a, b: bm25(a, b, ix)):
            assert f(x, y) == pytest.approx(f(y, x), abs=1e-12)
        for f in (cosine, weighted_jaccard):
            assert f(vecs[i], vecs[j]) == pytest.approx(f(vecs[j], vecs[i]), abs=1e-12)
            assert 0.0 <= f(vecs[i], vecs[j]) <= 1.0
        assert 0.0 <= jaccard(x, y) <= 1.0
        assert all(s >= 0 for _, s in sp_summands(x, y, ix))
    for v in vecs:
        if len(v):
            assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_sp_matches_brute_force_counts(seed):
    rng = np.random.default_rng(seed)
    corpus = random_corpus(rng, 12, 10, max_count=6)
    ix = build_index(corpus)
    docs = corpus.documents
    for i, j in random_pairs(corpus):
        x, y = docs[i].as_dict(), docs[j].as_dict()
        shared = sorted(set(x) & set(y))
        union = len(set(x) | set(y))
        total = 0.0
        for t in shared:
            lo, hi = sorted((x[t], y[t]))
            total += math.log(len(docs) / brute_count(docs, t, lo, hi))
        expected = total / union if union else 0.0
        assert sp(docs[i], docs[j], ix) == expected


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_weighted_jaccard_equals_jaccard_on_binary(seed):
    rng = np.random.default_rng(seed)
    docs = to_binary(random_corpus(rng, 12, 15)).documents
    ident = WeightingScheme.from_name("none")
    for x, y in itertools.product(docs, repeat=2):
        assert abs(weighted_jaccard(weigh(x, ident), weigh(y, ident)) - jaccard(x, y)) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_sp_on_binary_is_idf(seed):
    rng = np.random.default_rng(seed)
    corpus = to_binary(random_corpus(rng, 20, 15))
    ix = build_index(corpus)
    n = len(corpus)
    for x, y in itertools.product(corpus.documents, repeat=2):
        for t, s in sp_summands(x, y, ix):
            assert abs(s - math.log(n / ix.doc_freq[t])) <= 1e-12


def monotone_rescale(corpus, rng):
    """Apply an independent random strictly increasing map to every term's counts."""
    top = max(max(d.counts, default=0) for d in corpus.documents)
    maps = [np.cumsum(rng.integers(1, 6, size=top + 1)) for _ in range(corpus.n_terms)]
    docs = [{t: int(maps[t][c]) for t, c in d.items()} for d in corpus.documents]
    return Corpus.from_documents(docs, n_terms=corpus.n_terms)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_sp_invariant_to_monotone_scaling(seed):
    rng = np.random.default_rng(seed)
    corpus = random_corpus(rng, 15, 10)
    scaled = monotone_rescale(corpus, rng)
    ix, sx = build_index(corpus), build_index(scaled)
    for i, j in random_pairs(corpus):
        a = sp(corpus[i].doc, corpus[j].doc, ix)
        b = sp(scaled[i].doc, scaled[j].doc, sx)
        assert abs(a - b) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_sp_self_similarity_dominates(seed):
    rng = np.random.default_rng(seed)
    corpus = random_corpus(rng, 15, 10)
    ix = build_index(corpus)
    docs = corpus.documents
    for x, y in itertools.product(docs, repeat=2):
        if x != y:
            assert sp(x, x, ix) >= sp(x, y, ix)


ALL_CONFIGS = sorted(
    {c for preset in PRESETS.values() for c in preset}
    | {MeasureConfig("jaccard")}
    | {MeasureConfig.from_names(m, w) for m in ("cosine", "wjaccard") for w in SCHEMES},
    key=lambda c: c.name,
)


def pairwise_score(config, query, doc, ix, stats):
    m = config.measure
    if m == "sp":
        return sp(query, doc, ix)
    if m == "bm25":
        return bm25(query, doc, ix, config.bm25)
    if m == "jaccard":
        return jaccard(query, doc)
    qv = weigh(query, config.weighting, ix, stats)
    dv = weigh(doc, config.weighting, ix, stats)
    return cosine(qv, dv) if m == "cosine" else weighted_jaccard(qv, dv)


@pytest.mark.parametrize("config", ALL_CONFIGS, ids=lambda c: c.name)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_collection_scorer_is_bit_identical_to_pairwise(config, seed):
    rng = np.random.default_rng(seed)
    corpus = random_corpus(rng, 30, 20, max_count=8)
    ix = build_index(corpus)
    stats = class_term_stats(corpus)
    scorer = CollectionScorer(corpus, config, ix, stats)
    external = [Document({0: 3, 5: 1, 19: 7, 25: 2}), Document(), Document({30: 1})]
    for q in corpus.documents + external:
        fast = scorer.score(q)
        slow = [pairwise_score(config, q, d, ix, stats) for d in corpus.documents]
        assert fast.tolist() == slow


def test_measure_config_validation():
    with pytest.raises(MeasureError):
        MeasureConfig("euclid")
    with pytest.raises(MeasureError):
        MeasureConfig.from_names("sp", "tf-idf")
    assert [c.name for c in PRESETS["retrieval-tf"]] == [
        "BM25", "Cos.tf-idf", "Cos.tf", "WJac.tf-idf", "WJac.tf", "Sp",
    ]
    assert MeasureConfig.from_names("bm25", a=2.0, b=0.5).name == "BM25(a=2,b=0.5)"
