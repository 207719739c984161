import numpy as np
import pytest

from docsim import Corpus, Document, LabeledDocument, parse_corpus

# Toy corpus from the docs: d1={t1:1,t2:2}, d2={t1:1,t3:1}, d3={t2:1}, d4={t1:2,t2:2,t3:3}
TOY = """\
# toy corpus, labels 0 0 1 1
0 1:1 2:2
0 1:1 3:1
1 2:1
1 1:2 2:2 3:3
"""


@pytest.fixture
def toy():
    return parse_corpus(TOY)


def random_corpus(rng, n_docs, n_terms, max_count=10, n_classes=3, density=0.3):
    """Random labeled corpus; documents may be empty."""
    docs = []
    for _ in range(n_docs):
        present = rng.random(n_terms) < density
        counts = rng.integers(1, max_count + 1, size=n_terms)
        doc = Document({int(t): int(counts[t]) for t in np.flatnonzero(present)})
        docs.append(LabeledDocument(doc, int(rng.integers(n_classes))))
    return Corpus.from_documents(docs, n_terms=n_terms, n_classes=n_classes)


def brute_count(docs, term, lo, hi):
    return sum(1 for d in docs if lo <= d.as_dict().get(term, 0) <= hi)


def two_clusters(n_per=12, seed=0, vocab=10, window=6):
    """Two classes with disjoint vocabularies.

    Each document holds a cyclic window of ``window`` of its class's
    ``vocab`` terms, so same-class documents always share at least
    ``2 * window - vocab`` terms, every term sits in well under half the
    collection, and all cross-class scores are exactly 0.
    """
    rng = np.random.default_rng(seed)
    docs = []
    for label in (0, 1):
        for j in range(n_per):
            terms = [label * vocab + (j + s) % vocab for s in range(window)]
            counts = rng.integers(1, 6, size=window)
            docs.append(LabeledDocument(Document(dict(zip(terms, counts.tolist()))), label))
    order = rng.permutation(len(docs))
    return Corpus.from_documents([docs[i] for i in order], n_terms=2 * vocab)


_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the end-of-run summary."""
    entry = {"id": request.node.name, "status": "FAIL", "note": ""}
    _CRITERIA.append(entry)

    def note(text):
        entry["note"] = text

    yield note
    call = getattr(request.node, "rep_call", None)
    if call is not None and call.passed:
        entry["status"] = "PASS"
    elif call is not None and call.skipped:
        entry["status"] = "SKIP"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for entry in _CRITERIA:
        line = f"{entry['status']:4}  {entry['id']}"
        if entry["note"]:
            line += f"  ({entry['note']})"
        terminalreporter.write_line(line)
