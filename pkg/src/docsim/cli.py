"""Command-line entry points: ``index``, ``query``, ``benchmark``, ``classify``.

Settings come from flags and, optionally, a ``key = value`` config file
(``--config``); flags win over the file, the file over built-in defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .corpus import (
    Corpus,
    CorpusError,
    binarize,
    parse_document_line,
    read_corpus,
    to_binary,
)
from .evaluation import CLASSIFICATION, RETRIEVAL, EvaluationError, cross_validate, top_k
from .index import FrequencyIndex, IndexFormatError, build_index
from .measures import Bm25Params, MeasureError
from .scoring import PRESETS, CollectionScorer, MeasureConfig
from .weighting import WeightingError

log = logging.getLogger("docsim")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    corpus: str | None = None
    representation: str = "tf"
    measure: str = "sp"
    weighting: str = "none"
    configs: str | None = None
    preset: str | None = None
    bm25_a: float = 1.2
    bm25_b: float = 0.95
    k: int | None = None
    folds: int = 10
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    threads: int = 0
    exclude_self: bool = False
    stratified: bool = False
    dims: int | None = None
    index: str | None = None
    query: str | None = None
    query_doc: int | None = None

    def measure_configs(self) -> list[MeasureConfig]:
        params = Bm25Params(self.bm25_a, self.bm25_b)
        if self.preset:
            if self.preset not in PRESETS:
                raise UsageError(
                    f"unknown preset {self.preset!r}; expected one of {', '.join(PRESETS)}"
                )
            return [dataclasses.replace(c, bm25=params) for c in PRESETS[self.preset]]
        if self.configs:
            out = []
            for item in self.configs.split(","):
                measure, _, weighting = item.strip().partition(":")
                out.append(
                    MeasureConfig.from_names(measure, weighting or "none", params.a, params.b)
                )
            return out
        return [MeasureConfig.from_names(self.measure, self.weighting, params.a, params.b)]


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(key: str, value: str):
    kind = _FIELD_TYPES[key]
    if "bool" in kind:
        lowered = value.strip().lower()
        if lowered not in ("true", "false", "1", "0", "yes", "no"):
            raise UsageError(f"config key {key}: expected a boolean, got {value!r}")
        return lowered in ("true", "1", "yes")
    if "int" in kind:
        return int(value)
    if "float" in kind:
        return float(value)
    return value.strip()


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    settings = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in _FIELD_TYPES or key == "command":
                raise UsageError(f"{path}:{lineno}: invalid config line {raw.strip()!r}")
            try:
                settings[key] = _coerce(key, value.strip())
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    return settings


def _add_shared(p: argparse.ArgumentParser) -> None:
    # defaults are None so that unset flags can fall back to the config file
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--corpus", help="corpus file in sparse-labeled format")
    p.add_argument("--dims", type=int, help="dictionary size override")
    p.add_argument("--representation", choices=("tf", "binary"))
    p.add_argument("--measure", choices=("cosine", "bm25", "jaccard", "wjaccard", "sp"))
    p.add_argument("--weighting", choices=("none", "tf", "idf", "tf-idf", "icf", "tf-icf"))
    p.add_argument("--bm25-a", type=float, dest="bm25_a")
    p.add_argument("--bm25-b", type=float, dest="bm25_b")
    p.add_argument("--k", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--threads", type=int, help="evaluation threads (default: all cores)")
    p.add_argument("--exclude-self", action="store_true", default=None, dest="exclude_self")
    p.add_argument("--stratified", action="store_true", default=None)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="docsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build and save a frequency index")
    _add_shared(p)

    p = sub.add_parser("query", help="rank collection documents against a query")
    _add_shared(p)
    p.add_argument("--index", help="saved index (built from the corpus if omitted)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--query", help="query as a corpus-format line '<label> t:c ...'")
    group.add_argument("--query-doc", type=int, dest="query_doc", help="query by corpus position")

    for name, help_text in (
        ("benchmark", "cross-validated query-by-example retrieval (MAP@k)"),
        ("classify", "cross-validated kNN classification (accuracy)"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_shared(p)
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--configs", help="comma list of measure[:weighting], e.g. sp,cosine:tf-idf")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = read_config_file(args.config) if args.config else {}
    for key in _FIELD_TYPES:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    settings["command"] = args.command
    return RunConfig(**settings)


def load_corpus(cfg: RunConfig) -> Corpus:
    if not cfg.corpus:
        raise UsageError("--corpus is required")
    corpus = read_corpus(cfg.corpus, n_terms=cfg.dims)
    if cfg.representation == "binary":
        corpus = to_binary(corpus)
    elif cfg.representation != "tf":
        raise UsageError(f"unknown representation {cfg.representation!r}")
    return corpus


def cmd_index(cfg: RunConfig) -> int:
    corpus = load_corpus(cfg)
    start = time.perf_counter()
    index = build_index(corpus)
    elapsed = time.perf_counter() - start
    out = cfg.out or f"{cfg.corpus}.idx.npz"
    index.save(out)
    print(f"N\t{index.n_docs}")
    print(f"M\t{index.n_terms}")
    print(f"avgdl\t{index.avgdl:.6f}")
    print(f"build_seconds\t{elapsed:.6f}")
    print(f"index\t{out}")
    return 0


def cmd_query(cfg: RunConfig) -> int:
    corpus = load_corpus(cfg)
    if cfg.index:
        index = FrequencyIndex.load(cfg.index)
        if (index.n_docs, index.n_terms) != (len(corpus), corpus.n_terms):
            raise UsageError(
                f"index {cfg.index} covers N={index.n_docs}, M={index.n_terms} but the "
                f"corpus has N={len(corpus)}, M={corpus.n_terms}"
            )
    else:
        index = build_index(corpus)
    exclude = ()
    if cfg.query_doc is not None:
        if not 0 <= cfg.query_doc < len(corpus):
            raise UsageError(f"--query-doc {cfg.query_doc} out of range 0..{len(corpus) - 1}")
        query = corpus[cfg.query_doc].doc
        if cfg.exclude_self:
            exclude = (cfg.query_doc,)
    elif cfg.query:
        query = parse_document_line(cfg.query).doc
        if cfg.representation == "binary":
            query = binarize(query)
    else:
        raise UsageError("give --query or --query-doc")
    (config,) = cfg.measure_configs()
    scorer = CollectionScorer(corpus, config, index)
    k = cfg.k if cfg.k is not None else 10
    if len(corpus) - len(exclude) < 1:
        raise UsageError("no documents left to rank")
    for rank, hit in enumerate(top_k(query, scorer, k, exclude), start=1):
        print(f"{rank}\t{hit.doc}\t{hit.score:.6f}")
    return 0


def _write_report(cfg: RunConfig, report) -> None:
    if cfg.format == "json":
        text = report.to_json()
    else:
        text = report.to_csv()
    if not cfg.out:
        sys.stdout.write(text)
        return
    out = Path(cfg.out)
    out.write_text(text, encoding="utf-8")
    if cfg.format == "csv":
        sig = out.with_name(out.stem + ".significance.csv")
        sig.write_text(report.significance_csv(), encoding="utf-8")
        log.info("wrote %s and %s", out, sig)
    else:
        log.info("wrote %s", out)


def _cross_validate(cfg: RunConfig, task: str, default_k: int) -> int:
    corpus = load_corpus(cfg)
    configs = cfg.measure_configs()
    threads = cfg.threads or os.cpu_count() or 1
    report = cross_validate(
        corpus,
        configs,
        task=task,
        k=cfg.k if cfg.k is not None else default_k,
        folds=cfg.folds,
        seed=cfg.seed,
        stratified=cfg.stratified,
        threads=threads,
    )
    _write_report(cfg, report)
    for r in report.results:
        log.info("%-16s %.4f +/- %.4f", r.name, r.mean, r.se)
    return 0


def cmd_benchmark(cfg: RunConfig) -> int:
    return _cross_validate(cfg, RETRIEVAL, default_k=25)


def cmd_classify(cfg: RunConfig) -> int:
    return _cross_validate(cfg, CLASSIFICATION, default_k=5)


COMMANDS = {
    "index": cmd_index,
    "query": cmd_query,
    "benchmark": cmd_benchmark,
    "classify": cmd_classify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except (
        UsageError,
        CorpusError,
        IndexFormatError,
        MeasureError,
        WeightingError,
        EvaluationError,
        OSError,
        ValueError,
    ) as exc:
        print(f"docsim {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
