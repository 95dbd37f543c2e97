"""Command-line entry point: ``pashto-textclf <subcommand> ...``.

Failures print one JSON line ``{"error": kind, "message": ...}`` to stderr
and exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..classifiers import (
    ALGORITHMS, ModelConfig, load_model, predict_labels, save_model,
    score_matrix, train,
)
from ..corpus import MULTI, SINGLE, corpus_stats, load_corpus, load_schema, save_corpus, split
from ..errors import EmptyDocumentError, FormatError, HashMismatchError, TextClfError
from ..features import (
    FEATURE_MODES, VectorizerConfig, analyze, build_vocabulary, load_vocabulary,
    save_vocabulary, stack, vectorize,
)
from ..metrics import classification_report, multilabel_report
from ..multilabel import (
    MultiLabelModel, label_scores, load_multilabel_model, save_multilabel_model,
    threshold_scores, train_binary_relevance,
)
from ..textnorm import normalize
from .config import ExperimentGrid, load_config
from .emit import accuracy_matrix, emit_all, per_label_accuracy_table, weighted_average_table
from .grid import RunResult, run_grid
from .synth import (
    generate_synthetic_corpus, multi_label_spec, single_label_spec,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("usage", message)


def _fail(kind: str, message: str):
    print(json.dumps({"error": kind, "message": message}, ensure_ascii=False), file=sys.stderr)
    sys.exit(2)


def _grid_from_args(args, **extra) -> ExperimentGrid:
    grid = load_config(args.config) if getattr(args, "config", None) else ExperimentGrid()
    changes = {
        "seed": getattr(args, "seed", None),
        "train_fraction": getattr(args, "train_fraction", None),
        "threshold": getattr(args, "threshold", None),
        "min_df": getattr(args, "min_df", None),
        "max_features": getattr(args, "max_features", None),
        "schema_path": getattr(args, "schema", None),
    }
    if getattr(args, "stratified", False):
        changes["stratified"] = True
    changes.update(extra)
    return grid.override(**changes)


def _load_corpus(path, grid: ExperimentGrid):
    schema = load_schema(grid.schema_path) if grid.schema_path else None
    return load_corpus(path, schema=schema, norm=grid.normalization)


def _load_any_model(path):
    path = Path(path)
    if not path.exists():
        raise FormatError(f"model file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed model ({exc.msg})") from None
    if data.get("kind") == "binary-relevance":
        return load_multilabel_model(path)
    return load_model(path)


def _check_hash(model, vocab):
    expected = model.vocab_hash
    actual = vocab.content_hash()
    if expected is None:
        raise HashMismatchError("model file carries no vocabulary hash")
    if expected != actual:
        raise HashMismatchError(
            f"model was trained on vocabulary {expected[:12]} but {actual[:12]} was supplied")


def _vectorize_corpus(corpus, vocab):
    return stack([vectorize(analyze(t, vocab), vocab) for t in corpus.texts], len(vocab))


# --- subcommands -------------------------------------------------------------

def cmd_synth(args):
    kw = {"seed": args.seed, "noise_rate": args.noise_rate,
          "keywords_per_label": args.keywords_per_label}
    if args.mode == MULTI:
        spec = multi_label_spec(args.total_assignments, mean_labels=args.mean_labels, **kw)
    else:
        spec = single_label_spec(args.labels, args.docs_per_label, **kw)
    synth = generate_synthetic_corpus(spec)
    save_corpus(synth.corpus, args.out)
    if args.keywords_out:
        Path(args.keywords_out).write_text(
            json.dumps({"keywords": synth.keywords, "noise_words": synth.noise_words,
                        "docs_per_label": synth.planned_docs_per_label},
                       ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(synth.corpus)} documents to {args.out}")


def cmd_ingest(args):
    grid = _grid_from_args(args)
    corpus = _load_corpus(args.corpus, grid)
    stats = corpus_stats(corpus, grid.normalization)
    print(json.dumps(stats.to_dict(), ensure_ascii=False, indent=2, sort_keys=True))


def cmd_split(args):
    grid = _grid_from_args(args)
    corpus = _load_corpus(args.corpus, grid)
    train_c, test_c = split(corpus, grid.train_fraction, seed=grid.seed, stratified=grid.stratified)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(train_c, out / "train.jsonl")
    save_corpus(test_c, out / "test.jsonl")
    print(f"train {len(train_c)}  test {len(test_c)}")


def cmd_train(args):
    grid = _grid_from_args(args)
    corpus = _load_corpus(args.corpus, grid)
    vconfig = VectorizerConfig(args.features, min_df=grid.min_df, max_features=grid.max_features)
    tokens = [analyze(t, None, grid.normalization) for t in corpus.texts]
    vocab = build_vocabulary(tokens, vconfig, grid.normalization)
    X = stack([vectorize(t, vocab) for t in tokens], len(vocab))
    config = ModelConfig(args.algorithm, dict(grid.hyperparameters.get(args.algorithm, {})),
                         grid.seed)
    vocab_hash = vocab.content_hash()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if corpus.schema.multi:
        model = train_binary_relevance(config, X, corpus.label_matrix(), corpus.schema,
                                       grid.threshold)
        model = MultiLabelModel(
            tuple(m.with_metadata(vocab_hash, ("0", "1")) for m in model.per_label_models),
            corpus.schema, grid.threshold)
        save_multilabel_model(model, out / "model.json")
    else:
        model = train(config, X, corpus.label_indices(), n_classes=len(corpus.schema))
        save_model(model.with_metadata(vocab_hash, corpus.schema.names), out / "model.json")
    save_vocabulary(vocab, out / "vocab.json")
    print(f"wrote {out / 'model.json'} and {out / 'vocab.json'}")


def cmd_evaluate(args):
    model = _load_any_model(args.model)
    vocab = load_vocabulary(args.vocab)
    _check_hash(model, vocab)
    grid = _grid_from_args(args)
    corpus = _load_corpus(args.corpus, grid)
    X = _vectorize_corpus(corpus, vocab)
    names = list(corpus.schema.names)
    if isinstance(model, MultiLabelModel):
        if args.threshold is not None:
            model = model.with_threshold(args.threshold)
        S = label_scores(model, X)
        report = multilabel_report(corpus.label_matrix(), threshold_scores(S, model.threshold),
                                   S, names)
        print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2, sort_keys=True))
    else:
        report = classification_report(corpus.label_indices(), predict_labels(model, X), names)
        print(report.to_csv() if args.format == "csv" else report.to_text(args.digits), end="")


def cmd_grid(args):
    extra = {}
    if args.algorithms:
        extra["algorithms"] = tuple(args.algorithms.split(","))
    if args.features:
        extra["feature_modes"] = tuple(args.features.split(","))
    if args.repeats is not None:
        extra["repeats"] = args.repeats
    grid = _grid_from_args(args, **extra)
    corpus = _load_corpus(args.corpus, grid)
    mode = MULTI if corpus.schema.multi else SINGLE
    if args.mode is not None and args.mode != mode:
        _fail("config", f"--mode {args.mode} but the corpus is {mode}")
    grid = grid.override(mode=mode)
    results = run_grid(corpus, grid)
    manifest = emit_all(results, args.out_dir, grid, digits=args.digits)
    failed = [r for r in results if not r.ok]
    for r in failed:
        print(f"cell {r.algorithm}+{r.feature_mode} failed: {r.failure}", file=sys.stderr)
    print(f"{len(results) - len(failed)}/{len(results)} cells ok; manifest {manifest}")


def cmd_predict(args):
    model = _load_any_model(args.model)
    vocab = load_vocabulary(args.vocab)
    _check_hash(model, vocab)
    if args.text is not None:
        text = args.text
    else:
        try:
            text = Path(args.input).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise FormatError(f"cannot read input {args.input}: {exc}") from None
    if not normalize(text, vocab.normalization):
        raise EmptyDocumentError("empty document: no text left after normalization")
    x = vectorize(analyze(text, vocab), vocab)
    print(format_prediction(model, x), end="")


def format_prediction(model, x) -> str:
    """Multi-label: a ``label<TAB>bit`` block then per-label scores.
    Single-label: the top class then the full score vector."""
    X = stack([x], x.dim)
    lines = []
    if isinstance(model, MultiLabelModel):
        scores = label_scores(model, X)[0]
        bits = threshold_scores(scores, model.threshold)
        width = max(len(n) for n in model.schema.names)
        for name, bit in zip(model.schema.names, bits):
            lines.append(f"{name}\t{int(bit)}")
        lines.append("")
        lines.append(f"scores (threshold {model.threshold:g})")
        for name, s in zip(model.schema.names, scores):
            lines.append(f"{name:<{width}}  {s:.4f}")
    else:
        scores = score_matrix(model, X)[0]
        names = model.class_names or tuple(str(c) for c in range(model.n_classes))
        top = int(np.argmax(scores))
        width = max(len(n) for n in names)
        lines.append(f"label\t{names[top]}")
        lines.append("")
        lines.append("scores")
        for name, s in zip(names, scores):
            lines.append(f"{name:<{width}}  {s:.4f}")
    return "\n".join(lines) + "\n"


def cmd_report(args):
    path = Path(args.results)
    if path.is_dir():
        path = path / "results.json"
    if not path.exists():
        raise FormatError(f"results file not found: {path}")
    data = json.loads(path.read_text(encoding="utf-8"))
    results = [RunResult.from_dict(d) for d in data["results"]]
    tables = {"accuracy": accuracy_matrix, "weighted": weighted_average_table,
              "per-label": per_label_accuracy_table}
    table = tables[args.table](results)
    print(table.to_csv() if args.format == "csv" else table.to_text(args.digits), end="")


# --- parser ------------------------------------------------------------------

def _common(p, corpus=True):
    if corpus:
        p.add_argument("corpus", help="line-delimited JSON corpus")
    p.add_argument("--config", help="TOML configuration file")
    p.add_argument("--schema", help="label schema JSON (overrides the config)")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pashto-textclf", description="Pashto document classification workbench")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a planted-keyword synthetic corpus")
    p.add_argument("--mode", choices=[SINGLE, MULTI], default=SINGLE)
    p.add_argument("--out", required=True)
    p.add_argument("--labels", type=int, default=8)
    p.add_argument("--docs-per-label", type=int, default=100)
    p.add_argument("--total-assignments", type=int, default=2000)
    p.add_argument("--mean-labels", type=float, default=2.5)
    p.add_argument("--keywords-per-label", type=int, default=25)
    p.add_argument("--noise-rate", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--keywords-out", help="also write the planted keywords as JSON")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="validate a corpus and print its statistics")
    _common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="write train.jsonl and test.jsonl")
    _common(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--stratified", action="store_true")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="fit one model; writes model.json and vocab.json")
    _common(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--features", choices=FEATURE_MODES, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--min-df", type=int)
    p.add_argument("--max-features", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on a labelled corpus")
    _common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--digits", type=int, default=2)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("grid", help="run the algorithm x feature grid and emit every table")
    _common(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--algorithms", help="comma-separated subset of " + ",".join(ALGORITHMS))
    p.add_argument("--features", help="comma-separated subset of " + ",".join(FEATURE_MODES))
    p.add_argument("--mode", choices=[SINGLE, MULTI])
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--stratified", action="store_true")
    p.add_argument("--threshold", type=float)
    p.add_argument("--min-df", type=int)
    p.add_argument("--max-features", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--digits", type=int, default=2)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("predict", help="label one document with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--input", help="UTF-8 text file")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", help="print a table from a grid's results.json")
    p.add_argument("results", help="results.json or the grid output directory")
    p.add_argument("--table", choices=["accuracy", "weighted", "per-label"], default="accuracy")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--digits", type=int, default=2)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except TextClfError as exc:
        _fail(exc.kind, str(exc))
    except OSError as exc:
        _fail("io", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
