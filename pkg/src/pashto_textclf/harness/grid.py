"""Run every (algorithm, feature mode) cell of an experiment grid on one shared split."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..classifiers import ModelConfig, TrainedModel, predict_labels, train
from ..corpus import MULTI, Corpus, split
from ..errors import ConfigError, TextClfError
from ..features import (
    Vocabulary, VectorizerConfig, analyze, build_vocabulary, stack, vectorize,
)
from ..metrics import ClassReport, MultiLabelReport, classification_report, multilabel_report
from ..multilabel import MultiLabelModel, label_scores, threshold_scores, train_binary_relevance
from .config import ExperimentGrid


@dataclass
class RunResult:
    """Outcome of one grid cell: a report, or the reason it failed.

    ``accuracy`` is test accuracy for single-label cells and mean per-label
    accuracy for multi-label cells. ``accuracies`` holds one value per
    repeat; the report and model come from the first repeat.
    """

    algorithm: str
    feature_mode: str
    cell_index: int
    seed: int
    accuracy: float | None = None
    accuracies: tuple[float, ...] = ()
    report: ClassReport | MultiLabelReport | None = None
    seconds: float = 0.0
    failure: str | None = None
    model: TrainedModel | MultiLabelModel | None = field(default=None, repr=False)
    vocab: Vocabulary | None = field(default=None, repr=False)

    @property
    def cell(self) -> tuple[str, str]:
        return self.algorithm, self.feature_mode

    @property
    def ok(self) -> bool:
        return self.failure is None

    @property
    def accuracy_mean(self) -> float | None:
        return float(np.mean(self.accuracies)) if self.accuracies else None

    @property
    def accuracy_range(self) -> tuple[float, float] | None:
        if not self.accuracies:
            return None
        return float(min(self.accuracies)), float(max(self.accuracies))

    @property
    def weighted_f1(self) -> float | None:
        if self.report is None:
            return None
        if isinstance(self.report, ClassReport):
            return self.report.weighted.f1
        return self.report.weighted_f1

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "feature_mode": self.feature_mode,
            "cell_index": self.cell_index,
            "seed": self.seed,
            "accuracy": self.accuracy,
            "accuracies": list(self.accuracies),
            "report": self.report.to_dict() if self.report is not None else None,
            "failure": self.failure,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        report = d.get("report")
        if report is not None:
            kind = ClassReport if "rows" in report else MultiLabelReport
            report = kind.from_dict(report)
        return cls(d["algorithm"], d["feature_mode"], int(d["cell_index"]), int(d["seed"]),
                   d.get("accuracy"), tuple(d.get("accuracies", ())), report,
                   failure=d.get("failure"))


@dataclass
class _FeatureSpace:
    vocab: Vocabulary
    X_train: object
    X_test: object


def _feature_space(mode, train_tokens, test_tokens, grid) -> _FeatureSpace:
    config = VectorizerConfig(mode, min_df=grid.min_df, max_features=grid.max_features)
    vocab = build_vocabulary(train_tokens, config, grid.normalization)
    X_train = stack([vectorize(t, vocab) for t in train_tokens], len(vocab))
    X_test = stack([vectorize(t, vocab) for t in test_tokens], len(vocab))
    return _FeatureSpace(vocab, X_train, X_test)


def _evaluate_cell(algorithm, seed, space, train_c, test_c, grid):
    config = ModelConfig(algorithm, dict(grid.hyperparameters.get(algorithm, {})), seed)
    names = list(train_c.schema.names)
    vocab_hash = space.vocab.content_hash()
    if train_c.schema.multi:
        model = train_binary_relevance(config, space.X_train, train_c.label_matrix(),
                                       train_c.schema, grid.threshold)
        model = MultiLabelModel(
            tuple(m.with_metadata(vocab_hash, ("0", "1")) for m in model.per_label_models),
            model.schema, model.threshold)
        S = label_scores(model, space.X_test)
        P = threshold_scores(S, grid.threshold)
        report = multilabel_report(test_c.label_matrix(), P, S, names)
        acc = float(np.mean(report.per_label_accuracy))
    else:
        model = train(config, space.X_train, train_c.label_indices(), n_classes=len(names))
        model = model.with_metadata(vocab_hash, names)
        y_pred = predict_labels(model, space.X_test)
        report = classification_report(test_c.label_indices(), y_pred, names)
        acc = report.accuracy
    return acc, report, model


def _run_once(corpus, grid, seed):
    train_c, test_c = split(corpus, grid.train_fraction, seed=seed, stratified=grid.stratified)
    train_tokens = [analyze(t, None, grid.normalization) for t in train_c.texts]
    test_tokens = [analyze(t, None, grid.normalization) for t in test_c.texts]
    spaces, space_errors = {}, {}
    for mode in grid.feature_modes:
        try:
            spaces[mode] = _feature_space(mode, train_tokens, test_tokens, grid)
        except TextClfError as exc:
            space_errors[mode] = f"{exc.kind}: {exc}"
    out = []
    for index, (algorithm, mode) in enumerate(grid.cells()):
        cell_seed = seed ^ index
        result = RunResult(algorithm, mode, index, cell_seed)
        if mode in space_errors:
            result.failure = space_errors[mode]
            out.append(result)
            continue
        start = time.perf_counter()
        try:
            acc, report, model = _evaluate_cell(algorithm, cell_seed, spaces[mode],
                                                train_c, test_c, grid)
            result.accuracy, result.report, result.model = acc, report, model
            result.vocab = spaces[mode].vocab
        except TextClfError as exc:
            result.failure = f"{exc.kind}: {exc}"
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            result.failure = f"{type(exc).__name__}: {exc}"
        result.seconds = time.perf_counter() - start
        out.append(result)
    return out


def run_grid(corpus: Corpus, grid: ExperimentGrid) -> list[RunResult]:
    """Train and evaluate every grid cell; results come in (algorithm, feature mode) order.

    The split is drawn once per repeat from ``grid.seed + repeat`` and shared
    by all cells. Vocabularies are fitted on the training part only. Cell
    ``i`` trains with seed ``split_seed ^ i``, so results do not depend on
    the order in which cells run.
    """
    if (grid.mode == MULTI) != corpus.schema.multi:
        raise ConfigError(f"grid mode {grid.mode!r} does not match corpus mode {corpus.schema.mode!r}")
    results = _run_once(corpus, grid, grid.seed)
    for r in results:
        r.accuracies = (r.accuracy,) if r.ok else ()
    for rep in range(1, grid.repeats):
        for base, extra in zip(results, _run_once(corpus, grid, grid.seed + rep)):
            if base.ok and extra.ok:
                base.accuracies = base.accuracies + (extra.accuracy,)
            base.seconds += extra.seconds
    return results
