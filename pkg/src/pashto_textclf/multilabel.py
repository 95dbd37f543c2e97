"""Binary relevance: one independent two-class model per label."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifiers import ModelConfig, TrainedModel, as_matrix, positive_scores, train
from .corpus import LabelSchema
from .errors import DimensionError, FormatError, MetricError, TrainingError
from .features import SparseVector
from .serial import dumps

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class MultiLabelModel:
    per_label_models: tuple[TrainedModel, ...]
    schema: LabelSchema
    threshold: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "per_label_models", tuple(self.per_label_models))
        if len(self.per_label_models) != len(self.schema):
            raise TrainingError("need exactly one binary model per schema label")
        dims = {m.n_features for m in self.per_label_models}
        if len(dims) != 1:
            raise DimensionError("per-label models disagree on feature dimension")
        if not 0.0 < self.threshold:
            raise TrainingError("threshold must be positive")

    @property
    def n_features(self) -> int:
        return self.per_label_models[0].n_features

    @property
    def vocab_hash(self):
        return self.per_label_models[0].vocab_hash

    def with_threshold(self, threshold: float) -> "MultiLabelModel":
        return MultiLabelModel(self.per_label_models, self.schema, threshold)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "binary-relevance",
            "schema": self.schema.to_dict(),
            "threshold": self.threshold,
            "models": [m.to_dict() for m in self.per_label_models],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MultiLabelModel":
        if data.get("format_version") != FORMAT_VERSION or data.get("kind") != "binary-relevance":
            raise FormatError("not a binary-relevance model file")
        return cls(
            tuple(TrainedModel.from_dict(m) for m in data["models"]),
            LabelSchema.from_dict(data["schema"]),
            float(data["threshold"]),
        )

    def dumps(self) -> str:
        return dumps(self.to_dict())


def _label_array(Y, n_rows=None) -> np.ndarray:
    if isinstance(Y, np.ndarray):
        arr = Y
    else:
        arr = np.array([np.asarray(v) for v in Y])
    arr = np.asarray(arr).astype(np.int8)
    if arr.ndim != 2:
        raise TrainingError("label vectors must form a 2-D matrix")
    if n_rows is not None and arr.shape[0] != n_rows:
        raise TrainingError(f"{n_rows} vectors but {arr.shape[0]} label vectors")
    return arr


def train_binary_relevance(config: ModelConfig, X, Y, schema: LabelSchema | None = None,
                           threshold: float = 0.5) -> MultiLabelModel:
    """Train one binary model per label; label j uses seed ``config.seed + j``.

    Every label must have positive and negative examples.
    """
    if isinstance(X, (list, tuple)) and len(X) == 0:
        raise TrainingError("empty training set")
    Xm = as_matrix(X)
    Ym = _label_array(Y, Xm.shape[0])
    if Xm.shape[0] == 0:
        raise TrainingError("empty training set")
    if schema is None:
        schema = LabelSchema(tuple(f"label{j}" for j in range(Ym.shape[1])), "multi-label")
    if Ym.shape[1] != len(schema):
        raise TrainingError(f"label vectors have {Ym.shape[1]} bits, schema has {len(schema)} labels")
    for j, name in enumerate(schema.names):
        pos = int(Ym[:, j].sum())
        if pos == 0 or pos == Ym.shape[0]:
            which = "no positive" if pos == 0 else "no negative"
            raise TrainingError(f"label {name!r} has {which} training examples")
    models = []
    for j in range(Ym.shape[1]):
        cfg = config.with_seed(config.seed + j)
        models.append(train(cfg, Xm, Ym[:, j], n_classes=2))
    return MultiLabelModel(tuple(models), schema, threshold)


def label_scores(model: MultiLabelModel, X) -> np.ndarray:
    """(rows x labels) positive-class scores."""
    Xm = as_matrix(X)
    if Xm.shape[1] != model.n_features:
        raise DimensionError(f"vector dim {Xm.shape[1]} != model dim {model.n_features}")
    return np.column_stack([positive_scores(m, Xm) for m in model.per_label_models])


def threshold_scores(scores, threshold: float) -> np.ndarray:
    return (np.asarray(scores) >= threshold).astype(np.int8)


def predict_label_vectors(model: MultiLabelModel, X) -> np.ndarray:
    return threshold_scores(label_scores(model, X), model.threshold)


def predict_label_vector(model: MultiLabelModel, x: SparseVector) -> np.ndarray:
    """Bit j is set iff label j's positive score reaches the threshold."""
    if x.dim != model.n_features:
        raise DimensionError(f"vector dim {x.dim} != model dim {model.n_features}")
    return predict_label_vectors(model, x)[0]


def per_label_accuracy(model: MultiLabelModel, X_test, Y_test) -> np.ndarray:
    Xm = as_matrix(X_test) if not (isinstance(X_test, (list, tuple)) and len(X_test) == 0) else None
    if Xm is None or Xm.shape[0] == 0:
        raise MetricError("empty test set")
    Y = _label_array(Y_test, Xm.shape[0])
    P = predict_label_vectors(model, Xm)
    return np.mean(P == Y, axis=0)


def save_multilabel_model(model: MultiLabelModel, path: str | Path) -> None:
    Path(path).write_text(model.dumps() + "\n", encoding="utf-8")


def load_multilabel_model(path: str | Path) -> MultiLabelModel:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"model file not found: {path}")
    try:
        return MultiLabelModel.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed model ({exc.msg})") from None


__all__ = [
    "MultiLabelModel", "train_binary_relevance", "label_scores", "predict_label_vector",
    "predict_label_vectors", "per_label_accuracy", "threshold_scores",
    "save_multilabel_model", "load_multilabel_model",
]
