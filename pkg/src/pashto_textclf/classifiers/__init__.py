"""The eight document classifiers behind one train/predict interface.

``train`` turns a :class:`ModelConfig` plus labelled sparse vectors into an
immutable :class:`TrainedModel`; ``predict_scores`` returns one score per
class (a probability distribution for every algorithm except SVM, which
returns one-vs-rest margins).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionError, FormatError, TrainingError
from ..features import SparseVector, stack
from ..serial import decode_array, dumps, encode_array
from . import knn, linear, mlp, naive_bayes, tree
from .mlp import relu

FORMAT_VERSION = 1

ALGORITHMS = ("GNB", "MNB", "DT", "RF", "LR", "SVM", "KNN", "MLP")

DEFAULT_HYPERPARAMETERS = {
    "GNB": {"var_smoothing": 1e-9},
    "MNB": {"alpha": 1.0},
    "DT": {"max_depth": None, "min_samples_split": 2, "max_features": None},
    "RF": {"n_trees": 100, "bootstrap": True, "max_features": "sqrt",
           "max_depth": None, "min_samples_split": 2},
    "LR": {"l2": 1e-4, "epochs": 200, "learning_rate": 0.01},
    "SVM": {"lam": 1e-4, "epochs": 50},
    "KNN": {"k": 5},
    "MLP": {"hidden_units": 20, "learning_rate": 1e-3, "beta1": 0.9, "beta2": 0.999,
            "epsilon": 1e-8, "batch_size": 32, "epochs": 100},
}

# algorithms that cannot learn from a single class
DISCRIMINATIVE = frozenset({"LR", "SVM", "MLP"})
PROBABILISTIC = frozenset(ALGORITHMS) - {"SVM"}


@dataclass(frozen=True)
class ModelConfig:
    algorithm: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise TrainingError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        unknown = set(self.hyperparameters) - set(DEFAULT_HYPERPARAMETERS[self.algorithm])
        if unknown:
            raise TrainingError(f"unknown {self.algorithm} hyperparameters: {sorted(unknown)}")

    def resolved(self) -> dict:
        hp = dict(DEFAULT_HYPERPARAMETERS[self.algorithm])
        hp.update(self.hyperparameters)
        return hp

    def with_seed(self, seed: int) -> "ModelConfig":
        return ModelConfig(self.algorithm, dict(self.hyperparameters), seed)


@dataclass(frozen=True, eq=False)
class TrainedModel:
    algorithm: str
    hyperparameters: dict
    seed: int
    n_classes: int
    n_features: int
    params: dict
    vocab_hash: str | None = None
    class_names: tuple[str, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "algorithm": self.algorithm,
            "hyperparameters": self.hyperparameters,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "n_features": self.n_features,
            "vocab_hash": self.vocab_hash,
            "class_names": list(self.class_names) if self.class_names is not None else None,
            "params": {k: encode_array(v) for k, v in self.params.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainedModel":
        if data.get("format_version") != FORMAT_VERSION:
            raise FormatError(f"unsupported model format_version {data.get('format_version')!r}")
        try:
            names = data.get("class_names")
            return cls(
                algorithm=data["algorithm"],
                hyperparameters=dict(data["hyperparameters"]),
                seed=int(data["seed"]),
                n_classes=int(data["n_classes"]),
                n_features=int(data["n_features"]),
                params={k: decode_array(v) for k, v in data["params"].items()},
                vocab_hash=data.get("vocab_hash"),
                class_names=tuple(names) if names is not None else None,
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed model record: {exc}") from None

    def dumps(self) -> str:
        return dumps(self.to_dict())

    def with_metadata(self, vocab_hash=None, class_names=None) -> "TrainedModel":
        return TrainedModel(self.algorithm, self.hyperparameters, self.seed, self.n_classes,
                            self.n_features, self.params, vocab_hash,
                            tuple(class_names) if class_names is not None else None)


def as_matrix(X) -> sp.csr_matrix:
    if sp.issparse(X):
        return sp.csr_matrix(X, dtype=np.float64)
    if isinstance(X, SparseVector):
        return stack([X])
    if isinstance(X, np.ndarray):
        return sp.csr_matrix(np.atleast_2d(X).astype(np.float64))
    return stack(list(X))


def train(config: ModelConfig, X, y: Sequence[int], n_classes: int | None = None) -> TrainedModel:
    """Fit ``config.algorithm`` on rows of ``X`` with class indices ``y``."""
    if isinstance(X, (list, tuple)) and len(X) == 0:
        raise TrainingError("empty training set")
    Xm = as_matrix(X)
    y = np.asarray(y, dtype=np.int64)
    n, V = Xm.shape
    if n == 0:
        raise TrainingError("empty training set")
    if len(y) != n:
        raise TrainingError(f"{n} vectors but {len(y)} labels")
    if y.min() < 0:
        raise TrainingError("class indices must be non-negative")
    C = int(n_classes) if n_classes is not None else int(y.max()) + 1
    if y.max() >= C:
        raise TrainingError(f"class index {int(y.max())} >= n_classes {C}")
    if C < 2:
        raise TrainingError("at least two classes are required")
    if config.algorithm in DISCRIMINATIVE and len(np.unique(y)) < 2:
        raise TrainingError(f"{config.algorithm} needs at least two distinct classes in the training data")

    hp = config.resolved()
    seed = config.seed
    alg = config.algorithm
    if alg == "GNB":
        params = naive_bayes.fit_gaussian(Xm, y, C, **hp)
    elif alg == "MNB":
        params = naive_bayes.fit_multinomial(Xm, y, C, **hp)
    elif alg == "DT":
        params = tree.fit_decision_tree(Xm, y, C, seed=seed, **hp)
    elif alg == "RF":
        params = tree.fit_random_forest(Xm, y, C, seed=seed, **hp)
    elif alg == "LR":
        params = linear.fit_logistic(Xm, y, C, seed=seed, **hp)
    elif alg == "SVM":
        params = linear.fit_pegasos(Xm, y, C, seed=seed, **hp)
    elif alg == "KNN":
        if int(hp["k"]) < 1:
            raise TrainingError("k must be >= 1")
        params = knn.fit_knn(Xm, y, C)
    else:
        params = mlp.fit_mlp(Xm, y, C, seed=seed, **hp)
    return TrainedModel(alg, hp, seed, C, V, params)


def score_matrix(model: TrainedModel, X) -> np.ndarray:
    """(rows x classes) scores for a batch of vectors."""
    Xm = as_matrix(X)
    if Xm.shape[1] != model.n_features:
        raise DimensionError(f"vector dim {Xm.shape[1]} != model dim {model.n_features}")
    p, alg = model.params, model.algorithm
    if alg == "GNB":
        return naive_bayes.gaussian_scores(p, Xm)
    if alg == "MNB":
        return naive_bayes.multinomial_scores(p, Xm)
    if alg == "DT":
        return tree.tree_scores(p, Xm)
    if alg == "RF":
        return tree.forest_scores(p, Xm)
    if alg == "LR":
        return linear.logistic_scores(p, Xm)
    if alg == "SVM":
        return linear.svm_margins(p, Xm)
    if alg == "KNN":
        return knn.knn_scores(p, Xm, model.n_classes, int(model.hyperparameters["k"]))
    return mlp.mlp_scores(p, Xm)


def predict_scores(model: TrainedModel, x: SparseVector) -> np.ndarray:
    if x.dim != model.n_features:
        raise DimensionError(f"vector dim {x.dim} != model dim {model.n_features}")
    return score_matrix(model, x)[0]


def predict_label(model: TrainedModel, x: SparseVector) -> int:
    """Argmax of the scores; ties go to the lowest class index."""
    return int(np.argmax(predict_scores(model, x)))


def predict_labels(model: TrainedModel, X) -> np.ndarray:
    return np.argmax(score_matrix(model, X), axis=1)


def positive_scores(model: TrainedModel, X) -> np.ndarray:
    """Probability-like score of class 1 for a two-class model.

    SVM margins go through a softmax over (-m, +m).
    """
    S = score_matrix(model, X)
    if model.algorithm == "SVM":
        S = linear.softmax(S)
    return S[:, 1]


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_text(model.dumps() + "\n", encoding="utf-8")


def load_model(path: str | Path) -> TrainedModel:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"model file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed model ({exc.msg})") from None
    return TrainedModel.from_dict(data)


__all__ = [
    "ALGORITHMS", "DEFAULT_HYPERPARAMETERS", "ModelConfig", "TrainedModel",
    "train", "score_matrix", "predict_scores", "predict_label", "predict_labels",
    "positive_scores", "relu", "save_model", "load_model",
]
