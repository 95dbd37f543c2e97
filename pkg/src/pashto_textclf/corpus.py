"""Documents, label schemas, corpus files, statistics and train/test splits."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CorpusError, SchemaError
from .textnorm import NormalizationConfig, normalize, tokenize

FORMAT_VERSION = 1

SINGLE = "single-label"
MULTI = "multi-label"

SINGLE_LABEL_NAMES = (
    "History", "Culture", "Economic", "Health",
    "Politic", "Scientific", "Sport", "Technology",
)
MULTI_LABEL_NAMES = SINGLE_LABEL_NAMES + ("News",)


@dataclass(frozen=True)
class LabelSchema:
    names: tuple[str, ...]
    mode: str = SINGLE

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if self.mode not in (SINGLE, MULTI):
            raise SchemaError(f"unknown schema mode {self.mode!r}")
        if not self.names:
            raise SchemaError("schema has no labels")
        if any(not isinstance(n, str) or not n for n in self.names):
            raise SchemaError("label names must be non-empty strings")
        if len(set(self.names)) != len(self.names):
            raise SchemaError("label names must be unique")

    @classmethod
    def default(cls, mode: str = SINGLE) -> "LabelSchema":
        return cls(SINGLE_LABEL_NAMES if mode == SINGLE else MULTI_LABEL_NAMES, mode)

    @property
    def multi(self) -> bool:
        return self.mode == MULTI

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"unknown label {name!r}") from None

    def to_dict(self) -> dict:
        return {"format_version": FORMAT_VERSION, "labels": list(self.names), "mode": self.mode}

    @classmethod
    def from_dict(cls, data: dict) -> "LabelSchema":
        _check_version(data)
        if "labels" not in data:
            raise SchemaError("schema record has no 'labels' field")
        return cls(tuple(data["labels"]), data.get("mode", SINGLE))


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(sorted(set(self.labels))))


@dataclass(frozen=True)
class Corpus:
    schema: LabelSchema
    documents: tuple[Document, ...]

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        seen = set()
        for doc in self.documents:
            if doc.id in seen:
                raise CorpusError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)
            _validate_labels(doc.labels, self.schema, where=f"document {doc.id!r}")

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @property
    def texts(self) -> list[str]:
        return [d.text for d in self.documents]

    def label_indices(self) -> np.ndarray:
        """Single class index per document (single-label corpora only)."""
        if self.schema.multi:
            raise CorpusError("label_indices() is only defined for single-label corpora")
        return np.array([d.labels[0] for d in self.documents], dtype=np.int64)

    def label_matrix(self) -> np.ndarray:
        """Binary (documents x labels) membership matrix."""
        Y = np.zeros((len(self.documents), len(self.schema)), dtype=np.int8)
        for i, doc in enumerate(self.documents):
            Y[i, list(doc.labels)] = 1
        return Y

    def subset(self, indices: Iterable[int]) -> "Corpus":
        return Corpus(self.schema, tuple(self.documents[i] for i in indices))


@dataclass(frozen=True)
class CorpusStats:
    n_documents: int
    docs_per_label: dict[str, int]
    total_words: int
    min_doc_length: int
    max_doc_length: int
    mean_doc_length: float
    mean_labels_per_doc: float

    def to_dict(self) -> dict:
        return {
            "n_documents": self.n_documents,
            "docs_per_label": dict(self.docs_per_label),
            "total_words": self.total_words,
            "min_doc_length": self.min_doc_length,
            "max_doc_length": self.max_doc_length,
            "mean_doc_length": self.mean_doc_length,
            "mean_labels_per_doc": self.mean_labels_per_doc,
        }


def _check_version(record: dict) -> None:
    version = record.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {version!r}")


def _validate_labels(labels: Sequence[int], schema: LabelSchema, where: str) -> None:
    if not labels:
        raise CorpusError(f"{where}: empty label set")
    for idx in labels:
        if not 0 <= idx < len(schema):
            raise CorpusError(f"{where}: label index {idx} out of range")
    if not schema.multi and len(labels) != 1:
        raise CorpusError(f"{where}: single-label schema needs exactly one label, got {len(labels)}")


def load_schema(path: str | Path) -> LabelSchema:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"schema file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed schema ({exc.msg})") from None
    return LabelSchema.from_dict(data)


def save_schema(schema: LabelSchema, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schema.to_dict(), ensure_ascii=False) + "\n", encoding="utf-8")


def load_corpus(
    path: str | Path,
    schema: LabelSchema | None = None,
    norm: NormalizationConfig | None = None,
) -> Corpus:
    """Read a line-delimited JSON corpus and validate it against ``schema``.

    The first line may be a header carrying ``format_version`` and the
    label schema; a header schema must agree with an explicitly passed one.
    Errors name the offending line number.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")

    documents: list[Document] = []
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed record ({exc.msg})") from None
            if not isinstance(record, dict):
                raise CorpusError(f"{path}:{lineno}: record is not an object")
            if "id" not in record and "format_version" in record:
                if documents:
                    raise CorpusError(f"{path}:{lineno}: header must be the first record")
                try:
                    _check_version(record)
                except SchemaError as exc:
                    raise CorpusError(f"{path}:{lineno}: {exc}") from None
                if "labels" in record:
                    header_schema = LabelSchema.from_dict(record)
                    if schema is None:
                        schema = header_schema
                    elif header_schema != schema:
                        raise CorpusError(f"{path}:{lineno}: header schema differs from the given schema")
                continue
            if schema is None:
                schema = LabelSchema.default()
            documents.append(_parse_record(record, schema, norm, f"{path}:{lineno}"))
            doc_id = documents[-1].id
            if doc_id in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate id {doc_id!r} (first on line {seen[doc_id]})")
            seen[doc_id] = lineno

    if schema is None:
        schema = LabelSchema.default()
    return Corpus(schema, tuple(documents))


def _parse_record(record: dict, schema: LabelSchema, norm, where: str) -> Document:
    _check_version(record)
    for key in ("id", "text", "labels"):
        if key not in record:
            raise CorpusError(f"{where}: missing field {key!r}")
    doc_id, text, names = record["id"], record["text"], record["labels"]
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError(f"{where}: id must be a non-empty string")
    if not isinstance(text, str):
        raise CorpusError(f"{where}: text must be a string")
    if isinstance(names, str):
        names = [names]
    if not isinstance(names, list) or not names:
        raise CorpusError(f"{where}: empty label set")
    labels = []
    for name in names:
        if name not in schema.names:
            raise CorpusError(f"{where}: unknown label {name!r}")
        labels.append(schema.index(name))
    if not normalize(text, norm):
        raise CorpusError(f"{where}: document {doc_id!r} is empty after normalization")
    _validate_labels(sorted(set(labels)), schema, where)
    return Document(doc_id, text, tuple(labels))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(corpus.schema.to_dict(), ensure_ascii=False) + "\n")
        for doc in corpus.documents:
            rec = {"id": doc.id, "text": doc.text, "labels": [corpus.schema.names[i] for i in doc.labels]}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def corpus_stats(corpus: Corpus, norm: NormalizationConfig | None = None) -> CorpusStats:
    if not corpus.documents:
        raise CorpusError("cannot compute statistics of an empty corpus")
    lengths = [len(tokenize(normalize(d.text, norm))) for d in corpus.documents]
    per_label = [0] * len(corpus.schema)
    n_assign = 0
    for doc in corpus.documents:
        for idx in doc.labels:
            per_label[idx] += 1
        n_assign += len(doc.labels)
    n = len(corpus.documents)
    return CorpusStats(
        n_documents=n,
        docs_per_label=dict(zip(corpus.schema.names, per_label)),
        total_words=sum(lengths),
        min_doc_length=min(lengths),
        max_doc_length=max(lengths),
        mean_doc_length=sum(lengths) / n,
        mean_labels_per_doc=n_assign / n,
    )


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split(
    corpus: Corpus,
    train_fraction: float = 0.8,
    seed: int = 0,
    stratified: bool = False,
) -> tuple[Corpus, Corpus]:
    """Seeded train/test partition; both parts keep the corpus order.

    The training part has ``round_half_up(train_fraction * N)`` documents.
    In stratified mode each class contributes its floor share and the
    remaining slots go to the classes with the largest remainders.
    """
    if not 0.0 < train_fraction < 1.0:
        raise CorpusError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = len(corpus)
    if n < 2:
        raise CorpusError("split needs at least 2 documents")
    n_train = round_half_up(train_fraction * n)
    rng = np.random.default_rng(seed)

    if not stratified:
        perm = rng.permutation(n)
        train_idx = np.sort(perm[:n_train])
    else:
        if corpus.schema.multi:
            raise CorpusError("stratified split is only available for single-label corpora")
        y = corpus.label_indices()
        classes = np.unique(y)
        members = {c: np.flatnonzero(y == c) for c in classes}
        for c, idx in members.items():
            if len(idx) < 2:
                raise CorpusError(f"class {corpus.schema.names[c]!r} has fewer than 2 documents")
        exact = {c: train_fraction * len(members[c]) for c in classes}
        quota = {c: int(math.floor(exact[c])) for c in classes}
        leftover = n_train - sum(quota.values())
        by_remainder = sorted(classes, key=lambda c: (-(exact[c] - quota[c]), c))
        for c in by_remainder[:max(leftover, 0)]:
            quota[c] += 1
        chosen = []
        for c in classes:
            perm = rng.permutation(members[c])
            chosen.extend(perm[:quota[c]].tolist())
        train_idx = np.array(sorted(chosen), dtype=np.int64)

    mask = np.zeros(n, dtype=bool)
    mask[train_idx] = True
    return corpus.subset(np.flatnonzero(mask)), corpus.subset(np.flatnonzero(~mask))
