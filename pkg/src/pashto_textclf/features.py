"""Word n-gram vocabularies, count vectors and TF-IDF weighting."""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import FeatureError, FormatError
from .textnorm import NormalizationConfig, normalize, tokenize

FORMAT_VERSION = 1

UNIGRAM, BIGRAM, TRIGRAM, TFIDF = "unigram", "bigram", "trigram", "tfidf"
FEATURE_MODES = (UNIGRAM, BIGRAM, TRIGRAM, TFIDF)
_NGRAM_ORDER = {UNIGRAM: 1, BIGRAM: 2, TRIGRAM: 3, TFIDF: 1}


@dataclass(frozen=True)
class VectorizerConfig:
    mode: str = UNIGRAM
    min_df: int = 1
    max_features: int | None = None

    def __post_init__(self):
        if self.mode not in FEATURE_MODES:
            raise FeatureError(f"unknown feature mode {self.mode!r}")
        if self.min_df < 1:
            raise FeatureError("min_df must be >= 1")
        if self.max_features is not None and self.max_features < 1:
            raise FeatureError("max_features must be >= 1")

    @property
    def n(self) -> int:
        return _NGRAM_ORDER[self.mode]

    def to_dict(self) -> dict:
        return {"mode": self.mode, "min_df": self.min_df, "max_features": self.max_features}


@dataclass(frozen=True)
class SparseVector:
    """Sorted ``(index, weight)`` pairs of a ``dim``-dimensional vector."""

    indices: np.ndarray
    weights: np.ndarray
    dim: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if idx.shape != w.shape or idx.ndim != 1:
            raise FeatureError("indices and weights must be 1-D arrays of equal length")
        if len(idx) and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= self.dim):
            raise FeatureError("indices must be strictly increasing and inside [0, dim)")
        if np.any(w == 0):
            raise FeatureError("sparse vectors must not store zero weights")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_dense(cls, values) -> "SparseVector":
        values = np.asarray(values, dtype=np.float64)
        idx = np.flatnonzero(values)
        return cls(idx, values[idx], len(values))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.weights
        return out

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.weights.tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (self.dim == other.dim and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.dim, self.indices.tobytes(), self.weights.tobytes()))


@dataclass(frozen=True, eq=False)
class Vocabulary:
    term_to_index: dict[str, int]
    doc_freq: np.ndarray
    n_docs: int
    config: VectorizerConfig = field(default_factory=VectorizerConfig)
    normalization: NormalizationConfig = field(default_factory=NormalizationConfig)

    def __len__(self) -> int:
        return len(self.term_to_index)

    @property
    def terms(self) -> list[str]:
        out = [""] * len(self.term_to_index)
        for term, i in self.term_to_index.items():
            out[i] = term
        return out

    def df(self, term: str) -> int:
        return int(self.doc_freq[self.term_to_index[term]])

    def idf(self) -> np.ndarray:
        """Smoothed inverse document frequency ``ln((1+N)/(1+df)) + 1``."""
        return np.log((1.0 + self.n_docs) / (1.0 + self.doc_freq)) + 1.0

    def to_dict(self) -> dict:
        terms = self.terms
        return {
            "format_version": FORMAT_VERSION,
            "config": self.config.to_dict(),
            "normalization": self.normalization.to_dict(),
            "n_docs": self.n_docs,
            "terms": [[t, i, int(self.doc_freq[i])] for i, t in enumerate(terms)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        if data.get("format_version") != FORMAT_VERSION:
            raise FormatError(f"unsupported vocabulary format_version {data.get('format_version')!r}")
        try:
            triples = data["terms"]
            term_to_index = {t: int(i) for t, i, _ in triples}
            df = np.zeros(len(triples), dtype=np.int64)
            for _, i, d in triples:
                df[int(i)] = int(d)
            return cls(
                term_to_index,
                df,
                int(data["n_docs"]),
                VectorizerConfig(**data["config"]),
                NormalizationConfig.from_dict(data["normalization"]),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise FormatError(f"malformed vocabulary: {exc}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def content_hash(self) -> str:
        blob = json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def ngrams(tokens: Sequence[str], n: int) -> list[str]:
    """Space-joined word n-grams of ``tokens``."""
    if n == 1:
        return list(tokens)
    return [" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def analyze(text: str, vocab_or_config, norm: NormalizationConfig | None = None) -> list[str]:
    """Text -> normalized tokens (n-gramming is left to the vectorizer)."""
    if isinstance(vocab_or_config, Vocabulary):
        norm = vocab_or_config.normalization
    return tokenize(normalize(text, norm))


def build_vocabulary(
    train_docs: Sequence[Sequence[str]],
    config: VectorizerConfig | None = None,
    normalization: NormalizationConfig | None = None,
) -> Vocabulary:
    """Collect n-gram terms and their document frequencies from training token lists."""
    config = config or VectorizerConfig()
    if not train_docs:
        raise FeatureError("cannot build a vocabulary from an empty training set")
    if all(len(doc) == 0 for doc in train_docs):
        raise FeatureError("all training documents are empty after tokenization")
    df: Counter[str] = Counter()
    for doc in train_docs:
        df.update(set(ngrams(list(doc), config.n)))
    kept = [t for t, d in df.items() if d >= config.min_df]
    if config.max_features is not None and len(kept) > config.max_features:
        kept = sorted(kept, key=lambda t: (-df[t], t))[:config.max_features]
    kept.sort()
    term_to_index = {t: i for i, t in enumerate(kept)}
    doc_freq = np.array([df[t] for t in kept], dtype=np.int64)
    return Vocabulary(term_to_index, doc_freq, len(train_docs), config,
                      normalization or NormalizationConfig())


def vectorize_counts(tokens: Sequence[str], vocab: Vocabulary) -> SparseVector:
    counts = Counter(ngrams(list(tokens), vocab.config.n))
    pairs = sorted((vocab.term_to_index[t], c) for t, c in counts.items() if t in vocab.term_to_index)
    if not pairs:
        return SparseVector(np.empty(0, np.int64), np.empty(0), len(vocab))
    idx, w = zip(*pairs)
    return SparseVector(np.array(idx), np.array(w, dtype=np.float64), len(vocab))


def tfidf_transform(counts: SparseVector, vocab: Vocabulary) -> SparseVector:
    if counts.dim != len(vocab):
        raise FeatureError(f"vector dim {counts.dim} != vocabulary size {len(vocab)}")
    if len(counts.indices) == 0:
        return counts
    w = counts.weights * vocab.idf()[counts.indices]
    norm = math.sqrt(float(np.dot(w, w)))
    return SparseVector(counts.indices, w / norm, counts.dim)


def vectorize(tokens: Sequence[str], vocab: Vocabulary) -> SparseVector:
    """Counts, or TF-IDF weights when the vocabulary was built in tfidf mode."""
    vec = vectorize_counts(tokens, vocab)
    if vocab.config.mode == TFIDF:
        vec = tfidf_transform(vec, vocab)
    return vec


def vectorize_texts(texts: Iterable[str], vocab: Vocabulary) -> list[SparseVector]:
    return [vectorize(analyze(t, vocab), vocab) for t in texts]


def stack(vectors: Sequence[SparseVector], dim: int | None = None) -> sp.csr_matrix:
    """Stack sparse vectors into a CSR matrix (rows in input order)."""
    if dim is None:
        if not vectors:
            raise FeatureError("cannot infer dimension of an empty vector list")
        dim = vectors[0].dim
    indptr = [0]
    for v in vectors:
        if v.dim != dim:
            raise FeatureError(f"vector dim {v.dim} != {dim}")
        indptr.append(indptr[-1] + len(v.indices))
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.empty(0, np.int64)
    data = np.concatenate([v.weights for v in vectors]) if vectors else np.empty(0)
    return sp.csr_matrix((data, indices, np.array(indptr)), shape=(len(vectors), dim))


def unstack(X: sp.csr_matrix) -> list[SparseVector]:
    X = sp.csr_matrix(X)
    X.sort_indices()
    out = []
    for i in range(X.shape[0]):
        lo, hi = X.indptr[i], X.indptr[i + 1]
        data = X.data[lo:hi]
        nz = data != 0
        out.append(SparseVector(X.indices[lo:hi][nz], data[nz], X.shape[1]))
    return out


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    blob = json.dumps(vocab.to_dict(), ensure_ascii=False, sort_keys=True)
    Path(path).write_text(blob + "\n", encoding="utf-8")


def load_vocabulary(path: str | Path) -> Vocabulary:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"vocabulary file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed vocabulary ({exc.msg})") from None
    return Vocabulary.from_dict(data)
