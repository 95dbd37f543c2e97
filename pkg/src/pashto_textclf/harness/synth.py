"""Planted-keyword synthetic corpora standing in for the private Pashto data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..corpus import (
    MULTI, MULTI_LABEL_NAMES, SINGLE, SINGLE_LABEL_NAMES, Corpus, Document, LabelSchema,
)
from ..errors import CorpusError
from ..textnorm import PASHTO_ALPHABET

#: documents per label in the original multi-label corpus
REFERENCE_DOCS_PER_LABEL = {
    "History": 1251, "Culture": 1276, "Economic": 1274, "Health": 1275,
    "Politic": 1263, "Scientific": 1270, "Sport": 1182, "Technology": 1276,
    "News": 1273,
}


def reference_label_sizes(total_assignments: int) -> dict[str, int]:
    """Scale the reference label counts so they add up to ``total_assignments``.

    Largest-remainder rounding keeps the total exact.
    """
    names = list(MULTI_LABEL_NAMES)
    raw = np.array([REFERENCE_DOCS_PER_LABEL[n] for n in names], dtype=np.float64)
    exact = raw / raw.sum() * total_assignments
    sizes = np.floor(exact).astype(int)
    order = sorted(range(len(names)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in order[: total_assignments - sizes.sum()]:
        sizes[i] += 1
    return dict(zip(names, sizes.tolist()))


@dataclass(frozen=True)
class SyntheticSpec:
    label_sizes: Mapping[str, int]
    mode: str = SINGLE
    keywords_per_label: int = 25
    noise_vocabulary: int = 150
    noise_rate: float = 0.3
    min_length: int = 40
    max_length: int = 80
    mean_labels: float = 2.5
    max_labels: int = 4
    seed: int = 42


@dataclass
class SyntheticCorpus:
    corpus: Corpus
    keywords: dict[str, list[str]]
    noise_words: list[str]
    planned_docs_per_label: dict[str, int]
    spec: SyntheticSpec = field(repr=False, default=None)


def _make_words(rng, count, taken, min_len=3, max_len=6):
    letters = list(PASHTO_ALPHABET)
    words = []
    while len(words) < count:
        length = int(rng.integers(min_len, max_len + 1))
        word = "".join(letters[i] for i in rng.integers(0, len(letters), size=length))
        if word not in taken:
            taken.add(word)
            words.append(word)
    return words


def _label_counts_per_doc(rng, n_docs, total, max_labels):
    counts = np.ones(n_docs, dtype=int)
    extra = total - n_docs
    slots = np.repeat(np.arange(n_docs), max_labels - 1)
    chosen = rng.choice(len(slots), size=extra, replace=False)
    np.add.at(counts, slots[chosen], 1)
    return counts


def _assign_labels(rng, counts, sizes):
    """Give document i ``counts[i]`` distinct labels so label j is used ``sizes[j]`` times.

    Documents are served in decreasing order of label count, each taking
    the labels with the most remaining uses (random tie-break); this
    realizes any feasible bipartite degree sequence.
    """
    remaining = np.array(sizes, dtype=int)
    assignment = [None] * len(counts)
    for i in sorted(range(len(counts)), key=lambda i: -counts[i]):
        tiebreak = rng.random(len(remaining))
        order = np.lexsort((tiebreak, -remaining))
        pick = order[: counts[i]]
        if np.any(remaining[pick] <= 0):
            raise CorpusError("label sizes cannot be realized with the requested labels per document")
        remaining[pick] -= 1
        assignment[i] = tuple(sorted(pick.tolist()))
    return assignment


def generate_synthetic_corpus(spec: SyntheticSpec) -> SyntheticCorpus:
    """Sample documents whose tokens are keywords of their labels plus shared noise.

    Each token is a noise word with probability ``noise_rate``; otherwise a
    keyword of one of the document's labels chosen uniformly.
    """
    names = list(spec.label_sizes)
    sizes = [int(spec.label_sizes[n]) for n in names]
    if len(names) < 2:
        raise CorpusError("synthetic corpus needs at least two labels")
    if any(s <= 0 for s in sizes):
        raise CorpusError("every label size must be positive")
    if not 0.0 <= spec.noise_rate < 1.0:
        raise CorpusError("noise_rate must lie in [0, 1)")
    if spec.keywords_per_label < 1 or spec.min_length < 1 or spec.max_length < spec.min_length:
        raise CorpusError("degenerate keyword or length settings")

    rng = np.random.default_rng(spec.seed)
    taken: set[str] = set()
    keywords = {n: _make_words(rng, spec.keywords_per_label, taken) for n in names}
    noise_words = _make_words(rng, spec.noise_vocabulary, taken) if spec.noise_rate > 0 else []

    if spec.mode == MULTI:
        total = sum(sizes)
        n_docs = int(round(total / spec.mean_labels))
        max_labels = min(spec.max_labels, len(names))
        if not (n_docs <= total <= n_docs * max_labels) or max(sizes) > n_docs:
            raise CorpusError("label sizes incompatible with the requested labels per document")
        counts = _label_counts_per_doc(rng, n_docs, total, max_labels)
        label_sets = _assign_labels(rng, counts, sizes)
        label_sets = [label_sets[i] for i in rng.permutation(n_docs)]
    elif spec.mode == SINGLE:
        label_sets = [(j,) for j, s in enumerate(sizes) for _ in range(s)]
        label_sets = [label_sets[i] for i in rng.permutation(len(label_sets))]
    else:
        raise CorpusError(f"unknown mode {spec.mode!r}")

    docs = []
    for i, labels in enumerate(label_sets):
        length = int(rng.integers(spec.min_length, spec.max_length + 1))
        is_noise = rng.random(length) < spec.noise_rate
        owners = rng.integers(0, len(labels), size=length)
        picks = rng.integers(0, spec.keywords_per_label, size=length)
        noise_picks = rng.integers(0, max(len(noise_words), 1), size=length)
        tokens = []
        for t in range(length):
            if is_noise[t]:
                tokens.append(noise_words[noise_picks[t]])
            else:
                tokens.append(keywords[names[labels[owners[t]]]][picks[t]])
        docs.append(Document(f"doc{i:05d}", " ".join(tokens), labels))

    schema = LabelSchema(tuple(names), spec.mode)
    return SyntheticCorpus(Corpus(schema, tuple(docs)), keywords, noise_words,
                           dict(zip(names, sizes)), spec)


def single_label_spec(n_labels: int = 8, docs_per_label: int = 100, **kw) -> SyntheticSpec:
    names = SINGLE_LABEL_NAMES if n_labels == 8 else tuple(f"Class{j}" for j in range(n_labels))
    return SyntheticSpec({n: docs_per_label for n in names}, SINGLE, **kw)


def multi_label_spec(total_assignments: int = 2000, **kw) -> SyntheticSpec:
    return SyntheticSpec(reference_label_sizes(total_assignments), MULTI, **kw)


def keyword_document(synth: SyntheticCorpus, labels: Sequence[str], length: int = 60,
                     seed: int = 0) -> str:
    """A noise-free text built only from the keywords of ``labels``."""
    rng = np.random.default_rng(seed)
    pool = [w for name in labels for w in synth.keywords[name]]
    return " ".join(pool[i] for i in rng.integers(0, len(pool), size=length))
