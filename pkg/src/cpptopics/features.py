"""Character n-gram TF-IDF over raw code text (lengths 1..5, no lowercasing,
smoothed idf, L2-normalized vectors)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: dict[str, int]
    idf: list[float]
    document_count: int
    ngram_min: int = 1
    ngram_max: int = 5

    def __post_init__(self) -> None:
        if len(self.idf) != len(self.vocabulary):
            raise ValueError("idf length must equal vocabulary size")

    @property
    def vocabulary_size(self) -> int:
        return len(self.vocabulary)


@dataclass(frozen=True)
class SparseVector:
    entries: dict[int, float] = field(default_factory=dict)

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))

    def __bool__(self) -> bool:
        return bool(self.entries)


def ngram_counts(text: str, nmin: int, nmax: int) -> dict[str, int]:
    """Raw overlapping n-gram occurrence counts, insertion-ordered by
    (length, position) of first occurrence."""
    counts: dict[str, int] = {}
    n = len(text)
    for size in range(nmin, nmax + 1):
        for i in range(n - size + 1):
            gram = text[i : i + size]
            counts[gram] = counts.get(gram, 0) + 1
    return counts


def fit(
    corpus: Sequence[str],
    ngram_min: int = 1,
    ngram_max: int = 5,
    min_df: int = 1,
) -> TfidfModel:
    """Vocabulary over all n-grams in the corpus (lexicographic index order)
    with smoothed idf: ln((1 + N) / (1 + df)) + 1."""
    if not corpus:
        raise ValueError("cannot fit on an empty corpus")
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df: dict[str, int] = {}
    for doc in corpus:
        for gram in ngram_counts(doc, ngram_min, ngram_max):
            df[gram] = df.get(gram, 0) + 1
    n_docs = len(corpus)
    vocabulary: dict[str, int] = {}
    idf: list[float] = []
    for gram in sorted(g for g, c in df.items() if c >= min_df):
        vocabulary[gram] = len(vocabulary)
        idf.append(math.log((1 + n_docs) / (1 + df[gram])) + 1.0)
    return TfidfModel(vocabulary, idf, n_docs, ngram_min, ngram_max)


def transform(model: TfidfModel, text: str) -> SparseVector:
    """tf(raw count) * idf per in-vocabulary n-gram, then L2-normalized.
    Out-of-vocabulary n-grams are dropped; may return the empty vector."""
    entries: dict[int, float] = {}
    vocab = model.vocabulary
    idf = model.idf
    for gram, tf in ngram_counts(text, model.ngram_min, model.ngram_max).items():
        idx = vocab.get(gram)
        if idx is not None:
            entries[idx] = tf * idf[idx]
    norm = math.sqrt(sum(w * w for w in entries.values()))
    if norm > 0.0:
        entries = {i: w / norm for i, w in entries.items()}
    return SparseVector(entries)


def to_json_dict(model: TfidfModel) -> dict:
    return {
        "ngram_min": model.ngram_min,
        "ngram_max": model.ngram_max,
        "document_count": model.document_count,
        "vocabulary": model.vocabulary,
        "idf": model.idf,
    }


def from_json_dict(data: Mapping) -> TfidfModel:
    return TfidfModel(
        vocabulary=dict(data["vocabulary"]),
        idf=[float(x) for x in data["idf"]],
        document_count=int(data["document_count"]),
        ngram_min=int(data["ngram_min"]),
        ngram_max=int(data["ngram_max"]),
    )
