"""One-vs-rest linear-margin classifiers over TF-IDF vectors, trained by
seeded epoch-wise stochastic subgradient descent on the hinge loss.

Objective per topic: lam/2 * ||w||^2 + mean_i max(0, 1 - y_i (w.x_i + b)),
step size 1/(lam * t), bias unregularized.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import features
from .corpus import LabeledSnippet
from .features import SparseVector, TfidfModel
from .topics import TOPIC_INDEX, TOPIC_ORDER, Topic

NEG_INF = float("-inf")


@dataclass(frozen=True)
class TrainConfig:
    regularization_strength: float = 1e-4
    epochs: int = 50
    seed: int = 42
    tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.regularization_strength <= 0:
            raise ValueError("regularization_strength must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class TopicClassifier:
    topic: Topic
    weights: list[float]
    bias: float


@dataclass(frozen=True)
class MultiLabelModel:
    tfidf: TfidfModel
    per_topic: dict[Topic, TopicClassifier]
    training_config: TrainConfig
    warnings: list[str] = field(default_factory=list)
    objectives: dict[Topic, list[float]] = field(default_factory=dict)


class _Design:
    """CSR-style layout of the transformed training set, shared by every
    per-topic run so one-vs-rest training stays independent per topic."""

    def __init__(self, vectors: Sequence[SparseVector], vocab_size: int):
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for vec in vectors:
            indices.extend(vec.entries.keys())
            data.extend(vec.entries.values())
            indptr.append(len(indices))
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.float64)
        self.n_rows = len(vectors)
        self.vocab_size = vocab_size

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def margins(self, w: np.ndarray, bias: float) -> np.ndarray:
        prods = np.concatenate(([0.0], np.cumsum(self.data * w[self.indices])))
        return prods[self.indptr[1:]] - prods[self.indptr[:-1]] + bias


def train(
    snippets: Sequence[LabeledSnippet],
    config: TrainConfig | None = None,
    min_df: int = 1,
) -> MultiLabelModel:
    """Fit the TF-IDF model on all snippet texts, then one classifier per
    topic with at least 2 positives and 2 negatives. Topics that cannot be
    trained are omitted and recorded in the model's warnings."""
    if not snippets:
        raise ValueError("cannot train on an empty snippet set")
    config = config or TrainConfig()
    tfidf = features.fit([s.text for s in snippets], min_df=min_df)
    vectors = [features.transform(tfidf, s.text) for s in snippets]
    design = _Design(vectors, tfidf.vocabulary_size)

    per_topic: dict[Topic, TopicClassifier] = {}
    warnings: list[str] = []
    objectives: dict[Topic, list[float]] = {}
    for topic in TOPIC_ORDER:
        y = np.array(
            [1.0 if topic in s.labels else -1.0 for s in snippets], dtype=np.float64
        )
        positives = int(np.sum(y > 0))
        negatives = len(y) - positives
        if positives == 0:
            warnings.append(f"{topic.value}: no positive examples; topic omitted")
            continue
        if positives < 2 or negatives < 2:
            warnings.append(
                f"{topic.value}: needs >= 2 positive and >= 2 negative examples "
                f"(got {positives}/{negatives}); topic omitted"
            )
            continue
        weights, bias, history = _train_one(design, y, config, TOPIC_INDEX[topic])
        per_topic[topic] = TopicClassifier(topic, weights.tolist(), bias)
        objectives[topic] = history
    return MultiLabelModel(tfidf, per_topic, config, warnings, objectives)


def _train_one(
    design: _Design, y: np.ndarray, config: TrainConfig, topic_index: int
) -> tuple[np.ndarray, float, list[float]]:
    lam = config.regularization_strength
    rng = random.Random(config.seed * 2654435761 % (2**31) + topic_index)
    v = np.zeros(design.vocab_size, dtype=np.float64)
    scale = 1.0
    bias = 0.0
    t = 0
    order = list(range(design.n_rows))
    history: list[float] = []
    best: tuple[float, np.ndarray, float, int] | None = None
    prev_obj = float("inf")
    for _ in range(config.epochs):
        rng.shuffle(order)
        for j in order:
            t += 1
            eta = 1.0 / (lam * t)
            idx, val = design.row(j)
            margin = float(y[j]) * (scale * float(val @ v[idx]) + bias)
            decay = 1.0 - eta * lam  # == 1 - 1/t
            if decay == 0.0:
                v[:] = 0.0
                scale = 1.0
            else:
                scale *= decay
            if margin < 1.0:
                v[idx] += (eta * float(y[j]) / scale) * val
                # the unregularized bias gets the undamped 1/t rate; the
                # 1/lam factor in eta only exists to cancel w's shrinkage
                bias += float(y[j]) / t
            if scale < 1e-9:  # fold the factor back in before it underflows
                v *= scale
                scale = 1.0
        w = v * scale
        obj = _objective(design, w, bias, y, lam)
        history.append(obj)
        if best is None or obj < best[0]:
            best = (obj, w.copy(), bias, len(history))
        if prev_obj - obj < config.tolerance:
            break
        prev_obj = obj
    # return the best end-of-epoch state; a final epoch that drifted back
    # up (SGD noise around the optimum) is dropped from the record too
    assert best is not None
    _, w_best, bias_best, epoch = best
    return w_best, bias_best, history[:epoch]


def _objective(
    design: _Design, w: np.ndarray, bias: float, y: np.ndarray, lam: float
) -> float:
    margins = y * design.margins(w, bias)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * lam * float(w @ w) + float(np.mean(hinge))


def margin_for(clf: TopicClassifier, vec: SparseVector) -> float:
    """Decision value for one topic; the shared primitive for predict and
    window voting so both produce bit-identical scores."""
    weights = clf.weights
    acc = 0.0
    for i, value in vec.entries.items():
        acc += weights[i] * value
    return clf.bias + acc


def predict(model: MultiLabelModel, text: str) -> dict[Topic, tuple[bool, float]]:
    """Per topic (decision, margin); margin -inf with decision False for
    topics omitted at training time."""
    vec = features.transform(model.tfidf, text)
    out: dict[Topic, tuple[bool, float]] = {}
    for topic in TOPIC_ORDER:
        clf = model.per_topic.get(topic)
        if clf is None:
            out[topic] = (False, NEG_INF)
        else:
            margin = margin_for(clf, vec)
            out[topic] = (margin >= 0.0, margin)
    return out
