"""Evaluation tooling: multilabel-stratified k-fold cross-validation at the
file level and character-level highlight metrics against gold annotations."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .classifier import MultiLabelModel, TrainConfig, predict, train
from .corpus import GroundTruthAnnotation, LabeledSnippet, SourceDocument
from .highlighter import DocHighlight, HighlightConfig, highlight
from .topics import TOPIC_INDEX, TOPIC_ORDER, Topic


@dataclass(frozen=True)
class TopicMetrics:
    precision: float
    recall: float
    f1: float
    support: float


@dataclass(frozen=True)
class MetricsReport:
    per_topic: dict[Topic, TopicMetrics]
    average: tuple[float, float, float]
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class FoldAssignment:
    fold_count: int
    assignment: dict[int, int]

    def fold_indices(self, fold: int) -> list[int]:
        return sorted(i for i, f in self.assignment.items() if f == fold)


def _prf(tp: int | float, fp: int | float, fn: int | float) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def _macro_average(per_topic: dict[Topic, TopicMetrics]) -> tuple[float, float, float]:
    rows = [m for m in per_topic.values() if m.support > 0]
    if not rows:
        return (0.0, 0.0, 0.0)
    k = len(rows)
    return (
        sum(m.precision for m in rows) / k,
        sum(m.recall for m in rows) / k,
        sum(m.f1 for m in rows) / k,
    )


def stratified_folds(
    labels: Sequence[frozenset[Topic] | set[Topic]], k: int, seed: int
) -> FoldAssignment:
    """Iterative stratification: repeatedly take the topic with the fewest
    unassigned examples and deal its examples to the folds that still want
    them most; ties break by overall remaining capacity, then randomness."""
    if k < 2:
        raise ValueError("fold count must be >= 2")
    n = len(labels)
    if n < k:
        raise ValueError(f"need at least {k} samples for {k} folds, got {n}")
    rng = random.Random(seed)
    remaining = set(range(n))
    assignment: dict[int, int] = {}
    # desired counts per fold: overall and per topic
    fold_capacity = [n / k] * k
    desired: dict[Topic, list[float]] = {}
    members: dict[Topic, set[int]] = {}
    for topic in TOPIC_ORDER:
        idx = {i for i in range(n) if topic in labels[i]}
        if idx:
            members[topic] = idx
            desired[topic] = [len(idx) / k] * k

    def place(i: int, fold: int) -> None:
        assignment[i] = fold
        remaining.discard(i)
        fold_capacity[fold] -= 1
        for t in labels[i]:
            if t in desired:
                desired[t][fold] -= 1

    while True:
        active = [
            (len(members[t] & remaining), TOPIC_INDEX[t], t)
            for t in members
            if members[t] & remaining
        ]
        if not active:
            break
        _, _, topic = min(active)
        for i in sorted(members[topic] & remaining):
            want = desired[topic]
            best = max(want)
            folds = [f for f in range(k) if want[f] == best]
            if len(folds) > 1:
                cap = max(fold_capacity[f] for f in folds)
                folds = [f for f in folds if fold_capacity[f] == cap]
            place(i, folds[0] if len(folds) == 1 else rng.choice(folds))
    for i in sorted(remaining):
        cap = max(fold_capacity)
        folds = [f for f in range(k) if fold_capacity[f] == cap]
        place(i, folds[0] if len(folds) == 1 else rng.choice(folds))
    return FoldAssignment(k, assignment)


def cross_validate(
    snippets: Sequence[LabeledSnippet],
    k: int,
    cfg: TrainConfig | None = None,
    train_fn: Callable[[Sequence[LabeledSnippet], TrainConfig], MultiLabelModel] | None = None,
) -> MetricsReport:
    """k-fold CV at the file level: per-fold precision/recall/F1 per topic,
    averaged across folds; support is the mean per-fold positive count.
    Topics with fewer than k positives are excluded with a warning."""
    cfg = cfg or TrainConfig()
    train_fn = train_fn or (lambda snips, c: train(snips, c))
    warnings: list[str] = []
    positives = {
        t: sum(1 for s in snippets if t in s.labels) for t in TOPIC_ORDER
    }
    evaluated = [t for t in TOPIC_ORDER if positives[t] >= k]
    for t in TOPIC_ORDER:
        if 0 < positives[t] < k:
            warnings.append(
                f"{t.value}: only {positives[t]} positives for {k} folds; excluded"
            )
    folds = stratified_folds([s.labels for s in snippets], k, cfg.seed)
    per_fold: dict[Topic, list[tuple[float, float, float, int]]] = {
        t: [] for t in evaluated
    }
    for fold in range(folds.fold_count):
        test_idx = folds.fold_indices(fold)
        train_set = [s for i, s in enumerate(snippets) if folds.assignment[i] != fold]
        model = train_fn(train_set, cfg)
        counts = {t: [0, 0, 0] for t in evaluated}  # tp, fp, fn
        for i in test_idx:
            snip = snippets[i]
            decisions = predict(model, snip.text)
            for t in evaluated:
                decided = decisions[t][0]
                if decided and t in snip.labels:
                    counts[t][0] += 1
                elif decided:
                    counts[t][1] += 1
                elif t in snip.labels:
                    counts[t][2] += 1
        for t in evaluated:
            tp, fp, fn = counts[t]
            p, r, f1 = _prf(tp, fp, fn)
            per_fold[t].append((p, r, f1, tp + fn))
    per_topic = {}
    for t in evaluated:
        rows = per_fold[t]
        per_topic[t] = TopicMetrics(
            precision=sum(r[0] for r in rows) / len(rows),
            recall=sum(r[1] for r in rows) / len(rows),
            f1=sum(r[2] for r in rows) / len(rows),
            support=sum(r[3] for r in rows) / len(rows),
        )
    return MetricsReport(per_topic, _macro_average(per_topic), warnings)


def _merged(intervals: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for start, end in sorted(intervals):
        if out and start <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], end))
        else:
            out.append((start, end))
    return out


def _overlap(a: list[tuple[int, int]], b: list[tuple[int, int]]) -> int:
    total = i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            total += hi - lo
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return total


def char_metrics(
    pred: Iterable[DocHighlight],
    gold: Iterable[GroundTruthAnnotation],
    doc_lengths: Mapping[str, int],
) -> MetricsReport:
    """Character-level precision/recall/F1 per topic over the given
    documents. Same-topic overlaps are unioned before counting; support is
    the number of documents with gold annotations for the topic."""
    pred_iv: dict[tuple[Topic, str], list[tuple[int, int]]] = {}
    gold_iv: dict[tuple[Topic, str], list[tuple[int, int]]] = {}
    gold_docs: dict[Topic, set[str]] = {}
    for h in pred:
        if h.doc_id not in doc_lengths:
            raise ValueError(f"predicted span references unknown doc_id {h.doc_id!r}")
        if h.span.end > doc_lengths[h.doc_id]:
            raise ValueError(f"span {h.span} exceeds document {h.doc_id!r}")
        pred_iv.setdefault((h.topic, h.doc_id), []).append((h.span.start, h.span.end))
    for g in gold:
        if g.doc_id not in doc_lengths:
            raise ValueError(f"gold span references unknown doc_id {g.doc_id!r}")
        if g.span.end > doc_lengths[g.doc_id]:
            raise ValueError(f"span {g.span} exceeds document {g.doc_id!r}")
        gold_iv.setdefault((g.topic, g.doc_id), []).append((g.span.start, g.span.end))
        gold_docs.setdefault(g.topic, set()).add(g.doc_id)

    topics = sorted(
        {t for t, _ in pred_iv} | {t for t, _ in gold_iv}, key=lambda t: TOPIC_INDEX[t]
    )
    per_topic = {}
    for t in topics:
        tp = fp = fn = 0
        doc_ids = {d for tt, d in pred_iv if tt == t} | {d for tt, d in gold_iv if tt == t}
        for d in doc_ids:
            p = _merged(pred_iv.get((t, d), []))
            g = _merged(gold_iv.get((t, d), []))
            p_chars = sum(e - s for s, e in p)
            g_chars = sum(e - s for s, e in g)
            inter = _overlap(p, g)
            tp += inter
            fp += p_chars - inter
            fn += g_chars - inter
        precision, recall, f1 = _prf(tp, fp, fn)
        per_topic[t] = TopicMetrics(
            precision, recall, f1, support=len(gold_docs.get(t, ()))
        )
    return MetricsReport(per_topic, _macro_average(per_topic))


def sample_eval_set(
    gold: Iterable[GroundTruthAnnotation], per_topic_cap: int, seed: int
) -> dict[Topic, set[str]]:
    """Per topic, the documents carrying at least one gold annotation,
    down-sampled to per_topic_cap with a seeded uniform draw."""
    if per_topic_cap < 1:
        raise ValueError("per_topic_cap must be >= 1")
    docs: dict[Topic, set[str]] = {}
    for g in gold:
        docs.setdefault(g.topic, set()).add(g.doc_id)
    rng = random.Random(seed)
    out: dict[Topic, set[str]] = {}
    for topic in TOPIC_ORDER:
        if topic not in docs:
            continue
        candidates = sorted(docs[topic])
        if len(candidates) > per_topic_cap:
            out[topic] = set(rng.sample(candidates, per_topic_cap))
        else:
            out[topic] = set(candidates)
    return out


def highlight_eval(
    model: MultiLabelModel,
    documents: Sequence[SourceDocument],
    gold: Sequence[GroundTruthAnnotation],
    cfg: HighlightConfig | None = None,
    per_topic_cap: int = 300,
    seed: int = 42,
    filtered: bool = True,
) -> MetricsReport:
    """Run the highlight pipeline per topic over its sampled document set
    and score character-level metrics against gold. With filtered=False
    every document is evaluated for every topic."""
    cfg = cfg or HighlightConfig()
    docs_by_id = {d.doc_id: d for d in documents}
    missing = sorted({g.doc_id for g in gold} - set(docs_by_id))
    if missing:
        raise ValueError(f"gold references unknown doc_id {missing[0]!r}")
    if filtered:
        eval_sets = sample_eval_set(gold, per_topic_cap, seed)
    else:
        eval_sets = {t: set(docs_by_id) for t in TOPIC_ORDER}
    per_topic: dict[Topic, TopicMetrics] = {}
    for topic in TOPIC_ORDER:
        doc_ids = eval_sets.get(topic)
        if not doc_ids:
            continue
        pred: list[DocHighlight] = []
        for doc_id in sorted(doc_ids):
            doc = docs_by_id[doc_id]
            for h in highlight(doc, model, {topic}, cfg):
                pred.append(DocHighlight(doc_id, h.topic, h.span, h.confidence))
        topic_gold = [g for g in gold if g.topic == topic and g.doc_id in doc_ids]
        lengths = {d: docs_by_id[d].length for d in doc_ids}
        report = char_metrics(pred, topic_gold, lengths)
        per_topic[topic] = report.per_topic.get(topic, TopicMetrics(0.0, 0.0, 0.0, 0))
    return MetricsReport(per_topic, _macro_average(per_topic))


# --- report rendering -------------------------------------------------------


def report_to_json(report: MetricsReport) -> dict:
    return {
        "per_topic": {
            t.value: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for t, m in sorted(report.per_topic.items(), key=lambda kv: TOPIC_INDEX[kv[0]])
        },
        "average": {
            "precision": report.average[0],
            "recall": report.average[1],
            "f1": report.average[2],
        },
        "warnings": list(report.warnings),
    }


def render_report(report: MetricsReport) -> str:
    header = f"{'Class':<18}{'Precision':>10}{'Recall':>10}{'F1-Score':>10}{'Support':>10}"
    lines = [header, "-" * len(header)]
    for t in TOPIC_ORDER:
        m = report.per_topic.get(t)
        if m is None:
            continue
        support = f"{m.support:g}"
        lines.append(
            f"{t.value:<18}{m.precision:>10.2f}{m.recall:>10.2f}{m.f1:>10.2f}{support:>10}"
        )
    p, r, f1 = report.average
    lines.append("-" * len(header))
    lines.append(f"{'Average':<18}{p:>10.2f}{r:>10.2f}{f1:>10.2f}{'':>10}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def save_report(path, report: MetricsReport) -> None:
    p = Path(path)
    p.write_text(json.dumps(report_to_json(report), indent=2) + "\n", encoding="utf-8")
    p.with_suffix(".txt").write_text(render_report(report), encoding="utf-8")
