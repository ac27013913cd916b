"""Combined model persistence: one JSON document holding the TF-IDF model,
every per-topic classifier, the highlight configuration, and training
provenance. Serialization is deterministic and float-exact."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import features
from .classifier import MultiLabelModel, TopicClassifier, TrainConfig
from .highlighter import HighlightConfig
from .topics import TOPIC_INDEX, Topic

FORMAT_VERSION = "1"


@dataclass(frozen=True)
class ModelBundle:
    model: MultiLabelModel
    highlight_config: HighlightConfig = field(default_factory=HighlightConfig)
    provenance: dict = field(default_factory=dict)

    @property
    def format_version(self) -> str:
        return FORMAT_VERSION


def _train_config_dict(cfg: TrainConfig) -> dict:
    return {
        "regularization_strength": cfg.regularization_strength,
        "epochs": cfg.epochs,
        "seed": cfg.seed,
        "tolerance": cfg.tolerance,
    }


def _highlight_config_dict(cfg: HighlightConfig) -> dict:
    return {
        "window_sizes": {t.value: w for t, w in sorted(cfg.window_size.items(), key=lambda kv: TOPIC_INDEX[kv[0]])},
        "step_size": cfg.step_size,
        "threshold": cfg.threshold,
        "expand_boundaries": cfg.expand_boundaries,
    }


def to_json_dict(bundle: ModelBundle) -> dict:
    model = bundle.model
    return {
        "format_version": FORMAT_VERSION,
        "tfidf": features.to_json_dict(model.tfidf),
        "classifiers": [
            {
                "topic": topic.value,
                "bias": clf.bias,
                "weights": clf.weights,
            }
            for topic, clf in sorted(model.per_topic.items(), key=lambda kv: TOPIC_INDEX[kv[0]])
        ],
        "training_config": _train_config_dict(model.training_config),
        "highlight_config": _highlight_config_dict(bundle.highlight_config),
        "objectives": {
            t.value: hist
            for t, hist in sorted(model.objectives.items(), key=lambda kv: TOPIC_INDEX[kv[0]])
        },
        "warnings": list(model.warnings),
        "provenance": dict(sorted(bundle.provenance.items())),
    }


def from_json_dict(data: dict) -> ModelBundle:
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version: {version!r}")
    tfidf = features.from_json_dict(data["tfidf"])
    per_topic = {}
    for rec in data["classifiers"]:
        topic = Topic.from_name(rec["topic"])
        per_topic[topic] = TopicClassifier(
            topic, [float(w) for w in rec["weights"]], float(rec["bias"])
        )
    tc = data.get("training_config", {})
    training_config = TrainConfig(
        regularization_strength=float(tc.get("regularization_strength", 1e-4)),
        epochs=int(tc.get("epochs", 50)),
        seed=int(tc.get("seed", 42)),
        tolerance=float(tc.get("tolerance", 1e-6)),
    )
    objectives = {
        Topic.from_name(name): [float(x) for x in hist]
        for name, hist in data.get("objectives", {}).items()
    }
    model = MultiLabelModel(
        tfidf, per_topic, training_config, list(data.get("warnings", [])), objectives
    )
    hl = data.get("highlight_config", {})
    window = {
        Topic.from_name(name): int(w) for name, w in hl.get("window_sizes", {}).items()
    }
    highlight_config = HighlightConfig(
        window_size=window if window else dict(HighlightConfig().window_size),
        step_size=int(hl.get("step_size", 1)),
        threshold=float(hl.get("threshold", 0.8)),
        expand_boundaries=bool(hl.get("expand_boundaries", True)),
    )
    return ModelBundle(model, highlight_config, dict(data.get("provenance", {})))


def save(path: str | Path, bundle: ModelBundle) -> None:
    payload = json.dumps(to_json_dict(bundle), sort_keys=True, separators=(",", ":"))
    Path(path).write_text(payload + "\n", encoding="utf-8")


def load(path: str | Path) -> ModelBundle:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise FileNotFoundError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"model file is not valid JSON: {exc}") from exc
    return from_json_dict(data)
