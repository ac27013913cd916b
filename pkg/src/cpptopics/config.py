"""Pipeline configuration: JSON file with strict unknown-key rejection,
overridable by CLI flags."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classifier import TrainConfig
from .corpus import ConstructRules
from .highlighter import HighlightConfig
from .topics import Topic


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    folds: int = 10
    per_topic_cap: int = 300
    seed: int = 42
    filtered: bool = True


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    max_code_chars: int = 1_000_000
    static_dir: str | None = None


@dataclass(frozen=True)
class FeatureConfig:
    min_df: int = 1


@dataclass(frozen=True)
class PipelineConfig:
    rules: ConstructRules = field(default_factory=ConstructRules.default)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    highlight: HighlightConfig = field(default_factory=HighlightConfig)
    evaluation: EvalConfig = field(default_factory=EvalConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)


def _require_keys(section: str, data: dict, allowed: set[str]) -> None:
    for key in data:
        if key not in allowed:
            where = f"{section}.{key}" if section else key
            raise ConfigError(f"unknown configuration key: {where}")


def _parse_topics(names, where: str) -> list[Topic]:
    try:
        return [Topic.from_name(n) for n in names]
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(data: dict) -> PipelineConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a JSON object")
    _require_keys(
        "", data, {"rules", "features", "train", "highlight", "evaluation", "service"}
    )
    cfg = PipelineConfig()

    rules_data = data.get("rules", {})
    _require_keys("rules", rules_data, {"topics"})
    if "topics" in rules_data:
        cfg = replace(
            cfg, rules=ConstructRules(_parse_topics(rules_data["topics"], "rules.topics"))
        )

    feat = data.get("features", {})
    _require_keys("features", feat, {"min_df"})
    if feat:
        cfg = replace(cfg, features=FeatureConfig(min_df=int(feat.get("min_df", 1))))

    tr = data.get("train", {})
    _require_keys(
        "train", tr, {"regularization_strength", "epochs", "seed", "tolerance"}
    )
    if tr:
        base = TrainConfig()
        cfg = replace(
            cfg,
            train=TrainConfig(
                regularization_strength=float(
                    tr.get("regularization_strength", base.regularization_strength)
                ),
                epochs=int(tr.get("epochs", base.epochs)),
                seed=int(tr.get("seed", base.seed)),
                tolerance=float(tr.get("tolerance", base.tolerance)),
            ),
        )

    hl = data.get("highlight", {})
    _require_keys(
        "highlight", hl, {"window_sizes", "step_size", "threshold", "expand_boundaries"}
    )
    if hl:
        cfg = replace(cfg, highlight=parse_highlight_overrides(hl, base=None))

    ev = data.get("evaluation", {})
    _require_keys("evaluation", ev, {"folds", "per_topic_cap", "seed", "filtered"})
    if ev:
        base_ev = EvalConfig()
        cfg = replace(
            cfg,
            evaluation=EvalConfig(
                folds=int(ev.get("folds", base_ev.folds)),
                per_topic_cap=int(ev.get("per_topic_cap", base_ev.per_topic_cap)),
                seed=int(ev.get("seed", base_ev.seed)),
                filtered=bool(ev.get("filtered", base_ev.filtered)),
            ),
        )

    sv = data.get("service", {})
    _require_keys("service", sv, {"host", "port", "max_code_chars", "static_dir"})
    if sv:
        base_sv = ServiceConfig()
        cfg = replace(
            cfg,
            service=ServiceConfig(
                host=str(sv.get("host", base_sv.host)),
                port=int(sv.get("port", base_sv.port)),
                max_code_chars=int(sv.get("max_code_chars", base_sv.max_code_chars)),
                static_dir=sv.get("static_dir", base_sv.static_dir),
            ),
        )
    return cfg


def parse_highlight_overrides(data: dict, base: HighlightConfig | None) -> HighlightConfig:
    """Build a HighlightConfig from a JSON object, optionally layered on an
    existing one (used both by config files and the HTTP API)."""
    _require_keys(
        "highlight", data, {"window_sizes", "step_size", "threshold", "expand_boundaries"}
    )
    current = base or HighlightConfig()
    window = dict(current.window_size)
    if "window_sizes" in data:
        sizes = data["window_sizes"]
        if not isinstance(sizes, dict):
            raise ConfigError("highlight.window_sizes must be an object")
        for name, value in sizes.items():
            try:
                topic = Topic.from_name(name)
            except ValueError as exc:
                raise ConfigError(f"highlight.window_sizes: {exc}") from exc
            window[topic] = int(value)
    try:
        return HighlightConfig(
            window_size=window,
            step_size=int(data.get("step_size", current.step_size)),
            threshold=float(data.get("threshold", current.threshold)),
            expand_boundaries=bool(
                data.get("expand_boundaries", current.expand_boundaries)
            ),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return parse_config(data)


def config_fingerprint(cfg: PipelineConfig) -> str:
    """Stable hash of the training-relevant configuration, recorded in the
    model bundle for provenance."""
    import hashlib

    payload = json.dumps(
        {
            "rules": [t.value for t in cfg.rules.topics],
            "features": {"min_df": cfg.features.min_df},
            "train": {
                "regularization_strength": cfg.train.regularization_strength,
                "epochs": cfg.train.epochs,
                "seed": cfg.train.seed,
                "tolerance": cfg.train.tolerance,
            },
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
