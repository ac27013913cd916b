"""Topic classification and in-file highlighting for C++ constructs."""

from .topics import TOPIC_NAMES, TOPIC_ORDER, Topic
from .corpus import (
    ConstructRules,
    GroundTruthAnnotation,
    LabeledSnippet,
    SourceDocument,
    Span,
    extract_annotations,
    extract_snippets,
)
from .augment import augment
from .features import SparseVector, TfidfModel, fit, transform
from .classifier import MultiLabelModel, TopicClassifier, TrainConfig, predict, train
from .highlighter import (
    CharVote,
    DocHighlight,
    HighlightConfig,
    HighlightSpan,
    expand_boundaries,
    highlight,
    threshold_spans,
    vote,
    windows,
)
from .evaluation import (
    FoldAssignment,
    MetricsReport,
    char_metrics,
    cross_validate,
    sample_eval_set,
    stratified_folds,
)

__all__ = [
    "TOPIC_NAMES",
    "TOPIC_ORDER",
    "Topic",
    "ConstructRules",
    "GroundTruthAnnotation",
    "LabeledSnippet",
    "SourceDocument",
    "Span",
    "extract_annotations",
    "extract_snippets",
    "augment",
    "SparseVector",
    "TfidfModel",
    "fit",
    "transform",
    "MultiLabelModel",
    "TopicClassifier",
    "TrainConfig",
    "predict",
    "train",
    "CharVote",
    "DocHighlight",
    "HighlightConfig",
    "HighlightSpan",
    "expand_boundaries",
    "highlight",
    "threshold_spans",
    "vote",
    "windows",
    "FoldAssignment",
    "MetricsReport",
    "char_metrics",
    "cross_validate",
    "sample_eval_set",
    "stratified_folds",
]

__version__ = "0.1.0"
