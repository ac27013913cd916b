"""The nine C++ construct topics the pipeline classifies and highlights."""

from __future__ import annotations

import enum


class Topic(enum.Enum):
    CLASSES = "Classes"
    FRIEND = "Friend"
    INHERITANCE = "Inheritance"
    INLINE = "Inline"
    NAMESPACES = "Namespaces"
    OPERATOR_OVERLOAD = "OperatorOverload"
    TEMPLATES = "Templates"
    TRY_CATCH = "TryCatch"
    VIRTUAL_FUNCTION = "VirtualFunction"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "Topic":
        topic = _BY_NAME.get(name)
        if topic is None:
            raise ValueError(
                f"unknown topic {name!r}; valid topics: {', '.join(TOPIC_NAMES)}"
            )
        return topic


# Fixed label ordering (alphabetical by identifier) used for binary label
# vectors and every per-topic iteration in the pipeline.
TOPIC_ORDER: tuple[Topic, ...] = tuple(sorted(Topic, key=lambda t: t.value))
TOPIC_NAMES: tuple[str, ...] = tuple(t.value for t in TOPIC_ORDER)
TOPIC_INDEX: dict[Topic, int] = {t: i for i, t in enumerate(TOPIC_ORDER)}
_BY_NAME: dict[str, Topic] = {t.value: t for t in Topic}


def labels_to_bits(labels: frozenset[Topic] | set[Topic]) -> tuple[int, ...]:
    """Encode a label set as a fixed-width binary vector."""
    return tuple(1 if t in labels else 0 for t in TOPIC_ORDER)


def bits_to_labels(bits) -> frozenset[Topic]:
    if len(bits) != len(TOPIC_ORDER):
        raise ValueError(f"expected {len(TOPIC_ORDER)} bits, got {len(bits)}")
    return frozenset(t for t, bit in zip(TOPIC_ORDER, bits) if bit)
