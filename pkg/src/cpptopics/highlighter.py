"""Topic localization inside raw documents.

Per topic: slide a fixed-size window at step 1, classify every window,
tally per-character confidences (positive windows covering a character
over all windows covering it), keep runs at or above the threshold, and
snap the surviving spans to enclosing brace blocks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import lexing
from .classifier import MultiLabelModel, margin_for
from .corpus import DataFormatError, SourceDocument, Span
from .features import SparseVector
from .topics import TOPIC_INDEX, Topic

# OperatorOverload 20 and VirtualFunction 40 are fixed reference values;
# the rest are artifact defaults sized to typical construct lengths.
DEFAULT_WINDOW_SIZES: dict[Topic, int] = {
    Topic.CLASSES: 60,
    Topic.FRIEND: 20,
    Topic.INHERITANCE: 40,
    Topic.INLINE: 20,
    Topic.NAMESPACES: 25,
    Topic.OPERATOR_OVERLOAD: 20,
    Topic.TEMPLATES: 25,
    Topic.TRY_CATCH: 40,
    Topic.VIRTUAL_FUNCTION: 40,
}

DEFAULT_THRESHOLD = 0.8


@dataclass(frozen=True)
class HighlightConfig:
    window_size: dict[Topic, int] = field(
        default_factory=lambda: dict(DEFAULT_WINDOW_SIZES)
    )
    step_size: int = 1
    threshold: float = DEFAULT_THRESHOLD
    expand_boundaries: bool = True

    def __post_init__(self) -> None:
        if self.step_size < 1:
            raise ValueError("step_size must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        for topic, size in self.window_size.items():
            if size < 1:
                raise ValueError(f"window size for {topic.value} must be >= 1")

    def window_for(self, topic: Topic) -> int:
        return self.window_size.get(topic, DEFAULT_WINDOW_SIZES[topic])


@dataclass(frozen=True)
class CharVote:
    highlight_count: int
    window_num: int

    def __post_init__(self) -> None:
        if not 0 <= self.highlight_count <= self.window_num:
            raise ValueError("highlight_count must be within [0, window_num]")

    @property
    def confidence(self) -> float:
        return self.highlight_count / self.window_num if self.window_num else 0.0


@dataclass(frozen=True)
class HighlightSpan:
    topic: Topic
    span: Span
    confidence: float


@dataclass(frozen=True)
class DocHighlight:
    """A highlight attributed to a document; the .hl.jsonl record."""

    doc_id: str
    topic: Topic
    span: Span
    confidence: float


def windows(doc: SourceDocument, w: int, step: int = 1) -> list[Span]:
    """Step-1 sliding windows; documents shorter than w yield one
    whole-document window; the empty document yields none."""
    if w < 1:
        raise ValueError("window size must be >= 1")
    n = doc.length
    if n == 0:
        return []
    if n < w:
        return [Span(0, n)]
    return [Span(i, i + w) for i in range(0, n - w + 1, step)]


class _WindowScorer:
    """Classifies every window of a document for one topic.

    Precomputes per-position n-gram feature ids so window vectors are built
    without re-slicing strings, while reproducing features.transform's
    (length, position) iteration order exactly. Margins are computed with
    the same margin_for primitive as predict, so window decisions are
    bit-identical to classifying each window substring independently.
    """

    def __init__(self, model: MultiLabelModel, topic: Topic, text: str):
        clf = model.per_topic.get(topic)
        if clf is None:
            raise ValueError(f"model has no trained classifier for {topic.value}")
        self.clf = clf
        self.text = text
        tfidf = model.tfidf
        self.idf = tfidf.idf
        self.nmin = tfidf.ngram_min
        self.nmax = tfidf.ngram_max
        vocab = tfidf.vocabulary
        n = len(text)
        self.ids_by_len: list[list[int]] = []
        for size in range(self.nmin, self.nmax + 1):
            self.ids_by_len.append(
                [vocab.get(text[i : i + size], -1) for i in range(n - size + 1)]
            )

    def margin(self, start: int, end: int) -> float:
        counts: dict[int, int] = {}
        for offset, ids in enumerate(self.ids_by_len):
            size = self.nmin + offset
            for i in range(start, end - size + 1):
                idx = ids[i]
                if idx >= 0:
                    counts[idx] = counts.get(idx, 0) + 1
        idf = self.idf
        entries = {idx: tf * idf[idx] for idx, tf in counts.items()}
        norm = sum(v * v for v in entries.values()) ** 0.5
        if norm > 0.0:
            entries = {i: v / norm for i, v in entries.items()}
        return margin_for(self.clf, SparseVector(entries))


def vote(
    doc: SourceDocument,
    model: MultiLabelModel,
    topic: Topic,
    cfg: HighlightConfig | None = None,
) -> list[CharVote]:
    """One CharVote per character: how many windows cover it and how many
    of those were classified as containing the topic."""
    cfg = cfg or HighlightConfig()
    spans = windows(doc, cfg.window_for(topic), cfg.step_size)
    n = doc.length
    covered = [0] * (n + 1)
    positive = [0] * (n + 1)
    scorer = _WindowScorer(model, topic, doc.content)
    for span in spans:
        covered[span.start] += 1
        covered[span.end] -= 1
        if scorer.margin(span.start, span.end) >= 0.0:
            positive[span.start] += 1
            positive[span.end] -= 1
    votes = []
    num = hits = 0
    for i in range(n):
        num += covered[i]
        hits += positive[i]
        votes.append(CharVote(hits, num))
    return votes


def threshold_spans(
    votes: Sequence[CharVote], threshold: float
) -> list[tuple[Span, float]]:
    """Maximal runs of characters with confidence >= threshold, each with
    the minimum member confidence."""
    out: list[tuple[Span, float]] = []
    run_start: int | None = None
    run_min = 1.0
    for i, v in enumerate(votes):
        ok = v.window_num > 0 and v.confidence >= threshold
        if ok:
            if run_start is None:
                run_start = i
                run_min = v.confidence
            else:
                run_min = min(run_min, v.confidence)
        elif run_start is not None:
            out.append((Span(run_start, i), run_min))
            run_start = None
    if run_start is not None:
        out.append((Span(run_start, len(votes)), run_min))
    return out


# --- boundary expansion -----------------------------------------------------


@dataclass(frozen=True)
class _ExpandBlock:
    kind: str
    open: int
    close: int
    ext_start: int  # line start of the introducing header
    ext_end: int    # one past the closing brace (or the catch chain's end)
    statement_ends: tuple[int, ...] = ()  # top-level ';' offsets of the body


def _expansion_blocks(text: str, mask: bytearray) -> list[_ExpandBlock]:
    blocks = lexing.function_like_blocks(text, mask)
    by_open = {b.open: b for b in blocks}
    chain_of: dict[int, tuple[int, int]] = {}  # block open -> unit interval
    for b in blocks:
        if b.kind != lexing.TRY:
            continue
        unit_start = lexing.line_start(text, b.header_start)
        members = [b.open]
        end = b.close + 1
        while True:
            p = lexing.skip_ws_comments(text, mask, end)
            if not text.startswith("catch", p):
                break
            paren = lexing.skip_ws_comments(text, mask, p + 5)
            if paren >= len(text) or text[paren] != "(":
                break
            paren_close = lexing.match_forward(text, mask, paren, "(", ")")
            if paren_close is None:
                break
            brace = lexing.skip_ws_comments(text, mask, paren_close + 1)
            catch_block = by_open.get(brace)
            if catch_block is None:
                break
            members.append(catch_block.open)
            end = catch_block.close + 1
        for open_pos in members:
            chain_of[open_pos] = (unit_start, end)

    out = []
    for b in blocks:
        if b.open in chain_of:
            ext_start, ext_end = chain_of[b.open]
        else:
            ext_start = lexing.line_start(text, b.header_start)
            ext_end = b.close + 1
        semis = ()
        if b.kind in _CONTAINER_KINDS:
            semis = _toplevel_semicolons(text, mask, b.open, b.close)
        out.append(_ExpandBlock(b.kind, b.open, b.close, ext_start, ext_end, semis))
    return out


_CONTAINER_KINDS = (lexing.CLASS, lexing.NAMESPACE)


def _toplevel_semicolons(
    text: str, mask: bytearray, open_pos: int, close_pos: int
) -> tuple[int, ...]:
    """Member-statement boundaries of a class/namespace body: top-level
    ';' plus access-specifier ':' (a lone colon at brace depth 0)."""
    marks = []
    depth = 0
    for i in range(open_pos + 1, close_pos):
        if mask[i] != lexing.CODE:
            continue
        c = text[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
        elif depth == 0:
            if c == ";":
                marks.append(i)
            elif c == ":" and text[i - 1] != ":" and text[i + 1 : i + 2] != ":":
                marks.append(i)
    return tuple(marks)


def _expand_once(span: Span, blocks: Sequence[_ExpandBlock]) -> Span:
    candidates = []
    for b in blocks:
        if not (span.start < b.ext_end and b.ext_start < span.end):
            continue
        if b.kind in _CONTAINER_KINDS:
            if span.start > b.open:
                # class/namespace bodies legitimately contain smaller
                # constructs (friend/virtual members, nested declarations);
                # an interior span belongs to the container only when it
                # fragments across several of its member statements
                crossed = sum(
                    1 for q in b.statement_ends if span.start <= q < span.end
                )
                if crossed < 2:
                    continue
        else:
            # a span that merely bleeds over a block's header line from the
            # left is not a fragment of it; require it to start within the
            # header or to reach the braces
            touches_braces = span.start <= b.close and span.end > b.open
            if not touches_braces and span.start < b.ext_start:
                continue
        candidates.append(b)
    if not candidates:
        return span
    # an interior fragment belongs to the innermost enclosing block; a span
    # reaching a block's header owns that block even when it nests others
    kept = [
        b
        for b in candidates
        if span.start <= b.open
        or not any(
            other is not b and b.open < other.open and other.close < b.close
            for other in candidates
        )
    ]
    start = min(span.start, min(b.ext_start for b in kept))
    end = max(span.end, max(b.ext_end for b in kept))
    return Span(start, end)


def _merge_conf(spans: list[tuple[Span, float]]) -> list[tuple[Span, float]]:
    merged: list[tuple[Span, float]] = []
    for span, conf in sorted(spans, key=lambda sc: sc[0]):
        if merged and span.start < merged[-1][0].end:
            prev_span, prev_conf = merged[-1]
            merged[-1] = (prev_span.union(span), min(prev_conf, conf))
        else:
            merged.append((span, conf))
    return merged


def expand_spans(
    doc: SourceDocument, spans: Sequence[tuple[Span, float]]
) -> list[tuple[Span, float]]:
    """Expansion to fixpoint: extensive (outputs contain inputs) and
    idempotent by construction. Documents with unresolvable braces simply
    contribute no blocks, so affected spans pass through unchanged."""
    mask = lexing.lex_mask(doc.content)
    blocks = _expansion_blocks(doc.content, mask)
    current = _merge_conf(list(spans))
    while True:  # spans only grow and merge, so this terminates
        expanded = _merge_conf([(_expand_once(s, blocks), c) for s, c in current])
        if expanded == current:
            return current
        current = expanded


def expand_boundaries(doc: SourceDocument, spans: Sequence[Span]) -> list[Span]:
    return [s for s, _ in expand_spans(doc, [(s, 1.0) for s in spans])]


def highlight(
    doc: SourceDocument,
    model: MultiLabelModel,
    topics: Iterable[Topic],
    cfg: HighlightConfig | None = None,
) -> list[HighlightSpan]:
    """Full per-topic pipeline: windows -> vote -> threshold -> expansion.
    Topics without a trained classifier yield no spans."""
    cfg = cfg or HighlightConfig()
    out: list[HighlightSpan] = []
    for topic in sorted(set(topics), key=lambda t: TOPIC_INDEX[t]):
        if topic not in model.per_topic:
            continue
        votes = vote(doc, model, topic, cfg)
        spans = threshold_spans(votes, cfg.threshold)
        if cfg.expand_boundaries:
            spans = expand_spans(doc, spans)
        out.extend(HighlightSpan(topic, span, conf) for span, conf in spans)
    out.sort(key=lambda h: (TOPIC_INDEX[h.topic], h.span.start))
    return out


def write_highlights(path: str | Path, highlights: Iterable[DocHighlight]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for h in highlights:
            fh.write(
                json.dumps(
                    {
                        "doc_id": h.doc_id,
                        "topic": h.topic.value,
                        "start": h.span.start,
                        "end": h.span.end,
                        "confidence": h.confidence,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_highlights(path: str | Path) -> list[DocHighlight]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                out.append(
                    DocHighlight(
                        rec["doc_id"],
                        Topic.from_name(rec["topic"]),
                        Span(rec["start"], rec["end"]),
                        float(rec["confidence"]),
                    )
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise DataFormatError(f"line {line_no}: {exc}", line_no) from exc
    return out


def coverage_count(length: int, w: int, i: int) -> int:
    """Closed-form number of step-1 windows covering character i."""
    if length == 0:
        return 0
    if length < w:
        return 1
    return min(i, length - w) - max(0, i - w + 1) + 1
