"""Mining labeled construct snippets from raw C++ sources.

Every rule is a lexical anchor checked against the lex mask, then grown to
a statement or brace-balanced block. No parsing, no preprocessing.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import lexing
from .lexing import CODE
from .topics import TOPIC_INDEX, TOPIC_ORDER, Topic


@dataclass(frozen=True)
class SourceDocument:
    doc_id: str
    content: str

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")

    @property
    def length(self) -> int:
        return len(self.content)


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def union(self, other: "Span") -> "Span":
        return Span(min(self.start, other.start), max(self.end, other.end))

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class GroundTruthAnnotation:
    doc_id: str
    topic: Topic
    span: Span


@dataclass(frozen=True)
class LabeledSnippet:
    text: str
    labels: frozenset[Topic] = field(default_factory=frozenset)

    def label_bits(self) -> tuple[int, ...]:
        return tuple(1 if t in self.labels else 0 for t in TOPIC_ORDER)


class ConstructRules:
    """The rule set: which topics to scan for. Immutable once built."""

    def __init__(self, topics: Iterable[Topic] = TOPIC_ORDER):
        self.topics: tuple[Topic, ...] = tuple(
            sorted(set(topics), key=lambda t: TOPIC_INDEX[t])
        )

    @classmethod
    def default(cls) -> "ConstructRules":
        return cls()


# --- anchor scanning -------------------------------------------------------

_CLASS_RE = re.compile(r"\b(class|struct)\s+[A-Za-z_]\w*\s*(?:final\s*)?\{")
_INHERIT_RE = re.compile(
    r"\b(class|struct)\s+[A-Za-z_]\w*\s*(?:final\s*)?:(?!:)\s*"
    r"(?:virtual\s+)?(?:public\b|protected\b|private\b|[A-Za-z_]\w*)"
)
_NAMESPACE_RE = re.compile(r"\bnamespace\s+[A-Za-z_]\w*(?:::[A-Za-z_]\w*)*\s*\{")
_USING_NAMESPACE_RE = re.compile(r"\busing\s+namespace\b")

# overloadable operator tokens, longest first so <<= wins over << and <
_OPERATOR_TOKENS = (
    "<<=", ">>=", "<=>", "->*",
    "()", "[]", "++", "--", "->", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "+=", "-=", "*=", "/=", "%=", "^=", "&=", "|=",
    "+", "-", "*", "/", "%", "^", "&", "|", "~", "!", "=", "<", ">", ",",
)


def _all_code(mask: bytearray, start: int, end: int) -> bool:
    return all(mask[i] == CODE for i in range(start, end))


def _keyword_positions(text: str, mask: bytearray, word: str) -> Iterator[int]:
    for m in re.finditer(r"\b%s\b" % word, text):
        if _all_code(mask, m.start(), m.end()):
            yield m.start()


_skip_ws_comments = lexing.skip_ws_comments


def _statement_or_block_end(text: str, mask: bytearray, pos: int) -> int | None:
    """End offset after the first top-level ';' or matched '{...}'.
    None when the scan hits a stray '}' or runs off the document."""
    n = len(text)
    i = pos
    while i < n:
        if mask[i] != CODE:
            i += 1
            continue
        c = text[i]
        if c == "(":
            j = lexing.match_forward(text, mask, i, "(", ")")
            if j is None:
                return None
            i = j + 1
            continue
        if c == "{":
            j = lexing.match_forward(text, mask, i, "{", "}")
            return None if j is None else j + 1
        if c == ";":
            return i + 1
        if c == "}":
            return None
        i += 1
    return None


def _find_class_bodies(text: str, mask: bytearray) -> list[tuple[int, int]]:
    return [
        (b.open, b.close)
        for b in lexing.function_like_blocks(text, mask)
        if b.kind == lexing.CLASS
    ]


def _scan_classes(text: str, mask: bytearray) -> list[Span]:
    spans = []
    for m in _CLASS_RE.finditer(text):
        if not _all_code(mask, m.start(), m.end()):
            continue
        close = lexing.match_forward(text, mask, m.end() - 1, "{", "}")
        if close is not None:
            spans.append(Span(m.start(), close + 1))
    return spans


def _scan_inheritance(text: str, mask: bytearray) -> list[Span]:
    spans = []
    for m in _INHERIT_RE.finditer(text):
        if not _all_code(mask, m.start(), m.end()):
            continue
        end = _statement_or_block_end(text, mask, m.end())
        if end is not None and text[end - 1] == "}":
            spans.append(Span(m.start(), end))
    return spans


def _scan_namespaces(text: str, mask: bytearray) -> list[Span]:
    spans = []
    for m in _NAMESPACE_RE.finditer(text):
        if not _all_code(mask, m.start(), m.end()):
            continue
        close = lexing.match_forward(text, mask, m.end() - 1, "{", "}")
        if close is not None:
            spans.append(Span(m.start(), close + 1))
    for m in _USING_NAMESPACE_RE.finditer(text):
        if not _all_code(mask, m.start(), m.end()):
            continue
        end = _statement_or_block_end(text, mask, m.end())
        if end is not None and text[end - 1] == ";":
            spans.append(Span(m.start(), end))
    return spans


def _scan_try_catch(text: str, mask: bytearray) -> list[Span]:
    spans = []
    for kw in _keyword_positions(text, mask, "try"):
        pos = _skip_ws_comments(text, mask, kw + 3)
        if pos >= len(text) or text[pos] != "{":
            continue
        close = lexing.match_forward(text, mask, pos, "{", "}")
        if close is None:
            continue
        end = close + 1
        saw_catch = False
        while True:
            nxt = _skip_ws_comments(text, mask, end)
            if not text.startswith("catch", nxt) or not _all_code(mask, nxt, min(nxt + 5, len(text))):
                break
            p = _skip_ws_comments(text, mask, nxt + 5)
            if p >= len(text) or text[p] != "(":
                break
            paren_close = lexing.match_forward(text, mask, p, "(", ")")
            if paren_close is None:
                break
            p = _skip_ws_comments(text, mask, paren_close + 1)
            if p >= len(text) or text[p] != "{":
                break
            body_close = lexing.match_forward(text, mask, p, "{", "}")
            if body_close is None:
                break
            end = body_close + 1
            saw_catch = True
        if saw_catch:
            spans.append(Span(kw, end))
    return spans


def _scan_friend(text: str, mask: bytearray) -> list[Span]:
    spans = []
    for kw in _keyword_positions(text, mask, "friend"):
        end = _statement_or_block_end(text, mask, kw + 6)
        if end is not None:
            spans.append(Span(kw, end))
    return spans


def _scan_inline(text: str, mask: bytearray) -> list[Span]:
    spans = []
    for kw in _keyword_positions(text, mask, "inline"):
        # must introduce a function definition: (...) then a body
        n = len(text)
        i = kw + 6
        saw_params = False
        end = None
        while i < n:
            if mask[i] != CODE:
                i += 1
                continue
            c = text[i]
            if c == "(":
                j = lexing.match_forward(text, mask, i, "(", ")")
                if j is None:
                    break
                saw_params = True
                i = j + 1
                continue
            if c == "{":
                if not saw_params:
                    break
                j = lexing.match_forward(text, mask, i, "{", "}")
                if j is not None:
                    end = j + 1
                break
            if c in ";}":
                break
            i += 1
        if end is not None:
            spans.append(Span(kw, end))
    return spans


def _scan_operator_overload(text: str, mask: bytearray) -> list[Span]:
    spans = []
    for kw in _keyword_positions(text, mask, "operator"):
        after = _skip_ws_comments(text, mask, kw + 8)
        tok_end = _match_operator_token(text, mask, after)
        if tok_end is None:
            continue
        paren = _skip_ws_comments(text, mask, tok_end)
        if paren >= len(text) or text[paren] != "(":
            continue
        end = _statement_or_block_end(text, mask, paren)
        if end is None:
            continue
        start = lexing.declaration_start(text, mask, kw)
        spans.append(Span(start, end))
    return spans


def _match_operator_token(text: str, mask: bytearray, pos: int) -> int | None:
    """End offset of the operator token at pos, or None."""
    for word in ("new", "delete"):
        if text.startswith(word, pos) and not (
            pos + len(word) < len(text)
            and (text[pos + len(word)].isalnum() or text[pos + len(word)] == "_")
        ):
            p = _skip_ws_comments(text, mask, pos + len(word))
            if text.startswith("[]", p):
                p += 2
            return p
    for tok in _OPERATOR_TOKENS:
        if text.startswith(tok, pos) and _all_code(mask, pos, pos + len(tok)):
            return pos + len(tok)
    return None


def _scan_templates(text: str, mask: bytearray) -> list[Span]:
    spans = []
    for kw in _keyword_positions(text, mask, "template"):
        open_angle = _skip_ws_comments(text, mask, kw + 8)
        if open_angle >= len(text) or text[open_angle] != "<":
            continue
        close_angle = _match_angle(text, mask, open_angle)
        if close_angle is None:
            continue
        end = _statement_or_block_end(text, mask, close_angle + 1)
        if end is not None:
            spans.append(Span(kw, end))
    return spans


def _match_angle(text: str, mask: bytearray, pos: int) -> int | None:
    depth = 0
    i = pos
    n = len(text)
    while i < n:
        if mask[i] != CODE:
            i += 1
            continue
        c = text[i]
        if c == "(":
            j = lexing.match_forward(text, mask, i, "(", ")")
            if j is None:
                return None
            i = j + 1
            continue
        if c == "<":
            depth += 1
        elif c == ">":
            depth -= 1
            if depth == 0:
                return i
        elif c in ";{}":
            return None
        i += 1
    return None


def _scan_virtual(text: str, mask: bytearray) -> list[Span]:
    bodies = _find_class_bodies(text, mask)
    spans = []
    for kw in _keyword_positions(text, mask, "virtual"):
        if not any(o < kw < c for o, c in bodies):
            continue
        end = _statement_or_block_end(text, mask, kw + 7)
        if end is not None:
            spans.append(Span(kw, end))
    return spans


_SCANNERS = {
    Topic.CLASSES: _scan_classes,
    Topic.FRIEND: _scan_friend,
    Topic.INHERITANCE: _scan_inheritance,
    Topic.INLINE: _scan_inline,
    Topic.NAMESPACES: _scan_namespaces,
    Topic.OPERATOR_OVERLOAD: _scan_operator_overload,
    Topic.TEMPLATES: _scan_templates,
    Topic.TRY_CATCH: _scan_try_catch,
    Topic.VIRTUAL_FUNCTION: _scan_virtual,
}


def _merge_overlapping(spans: list[Span]) -> list[Span]:
    merged: list[Span] = []
    for span in sorted(spans):
        if merged and span.start < merged[-1].end:
            merged[-1] = merged[-1].union(span)
        else:
            merged.append(span)
    return merged


def extract_annotations(
    doc: SourceDocument, rules: ConstructRules | None = None
) -> list[GroundTruthAnnotation]:
    """Every merged per-topic rule match in the document, sorted by
    (start, end, topic). Candidates with unresolvable braces are dropped."""
    rules = rules or ConstructRules.default()
    mask = lexing.lex_mask(doc.content)
    annotations: list[GroundTruthAnnotation] = []
    for topic in rules.topics:
        for span in _merge_overlapping(_SCANNERS[topic](doc.content, mask)):
            annotations.append(GroundTruthAnnotation(doc.doc_id, topic, span))
    annotations.sort(key=lambda a: (a.span.start, a.span.end, TOPIC_INDEX[a.topic]))
    return annotations


def extract_snippets(
    corpus: Sequence[SourceDocument], rules: ConstructRules | None = None
) -> list[LabeledSnippet]:
    """One single-label snippet per annotation, documents processed in
    doc_id order."""
    snippets = []
    for doc in sorted(corpus, key=lambda d: d.doc_id):
        for ann in extract_annotations(doc, rules):
            text = doc.content[ann.span.start : ann.span.end]
            snippets.append(LabeledSnippet(text, frozenset({ann.topic})))
    return snippets


# --- corpus and file-format IO ---------------------------------------------


class DataFormatError(ValueError):
    """Raised for malformed input records; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


def load_corpus(root: str | Path) -> tuple[list[SourceDocument], list[str]]:
    """All .cpp files under root as documents (doc_id = posix relpath).
    Unreadable files are skipped and reported, not fatal."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    docs: list[SourceDocument] = []
    skipped: list[str] = []
    for path in sorted(root.rglob("*.cpp")):
        doc_id = path.relative_to(root).as_posix()
        try:
            content = path.read_bytes().decode("utf-8", errors="replace")
        except OSError:
            skipped.append(doc_id)
            continue
        docs.append(SourceDocument(doc_id, content))
    return docs, skipped


def write_annotations(path: str | Path, annotations: Iterable[GroundTruthAnnotation]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ann in annotations:
            fh.write(
                json.dumps(
                    {
                        "doc_id": ann.doc_id,
                        "topic": ann.topic.value,
                        "start": ann.span.start,
                        "end": ann.span.end,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_annotations(path: str | Path) -> list[GroundTruthAnnotation]:
    annotations = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                ann = GroundTruthAnnotation(
                    rec["doc_id"], Topic.from_name(rec["topic"]), Span(rec["start"], rec["end"])
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise DataFormatError(f"line {line_no}: {exc}", line_no) from exc
            annotations.append(ann)
    return annotations


def write_snippets(path: str | Path, snippets: Iterable[LabeledSnippet]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for snip in snippets:
            labels = sorted(t.value for t in snip.labels)
            fh.write(json.dumps({"text": snip.text, "labels": labels}, ensure_ascii=False) + "\n")


def read_snippets(path: str | Path) -> list[LabeledSnippet]:
    snippets = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                snip = LabeledSnippet(
                    rec["text"], frozenset(Topic.from_name(t) for t in rec["labels"])
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise DataFormatError(f"line {line_no}: {exc}", line_no) from exc
            snippets.append(snip)
    return snippets
