"""Templated generators for a synthetic C++ corpus.

Used by the test and acceptance suites to produce labeled construct
snippets and whole documents with known gold spans, at desk scale. Every
generator is deterministic given its rng.
"""

from __future__ import annotations

import random
from typing import Callable

from .corpus import GroundTruthAnnotation, LabeledSnippet, SourceDocument, Span
from .topics import TOPIC_ORDER, Topic

TYPE_NAMES = (
    "Vector3", "Matrix", "Box", "Point", "Shape", "Widget", "Buffer",
    "Node", "Grid", "Timer", "Circle", "Packet", "Token", "Stack",
)
FN_NAMES = (
    "add", "scale", "merge", "reset", "update", "clamp", "rotate",
    "shift", "blend", "pack", "fetch", "store", "combine", "measure",
)
VAR_NAMES = ("a", "b", "left", "right", "value", "count", "size", "width", "depth")
SCALARS = ("int", "double", "float", "long")
EXCEPTIONS = ("runtime_error", "out_of_range", "logic_error", "overflow_error")
HEADERS = ("iostream", "vector", "string", "cmath", "cstdio")
BINOPS = ("+", "-", "*")
OVERLOAD_OPS = ("+", "-", "*", "==", "!=", "<")


def _operator_overload(rng: random.Random) -> str:
    c = rng.choice(TYPE_NAMES)
    a, b = rng.sample(VAR_NAMES, 2)
    f = rng.choice(("v", "x", "n", "w"))
    shape = rng.randrange(3)
    if shape == 0:
        op = rng.choice(OVERLOAD_OPS)
        ret = "bool" if op in ("==", "!=", "<") else c
        body = (
            f"{a}.{f} {op} {b}.{f}" if ret == "bool" else f"{c}({a}.{f} {rng.choice(BINOPS)} {b}.{f})"
        )
        return (
            f"{ret} operator{op}({c} {a}, {c} {b}) {{\n"
            f"    return {body};\n"
            f"}}"
        )
    if shape == 1:
        op = rng.choice(("+", "-"))
        return (
            f"{c} {c}::operator{op}({c} {b}) const {{\n"
            f"    return {c}(this->{f} {op} {b}.{f});\n"
            f"}}"
        )
    v = rng.choice(VAR_NAMES)
    return (
        f"std::ostream& operator<<(std::ostream& os, {c} {v}) {{\n"
        f"    os << {v}.{f};\n"
        f"    return os;\n"
        f"}}"
    )


VIRTUAL_FNS = ("redraw_shape", "accumulate_area", "describe_state", "clone_subtree", "resize_canvas")
VIRTUAL_VARS = ("scale_ratio", "zoom_level", "tick_amount")
FRIEND_VARS = ("peer", "probe", "origin")
INLINE_VARS = ("lhs", "rhs")


def _virtual_function(rng: random.Random) -> str:
    t = rng.choice(("double", "int", "void"))
    fn = rng.choice(VIRTUAL_FNS)
    x, x2 = rng.sample(VIRTUAL_VARS, 2)
    shape = rng.randrange(5)
    if shape == 0:
        return f"virtual {t} {fn}(double {x}, double {x2}) const = 0;"
    if shape == 1:
        return f"virtual {t} {fn}(double {x}, int {x2}) const override;"
    if shape == 2:
        return f"virtual void {fn}(int {x}, int {x2}) noexcept override;"
    if shape == 3:
        body = f"return {x} * 2;" if t != "void" else f"++{x}_;"
        return f"virtual {t} {fn}(int {x}) {{\n        {body}\n    }}"
    return (
        f"virtual double {fn}(double {x}) const {{\n"
        f"        return {x} * {rng.randrange(2, 9)};\n"
        f"    }}"
    )


def _friend(rng: random.Random) -> tuple[str, frozenset[Topic]]:
    c = rng.choice(TYPE_NAMES)
    v, v2 = rng.sample(FRIEND_VARS, 2)
    shape = rng.randrange(6)
    if shape == 0:
        return f"friend class {c};", frozenset({Topic.FRIEND})
    if shape == 1:
        return (
            f"friend bool same(const {c}& {v}, const {c}& {v2});",
            frozenset({Topic.FRIEND}),
        )
    if shape == 2:
        return (
            f"friend {rng.choice(SCALARS)} peek(const {c}& {v});",
            frozenset({Topic.FRIEND}),
        )
    if shape == 3:
        return (
            f"friend bool same(const {c}& {v}, const {c}& {v2}) {{\n"
            f"        return {v}.v == {v2}.v;\n"
            f"    }}",
            frozenset({Topic.FRIEND}),
        )
    if shape == 4:
        return (
            f"friend long peek(const {c}& {v}) {{\n"
            f"        return {v}.v + {rng.randrange(1, 9)};\n"
            f"    }}",
            frozenset({Topic.FRIEND}),
        )
    # realistic co-occurrence: a friended stream operator
    return (
        f"friend std::ostream& operator<<(std::ostream& os, const {c}& {v});",
        frozenset({Topic.FRIEND, Topic.OPERATOR_OVERLOAD}),
    )


def _inline(rng: random.Random) -> str:
    t = rng.choice(SCALARS)
    fn = rng.choice(FN_NAMES)
    a, b = INLINE_VARS
    if rng.randrange(2):
        return (
            f"inline {t} {fn}({t} {a}, {t} {b}) {{\n"
            f"    return {a} {rng.choice(BINOPS)} {b};\n"
            f"}}"
        )
    return f"inline double {fn}(double {a}) {{ return {a} * {rng.randrange(2, 9)}.5; }}"


def _templates(rng: random.Random) -> str:
    t = rng.choice(("T", "U", "V", "Item"))
    fn = rng.choice(FN_NAMES)
    a, b = rng.sample(VAR_NAMES, 2)
    if rng.randrange(2):
        return (
            f"template <typename {t}>\n"
            f"{t} {fn}({t} {a}, {t} {b}) {{\n"
            f"    return {a} {rng.choice(BINOPS)} {b};\n"
            f"}}"
        )
    return (
        f"template <typename {t}, int N>\n"
        f"{t} {fn}({t} {a}) {{\n"
        f"    return {a} + N;\n"
        f"}}"
    )


def _classes(rng: random.Random) -> str:
    c = rng.choice(TYPE_NAMES)
    t, t2 = rng.sample(SCALARS, 2)
    fn, fn2, fn3 = rng.sample(FN_NAMES, 3)
    f, f2 = rng.sample(VAR_NAMES, 2)
    if rng.randrange(2):
        return (
            f"class {c} {{\n"
            f"public:\n"
            f"    {c}();\n"
            f"    {t} {fn}() const;\n"
            f"    void {fn2}({t} {f});\n"
            f"    {t2} {fn3}() const;\n"
            f"private:\n"
            f"    {t} {f}_;\n"
            f"    {t2} {f2}_;\n"
            f"}};"
        )
    return (
        f"struct {c} {{\n"
        f"    {t} {f};\n"
        f"    {t2} {f2};\n"
        f"    double extra;\n"
        f"    void {fn}();\n"
        f"    {t} {fn2}() const;\n"
        f"}};"
    )


def _inheritance(rng: random.Random) -> str:
    base, derived = rng.sample(TYPE_NAMES, 2)
    t, t2 = rng.sample(SCALARS, 2)
    fn, fn2 = rng.sample(FN_NAMES, 2)
    access = rng.choice(("public", "protected", "private"))
    f = rng.choice(VAR_NAMES)
    return (
        f"class {derived} : {access} {base} {{\n"
        f"public:\n"
        f"    {t} {fn}() const;\n"
        f"    void {fn2}({t2} {f});\n"
        f"private:\n"
        f"    {t} {f}_;\n"
        f"}};"
    )


def _namespaces(rng: random.Random) -> str:
    ns = rng.choice(("geometry", "audio", "core", "detail", "math_util", "net"))
    t = rng.choice(SCALARS)
    fn = rng.choice(FN_NAMES)
    g = rng.choice(VAR_NAMES)
    if rng.randrange(4) == 0:
        return f"using namespace {ns};"
    return (
        f"namespace {ns} {{\n"
        f"{t} {fn}({t} {g});\n"
        f"const {t} max_{g} = {rng.randrange(8, 64)};\n"
        f"}}"
    )


def _try_catch(rng: random.Random) -> str:
    ex = rng.choice(EXCEPTIONS)
    e = rng.choice(("e", "err", "ex"))
    fn = rng.choice(FN_NAMES)
    v = rng.choice(VAR_NAMES)
    if rng.randrange(2):
        return (
            f"try {{\n"
            f"    {fn}({v});\n"
            f"}} catch (const std::{ex}& {e}) {{\n"
            f"    std::cerr << {e}.what();\n"
            f"}}"
        )
    return (
        f"try {{\n"
        f"    {v} = {fn}({rng.randrange(1, 9)});\n"
        f"}} catch (std::{ex}& {e}) {{\n"
        f"    {v} = 1;\n"
        f"}} catch (...) {{\n"
        f"    throw;\n"
        f"}}"
    )


def background_snippet(rng: random.Random) -> LabeledSnippet:
    """Plain code with none of the nine constructs; labels are empty."""
    t = rng.choice(SCALARS)
    fn = rng.choice(FN_NAMES)
    a, b = rng.sample(VAR_NAMES, 2)
    shape = rng.randrange(5)
    if shape == 0:
        text = (
            f"int main() {{\n"
            f"    int {a} = {rng.randrange(1, 99)};\n"
            f"    std::cout << {a} << std::endl;\n"
            f"    return {rng.randrange(1, 3)};\n"
            f"}}"
        )
    elif shape == 1:
        text = (
            f"{t} {fn}({t} {a}, {t} {b}) {{\n"
            f"    if ({a} > {b}) {{ return {a}; }}\n"
            f"    return {b};\n"
            f"}}"
        )
    elif shape == 2:
        text = (
            f"#include <{rng.choice(HEADERS)}>\n"
            f"#define LIMIT_{rng.randrange(10, 99)} {rng.randrange(100, 999)}\n"
            f"static {t} {a}_total = {rng.randrange(1, 50)};"
        )
    elif shape == 3:
        text = (
            f"for (int i = 0; i < {rng.randrange(5, 40)}; ++i) {{\n"
            f"    {a} += i * {rng.randrange(2, 7)};\n"
            f"}}"
        )
    else:
        text = (
            f"double {fn}(double {a}) {{\n"
            f"    double t = {a} + {rng.randrange(1, 20)};\n"
            f"    return t - 1;\n"
            f"}}"
        )
    return LabeledSnippet(text, frozenset())


_SIMPLE_GENERATORS: dict[Topic, Callable[[random.Random], str]] = {
    Topic.CLASSES: _classes,
    Topic.INHERITANCE: _inheritance,
    Topic.INLINE: _inline,
    Topic.NAMESPACES: _namespaces,
    Topic.OPERATOR_OVERLOAD: _operator_overload,
    Topic.TEMPLATES: _templates,
    Topic.TRY_CATCH: _try_catch,
    Topic.VIRTUAL_FUNCTION: _virtual_function,
}


def snippet(topic: Topic, rng: random.Random) -> LabeledSnippet:
    if topic == Topic.FRIEND:
        text, labels = _friend(rng)
        return LabeledSnippet(text, labels)
    return LabeledSnippet(_SIMPLE_GENERATORS[topic](rng), frozenset({topic}))


def training_snippets(
    per_topic: int, seed: int, background: int | None = None
) -> list[LabeledSnippet]:
    """per_topic labeled snippets for each topic plus unlabeled background
    negatives (defaults to per_topic of those as well)."""
    rng = random.Random(seed)
    snippets: list[LabeledSnippet] = []
    for topic in TOPIC_ORDER:
        for _ in range(per_topic):
            snippets.append(snippet(topic, rng))
    for _ in range(per_topic if background is None else background):
        snippets.append(background_snippet(rng))
    return snippets


# --- whole documents with known gold spans ----------------------------------

_NEEDS_CLASS_CONTEXT = (Topic.FRIEND, Topic.VIRTUAL_FUNCTION)


def _pure_construct(topic: Topic, rng: random.Random) -> str:
    """A construct carrying exactly the target label, so the document's
    gold span is unambiguous."""
    for _ in range(20):
        snip = snippet(topic, rng)
        if snip.labels == {topic}:
            return snip.text
    return snip.text


def make_document(topic: Topic, doc_id: str, rng: random.Random) -> tuple[
    SourceDocument, list[GroundTruthAnnotation]
]:
    """A plausible .cpp file containing exactly one instance of the topic
    at a known character span, surrounded by background code."""
    parts: list[str] = [f"#include <{rng.choice(HEADERS)}>\n"]
    if rng.randrange(2):
        parts.append(f"#include <{rng.choice(HEADERS)}>\n")
    parts.append("\n")
    if rng.randrange(2):
        parts.append(background_snippet(rng).text + "\n\n")

    if topic in _NEEDS_CLASS_CONTEXT:
        construct = _pure_construct(topic, rng)
        c = rng.choice(TYPE_NAMES)
        t = rng.choice(SCALARS)
        fn = rng.choice(FN_NAMES)
        prefix = f"class {c} {{\npublic:\n    {t} {fn}() const;\n    "
        suffix = f"\nprivate:\n    {t} {rng.choice(VAR_NAMES)}_;\n}};"
        parts.append(prefix)
        start = sum(len(p) for p in parts)
        parts.append(construct)
        end = start + len(construct)
        parts.append(suffix)
        parts.append("\n")
    else:
        construct = _pure_construct(topic, rng)
        start = sum(len(p) for p in parts)
        parts.append(construct)
        end = start + len(construct)
        parts.append("\n")

    parts.append("\nint main() {\n")
    parts.append(f"    int total = {rng.randrange(1, 9)};\n")
    parts.append(f"    for (int i = 0; i < {rng.randrange(3, 12)}; ++i) {{ total += i; }}\n")
    parts.append("    std::cout << total << std::endl;\n")
    parts.append("    return 0;\n}\n")

    content = "".join(parts)
    doc = SourceDocument(doc_id, content)
    gold = [GroundTruthAnnotation(doc_id, topic, Span(start, end))]
    return doc, gold


def eval_documents(
    per_topic: int, seed: int
) -> tuple[list[SourceDocument], list[GroundTruthAnnotation]]:
    rng = random.Random(seed)
    docs: list[SourceDocument] = []
    gold: list[GroundTruthAnnotation] = []
    for topic in TOPIC_ORDER:
        for i in range(per_topic):
            doc, anns = make_document(topic, f"{topic.value}/{i:03d}.cpp", rng)
            docs.append(doc)
            gold.extend(anns)
    return docs, gold
