"""Class rebalancing via semantics-preserving snippet rewrites.

Three rewrites only: consistent identifier renaming, whitespace
perturbation, and comment insertion. Token structure (comments and
whitespace aside, identifiers canonicalized) is preserved exactly.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from typing import Sequence

from . import lexing
from .corpus import LabeledSnippet
from .topics import TOPIC_ORDER

CPP_KEYWORDS = frozenset(
    """alignas alignof and asm auto bool break case catch char char8_t char16_t
    char32_t class compl concept const consteval constexpr constinit const_cast
    continue co_await co_return co_yield decltype default delete do double
    dynamic_cast else enum explicit export extern false final float for friend
    goto if inline int long mutable namespace new noexcept not nullptr operator
    or override private protected public register reinterpret_cast requires
    return short signed sizeof static static_assert static_cast struct switch
    template this thread_local throw true try typedef typeid typename union
    unsigned using virtual void volatile wchar_t while xor""".split()
)

# Common library names left alone so rewrites stay compile-alike.
_PRESERVED = frozenset(
    """std cout cin cerr endl string vector map set size_t main printf what
    ostream istream iostream runtime_error exception""".split()
)

# Replacement identifiers and comment words; none may contain a rule anchor
# keyword as a substring (checked by the test suite).
RENAME_POOL = (
    "alpha", "beta", "gamma", "delta", "omega", "kappa", "sigma", "theta",
    "zeta", "iota", "rho", "tau", "phi", "lambda_v", "mu", "nu",
)
COMMENT_WORDS = (
    "note", "todo later", "checked", "scratch value", "helper bits",
    "see docs", "legacy path", "tweak me", "keep small", "fast path",
)

_IDENT_RE = re.compile(r"[A-Za-z_]\w*")


def augment(
    snippets: Sequence[LabeledSnippet], target_per_topic: int, seed: int
) -> list[LabeledSnippet]:
    """Grow each topic toward target_per_topic with rewritten copies of its
    snippets. Originals are kept verbatim; larger classes are left alone."""
    if target_per_topic <= 0:
        raise ValueError("target_per_topic must be >= 1")
    result = list(snippets)
    counts = Counter(t for s in snippets for t in s.labels)
    rng = random.Random(seed)
    for topic in TOPIC_ORDER:
        pool = [s for s in snippets if topic in s.labels]
        if not pool:
            continue
        i = 0
        while counts[topic] < target_per_topic:
            source = pool[i % len(pool)]
            rewritten = rewrite_snippet(source, rng)
            result.append(rewritten)
            for t in rewritten.labels:
                counts[t] += 1
            i += 1
    return result


def rewrite_snippet(snippet: LabeledSnippet, rng: random.Random) -> LabeledSnippet:
    text = _rename_identifiers(snippet.text, rng)
    text = _perturb_whitespace(text, rng)
    text = _insert_comments(text, rng)
    return LabeledSnippet(text, snippet.labels)


def _rename_identifiers(text: str, rng: random.Random) -> str:
    mask = lexing.lex_mask(text)
    present = set()
    for m in _IDENT_RE.finditer(text):
        if all(mask[i] == lexing.CODE for i in range(m.start(), m.end())):
            present.add(m.group())
    renamable = sorted(
        name
        for name in present
        if name not in CPP_KEYWORDS and name not in _PRESERVED
    )
    if not renamable:
        return text
    mapping: dict[str, str] = {}
    counter = rng.randrange(1, 100)
    for name in renamable:
        if rng.random() < 0.3:  # leave some names untouched for variety
            continue
        while True:
            candidate = f"{rng.choice(RENAME_POOL)}{counter}"
            counter += 1
            if candidate not in present and candidate not in mapping.values():
                break
        mapping[name] = candidate
    if not mapping:
        return text

    out = []
    pos = 0
    for m in _IDENT_RE.finditer(text):
        if not all(mask[i] == lexing.CODE for i in range(m.start(), m.end())):
            continue
        new = mapping.get(m.group())
        if new is None:
            continue
        out.append(text[pos : m.start()])
        out.append(new)
        pos = m.end()
    out.append(text[pos:])
    return "".join(out)


def _perturb_whitespace(text: str, rng: random.Random) -> str:
    mask = lexing.lex_mask(text)
    out = []
    i = 0
    n = len(text)
    while i < n:
        if mask[i] == lexing.CODE and text[i] in " \t":
            j = i
            while j < n and mask[j] == lexing.CODE and text[j] in " \t":
                j += 1
            run = text[i:j]
            at_line_start = i == 0 or text[i - 1] == "\n"
            if at_line_start:
                out.append(" " * rng.choice((0, 2, 4, 4, 6, 8)))
            elif rng.random() < 0.5:
                out.append(" " * rng.randrange(1, 3))
            else:
                out.append(run)
            i = j
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _insert_comments(text: str, rng: random.Random) -> str:
    mask = lexing.lex_mask(text)
    newline_positions = [
        i for i, ch in enumerate(text) if ch == "\n" and mask[i] == lexing.CODE
    ]
    comment = f"// {rng.choice(COMMENT_WORDS)}"
    if not newline_positions:
        return text + "  " + comment if rng.random() < 0.5 else text
    if rng.random() < 0.25:
        return text
    pos = rng.choice(newline_positions)
    return text[: pos + 1] + comment + "\n" + text[pos + 1 :]
