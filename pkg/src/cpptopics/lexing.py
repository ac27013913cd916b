"""Lexical pre-pass over C++-ish text.

Classifies every character as code, comment, string, or character literal
without parsing; brace matching and construct rules consult this mask so
that anchors inside literals or comments are never acted on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

CODE = 0
LINE_COMMENT = 1
BLOCK_COMMENT = 2
STRING = 3
CHAR_LITERAL = 4

_HEX_DIGITS = set("0123456789abcdefABCDEF")


def lex_mask(text: str) -> bytearray:
    """One mask byte per character; CODE covers everything outside
    comments and string/char literals (delimiters count as literal)."""
    n = len(text)
    mask = bytearray(n)  # CODE == 0
    i = 0
    while i < n:
        ch = text[i]
        if ch == "/" and i + 1 < n:
            nxt = text[i + 1]
            if nxt == "/":
                j = text.find("\n", i)
                end = n if j < 0 else j  # the newline itself stays code
                for k in range(i, end):
                    mask[k] = LINE_COMMENT
                i = end
                continue
            if nxt == "*":
                j = text.find("*/", i + 2)
                end = n if j < 0 else j + 2
                for k in range(i, end):
                    mask[k] = BLOCK_COMMENT
                i = end
                continue
        if ch == '"':
            end = _raw_string_end(text, i)
            if end is None:
                end = _scan_quoted(text, i, '"')
            for k in range(i, end):
                mask[k] = STRING
            i = end
            continue
        if ch == "'":
            # C++14 digit separator (1'000'000) is not a char literal
            if (
                0 < i < n - 1
                and text[i - 1] in _HEX_DIGITS
                and text[i + 1] in _HEX_DIGITS
            ):
                i += 1
                continue
            end = _scan_quoted(text, i, "'")
            for k in range(i, end):
                mask[k] = CHAR_LITERAL
            i = end
            continue
        i += 1
    return mask


def _scan_quoted(text: str, start: int, quote: str) -> int:
    """End offset (exclusive) of a quoted literal; an unterminated literal
    ends at the newline so one bad quote cannot swallow the file."""
    j = start + 1
    n = len(text)
    while j < n:
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == quote:
            return j + 1
        if c == "\n":
            return j
        j += 1
    return n


def _raw_string_end(text: str, quote_pos: int) -> int | None:
    """Handle R"delim( ... )delim"; returns None when this quote does not
    start a raw string."""
    i = quote_pos
    if i == 0 or text[i - 1] != "R":
        return None
    # encoding prefixes: R, uR, UR, LR, u8R; the prefix must be a fresh token
    p = i - 1
    while p > 0 and text[p - 1] in "uUL8":
        p -= 1
    if p > 0 and (text[p - 1].isalnum() or text[p - 1] == "_"):
        return None
    open_paren = text.find("(", i + 1, i + 18)
    if open_paren < 0:
        return None
    delim = text[i + 1 : open_paren]
    if not re.fullmatch(r"[^\s()\\]*", delim):
        return None
    closer = ")" + delim + '"'
    j = text.find(closer, open_paren + 1)
    return len(text) if j < 0 else j + len(closer)


def match_braces(text: str, mask: bytearray | None = None) -> dict[int, int]:
    """Map each code-region '{' offset to its matching '}' offset.
    Unmatched braces are simply absent from the map."""
    if mask is None:
        mask = lex_mask(text)
    pairs: dict[int, int] = {}
    stack: list[int] = []
    for i, ch in enumerate(text):
        if mask[i] != CODE:
            continue
        if ch == "{":
            stack.append(i)
        elif ch == "}" and stack:
            pairs[stack.pop()] = i
    return pairs


def skip_ws_comments(text: str, mask: bytearray, pos: int) -> int:
    """First offset at or after pos that is neither whitespace nor comment."""
    n = len(text)
    while pos < n and (
        mask[pos] in (LINE_COMMENT, BLOCK_COMMENT)
        or (mask[pos] == CODE and text[pos].isspace())
    ):
        pos += 1
    return pos


def match_forward(text: str, mask: bytearray, pos: int, open_ch: str, close_ch: str) -> int | None:
    """Offset of the close delimiter matching the open delimiter at pos."""
    assert text[pos] == open_ch
    depth = 0
    for i in range(pos, len(text)):
        if mask[i] != CODE:
            continue
        c = text[i]
        if c == open_ch:
            depth += 1
        elif c == close_ch:
            depth -= 1
            if depth == 0:
                return i
    return None


_TOKEN_RE = re.compile(
    r"[A-Za-z_]\w*"
    r"|\.?\d[\w.]*"
    r"|<<=|>>=|->\*|<=>|\.\.\.|::|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||[+\-*/%^&|!=<>]=?"
    r"|[~,;:?.(){}\[\]#\\@$`]"
)


def code_tokens(text: str, mask: bytearray | None = None) -> list[str]:
    """Token stream with comments and whitespace dropped; string and char
    literals are kept as single opaque tokens."""
    if mask is None:
        mask = lex_mask(text)
    tokens: list[str] = []
    n = len(text)
    i = 0
    while i < n:
        kind = mask[i]
        j = i
        while j < n and mask[j] == kind:
            j += 1
        run = text[i:j]
        if kind == CODE:
            tokens.extend(_TOKEN_RE.findall(run))
        elif kind in (STRING, CHAR_LITERAL):
            tokens.append(run)
        i = j
    return tokens


# ---------------------------------------------------------------------------
# Block structure (shared by construct extraction and boundary expansion)

FUNCTION = "function"
CLASS = "class"
NAMESPACE = "namespace"
TRY = "try"
CATCH = "catch"


@dataclass(frozen=True)
class BraceBlock:
    kind: str
    header_start: int  # first character of the introducing header
    open: int          # offset of '{'
    close: int         # offset of matching '}'


_HEADER_KW_RE = re.compile(r"\b(class|struct|namespace)\b")
_TRY_TAIL_RE = re.compile(r"\btry\s*$")

# words that may sit between a parameter list's ')' and the body's '{'
_TRAILING_QUALIFIERS = frozenset(
    {"const", "noexcept", "override", "final", "mutable", "volatile"}
)
_CONTROL_KEYWORDS = frozenset({"if", "for", "while", "switch"})


def _prev_code_index(text: str, mask: bytearray, pos: int) -> int | None:
    """Nearest code character before pos, skipping whitespace and comments."""
    i = pos - 1
    while i >= 0:
        if mask[i] == CODE and not text[i].isspace():
            return i
        if mask[i] in (STRING, CHAR_LITERAL):
            return None
        i -= 1
    return None


def _word_ending_at(text: str, mask: bytearray, pos: int) -> tuple[str, int] | None:
    """(word, start) for the identifier whose last character sits at pos."""
    if mask[pos] != CODE or not (text[pos].isalnum() or text[pos] == "_"):
        return None
    start = pos
    while start > 0 and mask[start - 1] == CODE and (
        text[start - 1].isalnum() or text[start - 1] == "_"
    ):
        start -= 1
    return text[start : pos + 1], start


def _header_text_before(text: str, mask: bytearray, pos: int) -> tuple[str, int]:
    """Code text between the previous statement boundary (; { } or a
    literal) and pos; comments are blanked so offsets line up 1:1."""
    i = pos - 1
    while i >= 0:
        if mask[i] in (STRING, CHAR_LITERAL):
            break
        if mask[i] == CODE and text[i] in ";{}":
            break
        i -= 1
    start = i + 1
    chunk = "".join(text[k] if mask[k] == CODE else " " for k in range(start, pos))
    return chunk, start


def function_like_blocks(text: str, mask: bytearray | None = None) -> list[BraceBlock]:
    """All matched brace blocks introduced by a parameter list or a
    class/namespace/try/catch header, in order of their opening brace."""
    if mask is None:
        mask = lex_mask(text)
    pairs = match_braces(text, mask)
    blocks: list[BraceBlock] = []
    for open_pos in sorted(pairs):
        block = _classify_block(text, mask, open_pos, pairs[open_pos])
        if block is not None:
            blocks.append(block)
    return blocks


def _classify_block(
    text: str, mask: bytearray, open_pos: int, close_pos: int
) -> BraceBlock | None:
    p = _prev_code_index(text, mask, open_pos)
    if p is None:
        return None
    # hop over const/noexcept/override/& between the ')' and the '{'
    for _ in range(8):
        if text[p] == "&":
            nxt = _prev_code_index(text, mask, p)
            if nxt is None:
                return None
            p = nxt
            continue
        word_info = _word_ending_at(text, mask, p)
        if word_info and word_info[0] in _TRAILING_QUALIFIERS:
            nxt = _prev_code_index(text, mask, word_info[1])
            if nxt is None:
                return None
            p = nxt
            continue
        break
    if text[p] == ")":
        return _classify_paren_block(text, mask, p, open_pos, close_pos)
    header, header_start = _header_text_before(text, mask, open_pos)
    m_try = _TRY_TAIL_RE.search(header)
    if m_try:
        return BraceBlock(TRY, header_start + m_try.start(), open_pos, close_pos)
    last_kw = None
    for last_kw in _HEADER_KW_RE.finditer(header):
        pass
    if last_kw is not None:
        kind = NAMESPACE if last_kw.group(1) == "namespace" else CLASS
        return BraceBlock(kind, header_start + last_kw.start(), open_pos, close_pos)
    return None


def _classify_paren_block(
    text: str, mask: bytearray, close_paren: int, open_pos: int, close_pos: int
) -> BraceBlock | None:
    for _ in range(4):  # unwrap noexcept(...) / throw(...) suffixes
        open_paren = _match_backward_paren(text, mask, close_paren)
        if open_paren is None:
            return BraceBlock(FUNCTION, open_pos, open_pos, close_pos)
        word_info = _word_ending_before(text, mask, open_paren)
        if word_info is None:
            return BraceBlock(
                FUNCTION, declaration_start(text, mask, open_paren), open_pos, close_pos
            )
        word, word_start = word_info
        if word in ("noexcept", "throw"):
            prev = _prev_code_index(text, mask, word_start)
            if prev is None or text[prev] != ")":
                return BraceBlock(FUNCTION, word_start, open_pos, close_pos)
            close_paren = prev
            continue
        if word == "catch":
            return BraceBlock(CATCH, word_start, open_pos, close_pos)
        if word in _CONTROL_KEYWORDS:
            return BraceBlock(FUNCTION, word_start, open_pos, close_pos)
        return BraceBlock(
            FUNCTION, declaration_start(text, mask, open_paren), open_pos, close_pos
        )
    return BraceBlock(FUNCTION, open_pos, open_pos, close_pos)


def _word_ending_before(
    text: str, mask: bytearray, pos: int
) -> tuple[str, int] | None:
    i = _prev_code_index(text, mask, pos)
    return None if i is None else _word_ending_at(text, mask, i)


def _match_backward_paren(text: str, mask: bytearray, close_paren: int) -> int | None:
    depth = 0
    for i in range(close_paren, -1, -1):
        if mask[i] != CODE:
            continue
        if text[i] == ")":
            depth += 1
        elif text[i] == "(":
            depth -= 1
            if depth == 0:
                return i
    return None


_SIG_CHARS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_ \t\r\n&*<>,~[]")


_BLANK_LINE_RE = re.compile(r"\n[ \t]*\n")


def declaration_start(text: str, mask: bytearray, anchor: int) -> int:
    """Walk left from anchor over return-type/qualifier characters to the
    first token of the declaration. '::' is allowed, a lone ':' stops."""
    i = anchor - 1
    while i >= 0:
        if mask[i] != CODE:
            break
        c = text[i]
        if c == ":":
            if i > 0 and text[i - 1] == ":" and mask[i - 1] == CODE:
                i -= 2
                continue
            break
        if c not in _SIG_CHARS:
            break
        i -= 1
    start = i + 1
    # a signature never continues across a blank line or out of a
    # preprocessor directive (whose <...> the scan above walks through)
    segment = text[start:anchor]
    last_blank = None
    for last_blank in _BLANK_LINE_RE.finditer(segment):
        pass
    if last_blank is not None:
        start += last_blank.end()
    while True:
        line_end = text.find("\n", start, anchor)
        first = text[start:anchor].lstrip()
        if line_end >= 0 and first.startswith("#"):
            start = line_end + 1
            continue
        break
    while start < anchor and text[start].isspace():
        start += 1
    return start


def line_start(text: str, pos: int) -> int:
    return text.rfind("\n", 0, pos) + 1
