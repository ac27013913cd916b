from cpptopics import lexing
from cpptopics.lexing import (
    BLOCK_COMMENT,
    CHAR_LITERAL,
    CODE,
    LINE_COMMENT,
    STRING,
    code_tokens,
    function_like_blocks,
    lex_mask,
    match_braces,
)


def kinds(text):
    return list(lex_mask(text))


def test_line_comment_ends_at_newline():
    text = "int a; // note {\nint b;"
    mask = kinds(text)
    assert mask[text.index("//")] == LINE_COMMENT
    assert mask[text.index("{")] == LINE_COMMENT
    assert mask[text.index("\n")] == CODE
    assert mask[text.index("int b")] == CODE


def test_block_comment_spans_lines():
    text = "a /* x\n y */ b"
    mask = kinds(text)
    assert mask[text.index("x")] == BLOCK_COMMENT
    assert mask[text.index("y")] == BLOCK_COMMENT
    assert mask[text.index("b")] == CODE


def test_string_with_escapes():
    text = r'const char* s = "a \" { b";'
    mask = kinds(text)
    assert mask[text.index("{")] == STRING
    assert mask[-1] == CODE  # the semicolon


def test_char_literal_and_digit_separator():
    text = "char c = '{'; long n = 1'000'000;"
    mask = kinds(text)
    assert mask[text.index("{")] == CHAR_LITERAL
    # digit separators stay code so the number is not a char literal
    assert mask[text.index("000")] == CODE
    assert mask[text.rindex(";")] == CODE


def test_raw_string():
    text = 'auto s = R"(brace { and // comment)"; int x;'
    mask = kinds(text)
    assert mask[text.index("{")] == STRING
    assert mask[text.index("int x")] == CODE


def test_unterminated_string_stops_at_newline():
    text = 'auto s = "oops\nint k = 1;'
    mask = kinds(text)
    assert mask[text.index("int k")] == CODE


def test_match_braces_skips_literals():
    text = 'void f() { const char* s = "}"; }'
    pairs = match_braces(text)
    open_pos = text.index("{")
    assert pairs[open_pos] == len(text) - 1


def test_match_braces_unbalanced():
    assert match_braces("{ {") == {}
    text = "} { }"
    pairs = match_braces(text)
    assert pairs == {2: 4}


def test_code_tokens_normalizes_layout():
    a = code_tokens("int  f ( int x )\n{ return x+1; }")
    b = code_tokens("int f(int x) { /* c */ return x + 1; } // tail")
    assert a == b
    assert "return" in a


def test_function_like_blocks_kinds():
    text = (
        "class A {\n"
        "    void m() const {\n"
        "        if (x) { y(); }\n"
        "    }\n"
        "};\n"
        "namespace n {\n"
        "int g;\n"
        "}\n"
        "void f() {\n"
        "    try { f(); } catch (int e) { g(); }\n"
        "}\n"
    )
    blocks = function_like_blocks(text)
    by_kind = {}
    for b in blocks:
        by_kind.setdefault(b.kind, []).append(b)
    assert len(by_kind[lexing.CLASS]) == 1
    assert len(by_kind[lexing.NAMESPACE]) == 1
    assert len(by_kind[lexing.TRY]) == 1
    assert len(by_kind[lexing.CATCH]) == 1
    # method m, the if block, and f itself
    assert len(by_kind[lexing.FUNCTION]) == 3


def test_blocks_after_include_lines():
    text = "#include <iostream>\n#include <vector>\n\nclass P {\nint v;\n};\n"
    blocks = function_like_blocks(text)
    assert [b.kind for b in blocks] == [lexing.CLASS]
    assert text[blocks[0].header_start :].startswith("class")


def test_const_member_function_is_a_function_block():
    text = "class A {\nint f() const noexcept {\n return 1;\n}\n};\n"
    kinds_found = {b.kind for b in function_like_blocks(text)}
    assert lexing.FUNCTION in kinds_found


def test_declaration_start_stops_at_preprocessor_and_blank_lines():
    text = "#include <cmath>\n\ninline double f(double a) { return a; }"
    mask = lex_mask(text)
    anchor = text.index("f(double")
    start = lexing.declaration_start(text, mask, anchor)
    assert text[start:].startswith("inline double")
