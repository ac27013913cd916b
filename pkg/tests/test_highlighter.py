import random

import pytest

from cpptopics import (
    HighlightConfig,
    SourceDocument,
    Span,
    Topic,
    TrainConfig,
    expand_boundaries,
    highlight,
    predict,
    threshold_spans,
    train,
    vote,
    windows,
)
from cpptopics.classifier import MultiLabelModel, TopicClassifier
from cpptopics.features import TfidfModel
from cpptopics.highlighter import CharVote, _WindowScorer, coverage_count
from cpptopics import synthetic

from oracles import brute_force_spans, brute_force_votes


def marker_model(bias=-0.5):
    """Fires on any window containing '#'; used to engineer vote counts."""
    tfidf = TfidfModel(vocabulary={"#": 0}, idf=[1.0], document_count=1)
    clf = TopicClassifier(Topic.FRIEND, [1.0], bias)
    return MultiLabelModel(tfidf, {Topic.FRIEND: clf}, TrainConfig())


def cfg_with(w, threshold=0.8, expand=False, step=1):
    return HighlightConfig(
        window_size={t: w for t in Topic},
        step_size=step,
        threshold=threshold,
        expand_boundaries=expand,
    )


# --- windows -----------------------------------------------------------------


def test_windows_enumeration():
    doc = SourceDocument("d", "abcde")
    assert windows(doc, 3) == [Span(0, 3), Span(1, 4), Span(2, 5)]


def test_windows_short_document():
    assert windows(SourceDocument("d", "ab"), 20) == [Span(0, 2)]


def test_windows_empty_document():
    assert windows(SourceDocument("d", ""), 5) == []


# --- vote --------------------------------------------------------------------


def test_all_positive_windows_give_confidence_one():
    doc = SourceDocument("d", "###########")
    votes = vote(doc, marker_model(), Topic.FRIEND, cfg_with(4))
    assert all(v.confidence == 1.0 for v in votes)


def test_worked_example_eight_of_ten():
    # '#' at index 7 makes windows starting 0..7 positive; character 9 is
    # covered by the ten windows starting 0..9
    doc = SourceDocument("d", "       #           ")
    assert doc.length == 19
    votes = vote(doc, marker_model(), Topic.FRIEND, cfg_with(10))
    v = votes[9]
    assert (v.highlight_count, v.window_num) == (8, 10)
    assert v.confidence == 0.8
    spans = threshold_spans(votes, 0.8)
    highlighted = {i for s, _ in spans for i in range(s.start, s.end)}
    assert 9 in highlighted  # comparison is >=, so 0.8 qualifies at 0.8


def test_window_num_matches_closed_form():
    rng = random.Random(99)
    model = marker_model()
    for _ in range(30):
        length = rng.randrange(0, 120)
        w = rng.randrange(1, 25)
        doc = SourceDocument("d", "x" * length)
        votes = vote(doc, model, Topic.FRIEND, cfg_with(w))
        for i, v in enumerate(votes):
            assert v.window_num == coverage_count(length, w, i), (length, w, i)


def test_vote_matches_brute_force(trained_model):
    rng = random.Random(1234)
    pieces = [
        "friend class Box;", "int main() { return 1; }", "x += 2;",
        "try { f(); } catch (...) { g(); }", "// comment\n", "std::cout << x;",
    ]
    for _ in range(12):
        text = "".join(rng.choice(pieces) for _ in range(rng.randrange(0, 8)))[:200]
        w = rng.randrange(1, 21)
        topic = rng.choice([Topic.FRIEND, Topic.TRY_CATCH, Topic.OPERATOR_OVERLOAD])
        doc = SourceDocument("d", text)
        got = vote(doc, trained_model, topic, cfg_with(w))
        want = brute_force_votes(doc, trained_model, topic, w)
        assert [(v.highlight_count, v.window_num) for v in got] == want


def test_window_margins_identical_to_predict(trained_model):
    rng = random.Random(5)
    text = "".join(
        rng.choice("abc{}();\n friendclassvirtual") for _ in range(160)
    )
    scorer = _WindowScorer(trained_model, Topic.FRIEND, text)
    for s in range(0, 140, 7):
        window_text = text[s : s + 20]
        assert scorer.margin(s, s + 20) == predict(trained_model, window_text)[Topic.FRIEND][1]


def test_vote_requires_trained_topic():
    with pytest.raises(ValueError):
        vote(SourceDocument("d", "xx"), marker_model(), Topic.INLINE, cfg_with(2))


# --- threshold_spans ---------------------------------------------------------


def make_votes(confidences, wn=10):
    return [CharVote(int(round(c * wn)), wn) for c in confidences]


def test_threshold_runs():
    spans = threshold_spans(make_votes([1, 1, 0, 1]), 0.8)
    assert [s for s, _ in spans] == [Span(0, 2), Span(3, 4)]


def test_threshold_all_below():
    assert threshold_spans(make_votes([0.5, 0.7, 0.2]), 0.8) == []


def test_threshold_zero_covers_document():
    spans = threshold_spans(make_votes([0.0, 0.1, 0.0]), 0.0)
    assert [s for s, _ in spans] == [Span(0, 3)]


def test_span_confidence_is_minimum_member():
    spans = threshold_spans(make_votes([0.9, 0.8, 1.0]), 0.8)
    assert spans == [(Span(0, 3), 0.8)]


def test_threshold_monotonicity():
    rng = random.Random(77)
    votes = [CharVote(rng.randrange(0, 11), 10) for _ in range(200)]
    thresholds = sorted(rng.random() for _ in range(6))
    previous = None
    for t in reversed(thresholds):  # descending thresholds grow the set
        chars = {
            i
            for s, _ in threshold_spans(votes, t)
            for i in range(s.start, s.end)
        }
        if previous is not None:
            assert previous <= chars
        previous = chars


# --- expansion ---------------------------------------------------------------

FUNC_DOC = SourceDocument(
    "f.cpp",
    "int before;\n"
    "Vec operator+(Vec a, Vec b) {\n"
    "    Vec r;\n"
    "    return r;\n"
    "}\n"
    "int after;\n",
)


def test_expansion_grows_fragment_to_function():
    start = FUNC_DOC.content.index("operator+")
    fragment = Span(start, start + 9)
    out = expand_boundaries(FUNC_DOC, [fragment])
    assert len(out) == 1
    sig_start = FUNC_DOC.content.index("Vec operator+")
    close = FUNC_DOC.content.rindex("}")
    assert out[0] == Span(sig_start, close + 1)


def test_expansion_leaves_plain_statement_alone():
    doc = SourceDocument("u.cpp", "using namespace std;\nint x;\n")
    span = Span(0, 20)
    assert expand_boundaries(doc, [span]) == [span]


def test_two_fragments_in_one_function_merge():
    a = FUNC_DOC.content.index("operator+")
    b = FUNC_DOC.content.index("return r")
    out = expand_boundaries(FUNC_DOC, [Span(a, a + 5), Span(b, b + 5)])
    assert len(out) == 1
    assert out[0].start == FUNC_DOC.content.index("Vec operator+")


def test_expansion_extensive_and_idempotent():
    rng = random.Random(31)
    docs = [FUNC_DOC] + [
        synthetic.make_document(t, f"{t.value}.cpp", rng)[0]
        for t in (Topic.CLASSES, Topic.TRY_CATCH, Topic.FRIEND)
    ]
    for doc in docs:
        for _ in range(20):
            n = doc.length
            spans = []
            for _ in range(rng.randrange(1, 4)):
                start = rng.randrange(0, n - 1)
                end = rng.randrange(start + 1, min(n, start + 40) + 1)
                spans.append(Span(start, end))
            once = expand_boundaries(doc, spans)
            for original in spans:
                assert any(
                    s.start <= original.start and original.end <= s.end for s in once
                )
            assert expand_boundaries(doc, once) == once


def test_expansion_skipped_when_braces_unresolvable():
    doc = SourceDocument("b.cpp", "void f() {\n    int x;\n// missing close\n")
    span = Span(12, 17)
    assert expand_boundaries(doc, [span]) == [span]


def test_friend_declaration_inside_class_does_not_engulf_it():
    doc = SourceDocument(
        "c.cpp",
        "class Box {\n"
        "public:\n"
        "    int size() const;\n"
        "    friend void peek(const Box& b);\n"
        "private:\n"
        "    int v;\n"
        "};\n",
    )
    start = doc.content.index("friend")
    decl = Span(start, doc.content.index(";", start) + 1)
    assert expand_boundaries(doc, [decl]) == [decl]


def test_try_fragment_expands_through_catch_chain():
    doc = SourceDocument(
        "t.cpp",
        "int f() {\n"
        "    try {\n"
        "        g();\n"
        "    } catch (int e) {\n"
        "        h();\n"
        "    } catch (...) {\n"
        "        k();\n"
        "    }\n"
        "    return 0;\n"
        "}\n",
    )
    inner = doc.content.index("g();")
    out = expand_boundaries(doc, [Span(inner, inner + 4)])
    assert len(out) == 1
    try_line = doc.content.index("    try")
    last_catch_close = doc.content.rindex("}", 0, doc.content.rindex("return"))
    assert out[0] == Span(try_line, last_catch_close + 1)


# --- full pipeline -----------------------------------------------------------


def test_highlight_empty_document(trained_model):
    assert highlight(SourceDocument("d", ""), trained_model, set(Topic)) == []


def test_highlight_no_topics(trained_model):
    doc = SourceDocument("d", "friend class A;")
    assert highlight(doc, trained_model, set()) == []


def test_highlight_deterministic(trained_model):
    rng = random.Random(6)
    doc, _ = synthetic.make_document(Topic.OPERATOR_OVERLOAD, "x.cpp", rng)
    a = highlight(doc, trained_model, {Topic.OPERATOR_OVERLOAD})
    b = highlight(doc, trained_model, {Topic.OPERATOR_OVERLOAD})
    assert a == b


def test_highlight_finds_operator_function(trained_model):
    rng = random.Random(12)
    doc, gold = synthetic.make_document(Topic.OPERATOR_OVERLOAD, "x.cpp", rng)
    spans = highlight(doc, trained_model, {Topic.OPERATOR_OVERLOAD})
    assert len(spans) == 1
    got = spans[0]
    want = gold[0].span
    assert got.topic == Topic.OPERATOR_OVERLOAD
    assert got.confidence >= 0.8
    overlap = max(0, min(got.span.end, want.end) - max(got.span.start, want.start))
    assert overlap / len(want) > 0.9


def test_full_pipeline_matches_brute_force(trained_model):
    rng = random.Random(8080)
    for _ in range(6):
        doc, _ = synthetic.make_document(
            rng.choice(list(Topic)), "bf.cpp", rng
        )
        text = doc.content[:200]
        doc = SourceDocument("bf.cpp", text)
        w = rng.randrange(5, 21)
        topic = rng.choice(list(trained_model.per_topic))
        cfg = cfg_with(w, expand=False)
        got = [
            (h.span.start, h.span.end)
            for h in highlight(doc, trained_model, {topic}, cfg)
        ]
        want = brute_force_spans(
            brute_force_votes(doc, trained_model, topic, w), 0.8
        )
        assert got == want
