import json
import random

import pytest

from cpptopics import Topic, predict
from cpptopics import bundle as bundle_mod
from cpptopics.bundle import ModelBundle
from cpptopics.cli import main
from cpptopics.config import ConfigError, load_config, parse_config
from cpptopics.corpus import read_annotations, read_snippets
from cpptopics.highlighter import read_highlights
from cpptopics import synthetic


@pytest.fixture()
def fixture_corpus(tmp_path):
    corpus = tmp_path / "corpus"
    docs, gold = synthetic.eval_documents(per_topic=2, seed=404)
    for doc in docs:
        path = corpus / doc.doc_id
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(doc.content, encoding="utf-8")
    return corpus, docs, gold


# --- config ---------------------------------------------------------------------


def test_unknown_config_key_is_named():
    with pytest.raises(ConfigError, match="service.portt"):
        parse_config({"service": {"portt": 1}})
    with pytest.raises(ConfigError, match="colour"):
        parse_config({"colour": {}})


def test_config_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(
        json.dumps(
            {
                "train": {"epochs": 9, "seed": 3},
                "highlight": {"threshold": 0.7, "window_sizes": {"Friend": 25}},
                "service": {"port": 9999},
            }
        )
    )
    cfg = load_config(path)
    assert cfg.train.epochs == 9
    assert cfg.highlight.threshold == 0.7
    assert cfg.highlight.window_for(Topic.FRIEND) == 25
    assert cfg.highlight.window_for(Topic.CLASSES) == 60
    assert cfg.service.port == 9999


def test_config_rejects_unknown_topic():
    with pytest.raises(ConfigError, match="NoSuch"):
        parse_config({"highlight": {"window_sizes": {"NoSuch": 10}}})


# --- bundle ---------------------------------------------------------------------


def test_bundle_round_trip_preserves_predictions(trained_model, tmp_path):
    path = tmp_path / "model.json"
    bundle_mod.save(path, ModelBundle(trained_model, provenance={"seed": 1}))
    loaded = bundle_mod.load(path)
    rng = random.Random(2)
    for _ in range(10):
        snip = synthetic.snippet(rng.choice(list(Topic)), rng)
        assert predict(loaded.model, snip.text) == predict(trained_model, snip.text)


def test_bundle_save_is_deterministic(trained_model, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    mb = ModelBundle(trained_model, provenance={"seed": 1})
    bundle_mod.save(a, mb)
    bundle_mod.save(b, mb)
    assert a.read_bytes() == b.read_bytes()


def test_bundle_rejects_wrong_version(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format_version": "99"}')
    with pytest.raises(ValueError, match="format_version"):
        bundle_mod.load(path)


# --- CLI ------------------------------------------------------------------------


def test_cli_extract_and_train_and_highlight(fixture_corpus, tmp_path, capsys):
    corpus, docs, gold = fixture_corpus
    out_base = tmp_path / "mined"
    assert main(["extract", str(corpus), "--out", str(out_base)]) == 0
    captured = capsys.readouterr().out
    assert "TryCatch" in captured
    annotations = read_annotations(tmp_path / "mined.ann.jsonl")
    assert annotations
    snippets = read_snippets(tmp_path / "mined.snip.jsonl")
    assert snippets

    model_path = tmp_path / "model.json"
    assert main(["train", str(tmp_path / "mined.snip.jsonl"), "--out", str(model_path)]) == 0
    assert model_path.is_file()

    out_hl = tmp_path / "out.hl.jsonl"
    assert (
        main(
            [
                "highlight",
                str(model_path),
                str(corpus),
                "--topics",
                "TryCatch",
                "--out",
                str(out_hl),
                "--html",
            ]
        )
        == 0
    )
    highlights = read_highlights(out_hl)
    assert all(h.topic == Topic.TRY_CATCH for h in highlights)
    html_dir = tmp_path / "out_html"
    pages = {p.name: p for p in html_dir.glob("*.html")}
    assert len(pages) == len(docs)
    marked = next(p for name, p in pages.items() if name.startswith("TryCatch"))
    assert "<mark" in marked.read_text()


def test_cli_extract_empty_directory(tmp_path, capsys):
    empty = tmp_path / "none"
    empty.mkdir()
    assert main(["extract", str(empty)]) == 2
    assert "no source files found" in capsys.readouterr().err


def test_cli_extract_missing_directory(tmp_path):
    assert main(["extract", str(tmp_path / "missing")]) == 2


def test_cli_extract_skips_unreadable_files(fixture_corpus, tmp_path, capsys):
    corpus, _, _ = fixture_corpus
    # a directory matching the glob raises on read; the file itself is
    # skipped while the rest of the corpus is processed (chmod tricks do
    # not work when the suite runs as root)
    (corpus / "locked.cpp").mkdir()
    rc = main(["extract", str(corpus), "--out", str(tmp_path / "m")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "skipped: 1" in out
    assert "locked.cpp" in out


def test_cli_train_reports_malformed_line(tmp_path, capsys):
    snip = tmp_path / "bad.snip.jsonl"
    snip.write_text('{"text": "a", "labels": []}\n{"text": "b", "labels": []}\n{broken\n')
    assert main(["train", str(snip), "--out", str(tmp_path / "m.json")]) == 2
    assert "line 3" in capsys.readouterr().err


def test_cli_train_is_byte_deterministic(fixture_corpus, tmp_path):
    corpus, _, _ = fixture_corpus
    out_base = tmp_path / "mined"
    main(["extract", str(corpus), "--out", str(out_base)])
    snip = str(tmp_path / "mined.snip.jsonl")
    m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
    assert main(["train", snip, "--out", str(m1), "--seed", "11"]) == 0
    assert main(["train", snip, "--out", str(m2), "--seed", "11"]) == 0
    assert m1.read_bytes() == m2.read_bytes()


def test_cli_highlight_unknown_topic_lists_valid_names(fixture_corpus, tmp_path, capsys):
    corpus, _, _ = fixture_corpus
    model_path = tmp_path / "model.json"
    main(["extract", str(corpus), "--out", str(tmp_path / "mined")])
    main(["train", str(tmp_path / "mined.snip.jsonl"), "--out", str(model_path)])
    rc = main(["highlight", str(model_path), str(corpus), "--topics", "NoSuchTopic"])
    err = capsys.readouterr().err
    assert rc == 1
    for name in ("Classes", "VirtualFunction", "TryCatch"):
        assert name in err


def test_cli_highlight_empty_input_file(fixture_corpus, tmp_path):
    corpus, _, _ = fixture_corpus
    model_path = tmp_path / "model.json"
    main(["extract", str(corpus), "--out", str(tmp_path / "mined")])
    main(["train", str(tmp_path / "mined.snip.jsonl"), "--out", str(model_path)])
    empty = tmp_path / "empty.cpp"
    empty.write_text("")
    out = tmp_path / "empty.hl.jsonl"
    assert main(["highlight", str(model_path), str(empty), "--out", str(out)]) == 0
    assert read_highlights(out) == []


def test_cli_evaluate_highlight_identity(fixture_corpus, tmp_path, capsys):
    corpus, docs, gold = fixture_corpus
    # gold derived from the extraction rules themselves: scores must be
    # perfect when predictions are replaced by the same rules; here we run
    # the real pipeline and only check the report structure and exit code
    from cpptopics.corpus import write_annotations

    model_path = tmp_path / "model.json"
    main(["extract", str(corpus), "--out", str(tmp_path / "mined")])
    main(["train", str(tmp_path / "mined.snip.jsonl"), "--out", str(model_path)])
    gold_path = tmp_path / "gold.ann.jsonl"
    write_annotations(gold_path, gold)
    report_path = tmp_path / "rep.json"
    rc = main(
        [
            "evaluate",
            str(corpus),
            "--mode",
            "highlight",
            "--model",
            str(model_path),
            "--gold",
            str(gold_path),
            "--out",
            str(report_path),
        ]
    )
    assert rc == 0
    data = json.loads(report_path.read_text())
    assert "per_topic" in data and "average" in data
    assert report_path.with_suffix(".txt").is_file()


def test_cli_evaluate_names_missing_doc(fixture_corpus, tmp_path, capsys):
    corpus, docs, gold = fixture_corpus
    from cpptopics.corpus import GroundTruthAnnotation, Span, write_annotations

    model_path = tmp_path / "model.json"
    main(["extract", str(corpus), "--out", str(tmp_path / "mined")])
    main(["train", str(tmp_path / "mined.snip.jsonl"), "--out", str(model_path)])
    gold_path = tmp_path / "gold.ann.jsonl"
    bad = GroundTruthAnnotation("ghost/file.cpp", Topic.INLINE, Span(0, 5))
    write_annotations(gold_path, list(gold) + [bad])
    rc = main(
        [
            "evaluate",
            str(corpus),
            "--mode",
            "highlight",
            "--model",
            str(model_path),
            "--gold",
            str(gold_path),
            "--out",
            str(tmp_path / "rep.json"),
        ]
    )
    assert rc == 2
    assert "ghost/file.cpp" in capsys.readouterr().err


def test_cli_unknown_config_key_exits_one(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"trian": {}}')
    assert main(["extract", str(tmp_path), "--config", str(cfg)]) == 1
    assert "trian" in capsys.readouterr().err
