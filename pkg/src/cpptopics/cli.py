"""Command-line driver: extract, train, highlight, evaluate, serve.

Exit codes: 0 success, 1 usage/config error, 2 data error.
"""

from __future__ import annotations

import argparse
import html as html_mod
import json
import sys
from collections import Counter
from dataclasses import replace
from pathlib import Path

from . import bundle as bundle_mod
from . import evaluation
from .classifier import train
from .config import ConfigError, config_fingerprint, load_config
from .corpus import (
    DataFormatError,
    SourceDocument,
    extract_annotations,
    extract_snippets,
    load_corpus,
    read_annotations,
    read_snippets,
    write_annotations,
    write_snippets,
)
from .highlighter import DocHighlight, highlight, write_highlights
from .topics import TOPIC_NAMES, TOPIC_ORDER, Topic

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _parse_topic_list(names: str) -> list[Topic]:
    return [Topic.from_name(n.strip()) for n in names.split(",") if n.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpptopics", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="mine annotations and snippets from a corpus")
    p.add_argument("corpus_dir")
    p.add_argument("--config")
    p.add_argument("--topics", help="comma-separated topic filter")
    p.add_argument("--out", default="corpus", help="output base path")

    p = sub.add_parser("train", help="train a model from a snippet file")
    p.add_argument("snippets")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="model.json")

    p = sub.add_parser("highlight", help="highlight topics in files")
    p.add_argument("model")
    p.add_argument("input", help="a .cpp file or a directory of them")
    p.add_argument("--config")
    p.add_argument("--topics", help="comma-separated topic filter")
    p.add_argument("--out", default="highlights.hl.jsonl")
    p.add_argument("--html", action="store_true", help="also emit static HTML pages")

    p = sub.add_parser("evaluate", help="classifier CV or highlight evaluation")
    p.add_argument("corpus_dir")
    p.add_argument("--mode", choices=("classifier", "highlight"), required=True)
    p.add_argument("--model", help="model file (highlight mode)")
    p.add_argument("--gold", help="gold .ann.jsonl (highlight mode)")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="report.json")

    p = sub.add_parser("serve", help="run the highlight HTTP service")
    p.add_argument("model")
    p.add_argument("--config")
    p.add_argument("--port", type=int)
    p.add_argument("--host")
    p.add_argument("--static", help="directory of web UI assets")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        if args.command == "extract":
            return _cmd_extract(args, cfg)
        if args.command == "train":
            return _cmd_train(args, cfg)
        if args.command == "highlight":
            return _cmd_highlight(args, cfg)
        if args.command == "evaluate":
            return _cmd_evaluate(args, cfg)
        if args.command == "serve":
            return _cmd_serve(args, cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR if isinstance(exc, ConfigError) else DATA_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    raise AssertionError("unreachable")


def _cmd_extract(args, cfg) -> int:
    rules = cfg.rules
    if args.topics:
        from .corpus import ConstructRules

        rules = ConstructRules(_parse_topic_list(args.topics))
    docs, skipped = load_corpus(args.corpus_dir)
    if not docs:
        print("error: no source files found", file=sys.stderr)
        return DATA_ERROR
    annotations = []
    for doc in docs:
        annotations.extend(extract_annotations(doc, rules))
    snippets = extract_snippets(docs, rules)
    out_base = Path(args.out)
    ann_path = out_base.with_suffix(".ann.jsonl")
    snip_path = out_base.with_suffix(".snip.jsonl")
    write_annotations(ann_path, annotations)
    write_snippets(snip_path, snippets)
    counts = Counter(a.topic for a in annotations)
    print(f"documents: {len(docs)}  skipped: {len(skipped)}")
    for t in TOPIC_ORDER:
        print(f"  {t.value:<18} {counts.get(t, 0)}")
    if skipped:
        print("skipped files:")
        for doc_id in skipped:
            print(f"  {doc_id}")
    print(f"wrote {ann_path} and {snip_path}")
    return 0


def _cmd_train(args, cfg) -> int:
    if args.seed is not None:
        cfg = replace(cfg, train=replace(cfg.train, seed=args.seed))
    try:
        snippets = read_snippets(args.snippets)
    except DataFormatError as exc:
        print(f"error: {args.snippets}: {exc}", file=sys.stderr)
        return DATA_ERROR
    if not snippets:
        print("error: snippet file is empty", file=sys.stderr)
        return DATA_ERROR
    model = train(snippets, cfg.train, min_df=cfg.features.min_df)
    provenance = {
        "seed": cfg.train.seed,
        "config_hash": config_fingerprint(cfg),
        "corpus_document_count": len(snippets),
    }
    mb = bundle_mod.ModelBundle(model, cfg.highlight, provenance)
    bundle_mod.save(args.out, mb)
    counts = Counter(t for s in snippets for t in s.labels)
    print(f"snippets: {len(snippets)}  vocabulary: {model.tfidf.vocabulary_size}")
    for t in TOPIC_ORDER:
        if t in model.per_topic:
            final = model.objectives[t][-1]
            print(f"  {t.value:<18} n={counts.get(t, 0):<5} objective={final:.6f}")
    for warning in model.warnings:
        print(f"  warning: {warning}")
    print(f"wrote {args.out}")
    return 0


def _load_input_docs(input_path: str) -> list[SourceDocument]:
    path = Path(input_path)
    if path.is_dir():
        docs, _ = load_corpus(path)
        return docs
    if not path.is_file():
        raise FileNotFoundError(f"input not found: {path}")
    content = path.read_bytes().decode("utf-8", errors="replace")
    return [SourceDocument(path.name, content)]


def _cmd_highlight(args, cfg) -> int:
    try:
        topics = _parse_topic_list(args.topics) if args.topics else list(TOPIC_ORDER)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    mb = bundle_mod.load(args.model)
    docs = _load_input_docs(args.input)
    highlights: list[DocHighlight] = []
    for doc in docs:
        for h in highlight(doc, mb.model, topics, mb.highlight_config):
            highlights.append(DocHighlight(doc.doc_id, h.topic, h.span, h.confidence))
    write_highlights(args.out, highlights)
    print(f"documents: {len(docs)}  spans: {len(highlights)}")
    print(f"wrote {args.out}")
    if args.html:
        html_dir = Path(args.out).with_suffix("").with_suffix("")  # strip .hl.jsonl
        html_dir = html_dir.parent / (html_dir.name + "_html")
        html_dir.mkdir(parents=True, exist_ok=True)
        for doc in docs:
            page = render_html_page(doc, [h for h in highlights if h.doc_id == doc.doc_id])
            target = html_dir / (doc.doc_id.replace("/", "__") + ".html")
            target.write_text(page, encoding="utf-8")
        print(f"wrote HTML pages to {html_dir}/")
    return 0


_HTML_COLORS = {
    "Classes": "#cde7ff", "Friend": "#ffd9cd", "Inheritance": "#d9f2cf",
    "Inline": "#f3d9ff", "Namespaces": "#fff3b8", "OperatorOverload": "#c8f0e8",
    "Templates": "#ffd7ee", "TryCatch": "#e0e0ff", "VirtualFunction": "#e5ffcf",
}


def render_html_page(doc: SourceDocument, highlights: list[DocHighlight]) -> str:
    """Static single-document view: spans wrapped in <mark>, one legend."""
    boundaries = sorted({0, len(doc.content)}
                        | {h.span.start for h in highlights}
                        | {h.span.end for h in highlights})
    parts = []
    for start, end in zip(boundaries, boundaries[1:]):
        chunk = html_mod.escape(doc.content[start:end])
        active = [h for h in highlights if h.span.start <= start and end <= h.span.end]
        if active:
            title = ", ".join(
                f"{h.topic.value} ({h.confidence:.2f})" for h in active
            )
            color = _HTML_COLORS.get(active[0].topic.value, "#eeeeee")
            parts.append(
                f'<mark style="background:{color}" title="{html_mod.escape(title)}">{chunk}</mark>'
            )
        else:
            parts.append(chunk)
    legend = " ".join(
        f'<span style="background:{color}">&nbsp;{name}&nbsp;</span>'
        for name, color in _HTML_COLORS.items()
    )
    return (
        "<!doctype html><html><head><meta charset='utf-8'>"
        f"<title>{html_mod.escape(doc.doc_id)}</title>"
        "<style>pre{font-family:monospace;white-space:pre-wrap}</style></head>"
        f"<body><p>{legend}</p><pre>{''.join(parts)}</pre></body></html>\n"
    )


def _cmd_evaluate(args, cfg) -> int:
    if args.seed is not None:
        cfg = replace(
            cfg,
            train=replace(cfg.train, seed=args.seed),
            evaluation=replace(cfg.evaluation, seed=args.seed),
        )
    docs, _ = load_corpus(args.corpus_dir)
    if not docs:
        print("error: no source files found", file=sys.stderr)
        return DATA_ERROR
    if args.mode == "classifier":
        snippets = extract_snippets(docs, cfg.rules)
        report = evaluation.cross_validate(snippets, cfg.evaluation.folds, cfg.train)
    else:
        if not args.model or not args.gold:
            print("error: highlight mode requires --model and --gold", file=sys.stderr)
            return USAGE_ERROR
        mb = bundle_mod.load(args.model)
        try:
            gold = read_annotations(args.gold)
        except DataFormatError as exc:
            print(f"error: {args.gold}: {exc}", file=sys.stderr)
            return DATA_ERROR
        known = {d.doc_id for d in docs}
        missing = sorted({g.doc_id for g in gold} - known)
        if missing:
            print(f"error: gold references unknown doc_id {missing[0]!r}", file=sys.stderr)
            return DATA_ERROR
        report = evaluation.highlight_eval(
            mb.model,
            docs,
            gold,
            mb.highlight_config,
            per_topic_cap=cfg.evaluation.per_topic_cap,
            seed=cfg.evaluation.seed,
            filtered=cfg.evaluation.filtered,
        )
    evaluation.save_report(args.out, report)
    print(evaluation.render_report(report))
    print(f"wrote {args.out} and {Path(args.out).with_suffix('.txt')}")
    return 0


def _cmd_serve(args, cfg) -> int:
    from .server import serve

    service = cfg.service
    if args.port is not None:
        service = replace(service, port=args.port)
    if args.host:
        service = replace(service, host=args.host)
    if args.static:
        service = replace(service, static_dir=args.static)
    mb = bundle_mod.load(args.model)
    print(f"serving on http://{service.host}:{service.port}/ "
          f"(topics: {', '.join(TOPIC_NAMES)})")
    serve(mb, service)
    return 0


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
