"""Command-line interface.

    defquest generate --book FILE --index FILE --parses FILE --out FILE
    defquest stats    --questions FILE --book FILE
    defquest sample   --questions FILE --per-book K --seed N
    defquest sweep    --book FILE --index FILE --parses FILE --thresholds 0.5,0.6
    defquest agree    --annotations FILE [--scheme FILE] [--item ID] [--bootstrap B]
    defquest roc      --scores FILE
    defquest serve    --port 8080 --data-dir DIR

Exit codes: 0 ok, 1 usage error, 2 data error, 3 service error.
"""

import argparse
import json
import sys

from . import clients, corpus, pipeline
from .errors import DataError, ServiceError, StageError, UsageError
from .evalkit import agreement, roc, scheme as scheme_mod
from .generation import ExternalBackend
from .selection import RuleScorer, SelectionConfig, load_default_patterns, load_pattern_file


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


def _build_parser():
    parser = _Parser(prog="defquest")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="run the question-generation pipeline")
    p.add_argument("--book", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--parses", help="pre-parsed CoNLL-U file keyed by sent_id")
    p.add_argument("--parser-url", help="parser service URL")
    p.add_argument("--scorer", default="rule", help="'rule' or a scorer service URL")
    p.add_argument("--generator", default="template", help="'template' or a generator service URL")
    p.add_argument("--threshold", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--patterns", help="pattern-set file (default: bundled set)")
    p.add_argument("--book-id")
    p.add_argument("--domain", default="")
    p.add_argument("--label-map", help="deprel mapping JSON for the parser service")
    p.add_argument("--skip-failed", action="store_true")

    p = sub.add_parser("stats", help="per-section question statistics")
    p.add_argument("--questions", required=True)
    p.add_argument("--book", required=True)
    p.add_argument("--book-id")

    p = sub.add_parser("sample", help="stratified sample of questions per book")
    p.add_argument("--questions", required=True)
    p.add_argument("--per-book", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep", help="question counts across thresholds")
    p.add_argument("--book", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--parses", required=True)
    p.add_argument("--thresholds", required=True, help="comma-separated ascending values")
    p.add_argument("--scorer", default="rule")
    p.add_argument("--patterns")
    p.add_argument("--book-id")

    p = sub.add_parser("agree", help="inter-annotator agreement report")
    p.add_argument("--annotations", required=True)
    p.add_argument("--scheme")
    p.add_argument("--item")
    p.add_argument("--bootstrap", type=int, default=0, help="number of bootstrap resamples B")
    p.add_argument("--n", type=int, default=1000, help="resample size N")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("roc", help="ROC points from scored labels")
    p.add_argument("--scores", required=True, help="JSONL with {score, label}")

    p = sub.add_parser("serve", help="run the review service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--ui-dir", help="built web UI bundle to serve at /")

    return parser


def _scorer_from(arg):
    if arg == "rule":
        return RuleScorer()
    return clients.RemoteScorer(clients.ServiceEndpoint(base_url=arg))


def _patterns_from(arg):
    if not arg:
        return load_default_patterns()
    return load_pattern_file(_read(arg))


def _load_questions(path):
    return [json.loads(line) for line in _read(path).splitlines() if line.strip()]


def _cmd_generate(args):
    book = corpus.load_textbook(_read(args.book), book_id=args.book_id, domain_label=args.domain)
    index = corpus.load_index(_read(args.index))
    if bool(args.parses) == bool(args.parser_url):
        raise UsageError("exactly one of --parses / --parser-url is required")
    if args.parses:
        provider = pipeline.FileGraphProvider(_read(args.parses))
    else:
        label_map = clients.load_label_map(_read(args.label_map)) if args.label_map else None
        provider = pipeline.RemoteGraphProvider(
            clients.ServiceEndpoint(base_url=args.parser_url), label_map=label_map
        )
    config = pipeline.PipelineConfig(
        selection=SelectionConfig(
            threshold=args.threshold,
            scorer="rule" if args.scorer == "rule" else "external",
        ),
        generator="template" if args.generator == "template" else "external",
        parser="conllu" if args.parses else "remote",
        seed=args.seed,
    )
    backend = None
    if args.generator != "template":
        endpoint = clients.ServiceEndpoint(base_url=args.generator)
        backend = ExternalBackend(
            lambda inputs: clients.remote_generate(endpoint, inputs), args.generator
        )
    result = pipeline.ask(
        book,
        index,
        config,
        scorer=_scorer_from(args.scorer),
        graph_provider=provider,
        backend=backend,
        patterns=_patterns_from(args.patterns),
        skip_failed=args.skip_failed,
    )
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(result.jsonl())
    with open(args.out + ".manifest.json", "w", encoding="utf-8") as f:
        json.dump(result.manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(result.records)} questions to {args.out}")
    return 0


def _cmd_stats(args):
    book = corpus.load_textbook(_read(args.book), book_id=args.book_id)
    stats = pipeline.generation_stats(_load_questions(args.questions), book)
    print(
        json.dumps(
            {
                "section_counts": stats.section_counts,
                "mean": stats.mean,
                "sd": stats.sd,
                "median": stats.median,
                "prefix_shares": stats.prefix_shares,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _cmd_sample(args):
    questions = _load_questions(args.questions)
    groups = {}
    for q in questions:
        groups.setdefault(q["book_id"], []).append(q)
    for record in pipeline.stratified_sample(groups, args.per_book, args.seed):
        print(json.dumps(record, ensure_ascii=False, sort_keys=True))
    return 0


def _cmd_sweep(args):
    book = corpus.load_textbook(_read(args.book), book_id=args.book_id)
    index = corpus.load_index(_read(args.index))
    provider = pipeline.FileGraphProvider(_read(args.parses))
    try:
        thresholds = [float(t) for t in args.thresholds.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad threshold list: {exc}") from exc
    for threshold, count in pipeline.threshold_sweep(
        list(book.sentences()),
        index,
        _scorer_from(args.scorer),
        provider,
        _patterns_from(args.patterns),
        thresholds,
    ):
        print(f"{threshold}\t{count}")
    return 0


def _cmd_agree(args):
    scheme = scheme_mod.load_scheme(_read(args.scheme) if args.scheme else None)
    records = scheme_mod.load_annotations(_read(args.annotations))
    items = [args.item] if args.item else scheme.item_ids
    bootstrap = (args.bootstrap, args.n, args.seed) if args.bootstrap else None
    print("item\tpercent_agreement\talpha\tci_lower\tci_upper\tmost_frequent\tn_applicable")
    for item in items:
        report = agreement.agreement_report(records, item, scheme=scheme, bootstrap=bootstrap)
        ci_low = f"{report.ci[0]:.4f}" if report.ci else "-"
        ci_high = f"{report.ci[1]:.4f}" if report.ci else "-"
        print(
            f"{report.item}\t{report.percent_agreement:.4f}\t{report.alpha:.4f}"
            f"\t{ci_low}\t{ci_high}\t{report.most_frequent_share:.4f}\t{report.n_applicable}"
        )
    return 0


def _cmd_roc(args):
    pairs = []
    for line in _read(args.scores).splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        pairs.append((float(raw["score"]), bool(raw["label"])))
    print("threshold\ttpr\tfpr")
    for threshold, tpr, fpr in roc.roc_points(pairs):
        print(f"{threshold:.6g}\t{tpr:.6f}\t{fpr:.6f}")
    return 0


def _cmd_serve(args):
    import uvicorn

    from .service.app import create_app

    app = create_app(data_dir=args.data_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "stats": _cmd_stats,
    "sample": _cmd_sample,
    "sweep": _cmd_sweep,
    "agree": _cmd_agree,
    "roc": _cmd_roc,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ServiceError as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return 3
    except StageError as exc:
        kind = "service" if isinstance(exc.cause, ServiceError) else "data"
        print(f"{kind} error: {exc}", file=sys.stderr)
        return 3 if kind == "service" else 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
