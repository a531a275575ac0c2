"""Command-line interface wiring corpus -> dataset -> tree -> rules/metrics.

Exit codes: 0 success, 1 usage, 2 bad input (config/corpus/data), 3 bad
model file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .chaid import extract_rules, grow_tree, load_model, predict, save_model
from .config import load_app_config, resolve_config_path
from .dataset import (
    Dataset,
    GeneratorSpec,
    generate_synthetic,
    load_csv,
    save_csv,
)
from .errors import (
    ConfigError,
    DatasetParseError,
    InvalidPatternError,
    InvalidUrlError,
    ModelFormatError,
    SchemaError,
    SpamsiftError,
    ValidationError,
)
from .features import (
    Label,
    OrdinalLevel,
    PageDocument,
    SiteRecord,
    extract_record,
    read_manifest,
)

EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_MODEL = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for input errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_record(url: str, label: Label) -> SiteRecord:
    low = OrdinalLevel.VERY_MIN
    return SiteRecord(url=url, black_list="no", feature_of_url=low, meta_tag=low,
                      key_word_special=low, key_word_public=low,
                      count_of_internal_link=low, count_external_link=low,
                      count_of_post=low, label=label)


def cmd_extract(args) -> int:
    config = load_app_config(resolve_config_path(args.config))
    corpus = Path(args.corpus)
    entries = read_manifest(corpus)

    def process(entry):
        """Returns (record or None, warning or None); never raises."""
        try:
            html = (corpus / entry.file).read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            return None, f"skipping {entry.file}: {exc}"
        page = PageDocument(url=entry.url, html=html, fetched_from=entry.file)
        try:
            record = extract_record(page, config.blacklist, config.keywords,
                                    config.extraction)
        except SpamsiftError as exc:
            return (_default_record(entry.url, entry.label),
                    f"{entry.file}: extraction failed ({exc}); attributes defaulted")
        return dataclasses.replace(record, label=entry.label), None

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(process, entries))

    records = []
    for record, warning in results:
        if warning:
            print(f"warning: {warning}", file=sys.stderr)
        if record is not None:
            records.append(record)
    dataset = Dataset(tuple(records))
    save_csv(dataset, args.out)
    counts = dataset.label_counts()
    print(f"extracted {len(dataset)} records "
          f"(spam={counts[Label.SPAM]}, non-spam={counts[Label.NON_SPAM]}, "
          f"unlabeled={counts[Label.UNLABELED]}) -> {args.out}")
    return 0


def cmd_train(args) -> int:
    config = load_app_config(resolve_config_path(args.config))
    dataset = load_csv(args.data)
    labeled = dataset.labeled_only()
    dropped = len(dataset) - len(labeled)
    if dropped:
        print(f"warning: ignoring {dropped} unlabeled records", file=sys.stderr)
    tree = grow_tree(labeled, config.chaid)
    save_model(tree, args.out)
    print(f"trained on {len(labeled)} records: {len(tree.nodes)} nodes, "
          f"{len(tree.leaves())} leaves -> {args.out}")
    return 0


def cmd_predict(args) -> int:
    tree = load_model(args.model)
    if args.data:
        dataset = load_csv(args.data)
        print("url,prediction,probability")
        for record in dataset.records:
            result = predict(tree, record)
            print(f"{record.url},{result.label},{result.probability:.6f}")
        return 0
    if not args.url:
        print("error: --page requires --url", file=sys.stderr)
        return EXIT_USAGE
    config = load_app_config(resolve_config_path(args.config))
    html = Path(args.page).read_text(encoding="utf-8", errors="replace")
    page = PageDocument(url=args.url, html=html, fetched_from=args.page)
    record = extract_record(page, config.blacklist, config.keywords, config.extraction)
    result = predict(tree, record)
    for event in result.fallbacks:
        print(f"warning: {event}", file=sys.stderr)
    print(f"{result.label} {result.probability:.4f}")
    return 0


def cmd_rules(args) -> int:
    tree = load_model(args.model)
    for rule in extract_rules(tree):
        print(rule.describe())
    if args.dot or args.fig:
        from . import report

        if args.dot:
            report.save_dot(tree, args.dot)
            print(f"wrote {args.dot}", file=sys.stderr)
        if args.fig:
            report.render_tree_figure(tree, args.fig)
            print(f"wrote {args.fig}", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    from .metrics import cross_validate, metrics_csv

    config = load_app_config(resolve_config_path(args.config))
    dataset = load_csv(args.data).labeled_only()
    seed = config.seed if args.seed is None else args.seed
    result = cross_validate(dataset, config.chaid, args.folds, seed)
    text = metrics_csv(result)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        print(text, end="")
    if args.fig:
        from . import report

        report.render_metrics_figure(result, args.fig)
        print(f"wrote {args.fig}", file=sys.stderr)
    print(f"mean precision={result.mean('precision'):.4f} "
          f"recall={result.mean('recall'):.4f} "
          f"f-measure={result.mean('f_measure'):.4f} over {args.folds} folds",
          file=sys.stderr)
    return 0


def cmd_synth(args) -> int:
    try:
        raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read generator spec {args.spec}: {exc}") from None
    spec = GeneratorSpec.from_dict(raw)
    dataset = generate_synthetic(spec, seed=args.seed)
    save_csv(dataset, args.out)
    counts = dataset.label_counts()
    print(f"generated {len(dataset)} records "
          f"(spam={counts[Label.SPAM]}, non-spam={counts[Label.NON_SPAM]}) -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spamsift",
                     description="Web spam feature extraction and CHAID rule mining")
    parser.add_argument("--version", action="version", version=f"spamsift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="turn a corpus directory into a dataset CSV")
    p.add_argument("--corpus", required=True, help="directory with pages and manifest.csv")
    p.add_argument("--config", help="JSON config file (default: $SPAMSIFT_CONFIG)")
    p.add_argument("--out", required=True, help="output dataset CSV")
    p.add_argument("--workers", type=int, default=4, help="extraction worker threads")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="grow a tree from a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--config", help="JSON config file (default: $SPAMSIFT_CONFIG)")
    p.add_argument("--out", required=True, help="output model JSON")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify a single page or a dataset CSV")
    p.add_argument("--model", required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--page", help="HTML file to classify (requires --url)")
    source.add_argument("--data", help="dataset CSV to classify")
    p.add_argument("--url", help="URL of the --page document")
    p.add_argument("--config", help="JSON config file (default: $SPAMSIFT_CONFIG)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("rules", help="print the model's rules; optionally export DOT/PNG")
    p.add_argument("--model", required=True)
    p.add_argument("--dot", help="write Graphviz source here")
    p.add_argument("--fig", help="render the tree figure here (png/pdf/svg)")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("evaluate", help="k-fold cross-validation metrics")
    p.add_argument("--data", required=True)
    p.add_argument("--config", help="JSON config file (default: $SPAMSIFT_CONFIG)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=None,
                   help="fold shuffle seed (default: config seed)")
    p.add_argument("--out", help="write the per-fold metrics CSV here")
    p.add_argument("--fig", help="render the per-fold metrics figure here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic dataset from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the spec's seed")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (ConfigError, DatasetParseError, InvalidPatternError, InvalidUrlError,
            SchemaError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
