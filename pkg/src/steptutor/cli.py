"""Command-line interface.

Subcommands:
  serve       run the tutoring HTTP service
  preprocess  clean a raw keystroke log into a step sequence file
  generate    batch-generate hints from an experiment manifest
  rank        aggregate prompt ranking sheets
  annotate    validate an expert's rubric annotation sheet
  kappa       inter-rater agreement for one criterion
  report      student-rating (and optional rubric) reports
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .exercises import RunnerConfig, load_catalog
from .harness import (
    AnnotationStore,
    ExperimentManifest,
    aggregate_ranking,
    annotate,
    cohens_kappa,
    rating_report,
    rubric_report,
    run_experiment,
    write_rating_report,
)
from .harness.ranking import load_sheets
from .llm import LlmClient, default_model_id
from .snapshots import build_step_sequence, ingest_raw_log, write_step_sequence


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .events import EventStore
    from .service import create_app

    catalog = load_catalog(args.catalog_dir, include_builtins=not args.no_builtins)
    store = EventStore(args.data_dir)
    client = LlmClient.from_env(mock_seed=args.mock_seed if args.mock_llm else None)
    app = create_app(catalog, store, client, runner=RunnerConfig.load())
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_preprocess(args: argparse.Namespace) -> int:
    raw = ingest_raw_log(args.input, args.format)
    sequence = build_step_sequence(
        raw,
        student_id=args.student,
        exercise_id=args.exercise,
        window=args.window,
        dedup_scope=args.dedup_scope,
    )
    write_step_sequence(sequence, args.out)
    print(
        f"{args.input}: {len(raw)} raw snapshots -> {len(sequence.steps)} steps "
        f"({len(sequence.provenance)} removed), wrote {args.out}"
    )
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    manifest = ExperimentManifest.from_json_file(args.manifest)
    if args.mock:
        client = LlmClient.from_env(mock_seed=args.seed)
    else:
        client = LlmClient.from_env()
    catalog = load_catalog(args.catalog_dir)
    summary = run_experiment(manifest, client, catalog, model_id=default_model_id())
    for warning in summary.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {summary.records} records to {summary.output_path}")
    if summary.failures:
        print(f"{len(summary.failures)} records failed:", file=sys.stderr)
        for failure in summary.failures:
            print(f"  {failure}", file=sys.stderr)
        return 1
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    sheets = load_sheets(args.sheets)
    result = aggregate_ranking(sheets)
    exercise_ids = sorted({ex for entry in result.values() for ex in entry["per_exercise"]})
    header = ["prompt"] + exercise_ids + ["total"]
    print("\t".join(header))
    for prompt_id, entry in sorted(result.items(), key=lambda kv: kv[1]["total"]):
        row = [prompt_id]
        row += [str(entry["per_exercise"].get(ex, "")) for ex in exercise_ids]
        row.append(str(entry["total"]))
        print("\t".join(row))
    winners = [pid for pid, entry in result.items() if entry["winner"]]
    if winners:
        print(f"winner: {winners[0]} (lowest total)")
    else:
        best = min(entry["total"] for entry in result.values())
        tied = sorted(pid for pid, entry in result.items() if entry["total"] == best)
        print(f"tie between {', '.join(tied)} at total {best}; no winner declared")
    return 0


def _cmd_annotate(args: argparse.Namespace) -> int:
    store = AnnotationStore.load(args.out) if Path(args.out).exists() else AnnotationStore()
    store = annotate(args.hints, args.annotator, args.entries, store)
    store.save(args.out)
    print(f"store now holds {len(store)} annotations -> {args.out}")
    return 0


def _cmd_kappa(args: argparse.Namespace) -> int:
    store_a = AnnotationStore.load(args.a)
    store_b = AnnotationStore.load(args.b)
    by_hint_a = {ann.hint_id: ann for ann in store_a}
    by_hint_b = {ann.hint_id: ann for ann in store_b}
    shared = sorted(set(by_hint_a) & set(by_hint_b))
    if not shared:
        print("error: no hints annotated in both files", file=sys.stderr)
        return 1
    labels_a = [by_hint_a[h].criterion_label(args.criterion) for h in shared]
    labels_b = [by_hint_b[h].criterion_label(args.criterion) for h in shared]
    report = cohens_kappa(labels_a, labels_b, criterion=args.criterion)
    print(json.dumps(report.to_json(), indent=2))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    with Path(args.events).open(encoding="utf-8") as fh:
        report = rating_report(fh)
    paths = write_rating_report(report, args.out)
    print(f"n = {report['n']} rated hints")
    print(f"wrote {paths['csv']} and {paths['plot']}")
    if args.annotations:
        store = AnnotationStore.load(args.annotations)
        rubric = rubric_report(store)
        rubric_path = Path(args.out) / "rubric_report.json"
        rubric_path.write_text(json.dumps(rubric, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {rubric_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steptutor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the tutoring HTTP service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", default="data")
    serve.add_argument("--catalog-dir", default=None)
    serve.add_argument("--no-builtins", action="store_true",
                       help="serve only exercises from --catalog-dir")
    serve.add_argument("--mock-llm", action="store_true",
                       help="use the deterministic offline hint backend")
    serve.add_argument("--mock-seed", type=int, default=0)
    serve.set_defaults(func=_cmd_serve)

    pre = sub.add_parser("preprocess", help="clean a raw keystroke log")
    pre.add_argument("--input", required=True)
    pre.add_argument("--format", choices=("csv", "jsonl"), required=True)
    pre.add_argument("--student", required=True)
    pre.add_argument("--exercise", required=True)
    pre.add_argument("--out", required=True)
    pre.add_argument("--window", type=int, default=5,
                     help="snapshots a trace print may linger before removal")
    pre.add_argument("--dedup-scope", choices=("consecutive", "global"),
                     default="consecutive")
    pre.set_defaults(func=_cmd_preprocess)

    gen = sub.add_parser("generate", help="batch-generate hints from a manifest")
    gen.add_argument("--manifest", required=True)
    backend = gen.add_mutually_exclusive_group(required=True)
    backend.add_argument("--mock", action="store_true")
    backend.add_argument("--live", action="store_true")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--catalog-dir", default=None)
    gen.set_defaults(func=_cmd_generate)

    rank = sub.add_parser("rank", help="aggregate prompt ranking sheets")
    rank.add_argument("--sheets", required=True, help="directory of sheet *.json files")
    rank.set_defaults(func=_cmd_rank)

    ann = sub.add_parser("annotate", help="validate a rubric annotation sheet")
    ann.add_argument("--hints", required=True)
    ann.add_argument("--entries", required=True)
    ann.add_argument("--annotator", required=True)
    ann.add_argument("--out", default="annotations.jsonl")
    ann.set_defaults(func=_cmd_annotate)

    kappa = sub.add_parser("kappa", help="inter-rater agreement for one criterion")
    kappa.add_argument("--a", required=True)
    kappa.add_argument("--b", required=True)
    kappa.add_argument("--criterion", required=True)
    kappa.set_defaults(func=_cmd_kappa)

    report = sub.add_parser("report", help="rating histograms and rubric tables")
    report.add_argument("--events", required=True)
    report.add_argument("--out", required=True)
    report.add_argument("--annotations", default=None)
    report.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface clean one-line errors to the terminal
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
