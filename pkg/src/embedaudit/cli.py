"""Command-line interface binding the audit operations into experiments.

Exit codes: 0 success, 1 input or validation error, 2 internal invariant
breach. Reports are deterministic for identical inputs, flags and seeds;
pass --no-timestamp to make them byte-identical across runs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, ontolex, promptgen, spacelab, zeroshot
from . import store
from .errors import AuditError
from .report import build_report, render_report, write_report


class _Parser(argparse.ArgumentParser):
    # bad usage is an input error (exit 1), not an internal failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _named(path, loader):
    try:
        return loader(path)
    except AuditError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _read_lines(path) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh]
    return [line for line in lines if line]


def _floats(values) -> list[float]:
    return [float(v) for v in values]


def _ints(values) -> list[int]:
    return [int(v) for v in values]


def _print_warnings(warnings) -> None:
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)


def _cmd_validate(args) -> int:
    embeddings = _named(args.embeddings, store.read_embeddings)
    print(f"ok: {args.embeddings}: {len(embeddings)} records, dimension {embeddings.dim}")
    return 0


def _cmd_classify(args) -> int:
    audio = _named(args.audio, store.read_embeddings)
    labels = _named(args.audio_labels, store.read_label_map)
    label_emb = _named(args.labels, store.read_embeddings)
    labeled = store.align(audio, labels)
    _print_warnings(labeled.warnings)
    result = zeroshot.evaluate(audio, labeled.truth(), label_emb, ks=args.topk)
    results: dict[str, object] = {
        "top_k_accuracy": {str(k): v for k, v in result.top_k.items()},
        "roc_auc_macro": result.roc_auc,
        "pr_auc_macro": result.pr_auc,
        "per_class": {
            label: {"roc_auc": roc, "pr_auc": pr}
            for label, (roc, pr) in result.per_class.items()
        },
        "skipped_classes": list(result.skipped),
        "predicted": dict(zip(result.audio_ids, result.predicted)),
    }
    if args.rankings:
        results["rankings"] = {
            id_: list(ranking) for id_, ranking in zip(result.audio_ids, result.rankings)
        }
    report = build_report(
        "classify",
        inputs={"audio": args.audio, "audio_labels": args.audio_labels, "labels": args.labels},
        parameters={"topk": list(args.topk), "rankings": bool(args.rankings)},
        results=results,
        timestamp=not args.no_timestamp,
    )
    write_report(report, args.out)
    print(f"report written to {args.out}")
    return 0


def _cmd_centroids(args) -> int:
    audio = _named(args.audio, store.read_embeddings)
    labels = _named(args.audio_labels, store.read_label_map)
    labeled = store.align(audio, labels)
    _print_warnings(labeled.warnings)
    centroids = spacelab.class_centroids(audio, labeled.truth())
    store.write_embeddings(centroids, args.out)
    print(f"{len(centroids)} class centroids written to {args.out}")
    return 0


def _cmd_pairs(args) -> int:
    audio = _named(args.audio, store.read_embeddings)
    labels = _named(args.audio_labels, store.read_label_map)
    label_emb = _named(args.labels, store.read_embeddings)
    labeled = store.align(audio, labels)
    _print_warnings(labeled.warnings)
    sim = zeroshot.similarity_matrix(audio, label_emb)
    hist = spacelab.pair_histogram(sim, labeled.truth(), bins=args.bins)
    report = build_report(
        "pairs",
        inputs={"audio": args.audio, "audio_labels": args.audio_labels, "labels": args.labels},
        parameters={"bins": args.bins},
        results={
            "bin_edges": _floats(hist.bin_edges),
            "positive_counts": _ints(hist.positive_counts),
            "negative_counts": _ints(hist.negative_counts),
            "positive_pairs": hist.positive_total,
            "negative_pairs": hist.negative_total,
            "overlap_coefficient": hist.overlap_coefficient,
            "pooled_pair_auc": hist.pooled_pair_auc,
        },
        timestamp=not args.no_timestamp,
    )
    write_report(report, args.out)
    print(f"report written to {args.out}")
    return 0


def _cmd_margins(args) -> int:
    audio = _named(args.audio, store.read_embeddings)
    label_emb = _named(args.labels, store.read_embeddings)
    sim = zeroshot.similarity_matrix(audio, label_emb)
    result = spacelab.margins(sim, bins=args.bins)
    report = build_report(
        "margins",
        inputs={"audio": args.audio, "labels": args.labels},
        parameters={"bins": args.bins},
        results={
            "median_margin": result.median_margin,
            "bin_edges": _floats(result.bin_edges),
            "counts": _ints(result.counts),
            "margins": {
                id_: float(m) for id_, m in zip(result.recording_ids, result.margins)
            },
        },
        timestamp=not args.no_timestamp,
    )
    write_report(report, args.out)
    print(f"report written to {args.out}")
    return 0


def _cmd_triplets_gen(args) -> int:
    tree = _named(args.ontology, ontolex.parse_ontology)
    restrict = _read_lines(args.restrict) if args.restrict else None
    triplets, stats = ontolex.generate_triplets(
        tree, restrict=restrict, include_internal=args.include_internal
    )
    ontolex.write_triplets(triplets, args.out)
    stats_dict = {
        "candidate_names": stats.candidate_names,
        "candidate_subsets": stats.candidate_subsets,
        "ambiguous_discarded": stats.ambiguous_discarded,
        "root_excluded": stats.root_excluded,
        "retained": stats.retained,
    }
    print(render_report(stats_dict), end="")
    if args.report:
        report = build_report(
            "triplets-gen",
            inputs={"ontology": args.ontology},
            parameters={
                "restrict": str(args.restrict) if args.restrict else None,
                "include_internal": bool(args.include_internal),
            },
            results=stats_dict,
            timestamp=not args.no_timestamp,
        )
        write_report(report, args.report)
    return 0


def _cmd_triplets_score(args) -> int:
    triplets = _named(args.triplets, ontolex.read_triplets)
    label_emb = _named(args.labels, store.read_embeddings)
    score = ontolex.triplet_accuracy(triplets, label_emb)
    results: dict[str, object] = {
        "accuracy": score.accuracy,
        "correct": score.correct,
        "total": score.total,
    }
    if args.verdicts:
        results["verdicts"] = [
            {
                "anchor": v.triplet.anchor,
                "positive": v.triplet.positive,
                "negative": v.triplet.negative,
                "anchor_positive": v.anchor_positive,
                "anchor_negative": v.anchor_negative,
                "correct": v.correct,
            }
            for v in score.verdicts
        ]
    report = build_report(
        "triplets-score",
        inputs={"triplets": args.triplets, "labels": args.labels},
        parameters={"verdicts": bool(args.verdicts)},
        results=results,
        timestamp=not args.no_timestamp,
    )
    write_report(report, args.out)
    print(f"accuracy {score.accuracy:.4f} ({score.correct}/{score.total}), report written to {args.out}")
    return 0


def _cmd_prompts(args) -> int:
    sources = [s for s in (args.templates, args.definitions) if s] + (
        ["random-context"] if args.random_context else []
    )
    if len(sources) != 1:
        raise AuditError("exactly one of --templates, --definitions, --random-context is required")
    classes = _read_lines(args.classes)
    if not classes:
        raise AuditError(f"{args.classes}: no class labels")

    entries: list[promptgen.ManifestEntry] = []
    if args.templates:
        for template in _named(args.templates, promptgen.read_templates):
            entries.extend(promptgen.expand(template, classes))
    elif args.definitions:
        definitions = _named(args.definitions, promptgen.read_definitions)
        missing = [c for c in classes if c not in definitions]
        if missing:
            raise AuditError(f"{args.definitions}: no definition for class {missing[0]!r}")
        entries.extend(
            promptgen.ManifestEntry(label=c, prompt=definitions[c], provenance="definitions")
            for c in classes
        )
    else:
        if not args.pool:
            raise AuditError("--random-context requires --pool")
        pool = _named(args.pool, promptgen.read_word_pool)
        entries.extend(
            promptgen.ManifestEntry(
                label=c,
                prompt=promptgen.random_context(c, pool, args.count, args.seed),
                provenance=f"random_context(count={args.count},seed={args.seed})",
            )
            for c in classes
        )

    if args.strip_label:
        entries = [
            promptgen.ManifestEntry(
                label=e.label,
                prompt=promptgen.strip_label(e.prompt, e.label),
                provenance=e.provenance + "|strip_label",
            )
            for e in entries
        ]
        empty = [e.label for e in entries if not e.prompt]
        if empty:
            raise AuditError(f"stripping left an empty prompt for class {empty[0]!r}")

    promptgen.write_manifest(entries, args.out)
    print(f"{len(entries)} prompts written to {args.out}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="embedaudit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"embedaudit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an EMB1 file against every format invariant")
    p.add_argument("embeddings")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("classify", help="zero-shot classification metrics (top-k, ROC-AUC, PR-AUC)")
    p.add_argument("--audio", required=True, help="EMB1 file of recording embeddings")
    p.add_argument("--audio-labels", required=True, help="id,label CSV with ground truth")
    p.add_argument("--labels", required=True, help="EMB1 file of candidate label embeddings")
    p.add_argument("--topk", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--rankings", action="store_true", help="include per-recording rankings")
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("centroids", help="per-class mean audio embeddings as an EMB1 label file")
    p.add_argument("--audio", required=True)
    p.add_argument("--audio-labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_centroids)

    p = sub.add_parser("pairs", help="positive/negative pair similarity histograms")
    p.add_argument("--audio", required=True)
    p.add_argument("--audio-labels", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--bins", type=int, default=spacelab.DEFAULT_BINS)
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_pairs)

    p = sub.add_parser("margins", help="top-2 similarity margins per recording")
    p.add_argument("--audio", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--bins", type=int, default=spacelab.DEFAULT_BINS)
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_margins)

    p = sub.add_parser("triplets-gen", help="enumerate ontology triplets with statistics")
    p.add_argument("--ontology", required=True, help="JSON tree of named nodes")
    p.add_argument("--restrict", help="file with one candidate name per line")
    p.add_argument("--include-internal", action="store_true",
                   help="use every non-root node as a candidate, not just leaves")
    p.add_argument("--report", help="also write the statistics as a report file")
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--out", required=True, help="triplet CSV destination")
    p.set_defaults(handler=_cmd_triplets_gen)

    p = sub.add_parser("triplets-score", help="triplet accuracy of a label embedding file")
    p.add_argument("--triplets", required=True, help="anchor,positive,negative CSV")
    p.add_argument("--labels", required=True, help="EMB1 file of label embeddings")
    p.add_argument("--verdicts", action="store_true", help="include per-triplet verdicts")
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_triplets_score)

    p = sub.add_parser("prompts", help="generate a prompt manifest for the extractor")
    p.add_argument("--classes", required=True, help="file with one class label per line")
    p.add_argument("--templates", help="file with one {label} template per line")
    p.add_argument("--definitions", help="label,definition CSV")
    p.add_argument("--random-context", action="store_true",
                   help="label followed by seeded random words from --pool")
    p.add_argument("--pool", help="whitespace-separated word pool file")
    p.add_argument("--count", type=int, default=5, help="random words per prompt")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strip-label", action="store_true",
                   help="remove label words from every generated prompt")
    p.add_argument("--out", required=True, help="manifest CSV destination")
    p.set_defaults(handler=_cmd_prompts)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except AuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - invariant breach
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
