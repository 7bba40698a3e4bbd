"""Command line interface.

Exit codes: 0 success, 1 some items failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import DirectoryUnreadable, UnmatchedFiles
from .imageio import IMAGE_SUFFIXES, bit_depth_of, read_gray, read_image, write_image
from .normalizer import channel_stats, load_stats, reinhard_transfer, save_stats
from .pipeline import PairRecord, default_jobs, discover_pairs, run_batch, score_pair, split_results
from .report import (
    DEFAULT_FIELD,
    SCORE_FIELDS,
    emit_heatmap,
    export_scores,
    rank_outliers,
    read_scores,
    separation_auroc,
    summarize_distribution,
)
from .sd_core import AGGREGATIONS, SdConfig, sd_map
from .synthgen import make_corpus, read_labels, write_corpus

EXIT_OK, EXIT_ITEM_FAILURES, EXIT_USAGE = 0, 1, 2

logger = logging.getLogger("halluscreen")

# flag dest -> SdConfig field
_MEASURE_FLAGS = {
    "m": "m_threshold",
    "p": "p_threshold",
    "kernel": "kernel_size",
    "clamp": "clamp_structure",
    "aggregation": "aggregation",
}


class UsageError(Exception):
    pass


def _add_measure_flags(parser):
    g = parser.add_argument_group("measure")
    g.add_argument("--m", type=float, help="structure soft threshold M (default 0.2)")
    g.add_argument("--p", type=float, help="difference soft threshold P (default 0.1)")
    g.add_argument("--kernel", type=int, help="box smoothing size K (default 32)")
    g.add_argument("--clamp", action="store_true", default=None,
                   help="saturate the structure term at 1")
    g.add_argument("--aggregation", choices=AGGREGATIONS, help="per-image statistic (default max)")


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must contain a JSON object")
    return data


def build_config(args, file_config: dict) -> SdConfig:
    """Merge measure settings from the config file and flags; flags win."""
    merged = {k: v for k, v in file_config.items() if k in SdConfig.__dataclass_fields__}
    for flag, name in _MEASURE_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            merged[name] = value
    try:
        return SdConfig.from_dict(merged)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid measure configuration: {exc}") from exc


def _print_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=False))


def cmd_score(args, file_config) -> int:
    cfg = build_config(args, file_config)
    rec = PairRecord(Path(args.original).stem, Path(args.original), Path(args.processed))
    try:
        score = score_pair(rec, cfg)
    except Exception as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ITEM_FAILURES
    out = score.as_dict()
    out["config"] = cfg.to_dict()
    _print_json(out)
    if args.heatmap:
        sdm = sd_map(read_gray(args.original), read_gray(args.processed), cfg)
        cap = args.heatmap_cap
        if cap not in (None, "data"):
            cap = float(cap)
        write_image(args.heatmap, emit_heatmap(sdm, read_image(args.processed), cap=cap), bit_depth=8)
    return EXIT_OK


def cmd_batch(args, file_config) -> int:
    cfg = build_config(args, file_config)
    jobs = args.jobs if args.jobs is not None else file_config.get("jobs", default_jobs())
    if int(jobs) < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        pairs = discover_pairs(args.original_dir, args.processed_dir)
    except (UnmatchedFiles, DirectoryUnreadable, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    results = run_batch(pairs, cfg, parallelism=int(jobs))
    scores, errors = split_results(results)
    fmt = args.format or ("jsonl" if Path(args.out).suffix.lower() == ".jsonl" else "csv")
    export_scores(scores, fmt, args.out)
    for err in errors:
        print(f"{err.pair_id}: {err.error}: {err.message}", file=sys.stderr)
    logger.info("scored %d pairs, %d failed -> %s", len(scores), len(errors), args.out)
    return EXIT_ITEM_FAILURES if errors else EXIT_OK


def cmd_synth(args, file_config) -> int:
    if args.hallucinated < 0 or args.benign < 0:
        raise UsageError("counts must be >= 0")
    corpus = make_corpus(args.hallucinated, args.benign, args.seed, size=args.size)
    labels = write_corpus(corpus, args.out_dir)
    logger.info("wrote %d pairs and %s", len(corpus), labels)
    return EXIT_OK


def _as_rgb(img):
    return np.repeat(img[..., None], 3, axis=2) if img.ndim == 2 else img


def cmd_normalize(args, file_config) -> int:
    try:
        target = load_stats(args.target_stats)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load target statistics: {exc}") from exc
    src_dir = Path(args.src_dir)
    if not src_dir.is_dir():
        raise UsageError(f"{src_dir} is not a directory")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for path in sorted(src_dir.iterdir()):
        if path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        try:
            out = reinhard_transfer(_as_rgb(read_image(path)), target)
            write_image(out_dir / path.name, out, bit_depth=bit_depth_of(path))
        except Exception as exc:
            failures += 1
            print(f"{path.name}: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ITEM_FAILURES if failures else EXIT_OK


def cmd_fit_stats(args, file_config) -> int:
    imgs = [_as_rgb(read_image(p)) for p in args.image]
    pooled = np.concatenate([img.reshape(-1, 1, 3) for img in imgs])
    save_stats(channel_stats(pooled), args.out)
    return EXIT_OK


def cmd_report(args, file_config) -> int:
    if args.top < 0:
        raise UsageError("--top must be >= 0")
    try:
        scores = read_scores(args.scores)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read scores: {exc}") from exc
    if not scores:
        raise UsageError(f"{args.scores} contains no scores")
    summary = summarize_distribution(scores, args.field)
    payload = {
        "summary": summary.to_json(),
        "top": [{"pair_id": pid, args.field: v} for pid, v in rank_outliers(scores, args.field, args.top)],
    }
    if args.labels:
        payload["auroc"] = separation_auroc(scores, read_labels(args.labels))
    if args.summary:
        Path(args.summary).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _print_json(payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halluscreen",
        description="Screen normalized tiles for hallucinated structure.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file with measure settings (flags take precedence)")
    parser.add_argument("-v", "--verbose", action="store_true")
    # repeated on each subcommand so the flags may follow it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", parents=[common], help="score one original/processed pair")
    p.add_argument("--original", required=True)
    p.add_argument("--processed", required=True)
    _add_measure_flags(p)
    p.add_argument("--heatmap", help="write a discrepancy overlay PNG here")
    p.add_argument("--heatmap-cap", help="overlay saturation value, or 'data' for the map maximum")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("batch", parents=[common], help="score all pairs in two directories")
    p.add_argument("--original-dir", required=True)
    p.add_argument("--processed-dir", required=True)
    p.add_argument("--out", required=True, help="scores file (.csv or .jsonl)")
    p.add_argument("--format", choices=("csv", "jsonl"))
    p.add_argument("--jobs", type=int)
    _add_measure_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("synth", parents=[common], help="write a labeled synthetic corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--hallucinated", type=int, required=True)
    p.add_argument("--benign", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--size", type=int, default=128)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("normalize", parents=[common], help="Reinhard-normalize a directory of RGB tiles")
    p.add_argument("--src-dir", required=True)
    p.add_argument("--target-stats", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("fit-stats", parents=[common], help="compute target statistics from reference tiles")
    p.add_argument("--image", required=True, action="append")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit_stats)

    p = sub.add_parser("report", parents=[common], help="summarize and rank a scores file")
    p.add_argument("--scores", required=True)
    p.add_argument("--field", choices=SCORE_FIELDS, default=DEFAULT_FIELD)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--summary", help="also write the report JSON here")
    p.add_argument("--labels", help="labels manifest; adds per-field AUROC")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        file_config = load_config(args.config)
        return args.func(args, file_config)
    except UsageError as exc:
        print(f"halluscreen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
