"""Command-line front-end: detection pipeline and benchmark harness."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .benchmark import (
    MatchConfig,
    PairGroup,
    ProblemPair,
    build_precision_dataset,
    build_recall_dataset,
    list_problems,
    load_description_words,
    load_problem_submissions,
    match_clones,
    materialize_pair,
    read_truth,
    write_truth,
)
from .benchmark.recall import BUCKETS, LabeledClone
from .detector import (
    ClonePair,
    DetectorConfig,
    GranularityMode,
    detect_group,
    read_report,
    suppress_nested,
    write_report,
)
from .errors import AdapterUnavailable, PolycloneError
from .frontend import PACKAGE_LANGUAGE_DIR, get_adapter, load_language_config
from .pipeline import DEGRADED, PARSED, SKIPPED, PipelineSettings, discover_files, process_files
from .tokenbag import read_bags, write_bags

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2
EXIT_INTERRUPTED = 130

LANG_DIR_ENV = "POLYCLONE_LANG_DIR"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PolycloneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyclone",
        description="Multilingual syntactic code-clone detector and benchmark harness",
    )
    parser.add_argument("--version", action="version", version=f"polyclone {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect", help="run the clone-detection pipeline")
    p_detect.add_argument("input", type=Path, help="source directory")
    p_detect.add_argument("--lang", required=True, help="languageId to detect")
    p_detect.add_argument("--lang-dir", type=Path, default=None,
                          help=f"language config directory (or ${LANG_DIR_ENV})")
    p_detect.add_argument("--min-tokens", type=int, default=20)
    p_detect.add_argument("--theta", type=float, default=0.7)
    p_detect.add_argument("--granularity", default="0..4",
                          help="file | all | LO..HI | single value")
    p_detect.add_argument("--keyword-filter", action="store_true")
    p_detect.add_argument("--out", type=Path, required=True, help="output directory")
    p_detect.add_argument("--jobs", type=int, default=1)
    p_detect.add_argument("--no-timing", action="store_true",
                          help="omit timing from the manifest (byte-stable output)")
    p_detect.set_defaults(func=cmd_detect)

    p_langs = sub.add_parser("languages", help="list registered language configs")
    p_langs.add_argument("--lang-dir", type=Path, default=None)
    p_langs.add_argument("--json", action="store_true")
    p_langs.set_defaults(func=cmd_languages)

    p_bench = sub.add_parser("bench", help="benchmark harness")
    bench_sub = p_bench.add_subparsers(dest="bench_command", required=True)

    b_recall = bench_sub.add_parser("build-recall", help="build the recall dataset")
    b_recall.add_argument("--corpus", type=Path, required=True, help="OJ corpus root")
    b_recall.add_argument("--lang", required=True)
    b_recall.add_argument("--lang-dir", type=Path, default=None)
    b_recall.add_argument("--problems", default="", help="comma-separated problem ids (default: all)")
    b_recall.add_argument("--cap", type=int, default=300, help="max submissions per problem")
    b_recall.add_argument("--out", type=Path, required=True)
    b_recall.set_defaults(func=cmd_build_recall)

    b_prec = bench_sub.add_parser("build-precision", help="build the precision dataset")
    b_prec.add_argument("--corpus", type=Path, required=True)
    b_prec.add_argument("--lang", required=True)
    b_prec.add_argument("--lang-dir", type=Path, default=None)
    b_prec.add_argument("--seed", type=int, required=True)
    b_prec.add_argument("--pairs-per-group", type=int, default=30)
    b_prec.add_argument("--cap", type=int, default=300)
    b_prec.add_argument("--out", type=Path, required=True)
    b_prec.set_defaults(func=cmd_build_precision)

    s_recall = bench_sub.add_parser("score-recall", help="score a report against recall truth")
    s_recall.add_argument("--truth", type=Path, required=True)
    s_recall.add_argument("--report", type=Path, required=True)
    s_recall.add_argument("--corpus", type=Path, required=True, help="materialized benchmark corpus")
    s_recall.add_argument("--lang", required=True)
    s_recall.add_argument("--lang-dir", type=Path, default=None)
    s_recall.add_argument("--coverage", type=float, default=0.7)
    s_recall.add_argument("--json", action="store_true")
    s_recall.set_defaults(func=cmd_score_recall)

    s_prec = bench_sub.add_parser("score-precision", help="score per-pair reports")
    s_prec.add_argument("--dataset", type=Path, required=True, help="build-precision output dir")
    s_prec.add_argument("--runs", type=Path, required=True,
                        help="directory with <group>/<pair>/report.csv")
    s_prec.add_argument("--json", action="store_true")
    s_prec.set_defaults(func=cmd_score_precision)

    return parser


# ---------------------------------------------------------------------------
# Language config resolution
# ---------------------------------------------------------------------------


def _lang_dir(args) -> Path:
    if getattr(args, "lang_dir", None):
        return args.lang_dir
    env = os.environ.get(LANG_DIR_ENV)
    return Path(env) if env else PACKAGE_LANGUAGE_DIR


def _resolve_language(args):
    lang_dir = _lang_dir(args)
    for path in sorted(lang_dir.glob("*.json")):
        try:
            cfg = load_language_config(path)
        except PolycloneError:
            continue
        if cfg.language_id == args.lang:
            return cfg, str(lang_dir)
    raise PolycloneError(f"no language config for {args.lang!r} in {lang_dir}")


def _parse_granularity(spec: str) -> tuple[GranularityMode, tuple[int, int]]:
    if spec == "file":
        return GranularityMode.FILE_ONLY, (0, 0)
    if spec == "all":
        return GranularityMode.ALL, (0, 0)
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return GranularityMode.RANGE, (int(lo), int(hi))
    value = int(spec)
    return GranularityMode.RANGE, (value, value)


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------


def cmd_detect(args) -> int:
    cfg, config_dir = _resolve_language(args)
    if not args.input.is_dir():
        print(f"error: input directory {args.input} does not exist", file=sys.stderr)
        return EXIT_FATAL
    mode, grange = _parse_granularity(args.granularity)
    det_cfg = DetectorConfig(
        theta=args.theta,
        min_tokens=args.min_tokens,
        granularity_mode=mode,
        granularity_range=grange,
    )
    settings = PipelineSettings(
        m_size=args.min_tokens,
        min_tokens=args.min_tokens,
        keyword_filter=args.keyword_filter,
        max_granularity=(
            None if mode is GranularityMode.ALL
            else 0 if mode is GranularityMode.FILE_ONLY
            else grange[1]
        ),
    )
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        probe = args.out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return EXIT_FATAL

    manifest = {
        "toolVersion": __version__,
        "languageId": cfg.language_id,
        "config": {
            "theta": args.theta,
            "minTokens": args.min_tokens,
            "granularity": args.granularity,
            "keywordFilter": args.keyword_filter,
        },
        "files": {"parsed": 0, "degraded": 0, "skipped": 0},
        "interrupted": False,
    }
    timing: dict[str, int] = {}
    t_start = time.monotonic()
    try:
        files = discover_files(args.input, cfg)
        t0 = time.monotonic()
        results = process_files(files, cfg, settings, config_dir, jobs=args.jobs)
        timing["generate"] = int((time.monotonic() - t0) * 1000)

        counts = {PARSED: 0, DEGRADED: 0, SKIPPED: 0}
        for res in results:
            counts[res.status] += 1
        manifest["files"] = {
            "parsed": counts[PARSED],
            "degraded": counts[DEGRADED],
            "skipped": counts[SKIPPED],
        }

        bag_path = args.out / "bags.msb"
        with bag_path.open("w", encoding="utf-8") as sink:
            all_bags = [bag for res in results for bag in res.bags]
            write_bags(all_bags, sink, language_id=cfg.language_id, min_tokens=args.min_tokens)

        t0 = time.monotonic()
        pairs = detect_streaming(bag_path, det_cfg)
        timing["detect"] = int((time.monotonic() - t0) * 1000)

        with (args.out / "report.csv").open("w", encoding="utf-8") as sink:
            write_report(pairs, sink, det_cfg)
    except KeyboardInterrupt:
        manifest["interrupted"] = True
        _write_manifest(args.out, manifest, timing, t_start, args.no_timing)
        return EXIT_INTERRUPTED

    _write_manifest(args.out, manifest, timing, t_start, args.no_timing)
    usable = manifest["files"]["parsed"] + manifest["files"]["degraded"]
    if usable == 0:
        print("no parsable files", file=sys.stderr)
        return EXIT_FATAL
    if manifest["files"]["degraded"] or manifest["files"]["skipped"]:
        return EXIT_PARTIAL
    return EXIT_OK


def _write_manifest(out_dir: Path, manifest: dict, timing: dict, t_start: float, no_timing: bool) -> None:
    if not no_timing:
        timing = dict(timing)
        timing["total"] = int((time.monotonic() - t_start) * 1000)
        manifest = {**manifest, "timingMs": timing}
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def detect_streaming(bag_path: Path, cfg: DetectorConfig) -> list[ClonePair]:
    """Detection over the bag file, one granularity group at a time."""
    granularities: set[int] = set()
    with bag_path.open("r", encoding="utf-8") as source:
        source.readline()
        for line in source:
            fields = line.split("\t", 4)
            if len(fields) >= 4:
                granularities.add(int(fields[3]))
    kept: list[ClonePair] = []
    raw_by_g: dict[int, list[ClonePair]] = {}
    for granularity in sorted(g for g in granularities if cfg.admits(g)):
        group = _read_group(bag_path, granularity, cfg.min_tokens)
        raw = detect_group(group, cfg.theta)
        raw_by_g[granularity] = raw
        if cfg.report_coarsest_only:
            raw = suppress_nested(raw, raw_by_g.get(granularity - 1, []))
        kept.extend(raw)
    return sorted(kept, key=lambda p: p.key)


def _read_group(bag_path: Path, granularity: int, min_tokens: int):
    from io import StringIO

    wanted = f"\t{granularity}\t"
    buf = StringIO()
    with bag_path.open("r", encoding="utf-8") as source:
        buf.write(source.readline())
        for line in source:
            fields = line.split("\t")
            if len(fields) == 6 and int(fields[3]) == granularity:
                buf.write(line)
    buf.seek(0)
    return [bag for bag in read_bags(buf) if bag.size >= min_tokens]


# ---------------------------------------------------------------------------
# languages
# ---------------------------------------------------------------------------


def cmd_languages(args) -> int:
    lang_dir = _lang_dir(args)
    rows = []
    for path in sorted(lang_dir.glob("*.json")):
        try:
            cfg = load_language_config(path)
        except PolycloneError as exc:
            rows.append({"file": path.name, "languageId": None, "status": "INVALID",
                         "detail": str(exc)})
            continue
        try:
            adapter = get_adapter(cfg, lang_dir)
            status = "DEGRADED-ONLY" if cfg.grammar_ref == "lexer" else "OK"
        except AdapterUnavailable as exc:
            status = "UNAVAILABLE"
            adapter = None
        rows.append({
            "file": path.name,
            "languageId": cfg.language_id,
            "extensions": list(cfg.file_extensions),
            "keywords": len(cfg.keywords),
            "grammarRef": cfg.grammar_ref,
            "status": status,
        })
    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
    else:
        for row in rows:
            if row.get("languageId") is None:
                print(f"{row['file']:<20} INVALID  {row['detail']}")
            else:
                exts = ",".join(row["extensions"])
                print(f"{row['languageId']:<12} {exts:<12} {row['status']:<14} "
                      f"{row['grammarRef']} ({row['keywords']} keywords)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def cmd_build_recall(args) -> int:
    cfg, _ = _resolve_language(args)
    match_cfg = MatchConfig()
    problems = (
        [p for p in args.problems.split(",") if p]
        if args.problems
        else list_problems(args.corpus)
    )
    submissions = {
        pid: load_problem_submissions(args.corpus, pid, cfg, match_cfg, cap=args.cap)
        for pid in problems
    }
    clones, histogram, warnings = build_recall_dataset(submissions, problems)

    corpus_out = args.out / "corpus"
    corpus_out.mkdir(parents=True, exist_ok=True)
    for pid in problems:
        for sub in submissions.get(pid, []):
            dest = corpus_out / sub.file
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_text(sub.text, encoding="utf-8")
    with (args.out / "truth.csv").open("w", encoding="utf-8") as sink:
        write_truth(clones, sink)
    summary = {
        "problems": {pid: len(submissions.get(pid, [])) for pid in problems},
        "pairs": len(clones),
        "histogram": histogram,
        "warnings": warnings,
    }
    (args.out / "recall_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"labeled {len(clones)} pairs from {len(problems)} problems")
    for bucket in BUCKETS:
        print(f"  {bucket:>12}: {histogram[bucket]}")
    for warning in warnings:
        print(f"  warning: {warning}")
    return EXIT_OK


def cmd_build_precision(args) -> int:
    cfg, _ = _resolve_language(args)
    match_cfg = MatchConfig()
    problems = list_problems(args.corpus)
    descriptions = {pid: load_description_words(args.corpus, pid) for pid in problems}
    submissions = {
        pid: load_problem_submissions(args.corpus, pid, cfg, match_cfg, cap=args.cap)
        for pid in problems
    }
    pairs, warnings = build_precision_dataset(
        descriptions, submissions, seed=args.seed, pairs_per_group=args.pairs_per_group
    )
    args.out.mkdir(parents=True, exist_ok=True)
    with (args.out / "pairs.csv").open("w", encoding="utf-8") as sink:
        sink.write("group,pidA,pidB,jaccard\n")
        for pair in pairs:
            sink.write(f"{pair.group.value},{pair.pid_a},{pair.pid_b},{pair.jaccard:.4f}\n")
    for pair in pairs:
        materialize_pair(
            pair, submissions, args.out / f"group{pair.group.value}" / pair.slug
        )
    print(f"sampled {len(pairs)} problem pairs (seed={args.seed})")
    for warning in warnings:
        print(f"  warning: {warning}")
    return EXIT_OK


def cmd_score_recall(args) -> int:
    cfg, _ = _resolve_language(args)
    match_cfg = MatchConfig(coverage=args.coverage)
    rows = read_truth(args.truth.open("r", encoding="utf-8"))
    problems = sorted({pid for pid, _, _, _ in rows})
    submissions = {
        pid: {
            sub.submission_id: sub
            for sub in load_problem_submissions(args.corpus, pid, cfg, match_cfg)
        }
        for pid in problems
    }
    truth: list[LabeledClone] = []
    for pid, left, right, simi in rows:
        subs = submissions.get(pid, {})
        if left in subs and right in subs:
            truth.append(LabeledClone(subs[left], subs[right], simi))
    report = read_report(args.report.open("r", encoding="utf-8"))
    score = match_clones(report, truth, match_cfg)

    payload = {
        bucket: {
            "detected": score.detected[bucket],
            "total": score.total[bucket],
            "recall": score.recall(bucket),
        }
        for bucket in BUCKETS
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("bucket          %      #detected   #truth")
        for bucket in BUCKETS:
            rec = score.recall(bucket)
            pct = "-" if rec is None else f"{100 * rec:5.1f}"
            print(f"{bucket:>12}  {pct:>6}   {score.detected[bucket]:>8}   {score.total[bucket]:>6}")
    return EXIT_OK


def cmd_score_precision(args) -> int:
    pairs_file = args.dataset / "pairs.csv"
    reports: dict[ProblemPair, list[ClonePair]] = {}
    with pairs_file.open("r", encoding="utf-8") as source:
        header = source.readline()
        if not header.startswith("group,"):
            raise PolycloneError(f"bad pairs.csv header in {pairs_file}")
        for line in source:
            line = line.strip()
            if not line:
                continue
            group_s, pid_a, pid_b, jacc = line.split(",")
            pair = ProblemPair(pid_a, pid_b, float(jacc), PairGroup(group_s))
            report_path = args.runs / f"group{group_s}" / pair.slug / "report.csv"
            if report_path.is_file():
                reports[pair] = read_report(report_path.open("r", encoding="utf-8"))
            else:
                reports[pair] = []
    from .benchmark import score_precision

    scores = score_precision(reports)
    payload = {
        group.value: {
            "precision": gs.precision,
            "median": gs.median,
            "pairsScored": gs.pairs_scored,
            "zeroReportPairs": gs.zero_report_pairs,
        }
        for group, gs in scores.items()
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("group   precision   median   pairs   zero-report")
        for group in PairGroup:
            gs = scores[group]
            prec = "-" if gs.precision is None else f"{100 * gs.precision:5.1f}%"
            med = "-" if gs.median is None else f"{100 * gs.median:5.1f}%"
            print(f"{group.value:>5}   {prec:>9}   {med:>6}   {gs.pairs_scored:>5}   "
                  f"{len(gs.zero_report_pairs)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
