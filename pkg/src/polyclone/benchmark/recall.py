"""Recall dataset construction and the line-coverage clone matcher."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass

from ..detector import ClonePair
from ..tokenbag import CodeSegment
from .corpus import MatchConfig, Submission
from .levenshtein import lev_simi

log = logging.getLogger(__name__)

# Similarity buckets at 0.20 intervals; pairs under 0.20 are excluded.
BUCKETS = ("[0.20,0.39]", "[0.40,0.59]", "[0.60,0.79]", "[0.80,0.99]", "1.0")


def bucket_of(simi: float) -> str | None:
    cents = int(simi * 100 + 1e-9)
    if cents >= 100:
        return BUCKETS[4]
    if cents >= 80:
        return BUCKETS[3]
    if cents >= 60:
        return BUCKETS[2]
    if cents >= 40:
        return BUCKETS[1]
    if cents >= 20:
        return BUCKETS[0]
    return None


@dataclass
class LabeledClone:
    left: Submission
    right: Submission
    lev_simi: float

    @property
    def bucket(self) -> str | None:
        return bucket_of(self.lev_simi)


def build_recall_dataset(
    problems: dict[str, list[Submission]],
    selection: list[str] | None = None,
) -> tuple[list[LabeledClone], dict[str, int], list[str]]:
    """Label every intra-problem pair with its normalized edit similarity.

    Returns (clones, bucket histogram, warnings). Problems with fewer than
    two qualifying submissions are skipped with a warning.
    """
    warnings: list[str] = []
    clones: list[LabeledClone] = []
    histogram = {name: 0 for name in BUCKETS}
    for pid in selection if selection is not None else sorted(problems):
        subs = problems.get(pid, [])
        if len(subs) < 2:
            warnings.append(f"{pid}: fewer than 2 qualifying submissions, skipped")
            log.warning("%s", warnings[-1])
            continue
        subs = sorted(subs, key=lambda s: s.submission_id)
        for i in range(len(subs)):
            for j in range(i + 1, len(subs)):
                simi = lev_simi(subs[i].token_seq, subs[j].token_seq)
                bucket = bucket_of(simi)
                if bucket is None:
                    continue
                clones.append(LabeledClone(subs[i], subs[j], simi))
                histogram[bucket] += 1
    return clones, histogram, warnings


def write_truth(clones: list[LabeledClone], sink: io.TextIOBase) -> None:
    sink.write("problemId,leftSubmission,rightSubmission,levSimi\n")
    for clone in clones:
        sink.write(
            f"{clone.left.problem_id},{clone.left.submission_id},"
            f"{clone.right.submission_id},{clone.lev_simi:.4f}\n"
        )


def read_truth(source: io.TextIOBase) -> list[tuple[str, str, str, float]]:
    rows: list[tuple[str, str, str, float]] = []
    header = source.readline()
    if not header.startswith("problemId,"):
        raise ValueError(f"bad truth header: {header!r}")
    for line in source:
        line = line.strip()
        if not line:
            continue
        pid, left, right, simi = line.split(",")
        rows.append((pid, left, right, float(simi)))
    return rows


# ---------------------------------------------------------------------------
# Clone matcher
# ---------------------------------------------------------------------------


def _covers(seg: CodeSegment, file: str, total_lines: int, coverage: float) -> bool:
    if seg.file != file or total_lines <= 0:
        return False
    covered = min(seg.end_line, total_lines) - seg.start_line + 1
    return covered / total_lines >= coverage


def pair_matches(pair: ClonePair, truth: LabeledClone, cfg: MatchConfig) -> bool:
    """Line coverage on both sides, in either orientation."""
    lf, ln = truth.left.file, truth.left.line_count
    rf, rn = truth.right.file, truth.right.line_count
    return (
        _covers(pair.left, lf, ln, cfg.coverage)
        and _covers(pair.right, rf, rn, cfg.coverage)
    ) or (
        _covers(pair.left, rf, rn, cfg.coverage)
        and _covers(pair.right, lf, ln, cfg.coverage)
    )


@dataclass
class RecallScore:
    detected: dict[str, int]
    total: dict[str, int]

    def recall(self, bucket: str) -> float | None:
        total = self.total.get(bucket, 0)
        if total == 0:
            return None
        return self.detected.get(bucket, 0) / total


def match_clones(
    report: list[ClonePair], truth: list[LabeledClone], cfg: MatchConfig
) -> RecallScore:
    """Score a detector report against labeled truth, per bucket.

    A truth pair counts as detected when some reported pair covers at least
    the coverage fraction of both files' lines. Truth pairs whose
    submissions miss the token/line minimums leave the denominator.
    """
    by_file: dict[str, list[ClonePair]] = {}
    for pair in report:
        by_file.setdefault(pair.left.file, []).append(pair)
        if pair.right.file != pair.left.file:
            by_file.setdefault(pair.right.file, []).append(pair)

    detected = {name: 0 for name in BUCKETS}
    total = {name: 0 for name in BUCKETS}
    for clone in truth:
        if not _meets_minimums(clone, cfg):
            continue
        bucket = clone.bucket
        if bucket is None:
            continue
        total[bucket] += 1
        candidates = by_file.get(clone.left.file, [])
        if any(pair_matches(pair, clone, cfg) for pair in candidates):
            detected[bucket] += 1
    return RecallScore(detected, total)


def _meets_minimums(clone: LabeledClone, cfg: MatchConfig) -> bool:
    return all(
        len(sub.token_seq) >= cfg.min_tokens and sub.line_count >= cfg.min_lines
        for sub in (clone.left, clone.right)
    )
