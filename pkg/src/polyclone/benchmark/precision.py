"""Precision dataset: problem pairs grouped by description similarity."""

from __future__ import annotations

import enum
import logging
import random
import statistics
from dataclasses import dataclass
from pathlib import Path

from ..detector import ClonePair
from .corpus import Submission, jaccard

log = logging.getLogger(__name__)


class PairGroup(enum.Enum):
    I = "I"
    II = "II"
    III = "III"


GROUP_BOUNDS = {
    PairGroup.I: (0.0, 0.3),
    PairGroup.II: (0.3, 0.6),
    PairGroup.III: (0.6, 0.9),
}


def group_of(sigma: float) -> PairGroup | None:
    if 0.0 <= sigma < 0.3:
        return PairGroup.I
    if sigma < 0.6:
        return PairGroup.II
    if sigma < 0.9:
        return PairGroup.III
    return None


@dataclass(frozen=True)
class ProblemPair:
    pid_a: str
    pid_b: str
    jaccard: float
    group: PairGroup

    @property
    def slug(self) -> str:
        return f"{self.pid_a}__{self.pid_b}"


def build_precision_dataset(
    descriptions: dict[str, set[str]],
    submissions: dict[str, list[Submission]],
    seed: int,
    pairs_per_group: int = 30,
    max_length_diff: float = 0.3,
) -> tuple[list[ProblemPair], list[str]]:
    """Sample non-overlapping problem pairs per similarity group.

    Candidates need both descriptions, both submission sets, and mean code
    lengths within ``max_length_diff`` of each other. Sampling is driven
    entirely by the seed; identical inputs and seed reproduce the result.
    """
    warnings: list[str] = []
    mean_lines = {
        pid: statistics.fmean(s.line_count for s in subs)
        for pid, subs in submissions.items()
        if subs
    }
    pids = sorted(p for p in descriptions if descriptions[p] and p in mean_lines)
    by_group: dict[PairGroup, list[ProblemPair]] = {g: [] for g in PairGroup}
    for i, pid_a in enumerate(pids):
        for pid_b in pids[i + 1 :]:
            la, lb = mean_lines[pid_a], mean_lines[pid_b]
            if abs(la - lb) / max(la, lb) > max_length_diff:
                continue
            sigma = jaccard(descriptions[pid_a], descriptions[pid_b])
            group = group_of(sigma)
            if group is None:
                continue
            by_group[group].append(ProblemPair(pid_a, pid_b, sigma, group))

    rng = random.Random(seed)
    chosen: list[ProblemPair] = []
    for group in PairGroup:
        candidates = by_group[group]
        rng.shuffle(candidates)
        used: set[str] = set()
        picked: list[ProblemPair] = []
        for pair in candidates:
            if len(picked) >= pairs_per_group:
                break
            if pair.pid_a in used or pair.pid_b in used:
                continue
            picked.append(pair)
            used.add(pair.pid_a)
            used.add(pair.pid_b)
        if len(picked) < pairs_per_group:
            warnings.append(
                f"group {group.value}: only {len(picked)}/{pairs_per_group} pairs available"
            )
            log.warning("%s", warnings[-1])
        chosen.extend(sorted(picked, key=lambda p: (p.pid_a, p.pid_b)))
    return chosen, warnings


def materialize_pair(pair: ProblemPair, submissions: dict[str, list[Submission]], out_dir: Path) -> None:
    """Write both problems' submissions into one detection folder.

    File names carry the problem id (``<pid>__<sid><ext>``) so that scoring
    can attribute reported segments to problems.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    for pid in (pair.pid_a, pair.pid_b):
        for sub in submissions[pid]:
            ext = Path(sub.file).suffix
            (out_dir / f"{pid}__{sub.submission_id}{ext}").write_text(
                sub.text, encoding="utf-8"
            )


def problem_of_segment_file(file: str) -> str | None:
    name = Path(file).name
    pid, sep, _ = name.partition("__")
    return pid if sep else None


@dataclass
class PairScore:
    pair: ProblemPair
    true_positives: int
    false_positives: int

    @property
    def reported(self) -> int:
        return self.true_positives + self.false_positives

    @property
    def precision(self) -> float | None:
        return None if self.reported == 0 else self.true_positives / self.reported


@dataclass
class GroupScore:
    precision: float | None
    median: float | None
    pairs_scored: int
    zero_report_pairs: list[str]


def score_precision(
    reports: dict[ProblemPair, list[ClonePair]],
) -> dict[PairGroup, GroupScore]:
    """Aggregate + median per-group precision from per-pair reports.

    True positive: both reported segments come from submissions of the same
    problem. Pairs with no reports are flagged and contribute nothing.
    """
    scores: dict[PairGroup, list[PairScore]] = {g: [] for g in PairGroup}
    for pair, pairs in reports.items():
        tp = fp = 0
        for reported in pairs:
            pa = problem_of_segment_file(reported.left.file)
            pb = problem_of_segment_file(reported.right.file)
            if pa is None or pb is None:
                continue
            if pa == pb:
                tp += 1
            else:
                fp += 1
        scores[pair.group].append(PairScore(pair, tp, fp))

    out: dict[PairGroup, GroupScore] = {}
    for group, pair_scores in scores.items():
        with_reports = [s for s in pair_scores if s.reported > 0]
        tp_sum = sum(s.true_positives for s in with_reports)
        all_sum = sum(s.reported for s in with_reports)
        out[group] = GroupScore(
            precision=tp_sum / all_sum if all_sum else None,
            median=(
                statistics.median(s.precision for s in with_reports)
                if with_reports
                else None
            ),
            pairs_scored=len(with_reports),
            zero_report_pairs=sorted(
                s.pair.slug for s in pair_scores if s.reported == 0
            ),
        )
    return out
