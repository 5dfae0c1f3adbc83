"""Overlap-similarity clone detection over token bags.

Bags are compared only within one granularity group. Candidate pairs come
from a prefix inverted index (rarest-token-first global order, prefix length
ceil((1-theta)*size)+1); every candidate is then verified with the exact
multiset-overlap similarity, so filtering can drop no true pair. Reported
pairs at granularity g+1 nested on both sides inside a reported pair at
granularity g are suppressed (coarsest-only reporting).
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field

from .tokenbag import CodeSegment, TokenBag

REPORT_VERSION = "polyclone v1"


class GranularityMode(enum.Enum):
    FILE_ONLY = "file"
    RANGE = "range"
    ALL = "all"


@dataclass(frozen=True)
class DetectorConfig:
    theta: float = 0.7
    min_tokens: int = 20
    granularity_mode: GranularityMode = GranularityMode.RANGE
    granularity_range: tuple[int, int] = (0, 4)
    report_coarsest_only: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.theta <= 1.0):
            raise ValueError("theta must be in (0, 1]")
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be >= 1")

    def admits(self, granularity: int) -> bool:
        if self.granularity_mode is GranularityMode.FILE_ONLY:
            return granularity == 0
        if self.granularity_mode is GranularityMode.RANGE:
            lo, hi = self.granularity_range
            return lo <= granularity <= hi
        return True


@dataclass(frozen=True)
class ClonePair:
    left: CodeSegment
    right: CodeSegment
    similarity: float
    granularity: int

    @property
    def key(self):
        return (
            self.left.file, self.left.start_line, self.left.end_line,
            self.right.file, self.right.start_line, self.right.end_line,
            self.granularity,
        )


def overlap_similarity(a: TokenBag, b: TokenBag) -> float:
    """|a ∩ b| / max(|a|, |b|) with multiset intersection."""
    if a.size < 1 or b.size < 1:
        raise ValueError("bags must be non-empty")
    small, large = (a.counts, b.counts) if a.size <= b.size else (b.counts, a.counts)
    shared = 0
    for text, count in small.items():
        other = large.get(text)
        if other is not None:
            shared += count if count < other else other
    return shared / max(a.size, b.size)


def _segment_key(seg: CodeSegment):
    return (seg.file, seg.start_line, seg.end_line)


def make_pair(a: TokenBag, b: TokenBag, similarity: float) -> ClonePair:
    left, right = a.segment, b.segment
    if _segment_key(right) < _segment_key(left):
        left, right = right, left
    return ClonePair(left, right, similarity, left.granularity)


# ---------------------------------------------------------------------------
# Prefix-filtered candidate index
# ---------------------------------------------------------------------------


def prefix_length(size: int, theta: float) -> int:
    """Number of leading tokens (global order) that must be indexed."""
    return min(size, math.ceil((1.0 - theta) * size) + 1)


class CandidateIndex:
    """Inverted index over bag prefixes for one granularity group.

    A bag whose overlap with a probe reaches theta must share a token with
    the probe inside the indexed bag's prefix, so probing with all of the
    probe's distinct tokens returns a superset of the true matches.
    """

    def __init__(self, bags: list[TokenBag], theta: float):
        self.bags = bags
        self.theta = theta
        order: dict[str, int] = {}
        freq: dict[str, int] = {}
        for bag in bags:
            for text, count in bag.counts.items():
                freq[text] = freq.get(text, 0) + count
        # Rarest first; ties resolved lexicographically for determinism.
        for rank, text in enumerate(sorted(freq, key=lambda t: (freq[t], t))):
            order[text] = rank
        self._order = order
        self._postings: dict[str, list[int]] = {}
        for idx, bag in enumerate(bags):
            for text in self._prefix(bag):
                self._postings.setdefault(text, []).append(idx)

    def _prefix(self, bag: TokenBag) -> set[str]:
        length = prefix_length(bag.size, self.theta)
        taken = 0
        chosen: set[str] = set()
        for text in sorted(bag.counts, key=self._order.__getitem__):
            chosen.add(text)
            taken += bag.counts[text]
            if taken >= length:
                break
        return chosen

    def probe(self, bag: TokenBag) -> list[int]:
        """Indices of candidate partners (superset of all true matches)."""
        seen: set[int] = set()
        postings = self._postings
        for text in bag.counts:
            hits = postings.get(text)
            if hits:
                seen.update(hits)
        return sorted(seen)


def build_candidate_index(bags: list[TokenBag], theta: float) -> CandidateIndex:
    return CandidateIndex(bags, theta)


# ---------------------------------------------------------------------------
# Detection
# ---------------------------------------------------------------------------


def detect(bags: list[TokenBag], cfg: DetectorConfig) -> list[ClonePair]:
    """All same-granularity pairs with similarity >= theta, coarsest first.

    Intra-file pairs are allowed; a bag never pairs with itself. Output
    order is deterministic (canonical pair key).
    """
    groups: dict[int, list[TokenBag]] = {}
    for bag in bags:
        if bag.size >= cfg.min_tokens and cfg.admits(bag.segment.granularity):
            groups.setdefault(bag.segment.granularity, []).append(bag)

    kept: list[ClonePair] = []
    raw_by_g: dict[int, list[ClonePair]] = {}
    for granularity in sorted(groups):
        raw = detect_group(groups[granularity], cfg.theta)
        raw_by_g[granularity] = raw
        if cfg.report_coarsest_only:
            # A pair dies to any detected pair one granularity coarser,
            # whether or not that pair itself survived suppression.
            raw = suppress_nested(raw, raw_by_g.get(granularity - 1, []))
        kept.extend(raw)
    return sorted(kept, key=lambda p: p.key)


def detect_group(bags: list[TokenBag], theta: float) -> list[ClonePair]:
    """Exhaustive theta-matches within one granularity group."""
    pairs: list[ClonePair] = []
    if len(bags) < 2:
        return pairs
    index = CandidateIndex(bags, theta)
    emitted: set[tuple[int, int]] = set()
    for i, bag in enumerate(bags):
        for j in index.probe(bag):
            if j == i:
                continue
            key = (i, j) if i < j else (j, i)
            if key in emitted:
                continue
            emitted.add(key)
            other = bags[j]
            if bag.segment == other.segment:
                continue
            sim = overlap_similarity(bag, other)
            if sim >= theta:
                pairs.append(make_pair(bag, other, sim))
    return sorted(pairs, key=lambda p: p.key)


def suppress_nested(pairs: list[ClonePair], reported_coarser: list[ClonePair]) -> list[ClonePair]:
    """Drop pairs nested (both sides, either orientation) in a coarser report."""
    if not reported_coarser:
        return pairs
    by_file: dict[tuple[str, str], list[ClonePair]] = {}
    for parent in reported_coarser:
        by_file.setdefault((parent.left.file, parent.right.file), []).append(parent)
    kept: list[ClonePair] = []
    for pair in pairs:
        parents = by_file.get((pair.left.file, pair.right.file), []) + (
            by_file.get((pair.right.file, pair.left.file), [])
            if pair.left.file != pair.right.file
            else []
        )
        suppressed = False
        for parent in parents:
            if (
                parent.left.contains(pair.left)
                and parent.right.contains(pair.right)
            ) or (
                parent.left.contains(pair.right)
                and parent.right.contains(pair.left)
            ):
                suppressed = True
                break
        if not suppressed:
            kept.append(pair)
    return kept


# ---------------------------------------------------------------------------
# Clone report CSV
# ---------------------------------------------------------------------------


def write_report(pairs: list[ClonePair], sink: io.TextIOBase, cfg: DetectorConfig) -> None:
    sink.write(f"#{REPORT_VERSION} theta={cfg.theta} minTokens={cfg.min_tokens}\n")
    for p in pairs:
        sink.write(
            f"{p.left.file},{p.left.start_line},{p.left.end_line},"
            f"{p.right.file},{p.right.start_line},{p.right.end_line},"
            f"{p.granularity},{p.similarity:.4f}\n"
        )


def read_report(source: io.TextIOBase) -> list[ClonePair]:
    pairs: list[ClonePair] = []
    first = True
    for line in source:
        line = line.strip()
        if not line:
            continue
        if first and line.startswith("#"):
            first = False
            continue
        first = False
        lf, ls, le, rf, rs, re_, g, sim = line.split(",")
        granularity = int(g)
        pairs.append(
            ClonePair(
                CodeSegment(lf, int(ls), int(le), granularity),
                CodeSegment(rf, int(rs), int(re_), granularity),
                float(sim),
                granularity,
            )
        )
    return pairs
