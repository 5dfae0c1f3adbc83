"""Token-bag extraction and the persisted bag-file format.

A bag is the multiset of keyword/identifier/literal tokens under one SPT
node, keyed by the segment quaternion (file, start line, end line,
granularity). The keyword filter, when active, admits only nodes having a
child whose leaf tokens are all keywords.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .errors import CorruptBagFile, EmptyAfterFiltering
from .frontend.tokens import RETAINED, Token
from .spt import SptNode

BAG_FILE_VERSION = "MSB1"


@dataclass(frozen=True, slots=True)
class CodeSegment:
    file: str
    start_line: int
    end_line: int
    granularity: int

    def __post_init__(self) -> None:
        if not (1 <= self.start_line <= self.end_line):
            raise ValueError("need 1 <= start_line <= end_line")
        if self.granularity < 0:
            raise ValueError("granularity must be >= 0")

    def contains(self, other: "CodeSegment") -> bool:
        return (
            self.file == other.file
            and self.start_line <= other.start_line
            and other.end_line <= self.end_line
        )


@dataclass(slots=True)
class TokenBag:
    segment: CodeSegment
    counts: dict[str, int]
    size: int

    @classmethod
    def build(cls, segment: CodeSegment, texts) -> "TokenBag":
        counts: dict[str, int] = {}
        size = 0
        for text in texts:
            counts[text] = counts.get(text, 0) + 1
            size += 1
        return cls(segment, counts, size)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TokenBag)
            and self.segment == other.segment
            and self.counts == other.counts
            and self.size == other.size
        )


def bag_from_tokens(tokens: list[Token], file_id: str) -> TokenBag:
    """Whole-file bag over all retained tokens (granularity 0)."""
    retained = [t.text for t in tokens if t.category in RETAINED]
    if not retained:
        raise EmptyAfterFiltering(f"{file_id}: no keyword/identifier/literal tokens")
    segment = CodeSegment(file_id, 1, max(t.line for t in tokens), 0)
    return TokenBag.build(segment, retained)


def keywords_filter(node: SptNode, keywords: frozenset[str] | set[str], tokens: list[Token]) -> bool:
    """True iff some child's leaf tokens are non-empty and all keywords.

    Children are the merged node's original parse-tree children, so pruned
    keyword leaves (an `if`, a `while`) stay visible to the filter.
    """
    for start, end in node.child_spans:
        flag = 0
        for i in range(start, end):
            flag |= 1 if tokens[i].text in keywords else 3
        if flag == 1:
            return True
    return False


def generate_bags(
    root: SptNode,
    tokens: list[Token],
    file_id: str,
    keywords: frozenset[str] | None = None,
    min_tokens: int = 1,
    max_granularity: int | None = None,
) -> list[TokenBag]:
    """Extract bags for SPT nodes, most-significant first (pre-order).

    Error-recovery nodes never produce bags of their own (their tokens still
    count toward ancestors). A file_level_only root yields nothing; such
    files participate through the file-level bag instead.
    """
    if root.file_level_only:
        return []
    texts = [t.text for t in tokens]
    retained = [t.category in RETAINED for t in tokens]
    bags: list[TokenBag] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if max_granularity is None or node.granularity < max_granularity:
            stack.extend(reversed(node.children))
        if node.is_error:
            continue
        if keywords is not None and not keywords_filter(node, keywords, tokens):
            continue
        bag_texts = [texts[i] for i in range(node.start, node.end) if retained[i]]
        if len(bag_texts) < min_tokens:
            continue
        segment = CodeSegment(file_id, node.start_line, node.end_line, node.granularity)
        bags.append(TokenBag.build(segment, bag_texts))
    return bags


# ---------------------------------------------------------------------------
# Bag file format (versioned, line oriented):
#   MSB1 <languageId> <minTokens>
#   file<TAB>s<TAB>e<TAB>g<TAB>size<TAB>tok=count,tok=count,...
# Token texts are percent-encoded for the separator characters.
# ---------------------------------------------------------------------------

_ENCODE = {
    "%": "%25",
    "\t": "%09",
    "\n": "%0A",
    "\r": "%0D",
    ",": "%2C",
    "=": "%3D",
}


def _encode_text(text: str) -> str:
    if any(ch in _ENCODE for ch in text):
        for ch, repl in _ENCODE.items():
            text = text.replace(ch, repl)
    return text


def _decode_text(text: str) -> str:
    if "%" not in text:
        return text
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "%":
            code = text[i + 1 : i + 3]
            if len(code) != 2:
                raise CorruptBagFile(f"bad percent escape in {text!r}")
            try:
                out.append(chr(int(code, 16)))
            except ValueError as exc:
                raise CorruptBagFile(f"bad percent escape in {text!r}") from exc
            i += 3
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def write_bags(
    bags: list[TokenBag],
    sink: io.TextIOBase,
    language_id: str = "?",
    min_tokens: int = 1,
) -> None:
    sink.write(f"{BAG_FILE_VERSION} {language_id} {min_tokens}\n")
    for bag in bags:
        seg = bag.segment
        pairs = ",".join(
            f"{_encode_text(text)}={count}" for text, count in sorted(bag.counts.items())
        )
        sink.write(
            f"{_encode_text(seg.file)}\t{seg.start_line}\t{seg.end_line}\t"
            f"{seg.granularity}\t{bag.size}\t{pairs}\n"
        )


def read_bags(source: io.TextIOBase) -> list[TokenBag]:
    header = source.readline()
    parts = header.split()
    if len(parts) != 3 or parts[0] != BAG_FILE_VERSION:
        raise CorruptBagFile(f"bad header {header!r}")
    bags: list[TokenBag] = []
    for line_no, line in enumerate(source, start=2):
        line = line.rstrip("\n")
        if not line:
            continue
        bags.append(_parse_record(line, line_no))
    return bags


def _parse_record(line: str, line_no: int) -> TokenBag:
    fields = line.split("\t")
    if len(fields) != 6:
        raise CorruptBagFile(f"line {line_no}: expected 6 fields, got {len(fields)}")
    file_enc, s, e, g, size, pairs = fields
    try:
        segment = CodeSegment(_decode_text(file_enc), int(s), int(e), int(g))
        declared = int(size)
    except ValueError as exc:
        raise CorruptBagFile(f"line {line_no}: {exc}") from exc
    counts: dict[str, int] = {}
    total = 0
    if pairs:
        for pair in pairs.split(","):
            text, sep, count_s = pair.rpartition("=")
            if not sep:
                raise CorruptBagFile(f"line {line_no}: bad pair {pair!r}")
            try:
                count = int(count_s)
            except ValueError as exc:
                raise CorruptBagFile(f"line {line_no}: bad count {count_s!r}") from exc
            if count <= 0:
                raise CorruptBagFile(f"line {line_no}: non-positive count")
            counts[_decode_text(text)] = count
            total += count
    if total != declared or not counts:
        raise CorruptBagFile(f"line {line_no}: truncated or inconsistent record")
    return TokenBag(segment, counts, declared)
