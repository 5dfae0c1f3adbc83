"""Online-judge corpus ingestion (CodeNet-style layout).

Layout: <root>/<problemId>/<language>/<submissionId>.<ext> plus
<root>/problem_descriptions/<problemId>.html|txt. Submissions are
preprocessed on load; token sequences are identifier-normalized.
"""

from __future__ import annotations

import html as html_mod
import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import LexFailure
from ..frontend import LanguageConfig, get_adapter, preprocess, read_source
from .levenshtein import normalize_seq

DESCRIPTIONS_DIR = "problem_descriptions"

# Section titles dropped from descriptions before Jaccard comparison.
_EXCLUDED_HEADINGS = ("constraint", "input", "output", "sample", "example")
_HEADING_WORDS = _EXCLUDED_HEADINGS + ("problem", "statement", "description", "note", "score", "hint")
_HEADING_MARK = "@@section@@"
_WORD_RE = re.compile(r"[0-9a-z]+")


@dataclass
class Submission:
    problem_id: str
    submission_id: str
    file: str  # corpus-relative posix path
    token_seq: list[str]
    line_count: int
    text: str  # preprocessed source


@dataclass(frozen=True)
class MatchConfig:
    coverage: float = 0.7
    min_tokens: int = 20
    min_lines: int = 6

    def __post_init__(self) -> None:
        if not (0.0 < self.coverage <= 1.0):
            raise ValueError("coverage must be in (0, 1]")


def load_problem_submissions(
    root: Path,
    problem_id: str,
    cfg: LanguageConfig,
    match_cfg: MatchConfig,
    cap: int = 300,
) -> list[Submission]:
    """Accepted submissions of one problem that meet the size minimums.

    Deterministic: files are taken in sorted order, capped at ``cap``.
    """
    lang_dir = root / problem_id / cfg.language_id
    if not lang_dir.is_dir():
        return []
    adapter = get_adapter(cfg)
    out: list[Submission] = []
    for path in sorted(lang_dir.iterdir()):
        if path.suffix.lower() not in cfg.file_extensions:
            continue
        try:
            raw = read_source(path)
        except LexFailure:
            continue
        text = preprocess(raw, cfg)
        tokens = adapter.lex(text)
        line_count = len(text.splitlines())
        if len(tokens) < match_cfg.min_tokens or line_count < match_cfg.min_lines:
            continue
        out.append(
            Submission(
                problem_id=problem_id,
                submission_id=path.stem,
                file=f"{problem_id}/{path.name}",
                token_seq=normalize_seq(tokens),
                line_count=line_count,
                text=text,
            )
        )
        if len(out) >= cap:
            break
    return out


def list_problems(root: Path) -> list[str]:
    return sorted(
        p.name for p in root.iterdir() if p.is_dir() and p.name != DESCRIPTIONS_DIR
    )


# ---------------------------------------------------------------------------
# Problem descriptions
# ---------------------------------------------------------------------------


def load_description_words(root: Path, problem_id: str) -> set[str]:
    """Word set of the trimmed problem statement (empty set when missing)."""
    base = root / DESCRIPTIONS_DIR
    for ext, is_html in ((".html", True), (".txt", False)):
        path = base / f"{problem_id}{ext}"
        if path.is_file():
            return description_words(path.read_text(encoding="utf-8", errors="replace"), is_html)
    return set()


def description_words(text: str, is_html: bool) -> set[str]:
    if is_html:
        text = _html_to_text(text)
    kept: list[str] = []
    excluded_section = False
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        heading = _heading_title(stripped)
        if heading is not None:
            excluded_section = heading.startswith(_EXCLUDED_HEADINGS)
            continue
        if not excluded_section:
            kept.append(stripped)
    return set(_WORD_RE.findall(" ".join(kept).lower()))


def _heading_title(line: str) -> str | None:
    if line.startswith(_HEADING_MARK):
        return line[len(_HEADING_MARK):].strip().lower()
    # Plain-text headings: a short line made of a known section word plus
    # optional numbering/punctuation ("Input", "Sample Output 2:").
    words = line.rstrip(":").split()
    if 0 < len(words) <= 4:
        lowered = " ".join(words).lower()
        if lowered.startswith(_HEADING_WORDS):
            compact = re.sub(r"[\d\s:]+$", "", lowered)
            if all(w.isalpha() for w in compact.split()):
                return lowered
    return None


_TAG_SCRIPT_RE = re.compile(r"(?is)<(script|style)\b.*?</\1>")
_TAG_HEADING_RE = re.compile(r"(?is)<h[1-6][^>]*>")
_TAG_BREAK_RE = re.compile(r"(?is)<(?:br|/p|/div|/h[1-6]|/li|/tr)[^>]*>")
_TAG_RE = re.compile(r"(?s)<[^>]+>")


def _html_to_text(markup: str) -> str:
    text = _TAG_SCRIPT_RE.sub(" ", markup)
    text = _TAG_HEADING_RE.sub("\n" + _HEADING_MARK, text)
    text = _TAG_BREAK_RE.sub("\n", text)
    text = _TAG_RE.sub(" ", text)
    return html_mod.unescape(text)


def jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 0.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0
