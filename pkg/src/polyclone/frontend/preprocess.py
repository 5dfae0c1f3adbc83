"""Source preprocessing: comment removal and blank-line collapsing.

Comments are stripped before lexing for both the detection pipeline and the
benchmark corpus, so grammars never need skip rules for them. String literals
protect comment delimiters; delimiters of length >= 3 (triple quotes) may span
lines, shorter ones end at the first unescaped delimiter or end of line.
"""

from __future__ import annotations

from .config import CommentStripping, LanguageConfig


def preprocess(source: str, cfg: LanguageConfig, warnings: list[str] | None = None) -> str:
    """Strip comments and collapse runs of >= 2 blank lines to one.

    A line that still holds code after comment removal keeps its newline
    (right-trimmed); a line reduced to nothing disappears entirely. All
    characters outside comments are preserved. Idempotent.
    """
    rules = cfg.comment_stripping
    text = source
    # Splicing comments out can, in pathological inputs, juxtapose characters
    # into a new comment opener; iterate to a fixed point so the result is
    # stable under re-preprocessing.
    lines = [source]
    for _ in range(8):
        lines = _strip_comments(text, rules, warnings)
        stripped = "\n".join(lines)
        if stripped == text:
            break
        text = stripped
    # Collapse over logical lines: an entry holding a multi-line string is a
    # single non-blank line, so string-internal blank lines are untouched.
    return _collapse_blanks(lines)


def _strip_comments(
    text: str, rules: CommentStripping, warnings: list[str] | None
) -> list[str]:
    out_lines: list[str] = []
    buf: list[str] = []
    removed = False
    line_no = 1
    i = 0
    n = len(text)

    def flush() -> None:
        nonlocal removed
        s = "".join(buf)
        if removed:
            s = s.rstrip()
            if s:
                out_lines.append(s)
        else:
            out_lines.append(s)
        buf.clear()
        removed = False

    while i < n:
        ch = text[i]
        if ch == "\n":
            flush()
            line_no += 1
            i += 1
            continue

        delim = _match_any(text, i, rules.string_delimiters)
        if delim is not None:
            j = _scan_string(text, i, delim)
            seg = text[i:j]
            buf.append(seg)
            line_no += seg.count("\n")
            i = j
            continue

        prefix = _match_any(text, i, rules.line_comments)
        if prefix is not None:
            removed = True
            nl = text.find("\n", i)
            i = n if nl == -1 else nl
            continue

        pair = _match_block_open(text, i, rules.block_comments)
        if pair is not None:
            opener, closer = pair
            removed = True
            close_at = text.find(closer, i + len(opener))
            if close_at == -1:
                if warnings is not None:
                    warnings.append(
                        f"unterminated block comment at line {line_no}; stripped to end of file"
                    )
                end = n
            else:
                end = close_at + len(closer)
            skipped = text[i:end]
            if "\n" in skipped:
                flush()
                removed = True  # the closing line was touched too
                line_no += skipped.count("\n")
            i = end
            continue

        buf.append(ch)
        i += 1

    flush()
    return out_lines


def _collapse_blanks(lines: list[str]) -> str:
    out: list[str] = []
    run: list[str] = []

    def close_run() -> None:
        if len(run) == 1:
            out.append(run[0])
        elif len(run) >= 2:
            out.append("")
        run.clear()

    for line in lines:
        if not line.strip():
            run.append(line)
        else:
            close_run()
            out.append(line)
    close_run()
    return "\n".join(out)


def _match_any(text: str, i: int, candidates: tuple[str, ...]) -> str | None:
    for cand in candidates:
        if text.startswith(cand, i):
            return cand
    return None


def _match_block_open(
    text: str, i: int, pairs: tuple[tuple[str, str], ...]
) -> tuple[str, str] | None:
    for opener, closer in pairs:
        if text.startswith(opener, i):
            return (opener, closer)
    return None


def _scan_string(text: str, i: int, delim: str) -> int:
    """Return the index just past the string starting at ``i``.

    Backslash escapes the next character. Delimiters shorter than 3 chars do
    not cross line boundaries; an unterminated string ends at EOL/EOF.
    """
    multiline = len(delim) >= 3
    j = i + len(delim)
    n = len(text)
    while j < n:
        ch = text[j]
        if ch == "\\":
            j += 2
            continue
        if not multiline and ch == "\n":
            return j
        if text.startswith(delim, j):
            return j + len(delim)
        j += 1
    return n
