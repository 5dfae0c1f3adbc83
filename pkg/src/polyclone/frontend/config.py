"""Language configuration files: one structured-text (JSON) file per language."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import EmptyExtensionList, MalformedConfig, MissingField

REQUIRED_KEYS = {
    "languageId",
    "grammarRef",
    "keywords",
    "fileExtensions",
    "commentStripping",
}
STRIPPING_KEYS = {"lineComment", "blockComment", "stringDelimiters"}


@dataclass(frozen=True)
class CommentStripping:
    line_comments: tuple[str, ...]
    block_comments: tuple[tuple[str, str], ...]
    string_delimiters: tuple[str, ...]


@dataclass(frozen=True)
class LanguageConfig:
    language_id: str
    grammar_ref: str
    keywords: frozenset[str]
    file_extensions: tuple[str, ...]
    comment_stripping: CommentStripping

    def matches(self, path: str | Path) -> bool:
        return Path(path).suffix.lower() in self.file_extensions


def load_language_config(path: str | Path) -> LanguageConfig:
    """Load and validate one language config file.

    The keyword list may either be inline (array of strings) or name a plain
    text file, one keyword per line, resolved relative to the config file.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedConfig(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise MalformedConfig(f"{path}: top level must be an object")

    unknown = set(raw) - REQUIRED_KEYS
    if unknown:
        raise MalformedConfig(f"{path}: unknown keys {sorted(unknown)}")
    missing = REQUIRED_KEYS - set(raw)
    if missing:
        raise MissingField(f"{path}: missing keys {sorted(missing)}")

    language_id = _expect_str(raw["languageId"], "languageId", path)
    grammar_ref = _expect_str(raw["grammarRef"], "grammarRef", path)

    keywords = raw["keywords"]
    if isinstance(keywords, str):
        kw_path = path.parent / keywords
        try:
            lines = kw_path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise MalformedConfig(f"{path}: keyword file {kw_path}: {exc}") from exc
        keyword_set = frozenset(w.strip() for w in lines if w.strip())
    elif isinstance(keywords, list) and all(isinstance(k, str) for k in keywords):
        keyword_set = frozenset(keywords)
    else:
        raise MalformedConfig(f"{path}: keywords must be a string list or a file name")

    exts = raw["fileExtensions"]
    if not isinstance(exts, list) or not all(isinstance(e, str) for e in exts):
        raise MalformedConfig(f"{path}: fileExtensions must be a list of strings")
    if not exts:
        raise EmptyExtensionList(f"{path}: fileExtensions is empty")
    extensions = tuple(e.lower() if e.startswith(".") else "." + e.lower() for e in exts)

    stripping = _parse_stripping(raw["commentStripping"], path)

    return LanguageConfig(
        language_id=language_id,
        grammar_ref=grammar_ref,
        keywords=keyword_set,
        file_extensions=extensions,
        comment_stripping=stripping,
    )


def _expect_str(value, key: str, path: Path) -> str:
    if not isinstance(value, str) or not value:
        raise MalformedConfig(f"{path}: {key} must be a non-empty string")
    return value


def _parse_stripping(raw, path: Path) -> CommentStripping:
    if not isinstance(raw, dict):
        raise MalformedConfig(f"{path}: commentStripping must be an object")
    unknown = set(raw) - STRIPPING_KEYS
    if unknown:
        raise MalformedConfig(f"{path}: unknown commentStripping keys {sorted(unknown)}")
    missing = STRIPPING_KEYS - set(raw)
    if missing:
        raise MissingField(f"{path}: commentStripping missing {sorted(missing)}")

    line = raw["lineComment"]
    if not isinstance(line, list) or not all(isinstance(p, str) and p for p in line):
        raise MalformedConfig(f"{path}: lineComment must be a list of non-empty strings")

    blocks = raw["blockComment"]
    pairs: list[tuple[str, str]] = []
    if not isinstance(blocks, list):
        raise MalformedConfig(f"{path}: blockComment must be a list")
    for entry in blocks:
        if (
            not isinstance(entry, dict)
            or set(entry) != {"open", "close"}
            or not all(isinstance(entry[k], str) and entry[k] for k in ("open", "close"))
        ):
            raise MalformedConfig(f"{path}: blockComment entries need open/close strings")
        pairs.append((entry["open"], entry["close"]))

    delims = raw["stringDelimiters"]
    if not isinstance(delims, list) or not all(isinstance(d, str) and d for d in delims):
        raise MalformedConfig(f"{path}: stringDelimiters must be a list of strings")

    return CommentStripping(
        line_comments=tuple(line),
        block_comments=tuple(pairs),
        string_delimiters=tuple(sorted(delims, key=len, reverse=True)),
    )
