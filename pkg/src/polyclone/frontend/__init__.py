"""File frontend: language configs, preprocessing, and parser adapters."""

from __future__ import annotations

from pathlib import Path

from ..errors import AdapterUnavailable, LexFailure
from .adapters import FALLBACK_GRAMMAR_REF, FallbackLexerAdapter, GrammarAdapter, get_adapter
from .config import CommentStripping, LanguageConfig, load_language_config
from .preprocess import preprocess
from .tokens import (
    RETAINED,
    ErrorKind,
    ParseError,
    ParseNode,
    ParseOutcome,
    Token,
    TokenCategory,
    flatten_leaves,
)

__all__ = [
    "CommentStripping",
    "ErrorKind",
    "FallbackLexerAdapter",
    "GrammarAdapter",
    "LanguageConfig",
    "ParseError",
    "ParseNode",
    "ParseOutcome",
    "Token",
    "TokenCategory",
    "degraded_outcome",
    "file_level_bag",
    "flatten_leaves",
    "get_adapter",
    "load_language_config",
    "parse_file",
    "preprocess",
    "read_source",
]

PACKAGE_LANGUAGE_DIR = Path(__file__).resolve().parent.parent / "languages"


def read_source(path: str | Path) -> str:
    """Read a source file as UTF-8 text, stripping a leading BOM.

    Rejects undecodable or NUL-bearing (binary) content with LexFailure.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise LexFailure(f"{path}: {exc}") from exc
    if b"\x00" in data:
        raise LexFailure(f"{path}: binary content")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise LexFailure(f"{path}: not valid UTF-8 ({exc})") from exc
    return text.lstrip("﻿")


def parse_file(
    source: str, cfg: LanguageConfig, config_dir: str | Path | None = None
) -> ParseOutcome:
    """Parse preprocessed text with the language's adapter.

    Raises AdapterUnavailable when no adapter can be built for the config;
    callers wanting file-level-only behavior should fall back to
    degraded_outcome().
    """
    adapter = get_adapter(cfg, config_dir)
    return adapter.parse(source)


def degraded_outcome(source: str, cfg: LanguageConfig) -> ParseOutcome:
    """Lex-only outcome via the built-in fallback lexer (no tree)."""
    return FallbackLexerAdapter(cfg).parse(source)


def file_level_bag(outcome: ParseOutcome, file_id: str):
    """Whole-file token bag (granularity 0) for degraded participation."""
    from ..tokenbag import bag_from_tokens  # local import avoids a module cycle

    return bag_from_tokens(outcome.tokens, file_id)
