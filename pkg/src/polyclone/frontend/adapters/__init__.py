"""Parser adapters: text in, ParseOutcome out.

Grammar-backed adapters are built from ``.peg`` files (resolved next to the
language config first, then from the grammars shipped with the package).
The fallback lexer adapter tokenizes anything and never produces a tree,
which is the degraded file-level-only mode.
"""

from __future__ import annotations

import re
import sys
from functools import lru_cache
from pathlib import Path

from ...errors import AdapterUnavailable
from ..config import LanguageConfig
from ..peg import ERROR_RULE, FILE_RULE, Engine, GrammarError, LexedFile, parse_grammar
from ..tokens import (
    ErrorKind,
    ParseError,
    ParseNode,
    ParseOutcome,
    Token,
    TokenCategory,
)

_LITERAL_CLASSES = frozenset({"NUMBER", "STRING", "CHAR"})
_PACKAGE_GRAMMARS = Path(__file__).resolve().parent.parent.parent / "grammars"

FALLBACK_GRAMMAR_REF = "lexer"


@lru_cache(maxsize=32)
def _load_engine(path_str: str) -> Engine:
    grammar = parse_grammar(Path(path_str).read_text(encoding="utf-8"))
    return Engine(grammar)


def get_adapter(cfg: LanguageConfig, config_dir: str | Path | None = None):
    """Resolve the adapter for a language config.

    Raises AdapterUnavailable when the grammar artifact cannot be found or
    compiled; callers may then fall back to degraded lexing.
    """
    ref = cfg.grammar_ref
    if ref == FALLBACK_GRAMMAR_REF:
        return FallbackLexerAdapter(cfg)
    if ref.endswith(".peg"):
        candidates = []
        if config_dir is not None:
            candidates.append(Path(config_dir) / ref)
        candidates.append(_PACKAGE_GRAMMARS / ref)
        for cand in candidates:
            if cand.is_file():
                try:
                    return GrammarAdapter(_load_engine(str(cand)), cfg)
                except GrammarError as exc:
                    raise AdapterUnavailable(f"{cand}: {exc}") from exc
        raise AdapterUnavailable(f"grammar artifact {ref!r} not found")
    raise AdapterUnavailable(f"no adapter registered for grammarRef {ref!r}")


def _categorize(texts, classes, lines, cols, keywords) -> list[Token]:
    tokens: list[Token] = []
    append = tokens.append
    for text, cls, line, col in zip(texts, classes, lines, cols):
        if text in keywords:
            cat = TokenCategory.KEYWORD
        elif cls == "ID":
            cat = TokenCategory.IDENTIFIER
        elif cls in _LITERAL_CLASSES:
            cat = TokenCategory.LITERAL
        else:
            cat = TokenCategory.OTHER
        append(Token(cat, text, line, col))
    return tokens


class GrammarAdapter:
    """Parses one language via a compiled PEG engine."""

    def __init__(self, engine: Engine, cfg: LanguageConfig):
        self.engine = engine
        self.cfg = cfg

    def lex(self, text: str) -> list[Token]:
        lexed = self.engine.lex(text)
        return _categorize(lexed.texts, lexed.classes, lexed.lines, lexed.cols, self.cfg.keywords)

    def parse(self, text: str) -> ParseOutcome:
        lexed = self.engine.lex(text)
        tokens = _categorize(
            lexed.texts, lexed.classes, lexed.lines, lexed.cols, self.cfg.keywords
        )
        report = [
            ParseError(line, col, ErrorKind.LEXICAL, recovered=True, message=msg)
            for line, col, msg in lexed.errors
        ]
        if not tokens:
            return ParseOutcome(tokens=[], tree=None, error_report=report)

        limit = sys.getrecursionlimit()
        if limit < 20000:
            sys.setrecursionlimit(20000)
        try:
            root, parse_errors = self.engine.parse(lexed, self.cfg.keywords)
        except RecursionError:
            report.append(
                ParseError(1, 1, ErrorKind.SYNTACTIC, recovered=False, message="nesting too deep")
            )
            return ParseOutcome(tokens=tokens, tree=None, error_report=report)

        for idx, msg in parse_errors:
            report.append(
                ParseError(
                    lexed.lines[idx], lexed.cols[idx], ErrorKind.SYNTACTIC,
                    recovered=True, message=msg,
                )
            )
        if not _has_structure(root):
            # Nothing parsed at all: the most severe failure, file-level only.
            report.append(
                ParseError(
                    tokens[0].line, tokens[0].col, ErrorKind.SYNTACTIC,
                    recovered=False, message="no parsable structure",
                )
            )
            return ParseOutcome(tokens=tokens, tree=None, error_report=report)
        return ParseOutcome(tokens=tokens, tree=root, error_report=report)


def _has_structure(root: ParseNode) -> bool:
    """True when at least one real grammar rule matched somewhere."""
    skip = {ERROR_RULE, FILE_RULE, ""}
    return any(node.children and node.rule not in skip for node in root.walk())


class FallbackLexerAdapter:
    """Whitespace/punctuation lexer for degraded mode; works on any text."""

    _MASTER = re.compile(
        r"""(?P<STRING>"(?:\\.|[^"\\\n])*"?|'(?:\\.|[^'\\\n])*'?)
          | (?P<NUMBER>\d[\w.]*)
          | (?P<ID>[^\W\d]\w*)
          | (?P<SYM>.)""",
        re.X,
    )

    def __init__(self, cfg: LanguageConfig):
        self.cfg = cfg

    def lex(self, text: str) -> list[Token]:
        tokens: list[Token] = []
        line = 1
        line_start = -1
        i = 0
        n = len(text)
        while i < n:
            ch = text[i]
            if ch == "\n":
                line += 1
                line_start = i
                i += 1
                continue
            if ch.isspace():
                i += 1
                continue
            m = self._MASTER.match(text, i)
            assert m is not None
            tok = m.group()
            cls = m.lastgroup
            if tok in self.cfg.keywords:
                cat = TokenCategory.KEYWORD
            elif cls == "ID":
                cat = TokenCategory.IDENTIFIER
            elif cls in ("NUMBER", "STRING"):
                cat = TokenCategory.LITERAL
            else:
                cat = TokenCategory.OTHER
            tokens.append(Token(cat, tok, line, i - line_start))
            i = m.end()
        return tokens

    def parse(self, text: str) -> ParseOutcome:
        return ParseOutcome(tokens=self.lex(text), tree=None, error_report=[])
