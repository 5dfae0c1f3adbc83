"""A small grammar-driven parsing toolkit.

Languages are described by ``.peg`` grammar files holding both the lexical
spec (token classes as regexes, multi-char symbols) and PEG parse rules.
The engine produces concrete parse trees in which every token appears as
exactly one leaf, plus a recovered-error report, which is what the rest of
the pipeline consumes.

Grammar file syntax::

    # comment
    %root file            # start rule
    %layout offside       # indentation-structured language (one rule per line)
    %token NAME /regex/   # lexical classes, tried in order
    %symbols == != <= ... # multi-char operator tokens
    %block funcdef ...    # offside only: rules whose lines open suites

    rule <- alt1 / alt2 ;  # sequence by juxtaposition, choice by '/'
                           # postfix * + ?, grouping (...), '.' any token,
                           # !e negative lookahead, 'text' literal token,
                           # UPPER token class, @error("sync"...) recovery

Token classes NUMBER/STRING/CHAR map to the LITERAL category, ID to
IDENTIFIER (or KEYWORD when the text is in the active keyword list), and
everything else to OTHER.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .tokens import ParseNode

ERROR_RULE = "error"
SUITE_RULE = "suite"
GENERIC_BLOCK_RULE = "block"
FILE_RULE = "file"

_LITERAL_CLASSES = frozenset({"NUMBER", "STRING", "CHAR"})
_CLOSERS = frozenset({")", "]", "}"})
_OPENERS = {"(": ")", "[": "]", "{": "}"}

_ASCII_PUNCT = "!#$%&()*+,-./:;<=>?@[\\]^`{|}~'\""


class GrammarError(Exception):
    """Raised when a grammar file cannot be parsed or compiled."""


# ---------------------------------------------------------------------------
# Grammar file parsing
# ---------------------------------------------------------------------------


@dataclass
class Grammar:
    root: str
    layout: str  # "block" or "offside"
    token_classes: list[tuple[str, str]]  # (name, pattern) in priority order
    symbols: list[str]
    block_rules: frozenset[str]
    rules: dict[str, tuple]  # name -> expression AST


_RULE_RE = re.compile(r"^\s*([a-z_][a-z0-9_]*)\s*<-\s*(.*?)\s*;\s*$", re.S)
_TOKEN_DIRECTIVE_RE = re.compile(r"^%token\s+([A-Z][A-Z0-9_]*)\s+/(.*)/\s*$")


def parse_grammar(text: str) -> Grammar:
    root = ""
    layout = "block"
    token_classes: list[tuple[str, str]] = []
    symbols: list[str] = []
    block_rules: set[str] = set()
    rules: dict[str, tuple] = {}

    # Directives are line-oriented; rules may span lines until ';'.
    pending = ""
    for raw_line in text.splitlines():
        line = raw_line.rstrip()
        if not pending:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if stripped.startswith("%"):
                directives: dict[str, str] = {}
                _parse_directive(stripped, token_classes, symbols, block_rules, directives)
                root = directives.get("root", root)
                layout = directives.get("layout", layout)
                continue
        pending = (pending + "\n" + line) if pending else line
        if pending.rstrip().endswith(";"):
            m = _RULE_RE.match(pending)
            if not m:
                raise GrammarError(f"bad rule definition: {pending!r}")
            name, body = m.group(1), m.group(2)
            if name in rules:
                raise GrammarError(f"duplicate rule {name!r}")
            rules[name] = _parse_expr(body, name)
            pending = ""
    if pending:
        raise GrammarError(f"unterminated rule: {pending!r}")
    if not root:
        raise GrammarError("grammar declares no %root")
    if root not in rules:
        raise GrammarError(f"%root {root!r} is not a defined rule")
    for name, expr in rules.items():
        _check_refs(expr, rules, name)
    return Grammar(
        root=root,
        layout=layout,
        token_classes=token_classes,
        symbols=sorted(symbols, key=len, reverse=True),
        block_rules=frozenset(block_rules),
        rules=rules,
    )


def _parse_directive(line, token_classes, symbols, block_rules, directives) -> None:
    if line.startswith("%token"):
        m = _TOKEN_DIRECTIVE_RE.match(line)
        if not m:
            raise GrammarError(f"bad %token directive: {line!r}")
        name, pattern = m.group(1), m.group(2)
        try:
            re.compile(pattern)
        except re.error as exc:
            raise GrammarError(f"bad regex for token {name}: {exc}") from exc
        token_classes.append((name, pattern))
    elif line.startswith("%symbols"):
        symbols.extend(line.split()[1:])
    elif line.startswith("%block"):
        block_rules.update(line.split()[1:])
    elif line.startswith("%root"):
        parts = line.split()
        if len(parts) != 2:
            raise GrammarError(f"bad %root directive: {line!r}")
        directives["root"] = parts[1]
    elif line.startswith("%layout"):
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("block", "offside"):
            raise GrammarError(f"bad %layout directive: {line!r}")
        directives["layout"] = parts[1]
    else:
        raise GrammarError(f"unknown directive: {line!r}")


# Expression AST nodes are plain tuples:
#   ("seq", [..]) ("choice", [..]) ("star", e) ("plus", e) ("opt", e)
#   ("lit", text) ("class", name) ("any",) ("not", e) ("rule", name)
#   ("err", (stop_after, stop_before))

_EXPR_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<lit>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
      | (?P<err>@error)
      | (?P<cls>[A-Z][A-Z0-9_]*)
      | (?P<ref>[a-z_][a-z0-9_]*)
      | (?P<op>[()*+?/!.])
    )""",
    re.X,
)


def _tokenize_expr(body: str, rule: str) -> list[tuple[str, str]]:
    toks = []
    i = 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        m = _EXPR_TOKEN_RE.match(body, i)
        if not m:
            raise GrammarError(f"rule {rule}: cannot tokenize at {body[i:i+20]!r}")
        kind = m.lastgroup
        toks.append((kind, m.group()))
        i = m.end()
    return toks


def _unquote(lit: str) -> str:
    body = lit[1:-1]
    return body.replace("\\\\", "\x00").replace("\\'", "'").replace('\\"', '"').replace(
        "\x00", "\\"
    )


def _parse_expr(body: str, rule: str) -> tuple:
    toks = _tokenize_expr(body, rule)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def parse_choice():
        nonlocal pos
        alts = [parse_seq()]
        while peek() == ("op", "/"):
            pos += 1
            alts.append(parse_seq())
        return alts[0] if len(alts) == 1 else ("choice", alts)

    def parse_seq():
        nonlocal pos
        items = []
        while True:
            kind, value = peek()
            if kind is None or (kind == "op" and value in (")", "/")):
                break
            items.append(parse_postfix())
        if not items:
            raise GrammarError(f"rule {rule}: empty sequence")
        return items[0] if len(items) == 1 else ("seq", items)

    def parse_postfix():
        nonlocal pos
        expr = parse_atom()
        while True:
            kind, value = peek()
            if kind == "op" and value in ("*", "+", "?"):
                pos += 1
                expr = ({"*": "star", "+": "plus", "?": "opt"}[value], expr)
            else:
                return expr

    def parse_atom():
        nonlocal pos
        kind, value = peek()
        if kind == "op" and value == "(":
            pos += 1
            inner = parse_choice()
            if peek() != ("op", ")"):
                raise GrammarError(f"rule {rule}: missing ')'")
            pos += 1
            return inner
        if kind == "op" and value == "!":
            pos += 1
            return ("not", parse_atom())
        if kind == "op" and value == ".":
            pos += 1
            return ("any",)
        if kind == "lit":
            pos += 1
            return ("lit", _unquote(value))
        if kind == "cls":
            pos += 1
            return ("class", value)
        if kind == "ref":
            pos += 1
            return ("rule", value)
        if kind == "err":
            pos += 1
            if peek() != ("op", "("):
                raise GrammarError(f"rule {rule}: @error needs (...)")
            pos += 1
            stop_after: list[str] = []
            stop_before: list[str] = []
            while peek()[0] == "lit":
                text = _unquote(peek()[1])
                (stop_before if text in _CLOSERS else stop_after).append(text)
                pos += 1
            if peek() != ("op", ")"):
                raise GrammarError(f"rule {rule}: @error missing ')'")
            pos += 1
            return ("err", (frozenset(stop_after), frozenset(stop_before)))
        raise GrammarError(f"rule {rule}: unexpected {value!r}")

    expr = parse_choice()
    if pos != len(toks):
        raise GrammarError(f"rule {rule}: trailing tokens {toks[pos:]!r}")
    return expr


def _check_refs(expr: tuple, rules: dict, where: str) -> None:
    kind = expr[0]
    if kind == "rule":
        if expr[1] not in rules:
            raise GrammarError(f"rule {where}: reference to undefined rule {expr[1]!r}")
    elif kind in ("seq", "choice"):
        for sub in expr[1]:
            _check_refs(sub, rules, where)
    elif kind in ("star", "plus", "opt", "not"):
        _check_refs(expr[1], rules, where)


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------


@dataclass
class LexedFile:
    texts: list[str]
    classes: list[str]
    lines: list[int]
    cols: list[int]
    end_lines: list[int]
    errors: list[tuple[int, int, str]]  # (line, col, message) recovered lexical


def _build_master_regex(grammar: Grammar) -> re.Pattern:
    parts = [f"(?P<{name}>{pattern})" for name, pattern in grammar.token_classes]
    sym_alts = [re.escape(s) for s in grammar.symbols]
    sym_alts.extend(re.escape(c) for c in _ASCII_PUNCT)
    parts.append("(?P<SYM>%s)" % "|".join(sym_alts))
    parts.append("(?P<BAD>.)")
    return re.compile("|".join(parts), re.S)


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

_FAIL = -1


class Engine:
    """Compiled lexer + parser for one grammar."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self._master = _build_master_regex(grammar)
        # Parse-call state, rebound by parse(); closures read these.
        self._texts: list[str] = []
        self._classes: list[str] = []
        self._end = 0
        self._keywords: frozenset[str] = frozenset()
        self._errors: list[tuple[int, str]] = []  # (token index, message)
        self._cells: dict[str, list] = {name: [None] for name in grammar.rules}
        for name, expr in grammar.rules.items():
            self._cells[name][0] = self._make_rule(name, self._compile(expr))
        if grammar.layout == "offside":
            # The per-line start rule is a dispatcher; the chosen alternative's
            # node is the line node, so the dispatcher itself forms no node.
            self._root_fn = self._compile(grammar.rules[grammar.root])
        else:
            self._root_fn = self._cells[grammar.root][0]

    # -- lexing -------------------------------------------------------------

    def lex(self, text: str) -> LexedFile:
        texts: list[str] = []
        classes: list[str] = []
        lines: list[int] = []
        cols: list[int] = []
        end_lines: list[int] = []
        errors: list[tuple[int, int, str]] = []
        match = self._master.match
        i = 0
        n = len(text)
        line = 1
        line_start = -1  # offset of the char before the current line
        while i < n:
            ch = text[i]
            if ch in " \t\r\x0b\x0c":
                i += 1
                continue
            if ch == "\n":
                line += 1
                line_start = i
                i += 1
                continue
            m = match(text, i)
            assert m is not None  # BAD catch-all always matches
            tok = m.group()
            cls = m.lastgroup or "BAD"
            col = i - line_start
            if cls == "BAD":
                errors.append((line, col, f"unexpected character {tok!r}"))
                cls = "SYM"
            texts.append(tok)
            classes.append(cls)
            lines.append(line)
            cols.append(col)
            nl = tok.count("\n")
            if nl:
                line += nl
                line_start = i + tok.rindex("\n")
            end_lines.append(line)
            i = m.end()
        return LexedFile(texts, classes, lines, cols, end_lines, errors)

    # -- rule compilation ---------------------------------------------------

    def _compile(self, expr: tuple):
        kind = expr[0]
        if kind == "lit":
            text = expr[1]

            def fn_lit(pos, out, end):
                if pos < end and self._texts[pos] == text:
                    out.append(ParseNode("", pos, pos + 1))
                    return pos + 1
                return _FAIL

            return fn_lit
        if kind == "class":
            name = expr[1]
            if name == "ID":

                def fn_id(pos, out, end):
                    if (
                        pos < end
                        and self._classes[pos] == "ID"
                        and self._texts[pos] not in self._keywords
                    ):
                        out.append(ParseNode("", pos, pos + 1))
                        return pos + 1
                    return _FAIL

                return fn_id

            def fn_class(pos, out, end):
                if pos < end and self._classes[pos] == name:
                    out.append(ParseNode("", pos, pos + 1))
                    return pos + 1
                return _FAIL

            return fn_class
        if kind == "any":

            def fn_any(pos, out, end):
                if pos < end:
                    out.append(ParseNode("", pos, pos + 1))
                    return pos + 1
                return _FAIL

            return fn_any
        if kind == "not":
            sub = self._compile(expr[1])
            scratch: list[ParseNode] = []  # discarded; reused across calls

            def fn_not(pos, out, end):
                del scratch[:]
                return _FAIL if sub(pos, scratch, end) != _FAIL else pos

            return fn_not
        if kind == "seq":
            subs = [self._compile(e) for e in expr[1]]

            def fn_seq(pos, out, end):
                mark = len(out)
                for sub in subs:
                    pos2 = sub(pos, out, end)
                    if pos2 == _FAIL:
                        del out[mark:]
                        return _FAIL
                    pos = pos2
                return pos

            return fn_seq
        if kind == "choice":
            subs = [self._compile(e) for e in expr[1]]

            def fn_choice(pos, out, end):
                mark = len(out)
                for sub in subs:
                    pos2 = sub(pos, out, end)
                    if pos2 != _FAIL:
                        return pos2
                    del out[mark:]
                return _FAIL

            return fn_choice
        if kind == "star":
            sub = self._compile(expr[1])

            def fn_star(pos, out, end):
                while True:
                    mark = len(out)
                    pos2 = sub(pos, out, end)
                    if pos2 == _FAIL:
                        del out[mark:]
                        return pos
                    if pos2 == pos:
                        return pos
                    pos = pos2

            return fn_star
        if kind == "plus":
            sub = self._compile(expr[1])

            def fn_plus(pos, out, end):
                mark = len(out)
                pos2 = sub(pos, out, end)
                if pos2 == _FAIL:
                    del out[mark:]
                    return _FAIL
                pos = pos2
                while True:
                    mark = len(out)
                    pos2 = sub(pos, out, end)
                    if pos2 == _FAIL:
                        del out[mark:]
                        return pos
                    if pos2 == pos:
                        return pos
                    pos = pos2

            return fn_plus
        if kind == "opt":
            sub = self._compile(expr[1])

            def fn_opt(pos, out, end):
                mark = len(out)
                pos2 = sub(pos, out, end)
                if pos2 == _FAIL:
                    del out[mark:]
                    return pos
                return pos2

            return fn_opt
        if kind == "rule":
            cell = self._cells[expr[1]]

            def fn_rule(pos, out, end):
                return cell[0](pos, out, end)

            return fn_rule
        if kind == "err":
            stop_after, stop_before = expr[1]

            def fn_err(pos, out, end):
                start = pos
                leaves: list[ParseNode] = []
                while pos < end:
                    text = self._texts[pos]
                    if text in stop_before:
                        break
                    leaves.append(ParseNode("", pos, pos + 1))
                    pos += 1
                    if text in stop_after:
                        break
                if pos == start:
                    return _FAIL
                self._errors.append((start, "skipped unparsable tokens"))
                out.append(ParseNode(ERROR_RULE, start, pos, leaves))
                return pos

            return fn_err
        raise GrammarError(f"cannot compile {expr!r}")

    def _make_rule(self, name: str, body):
        def fn(pos, out, end):
            sub: list[ParseNode] = []
            pos2 = body(pos, sub, end)
            if pos2 == _FAIL:
                return _FAIL
            if pos2 == pos:
                return pos  # zero-width success forms no node
            out.append(ParseNode(name, pos, pos2, sub))
            return pos2

        # @error alternatives already produce their own node; avoid a wrapper
        # only when the whole rule body IS a single error recovery.
        if self.grammar.rules[name][0] == "err":
            return body
        return fn

    # -- parsing ------------------------------------------------------------

    def parse(self, lexed: LexedFile, keywords: frozenset[str]) -> tuple[ParseNode, list[tuple[int, str]]]:
        """Parse a lexed file into a total parse tree.

        Every token ends up as exactly one leaf: residual tokens the root rule
        cannot consume are wrapped into error nodes. Returns the root and the
        recovered-error list as (token_index, message) pairs.
        """
        self._texts = lexed.texts
        self._classes = lexed.classes
        self._keywords = keywords
        self._errors = []
        n = len(lexed.texts)
        if self.grammar.layout == "offside":
            root = self._parse_offside(lexed, n)
        else:
            root = self._parse_block(n)
        return root, self._errors

    def _parse_block(self, n: int) -> ParseNode:
        children: list[ParseNode] = []
        pos = 0
        while pos < n:
            pos2 = self._root_fn(pos, children, n)
            if pos2 != _FAIL and pos2 > pos:
                pos = pos2
                continue
            # Stalled: skim one token into an error node and retry, so that
            # garbage ahead of parsable code costs only local error nodes.
            if children and children[-1].rule == ERROR_RULE and children[-1].end == pos:
                children[-1].children.append(ParseNode("", pos, pos + 1))
                children[-1].end = pos + 1
            else:
                self._errors.append((pos, "unconsumed token"))
                children.append(ParseNode(ERROR_RULE, pos, pos + 1, [ParseNode("", pos, pos + 1)]))
            pos += 1
        if len(children) == 1 and children[0].rule == self.grammar.root:
            return children[0]
        return ParseNode(self.grammar.root, 0, n, children)

    # -- offside layout -----------------------------------------------------

    def _parse_offside(self, lexed: LexedFile, n: int) -> ParseNode:
        lines = _logical_lines(lexed, n)
        nodes, _ = self._build_suite(lines, 0, lexed)
        return ParseNode(FILE_RULE, 0, n, nodes)

    def _parse_line(self, start: int, end: int) -> ParseNode:
        out: list[ParseNode] = []
        pos = self._root_fn(start, out, end)
        if pos == _FAIL or pos < end or len(out) != 1:
            # Reparse the whole line as one recovered-error node.
            del out[:]
            leaves = [ParseNode("", i, i + 1) for i in range(start, end)]
            self._errors.append((start, "unparsable line"))
            return ParseNode(ERROR_RULE, start, end, leaves)
        return out[0]

    def _build_suite(self, lines, i: int, lexed: LexedFile):
        """Consume a run of lines at one indent level; returns (nodes, next_i)."""
        nodes: list[ParseNode] = []
        base = lines[i][2]
        while i < len(lines) and lines[i][2] >= base:
            start, end, indent = lines[i]
            node = self._parse_line(start, end)
            i += 1
            if i < len(lines) and lines[i][2] > indent:
                suite_children, i = self._build_suite(lines, i, lexed)
                node = self._make_block(node, suite_children)
            nodes.append(node)
        return nodes, i

    def _make_block(self, header: ParseNode, suite_children: list[ParseNode]) -> ParseNode:
        suite = ParseNode(
            SUITE_RULE,
            suite_children[0].start,
            suite_children[-1].end,
            suite_children,
        )
        rule = header.rule if header.rule in self.grammar.block_rules else GENERIC_BLOCK_RULE
        # The header node dissolves into the block so that keyword leaves stay
        # direct children (the keyword filter inspects child spans).
        head_children = header.children if header.children else [header]
        return ParseNode(rule, header.start, suite.end, head_children + [suite])


def _logical_lines(lexed: LexedFile, n: int) -> list[tuple[int, int, int]]:
    """Group tokens into logical lines: (start, end, indent column).

    Lines continue while bracket depth is positive or after a trailing
    backslash; a token spanning physical lines extends its logical line.
    """
    lines: list[tuple[int, int, int]] = []
    texts = lexed.texts
    i = 0
    while i < n:
        start = i
        indent = lexed.cols[i]
        depth = 0
        current_end_line = lexed.end_lines[i]
        while i < n:
            text = texts[i]
            if text in _OPENERS:
                depth += 1
            elif text in _CLOSERS and depth > 0:
                depth -= 1
            current_end_line = max(current_end_line, lexed.end_lines[i])
            i += 1
            if i >= n:
                break
            if lexed.lines[i] > current_end_line:
                if depth > 0 or texts[i - 1] == "\\":
                    continue
                break
        lines.append((start, i, indent))
    return lines
