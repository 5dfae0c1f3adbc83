"""Token and parse-tree data types produced by the parser adapters."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class TokenCategory(enum.Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    LITERAL = "literal"
    OTHER = "other"


# Categories that survive into token bags.
RETAINED = frozenset(
    {TokenCategory.KEYWORD, TokenCategory.IDENTIFIER, TokenCategory.LITERAL}
)


@dataclass(frozen=True, slots=True)
class Token:
    """One lexical unit with its 1-based source position."""

    category: TokenCategory
    text: str
    line: int
    col: int

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("token text must be non-empty")
        if self.line < 1 or self.col < 1:
            raise ValueError("token position must be 1-based")


@dataclass(slots=True)
class ParseNode:
    """Node of a concrete parse tree over a file's token sequence.

    ``token_span`` is a half-open index range into the token list. A leaf
    spans exactly one token and carries an empty rule name; an inner node's
    children cover its span contiguously, in order.
    """

    rule: str
    start: int
    end: int
    children: list["ParseNode"] = field(default_factory=list)

    @property
    def token_span(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __len__(self) -> int:
        return self.end - self.start

    def walk(self):
        """Yield nodes in pre-order without recursion."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


class ErrorKind(enum.Enum):
    LEXICAL = "lexical"
    SYNTACTIC = "syntactic"


@dataclass(frozen=True, slots=True)
class ParseError:
    line: int
    col: int
    kind: ErrorKind
    recovered: bool
    message: str = ""


@dataclass(slots=True)
class ParseOutcome:
    """Result of running a parser adapter over one file.

    Tokens are always present; the tree is absent exactly when the adapter
    could not produce any structural interpretation (degraded mode).
    """

    tokens: list[Token]
    tree: ParseNode | None
    error_report: list[ParseError] = field(default_factory=list)

    @property
    def degraded(self) -> bool:
        return self.tree is None


def leaf_tokens(node: ParseNode, tokens: list[Token]) -> list[Token]:
    return tokens[node.start : node.end]


def flatten_leaves(root: ParseNode) -> list[ParseNode]:
    """All leaf nodes of the tree, left to right."""
    return [n for n in _preorder(root) if n.is_leaf]


def _preorder(root: ParseNode):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))
