"""Parse-tree simplification.

Collapses single-child chains whose spans coincide, drops every subtree
smaller than the configured minimum token count, and assigns each surviving
node its depth as the granularity value. Node spans count all leaf tokens
(operators included); the retained-token minimum is re-checked later when
bags are built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .frontend.peg import ERROR_RULE
from .frontend.tokens import ParseNode, Token


@dataclass(frozen=True)
class SimplifyConfig:
    m_size: int = 1

    def __post_init__(self) -> None:
        if self.m_size < 1:
            raise ValueError("m_size must be >= 1")


@dataclass(slots=True)
class SptNode:
    """Simplified parse-tree node.

    ``rule`` is the deepest rule name of the merged chain; ``child_spans``
    keeps the token spans of the merged node's original parse-tree children
    (pruned ones included) for the keyword filter. ``file_level_only`` marks
    a root that fell below the minimum size (whole file shorter than m_size).
    """

    rule: str
    start: int
    end: int
    granularity: int
    start_line: int
    end_line: int
    children: list["SptNode"] = field(default_factory=list)
    child_spans: tuple[tuple[int, int], ...] = ()
    file_level_only: bool = False

    @property
    def token_span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def __len__(self) -> int:
        return self.end - self.start

    @property
    def is_error(self) -> bool:
        return self.rule == ERROR_RULE

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def simplify(tree: ParseNode, tokens: list[Token], cfg: SimplifyConfig) -> SptNode:
    """Build the SPT for one parse tree.

    A root spanning fewer than m_size tokens is returned child-free and
    flagged file_level_only rather than raising.
    """
    if len(tree) < 1:
        raise ValueError("cannot simplify an empty tree")
    if len(tree) < cfg.m_size:
        rule, _ = _merge_chain(tree)
        return _make_node(rule, tree, (), 0, tokens, file_level_only=True)
    return _convert(tree, 0, tokens, cfg.m_size)


def _merge_chain(node: ParseNode) -> tuple[str, ParseNode]:
    """Collapse the equal-span single-child chain starting at ``node``.

    Returns the deepest rule name seen and the deepest node of the chain.
    """
    rule = node.rule
    cur = node
    while cur.children and len(cur.children[0]) == len(cur):
        cur = cur.children[0]
        if cur.rule:
            rule = cur.rule
    return rule, cur


def _convert(pt: ParseNode, depth: int, tokens: list[Token], m_size: int) -> SptNode:
    rule, deepest = _merge_chain(pt)
    child_spans = tuple((c.start, c.end) for c in deepest.children)
    children = [
        _convert(c, depth + 1, tokens, m_size)
        for c in deepest.children
        if len(c) >= m_size
    ]
    node = _make_node(rule, pt, child_spans, depth, tokens)
    node.children = children
    return node


def _make_node(
    rule: str,
    pt: ParseNode,
    child_spans: tuple[tuple[int, int], ...],
    depth: int,
    tokens: list[Token],
    file_level_only: bool = False,
) -> SptNode:
    # End line is the start line of the last token; a trailing multi-line
    # literal understates it, which only affects report line ranges.
    return SptNode(
        rule=rule,
        start=pt.start,
        end=pt.end,
        granularity=depth,
        start_line=tokens[pt.start].line,
        end_line=tokens[pt.end - 1].line,
        children=[],
        child_spans=child_spans,
        file_level_only=file_level_only,
    )


def max_granularity(root: SptNode) -> int:
    """Largest granularity value present in the SPT."""
    return max(node.granularity for node in root.walk())
