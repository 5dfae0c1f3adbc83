"""Shared fixture builders and independent oracles for the test suite.

Oracles here are written straight from first principles (full DP tables,
exhaustive pair scans, direct set construction) and never call the code
paths they check.
"""

from __future__ import annotations

import random

from polyclone.detector import ClonePair, make_pair, overlap_similarity
from polyclone.frontend.tokens import ParseNode, Token, TokenCategory
from polyclone.spt import SptNode
from polyclone.tokenbag import CodeSegment, TokenBag

# ---------------------------------------------------------------------------
# Tokens and random parse trees
# ---------------------------------------------------------------------------


def plain_tokens(n: int) -> list[Token]:
    return [Token(TokenCategory.IDENTIFIER, f"t{i}", i + 1, 1) for i in range(n)]


def random_parse_tree(rng: random.Random, max_nodes: int = 12) -> tuple[ParseNode, list[Token]]:
    """A random well-formed parse tree with chains and varied arity."""
    n_leaves = rng.randint(1, max(1, max_nodes // 2))
    tokens = plain_tokens(n_leaves)
    counter = [0]

    def build(start: int, end: int, budget: list[int]) -> ParseNode:
        counter[0] += 1
        name = f"r{counter[0]}"
        if end - start == 1:
            leaf = ParseNode("", start, end)
            # Sometimes wrap the leaf in an equal-span chain.
            if budget[0] > 0 and rng.random() < 0.4:
                budget[0] -= 1
                return ParseNode(name, start, end, [leaf])
            return leaf
        if budget[0] > 0 and rng.random() < 0.3:
            # Equal-span single-child chain link.
            budget[0] -= 1
            return ParseNode(name, start, end, [build(start, end, budget)])
        budget[0] -= 1
        n_children = rng.randint(2, min(4, end - start))
        cuts = sorted(rng.sample(range(start + 1, end), n_children - 1))
        bounds = [start, *cuts, end]
        children = [build(bounds[i], bounds[i + 1], budget) for i in range(n_children)]
        return ParseNode(name, start, end, children)

    budget = [max_nodes - n_leaves]
    root = build(0, n_leaves, budget)
    if root.is_leaf:
        root = ParseNode("root", 0, n_leaves, [root])
    return root, tokens


# ---------------------------------------------------------------------------
# Independent SPT reference (direct set construction)
# ---------------------------------------------------------------------------


def reference_spt(tree: ParseNode, tokens: list[Token], m_size: int) -> SptNode:
    parents: dict[int, ParseNode | None] = {id(tree): None}
    order: list[ParseNode] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        order.append(node)
        for child in reversed(node.children):
            parents[id(child)] = node
            stack.append(child)

    def chain_interior(node: ParseNode) -> bool:
        parent = parents[id(node)]
        return parent is not None and len(parent) == len(node)

    def deepest_of_chain(node: ParseNode) -> tuple[str, ParseNode]:
        rule = node.rule
        cur = node
        while cur.children and len(cur.children[0]) == len(cur):
            cur = cur.children[0]
            if cur.rule:
                rule = cur.rule
        return rule, cur

    if len(tree) < m_size:
        rule, _ = deepest_of_chain(tree)
        return _ref_node(rule, tree, (), 0, tokens, True)

    survivors = {
        id(n) for n in order if len(n) >= m_size and not chain_interior(n)
    }

    def nearest_surviving_ancestor(node: ParseNode) -> ParseNode | None:
        cur = parents[id(node)]
        while cur is not None and id(cur) not in survivors:
            cur = parents[id(cur)]
        return cur

    def convert(node: ParseNode, depth: int) -> SptNode:
        rule, deepest = deepest_of_chain(node)
        spt = _ref_node(rule, node, tuple((c.start, c.end) for c in deepest.children),
                        depth, tokens, False)
        kids = [
            n for n in order
            if id(n) in survivors and nearest_surviving_ancestor(n) is node
        ]
        # `order` is pre-order, but re-sort by span start for stability.
        kids.sort(key=lambda n: n.start)
        spt.children = [convert(k, depth + 1) for k in kids]
        return spt

    return convert(tree, 0)


def _ref_node(rule, pt, child_spans, depth, tokens, flo) -> SptNode:
    return SptNode(
        rule=rule,
        start=pt.start,
        end=pt.end,
        granularity=depth,
        start_line=tokens[pt.start].line,
        end_line=tokens[pt.end - 1].line,
        children=[],
        child_spans=child_spans,
        file_level_only=flo,
    )


def spt_equal(a: SptNode, b: SptNode) -> bool:
    if (
        a.rule != b.rule
        or a.token_span != b.token_span
        or a.granularity != b.granularity
        or a.start_line != b.start_line
        or a.end_line != b.end_line
        or a.child_spans != b.child_spans
        or a.file_level_only != b.file_level_only
        or len(a.children) != len(b.children)
    ):
        return False
    return all(spt_equal(x, y) for x, y in zip(a.children, b.children))


def count_nodes(root: SptNode) -> int:
    return sum(1 for _ in root.walk())


# ---------------------------------------------------------------------------
# Random bags and brute-force detection
# ---------------------------------------------------------------------------

_VOCAB = [f"w{i}" for i in range(40)]


def random_bag(rng: random.Random, file: str, granularity: int = 0,
               min_size: int = 5, max_size: int = 40) -> TokenBag:
    size = rng.randint(min_size, max_size)
    texts = [rng.choice(_VOCAB) for _ in range(size)]
    start = rng.randint(1, 50)
    seg = CodeSegment(file, start, start + rng.randint(0, 30), granularity)
    return TokenBag.build(seg, texts)


def random_group(rng: random.Random, count: int, granularity: int = 0,
                 overlap_heavy: bool = False) -> list[TokenBag]:
    bags = []
    base = None
    for i in range(count):
        if overlap_heavy and base is not None and rng.random() < 0.5:
            # Mutate an earlier bag so near-duplicates are common.
            texts = []
            for text, cnt in base.counts.items():
                texts.extend([text] * cnt)
            k = max(1, len(texts) // 10)
            for _ in range(k):
                texts[rng.randrange(len(texts))] = rng.choice(_VOCAB)
            start = rng.randint(1, 50)
            seg = CodeSegment(f"f{i}.x", start, start + 5, granularity)
            bags.append(TokenBag.build(seg, texts))
        else:
            bags.append(random_bag(rng, f"f{i}.x", granularity))
        if base is None or rng.random() < 0.3:
            base = bags[-1]
    return bags


def brute_force_detect(bags: list[TokenBag], theta: float) -> set[tuple]:
    """All qualifying same-granularity pairs, as canonical keys."""
    found: set[tuple] = set()
    for i in range(len(bags)):
        for j in range(i + 1, len(bags)):
            a, b = bags[i], bags[j]
            if a.segment.granularity != b.segment.granularity:
                continue
            if a.segment == b.segment:
                continue
            if overlap_similarity(a, b) >= theta:
                found.add(make_pair(a, b, 0.0).key[:6] + (a.segment.granularity,))
    return found


def pair_keys(pairs: list[ClonePair]) -> set[tuple]:
    return {p.key for p in pairs}


# ---------------------------------------------------------------------------
# Independent Levenshtein oracle (full-matrix DP, straight from the recurrence)
# ---------------------------------------------------------------------------


def lev_oracle(a: list[str], b: list[str]) -> int:
    n, m = len(a), len(b)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dp[i][0] = i
    for j in range(m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if a[i - 1] == b[j - 1]:
                dp[i][j] = dp[i - 1][j - 1]
            else:
                dp[i][j] = 1 + min(dp[i - 1][j], dp[i][j - 1], dp[i - 1][j - 1])
    return dp[n][m]


# ---------------------------------------------------------------------------
# Synthetic Java corpus
# ---------------------------------------------------------------------------

_OPS = ["+", "-", "*"]


def java_method(rng: random.Random, index: int, n_stmts: int, pool: list[str]) -> list[str]:
    v = [rng.choice(pool) + str(rng.randint(0, 99)) for _ in range(4)]
    lines = [f"    public int m{index}(int {v[0]}, int {v[1]}) {{"]
    lines.append(f"        int {v[2]} = {v[0]} {rng.choice(_OPS)} {rng.randint(1, 9)};")
    lines.append(f"        int {v[3]} = {v[1]} {rng.choice(_OPS)} {rng.randint(1, 9)};")
    for _ in range(n_stmts):
        lhs = rng.choice(v[2:])
        rhs1, rhs2 = rng.choice(v), rng.choice(v)
        lines.append(
            f"        {lhs} = {rhs1} {rng.choice(_OPS)} {rhs2} {rng.choice(_OPS)} {rng.randint(1, 50)};"
        )
    lines.append(f"        if ({v[2]} > {rng.randint(10, 60)}) {{ {v[2]} = {v[2]} - {v[3]}; }}")
    lines.append(f"        return {v[2]} {rng.choice(_OPS)} {v[3]};")
    lines.append("    }")
    return lines


def java_file(rng: random.Random, class_name: str, n_methods: int = 2,
              n_stmts: int = 6) -> str:
    pool = [f"var{rng.randint(0, 999)}", "acc", "tmp", "val", "num"]
    lines = [f"public class {class_name} {{"]
    for k in range(n_methods):
        lines.extend(java_method(rng, k, n_stmts, pool))
    lines.append("}")
    return "\n".join(lines) + "\n"


def reformat_java(text: str, rng: random.Random) -> str:
    """T1 edit: whitespace/layout only; the token stream is unchanged."""
    out: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        indent = " " * rng.choice([0, 1, 2, 4, 8])
        out.append(indent + stripped)
        if rng.random() < 0.2:
            out.append("")
    return "\n".join(out) + "\n"


def rename_identifiers_java(text: str, rng: random.Random, fraction: float) -> str:
    """T2 edit: consistently rename a fraction of identifiers and literals."""
    import re as _re

    words = sorted(set(_re.findall(r"\b[a-z][A-Za-z0-9]*\b", text)) - {
        "public", "class", "int", "if", "return", "for", "while", "else", "new",
    })
    chosen = [w for w in words if rng.random() < fraction]
    mapping = {w: f"ren{idx}X{w}" for idx, w in enumerate(chosen)}
    def sub(match):
        return mapping.get(match.group(0), match.group(0))
    renamed = _re.sub(r"\b[a-z][A-Za-z0-9]*\b", sub, text)
    if rng.random() < 0.5:
        renamed = _re.sub(r"\b(\d{1,2})\b", lambda m: str(int(m.group(1)) + 1), renamed)
    return renamed


def delete_statements_java(text: str, rng: random.Random, fraction: float) -> str:
    """T3 edit: drop a fraction of the free-standing assignment lines."""
    lines = text.splitlines()
    kept = []
    for line in lines:
        droppable = line.strip().endswith(";") and "=" in line and "(" not in line
        if droppable and rng.random() < fraction:
            continue
        kept.append(line)
    return "\n".join(kept) + "\n"
