"""Token-sequence edit distance and its normalized similarity.

Identifiers are mapped to one sentinel before comparison, so consistent
renaming (T2 edits) scores 1.0.
"""

from __future__ import annotations

import numpy as np

from ..errors import BothEmpty
from ..frontend.tokens import Token, TokenCategory

ID_SENTINEL = "ID"


def normalize_seq(tokens: list[Token]) -> list[str]:
    """Token texts with every identifier replaced by the sentinel."""
    return [
        ID_SENTINEL if t.category is TokenCategory.IDENTIFIER else t.text
        for t in tokens
    ]


def lev_ts(a: list[str], b: list[str]) -> int:
    """Levenshtein distance over token sequences, unit cost for all edits.

    Row-vectorized dynamic program; the running-minimum step resolves the
    in-row dependency (cur[j] = min(x[j], cur[j-1] + 1)).
    """
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) > len(a):
        a, b = b, a
    vocab: dict[str, int] = {}
    enc_b = np.fromiter((vocab.setdefault(t, len(vocab)) for t in b), dtype=np.int64)
    m = len(b)
    steps = np.arange(m + 1, dtype=np.int64)
    prev = steps.copy()
    x = np.empty(m + 1, dtype=np.int64)
    for i, tok in enumerate(a, start=1):
        code = vocab.get(tok, -1)
        x[0] = i
        np.minimum(prev[:-1] + (enc_b != code), prev[1:] + 1, out=x[1:])
        np.subtract(x, steps, out=x)
        np.minimum.accumulate(x, out=x)
        np.add(x, steps, out=x)
        prev, x = x, prev
    return int(prev[m])


def lev_simi(a: list[str], b: list[str]) -> float:
    """(max(|a|,|b|) - lev_ts(a,b)) / max(|a|,|b|), in [0, 1]."""
    longest = max(len(a), len(b))
    if longest == 0:
        raise BothEmpty("similarity of two empty sequences is undefined")
    return (longest - lev_ts(a, b)) / longest
