"""Slow, obviously-correct reference implementations used as test oracles.

None of these share code with the package; they only read its data classes.
"""

from __future__ import annotations

import itertools
from typing import Optional


def _compositions(i: int, j: int, k: int):
    """Every way to cut span [i, j) into k non-empty consecutive pieces."""
    if k == 1:
        yield [(i, j)]
        return
    for cut in range(i + 1, j - k + 2):
        for rest in _compositions(cut, j, k - 1):
            yield [(i, cut)] + rest


def all_derivation_scores(tags, rules, probabilities, start) -> list[float]:
    """Score of every derivation of tags from start, one list entry per tree.

    A derivation that revisits the same (symbol, span) through unary rules is
    cut off: the loop multiplies in probabilities <= 1 and so never wins.  Only
    such loops can revisit a pair, so results are cached per span and the set
    of symbols already open on that span.
    """
    tags = tuple(tags)
    memo: dict = {}

    def scores(symbol, i, j, open_here):
        if symbol in open_here:
            return []
        key = (symbol, i, j, open_here)
        if key in memo:
            return memo[key]
        inner = open_here | {symbol}
        out = []
        if j == i + 1 and tags[i] == symbol:
            out.append(1.0)
        for rule in rules:
            if rule.lhs != symbol or len(rule.rhs) > j - i:
                continue
            for pieces in _compositions(i, j, len(rule.rhs)):
                options = [scores(sym, a, b, inner if (a, b) == (i, j) else frozenset())
                           for sym, (a, b) in zip(rule.rhs, pieces)]
                for combo in itertools.product(*options):
                    s = probabilities[rule]
                    for x in combo:
                        s *= x
                    out.append(s)
        memo[key] = out
        return out

    return scores(start, 0, len(tags), frozenset())


def best_score(tags, grammar, probabilities) -> Optional[float]:
    found = all_derivation_scores(tags, grammar.rules, probabilities, grammar.start)
    return max(found, default=None)


def is_subsequence(sub, seq) -> bool:
    it = iter(seq)
    return all(any(x == y for y in it) for x in sub)


def lcs_brute(a, b) -> int:
    """Longest common subsequence by trying every subsequence of the shorter side."""
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    for size in range(len(short), 0, -1):
        for idx in itertools.combinations(range(len(short)), size):
            if is_subsequence([short[k] for k in idx], long_):
                return size
    return 0
