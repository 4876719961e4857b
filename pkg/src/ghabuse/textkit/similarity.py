"""String and document similarity used by the typo-squatting detector."""

from __future__ import annotations

import math
from collections import Counter

from ghabuse.textkit.tokenize import tokenize

_SEPARATORS = str.maketrans("", "", "-_.")


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit-cost insert, delete and substitute."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalize_name(name: str) -> str:
    return name.lower().translate(_SEPARATORS)


def name_similarity(a: str, b: str) -> float:
    a, b = normalize_name(a), normalize_name(b)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def readme_similarity(a: str, b: str) -> float:
    """Cosine similarity of raw term-frequency vectors."""
    ta, tb = Counter(tokenize(a)), Counter(tokenize(b))
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    dot = sum(n * tb[t] for t, n in ta.items() if t in tb)
    norm = math.sqrt(sum(n * n for n in ta.values())) * math.sqrt(sum(n * n for n in tb.values()))
    return min(1.0, dot / norm)
