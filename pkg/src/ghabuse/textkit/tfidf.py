from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: Mapping[str, int]
    idf: tuple[float, ...]

    def __post_init__(self) -> None:
        if sorted(self.vocabulary.values()) != list(range(len(self.vocabulary))):
            raise ValueError("vocabulary indices must cover 0..n-1 exactly once")
        if len(self.idf) != len(self.vocabulary):
            raise ValueError("idf length does not match vocabulary")

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def to_dict(self) -> dict:
        terms = sorted(self.vocabulary, key=self.vocabulary.__getitem__)
        return {"terms": terms, "idf": list(self.idf)}

    @classmethod
    def from_dict(cls, data: Mapping) -> TfIdfModel:
        terms = data["terms"]
        return cls({t: i for i, t in enumerate(terms)}, tuple(float(v) for v in data["idf"]))


def tfidf_fit(docs: Sequence[Iterable[str]]) -> TfIdfModel:
    """Fit smoothed idf weights: ``ln((1 + N) / (1 + df)) + 1``."""
    docs = [list(d) for d in docs]
    if not docs:
        raise ValueError("tfidf_fit needs at least one document")
    df: Counter = Counter()
    for tokens in docs:
        df.update(set(tokens))
    terms = sorted(df)
    n = len(docs)
    idf = tuple(math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms)
    return TfIdfModel({t: i for i, t in enumerate(terms)}, idf)


def tfidf_transform(model: TfIdfModel, tokens: Iterable[str]) -> dict[int, float]:
    """L2-normalised tf*idf as a sparse ``{index: weight}`` map.

    Out-of-vocabulary tokens are ignored; no in-vocabulary tokens gives ``{}``.
    """
    counts = Counter(t for t in tokens if t in model.vocabulary)
    weights = {model.vocabulary[t]: c * model.idf[model.vocabulary[t]] for t, c in counts.items()}
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {i: w / norm for i, w in sorted(weights.items())}


def to_dense(vec: Mapping[int, float], dim: int) -> np.ndarray:
    out = np.zeros(dim)
    for i, w in vec.items():
        out[i] = w
    return out
