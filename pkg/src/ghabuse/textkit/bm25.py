"""Okapi BM25 over a fixed reference corpus."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ghabuse.textkit.tokenize import tokenize

K1 = 1.2
B = 0.75


class UnknownDocumentError(KeyError):
    pass


@dataclass(frozen=True)
class Corpus:
    documents: tuple[tuple[str, tuple[str, ...]], ...]
    avg_doc_len: float
    doc_freq: Mapping[str, int]
    _index: Mapping[str, int] = field(repr=False, compare=False, default_factory=dict)
    _term_freqs: tuple[Counter, ...] = field(repr=False, compare=False, default=())

    @classmethod
    def from_tokens(cls, docs: Iterable[tuple[str, Iterable[str]]]) -> Corpus:
        documents: list[tuple[str, tuple[str, ...]]] = []
        index: dict[str, int] = {}
        for doc_id, tokens in docs:
            toks = tuple(tokens)
            if doc_id in index:
                # later registration of the same id wins
                documents[index[doc_id]] = (doc_id, toks)
            else:
                index[doc_id] = len(documents)
                documents.append((doc_id, toks))
        term_freqs = tuple(Counter(toks) for _, toks in documents)
        df: Counter = Counter()
        for tf in term_freqs:
            df.update(tf.keys())
        avg = sum(len(t) for _, t in documents) / len(documents) if documents else 0.0
        return cls(tuple(documents), avg, dict(df), index, term_freqs)

    @classmethod
    def from_texts(cls, texts: Mapping[str, str] | Iterable[tuple[str, str]]) -> Corpus:
        items = texts.items() if isinstance(texts, Mapping) else texts
        return cls.from_tokens((doc_id, tokenize(text)) for doc_id, text in items)

    def with_texts(self, texts: Mapping[str, str] | Iterable[tuple[str, str]]) -> Corpus:
        """A new corpus with extra documents appended."""
        items = texts.items() if isinstance(texts, Mapping) else texts
        extra = [(doc_id, tokenize(text)) for doc_id, text in items]
        return Corpus.from_tokens(list(self.documents) + extra)

    def __len__(self) -> int:
        return len(self.documents)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._index

    def tokens(self, doc_id: str) -> tuple[str, ...]:
        return self.documents[self._position(doc_id)][1]

    def _position(self, doc_id: str) -> int:
        try:
            return self._index[doc_id]
        except KeyError:
            raise UnknownDocumentError(f"document not in corpus: {doc_id!r}") from None

    def idf(self, term: str) -> float:
        n = len(self.documents)
        df = self.doc_freq.get(term, 0)
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))


def _score(corpus: Corpus, query: Iterable[str], tf: Mapping[str, int], doc_len: int, k1: float, b: float) -> float:
    if corpus.avg_doc_len == 0:
        return 0.0
    norm = k1 * (1.0 - b + b * doc_len / corpus.avg_doc_len)
    total = 0.0
    for term in query:
        f = tf.get(term, 0)
        if f:
            total += corpus.idf(term) * f * (k1 + 1.0) / (f + norm)
    return total


def bm25_score(corpus: Corpus, query_tokens: Iterable[str], doc_id: str, k1: float = K1, b: float = B) -> float:
    pos = corpus._position(doc_id)
    return _score(corpus, query_tokens, corpus._term_freqs[pos], len(corpus.documents[pos][1]), k1, b)


def relevance(keyword: str, readme_doc_id: str, corpus: Corpus, k1: float = K1, b: float = B) -> float:
    """BM25 relevance of a short keyword to a registered README, scaled to [0, 1].

    The scale is the score the keyword would get against a document made of
    nothing but the keyword, repeated to the corpus average length.
    """
    query = tokenize(keyword)
    numerator = bm25_score(corpus, query, readme_doc_id, k1, b)
    if numerator <= 0.0:
        return 0.0
    length = max(len(query), round(corpus.avg_doc_len))
    ideal = [query[i % len(query)] for i in range(length)]
    ceiling = _score(corpus, query, Counter(ideal), length, k1, b)
    if ceiling <= 0.0:
        return 0.0
    return min(1.0, numerator / ceiling)
