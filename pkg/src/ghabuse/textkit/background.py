"""The bundled background README corpus that stabilises BM25 statistics."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Iterable

from ghabuse.textkit.bm25 import Corpus


@lru_cache(maxsize=1)
def background_readmes() -> tuple[tuple[str, str], ...]:
    raw = (resources.files("ghabuse") / "data" / "background_readmes.json").read_text(encoding="utf-8")
    return tuple((doc["id"], doc["text"]) for doc in json.loads(raw))


def background_corpus(extra: Iterable[tuple[str, str]] = ()) -> Corpus:
    """Background READMEs plus ``extra`` ``(doc_id, text)`` pairs, e.g. a scan batch."""
    return Corpus.from_texts(list(background_readmes()) + list(extra))
