"""TF-IDF vectoriser and spam classifier bundled as one model file."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ghabuse.textkit.mlp import (
    HIDDEN_DIM,
    ClassifierInputError,
    SpamClassifier,
    classifier_predict,
    classifier_train,
)
from ghabuse.textkit.tfidf import TfIdfModel, tfidf_fit, tfidf_transform
from ghabuse.textkit.tokenize import tokenize

MODEL_SCHEMA_VERSION = 1
DEFAULT_EPOCHS = 400
DEFAULT_LEARNING_RATE = 2.0


@dataclass(frozen=True)
class SpamModel:
    tfidf: TfIdfModel
    classifier: SpamClassifier

    def __post_init__(self) -> None:
        if self.tfidf.dim != self.classifier.input_dim:
            raise ClassifierInputError(
                f"tfidf dimension {self.tfidf.dim} != classifier input_dim {self.classifier.input_dim}"
            )

    def probability(self, text: str) -> float:
        return classifier_predict(self.classifier, tfidf_transform(self.tfidf, tokenize(text)))

    def to_dict(self) -> dict:
        return {
            "schema_version": MODEL_SCHEMA_VERSION,
            "tfidf": self.tfidf.to_dict(),
            "classifier": self.classifier.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> SpamModel:
        found = data.get("schema_version")
        if found != MODEL_SCHEMA_VERSION:
            raise ClassifierInputError(
                f"unsupported model schema_version: found {found!r}, expected {MODEL_SCHEMA_VERSION}"
            )
        return cls(TfIdfModel.from_dict(data["tfidf"]), SpamClassifier.from_dict(data["classifier"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> SpamModel:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def read_training_jsonl(path: str | Path) -> list[tuple[str, int]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if set(obj) != {"text", "label"} or obj["label"] not in (0, 1, True, False):
                raise ClassifierInputError(f"{path}:{lineno}: expected {{text, label}} with label 0/1")
            rows.append((obj["text"], int(obj["label"])))
    return rows


def train_spam_model(
    rows: list[tuple[str, int]],
    seed: int = 0,
    epochs: int = DEFAULT_EPOCHS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    hidden_dim: int = HIDDEN_DIM,
) -> SpamModel:
    token_lists = [tokenize(text) for text, _ in rows]
    tfidf = tfidf_fit(token_lists)
    data = [(tfidf_transform(tfidf, toks), label) for toks, (_, label) in zip(token_lists, rows)]
    clf = classifier_train((tfidf.dim, hidden_dim), data, epochs, learning_rate, seed)
    return SpamModel(tfidf, clf)


def bundled_training_path() -> Path:
    return Path(str(resources.files("ghabuse") / "data" / "spam_train.jsonl"))


@lru_cache(maxsize=4)
def default_spam_model(seed: int = 0) -> SpamModel:
    """Model trained on the bundled issue corpus; cached per seed."""
    return train_spam_model(read_training_jsonl(bundled_training_path()), seed=seed)
