"""Confusion counts, precision/recall/F1 and report rendering."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from ghabuse.model import Subcategory

METRIC_COLUMNS = ("precision", "recall", "f1", "accuracy")


@dataclass(frozen=True)
class MetricsRow:
    """Per-subcategory metrics. Undefined ratios are None, never 0."""

    subcategory: Subcategory
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    @property
    def f1(self) -> float | None:
        p, r = self.precision, self.recall
        if p is None or r is None:
            return None
        return 2 * p * r / (p + r) if p + r else 0.0

    @property
    def accuracy(self) -> float | None:
        return (self.tp + self.tn) / self.total if self.total else None

    def to_dict(self) -> dict:
        return {
            "subcategory": self.subcategory.value,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
        }

    @classmethod
    def from_dict(cls, data: dict) -> MetricsRow:
        return cls(Subcategory(data["subcategory"]), data["tp"], data["fp"], data["tn"], data["fn"])


def confusion_rows(outcomes: Iterable[tuple[Subcategory, bool, bool]]) -> list[MetricsRow]:
    """Aggregate ``(subcategory, label, predicted)`` triples, in subcategory declaration order."""
    counts: dict[Subcategory, list[int]] = {}
    for sub, label, predicted in outcomes:
        c = counts.setdefault(sub, [0, 0, 0, 0])
        if predicted and label:
            c[0] += 1
        elif predicted:
            c[1] += 1
        elif label:
            c[3] += 1
        else:
            c[2] += 1
    return [MetricsRow(sub, *counts[sub]) for sub in Subcategory if sub in counts]


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def emit_report(rows: Sequence[MetricsRow], format: str = "markdown") -> str:
    if not rows:
        raise ValueError("emit_report needs at least one row")
    if format == "jsonl":
        return "".join(json.dumps(r.to_dict()) + "\n" for r in rows)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(("subcategory",) + METRIC_COLUMNS)
        for r in rows:
            writer.writerow([r.subcategory.value] + [_fmt(getattr(r, m)) for m in METRIC_COLUMNS])
        return buf.getvalue()
    if format == "markdown":
        lines = [
            "| subcategory | precision | recall | f1 | accuracy |",
            "|---|---:|---:|---:|---:|",
        ]
        for r in rows:
            cells = [_fmt(getattr(r, m)) or "n/a" for m in METRIC_COLUMNS]
            lines.append(f"| {r.subcategory.value} | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format: {format!r}")


def plot_data_csv(rows: Sequence[MetricsRow]) -> str:
    """Long-form ``subcategory,metric,value`` rows for grouped bar charts."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(("subcategory", "metric", "value"))
    for r in rows:
        for m in ("precision", "recall", "f1"):
            writer.writerow((r.subcategory.value, m, _fmt(getattr(r, m))))
    return buf.getvalue()
