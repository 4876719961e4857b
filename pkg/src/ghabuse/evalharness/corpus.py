"""Labeled-corpus manifest: JSON-lines of ``LabeledInstance`` rows."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from ghabuse.model import REPO_CATEGORIES, SnapshotError, Subcategory

_FIELDS = ("instance_id", "subcategory", "subject_kind", "snapshot_path", "label", "context", "near_miss")


@dataclass(frozen=True)
class LabeledInstance:
    """One labeled subject.

    ``context`` lists auxiliary snapshots the detector needs (stargazers,
    the suspected contributor, repos a user interacted with, typo-squatting
    references). ``near_miss`` optionally records the single threshold
    change that would flip a near-miss negative, as ``{"knob", "value"}``;
    ``value`` is omitted when the flip point depends on a trained model.
    Paths are relative to the manifest's directory.
    """

    instance_id: str
    subcategory: Subcategory
    subject_kind: str
    snapshot_path: str
    label: bool
    context: tuple[str, ...] = ()
    near_miss: dict[str, Any] | None = field(default=None, hash=False)

    def __post_init__(self) -> None:
        if self.subject_kind not in ("repo", "user"):
            raise SnapshotError(f"{self.instance_id}: subject_kind must be repo or user")
        expected = "repo" if self.subcategory in REPO_CATEGORIES else "user"
        if self.subject_kind != expected:
            raise SnapshotError(f"{self.instance_id}: {self.subcategory.value} instances are {expected} subjects")

    def to_dict(self) -> dict[str, Any]:
        out = {
            "instance_id": self.instance_id,
            "subcategory": self.subcategory.value,
            "subject_kind": self.subject_kind,
            "snapshot_path": self.snapshot_path,
            "label": self.label,
            "context": list(self.context),
        }
        if self.near_miss is not None:
            out["near_miss"] = self.near_miss
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LabeledInstance:
        unknown = sorted(set(data) - set(_FIELDS))
        if unknown:
            raise SnapshotError(f"manifest row has unknown fields: {', '.join(unknown)}")
        try:
            return cls(
                instance_id=data["instance_id"],
                subcategory=Subcategory(data["subcategory"]),
                subject_kind=data["subject_kind"],
                snapshot_path=data["snapshot_path"],
                label=bool(data["label"]),
                context=tuple(data.get("context", ())),
                near_miss=data.get("near_miss"),
            )
        except (KeyError, ValueError) as exc:
            raise SnapshotError(f"bad manifest row {data.get('instance_id')!r}: {exc}") from exc


def write_manifest(path: str | Path, instances: Iterable[LabeledInstance]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_dict(), ensure_ascii=False) + "\n")


def read_manifest(path: str | Path) -> list[LabeledInstance]:
    rows = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            inst = LabeledInstance.from_dict(json.loads(line))
            if inst.instance_id in seen:
                raise SnapshotError(f"duplicate instance_id {inst.instance_id!r}")
            seen.add(inst.instance_id)
            rows.append(inst)
    return rows
