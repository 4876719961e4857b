from __future__ import annotations

import json
from pathlib import Path

from ghabuse.model import Snapshot, SnapshotError, snapshot_from_dict, snapshot_to_dict


def dumps_snapshot(snapshot: Snapshot) -> str:
    """Canonical text form: two-space indent, fixed field order, trailing newline."""
    return json.dumps(snapshot_to_dict(snapshot), indent=2, ensure_ascii=False) + "\n"


def store_snapshot(path: str | Path, snapshot: Snapshot) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_snapshot(snapshot), encoding="utf-8")


def load_snapshot(path: str | Path) -> Snapshot:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return snapshot_from_dict(data)
    except SnapshotError as exc:
        raise SnapshotError(f"{path}: {exc}") from exc
