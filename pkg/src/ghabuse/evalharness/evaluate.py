"""Run each labeled instance through its own detector and score the results."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

from ghabuse import detectors as det
from ghabuse.evalharness.corpus import LabeledInstance, read_manifest
from ghabuse.evalharness.metrics import MetricsRow, confusion_rows
from ghabuse.ingest.store import load_snapshot
from ghabuse.model import RepoSnapshot, Snapshot, SnapshotError, Subcategory, ThresholdConfig, UserSnapshot
from ghabuse.textkit.background import background_corpus
from ghabuse.textkit.bm25 import Corpus
from ghabuse.textkit.spam import SpamModel, default_spam_model


class EvaluationError(RuntimeError):
    pass


@dataclass
class EvaluationResult:
    rows: list[MetricsRow]
    predictions: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "predictions": dict(sorted(self.predictions.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


class SnapshotLoader:
    """Resolves manifest-relative paths and caches loaded snapshots."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self._load: Callable[[str], Snapshot] = lru_cache(maxsize=None)(self._read)

    def _read(self, rel: str) -> Snapshot:
        return load_snapshot(self.root / rel)

    def __call__(self, rel: str) -> Snapshot:
        return self._load(rel)

    def repo(self, rel: str) -> RepoSnapshot:
        snap = self(rel)
        if not isinstance(snap, RepoSnapshot):
            raise SnapshotError(f"{rel}: expected a repo snapshot")
        return snap

    def user(self, rel: str) -> UserSnapshot:
        snap = self(rel)
        if not isinstance(snap, UserSnapshot):
            raise SnapshotError(f"{rel}: expected a user snapshot")
        return snap


def batch_corpus(instances: Sequence[LabeledInstance], load: SnapshotLoader) -> Corpus:
    """Background READMEs plus the README of every repo subject in the batch."""
    seen: dict[str, str] = {}
    for inst in instances:
        if inst.subject_kind == "repo":
            repo = load.repo(inst.snapshot_path)
            seen.setdefault(repo.full_name, repo.readme)
    return background_corpus(sorted(seen.items()))


def instance_verdicts(
    inst: LabeledInstance,
    load: SnapshotLoader,
    cfg: ThresholdConfig,
    spam: SpamModel | None,
    corpus: Corpus | None,
) -> tuple[bool, list]:
    """The instance-level decision plus the verdicts behind it."""
    sub = inst.subcategory
    if sub is Subcategory.FAKE_STARS:
        repo = load.repo(inst.snapshot_path)
        per_user = det.detect_fake_stars(repo, [load.user(p) for p in inst.context], cfg)
        summary = det.summarize_fake_stars(repo, per_user, cfg)
        return summary.flagged, [summary, *per_user]
    if sub is Subcategory.AUTOMATIC_UPDATES:
        v = det.detect_automatic_updates(load.repo(inst.snapshot_path), cfg)
        return v.flagged, [v]
    if sub is Subcategory.KEYWORD_STUFFING:
        repo = load.repo(inst.snapshot_path)
        if corpus is None or repo.full_name not in corpus:
            corpus = background_corpus([(repo.full_name, repo.readme)])
        v = det.detect_keyword_stuffing(repo, corpus, cfg)
        return v.flagged, [v]
    if sub is Subcategory.TYPO_SQUATTING:
        refs = [det.PopularReference.from_repo(load.repo(p)) for p in inst.context]
        vs = det.detect_typo_squatting(load.repo(inst.snapshot_path), refs, cfg)
        return any(v.flagged for v in vs), vs
    if sub is Subcategory.SPOOFED_CONTRIBUTOR:
        if len(inst.context) != 1:
            raise EvaluationError(f"{inst.instance_id}: spoofed_contributor needs exactly one suspect in context")
        v = det.detect_spoofed_contributor(load.repo(inst.snapshot_path), load.user(inst.context[0]), cfg)
        return v.flagged, [v]
    if sub is Subcategory.ISSUE_SPAM:
        if spam is None:
            raise EvaluationError("issue_spam instances need spam classifier artifacts")
        vs = det.detect_issue_spam(load.repo(inst.snapshot_path), spam.classifier, spam.tfidf, cfg)
        return any(v.flagged for v in vs), vs
    if sub is Subcategory.REPUTATION_FARMING:
        v = det.detect_reputation_farming(load.user(inst.snapshot_path), [load.repo(p) for p in inst.context], cfg)
        return v.flagged, [v]
    if sub is Subcategory.FAKE_STATS:
        v = det.detect_fake_stats(load.user(inst.snapshot_path), cfg)
        return v.flagged, [v]
    raise EvaluationError(f"unknown subcategory {sub}")


def evaluate_instances(
    instances: Sequence[LabeledInstance],
    root: str | Path,
    cfg: ThresholdConfig,
    spam: SpamModel | None = None,
) -> EvaluationResult:
    load = SnapshotLoader(root)
    needs_spam = any(i.subcategory is Subcategory.ISSUE_SPAM for i in instances)
    if spam is None and needs_spam:
        spam = default_spam_model()
    corpus = None
    predictions: dict[str, bool] = {}
    outcomes = []
    for inst in instances:
        try:
            if inst.subcategory is Subcategory.KEYWORD_STUFFING and corpus is None:
                corpus = batch_corpus(instances, load)
            predicted, _ = instance_verdicts(inst, load, cfg, spam, corpus)
        except (OSError, SnapshotError) as exc:
            raise EvaluationError(f"instance {inst.instance_id}: {exc}") from exc
        predictions[inst.instance_id] = predicted
        outcomes.append((inst.subcategory, inst.label, predicted))
    return EvaluationResult(confusion_rows(outcomes), predictions)


def evaluate(
    corpus_manifest: str | Path,
    cfg: ThresholdConfig | None = None,
    classifier_artifacts: SpamModel | str | Path | None = None,
) -> EvaluationResult:
    """Score every instance of a manifest with its subcategory's detector.

    ``classifier_artifacts`` is a ``SpamModel`` or a path to a saved one;
    when omitted the model trained on the bundled issue corpus is used.
    """
    cfg = cfg or ThresholdConfig()
    manifest = Path(corpus_manifest)
    instances = read_manifest(manifest)
    spam = classifier_artifacts
    if isinstance(spam, (str, Path)):
        spam = SpamModel.load(spam)
    return evaluate_instances(instances, manifest.parent, cfg, spam)
