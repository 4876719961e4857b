"""Run a selection of detectors over a batch of snapshots.

The batch supplies each detector's context: stargazer and contributor user
snapshots, the popular references for typo squatting, the BM25 corpus for
keyword stuffing, and the closed issues and PRs for reputation farming.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Iterable, Sequence

from ghabuse import detectors as det
from ghabuse.ingest.store import load_snapshot
from ghabuse.model import DetectionVerdict, RepoSnapshot, Snapshot, SnapshotError, Subcategory, ThresholdConfig, UserSnapshot
from ghabuse.textkit.background import background_corpus
from ghabuse.textkit.spam import SpamModel, default_spam_model

ALL_DETECTORS = frozenset(Subcategory)


def parse_detectors(selection: str | Iterable[str] | None) -> frozenset[Subcategory]:
    """Comma-separated or iterable detector names; ``None`` or ``"all"`` selects all."""
    if selection is None:
        return ALL_DETECTORS
    names = [s.strip() for s in selection.split(",")] if isinstance(selection, str) else [s.strip() for s in selection]
    names = [n for n in names if n]
    if names == ["all"]:
        return ALL_DETECTORS
    if not names:
        raise ValueError("detector selection is empty")
    known = {s.value: s for s in Subcategory}
    unknown = [n for n in names if n not in known]
    if unknown:
        raise ValueError(f"unknown detector: {unknown[0]} (choose from {', '.join(known)})")
    return frozenset(known[n] for n in names)


def snapshot_paths(paths: Iterable[str | Path]) -> list[Path]:
    """Files as given, directories expanded to their ``*.json`` files in sorted order."""
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            found = sorted(p.rglob("*.json"))
            if not found:
                raise FileNotFoundError(f"no snapshot files under {p}")
            out.extend(found)
        elif p.is_file():
            out.append(p)
        else:
            raise FileNotFoundError(f"no such snapshot path: {p}")
    if not out:
        raise FileNotFoundError("no snapshot paths given")
    return out


def load_batch(paths: Iterable[str | Path]) -> tuple[list[RepoSnapshot], list[UserSnapshot]]:
    repos: dict[str, RepoSnapshot] = {}
    users: dict[str, UserSnapshot] = {}
    for path in snapshot_paths(paths):
        snap = load_snapshot(path)
        key, bucket = (
            (snap.full_name.lower(), repos) if isinstance(snap, RepoSnapshot) else (snap.login.lower(), users)
        )
        if key in bucket:
            raise SnapshotError(f"{path}: duplicate snapshot for {key}")
        bucket[key] = snap
    return [repos[k] for k in sorted(repos)], [users[k] for k in sorted(users)]


def scan(
    snapshots: Sequence[Snapshot],
    selected: Iterable[Subcategory] = ALL_DETECTORS,
    cfg: ThresholdConfig | None = None,
    spam_model: SpamModel | Callable[[], SpamModel] | None = None,
) -> list[DetectionVerdict]:
    """Verdicts for every applicable (detector, subject) pair, in a stable order.

    Repos come first, sorted by name, then users sorted by login; within a
    subject detectors run in declaration order. ``spam_model`` may be a
    model or a zero-argument factory so it is only built when an issue needs
    scoring.
    """
    cfg = cfg or ThresholdConfig()
    selected = frozenset(selected)
    repos = sorted((s for s in snapshots if isinstance(s, RepoSnapshot)), key=lambda r: r.full_name.lower())
    users = sorted((s for s in snapshots if isinstance(s, UserSnapshot)), key=lambda u: u.login.lower())
    by_login = {u.login.lower(): u for u in users}

    corpus = None
    if Subcategory.KEYWORD_STUFFING in selected and repos:
        corpus = background_corpus([(r.full_name, r.readme) for r in repos])
    references = det.popular_references(repos, cfg)
    spam: SpamModel | None = spam_model if isinstance(spam_model, SpamModel) else None

    out: list[DetectionVerdict] = []
    for repo in repos:
        if Subcategory.FAKE_STARS in selected:
            gazers = [by_login[e.user_login.lower()] for e in repo.star_events if e.user_login.lower() in by_login]
            gazers = list({u.login: u for u in gazers}.values())
            if gazers:
                per_user = det.detect_fake_stars(repo, gazers, cfg)
                out.append(det.summarize_fake_stars(repo, per_user, cfg))
                out.extend(per_user)
        if Subcategory.AUTOMATIC_UPDATES in selected:
            out.append(det.detect_automatic_updates(repo, cfg))
        if Subcategory.KEYWORD_STUFFING in selected:
            out.append(det.detect_keyword_stuffing(repo, corpus, cfg))
        if Subcategory.TYPO_SQUATTING in selected:
            refs = [r for r in references if r.full_name.lower() != repo.full_name.lower()]
            if refs:
                out.extend(det.detect_typo_squatting(repo, refs, cfg))
        if Subcategory.SPOOFED_CONTRIBUTOR in selected:
            # an owner committing to their own repo is not a borrowed identity
            for user in users:
                if user.login.lower() == repo.owner.lower():
                    continue
                if any(c.attributed_to(user.login) for c in repo.commits):
                    out.append(det.detect_spoofed_contributor(repo, user, cfg))
        if Subcategory.ISSUE_SPAM in selected and repo.issues:
            if spam is None:
                spam = spam_model() if callable(spam_model) else default_spam_model()
            out.extend(det.detect_issue_spam(repo, spam.classifier, spam.tfidf, cfg))
    for user in users:
        if Subcategory.REPUTATION_FARMING in selected:
            out.append(det.detect_reputation_farming(user, repos, cfg))
        if Subcategory.FAKE_STATS in selected:
            out.append(det.detect_fake_stats(user, cfg))
    return out
