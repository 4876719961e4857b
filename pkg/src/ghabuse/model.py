"""Offline snapshot data model.

Every detector works on frozen snapshots of a repository or a user account.
Snapshots are immutable; list-valued fields are stored as tuples.
Timestamps are integral UTC seconds. ISO-8601 strings are accepted only when
loading from JSON (see ``repo_from_dict`` / ``user_from_dict``).
"""

from __future__ import annotations

import bisect
import dataclasses
import math
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Union

SCHEMA_VERSION = 1

REPO_STAR_CAP = 100_000
USER_FOLLOWER_CAP = 10_000

DAY = 86_400

_FULL_NAME = re.compile(r"^[^/\s]+/[^/\s]+$")
_SHA = re.compile(r"^[0-9a-f]{40}$")


class SnapshotError(ValueError):
    """A snapshot or config document violates the schema or an invariant."""


class Subcategory(str, Enum):
    FAKE_STARS = "fake_stars"
    AUTOMATIC_UPDATES = "automatic_updates"
    KEYWORD_STUFFING = "keyword_stuffing"
    TYPO_SQUATTING = "typo_squatting"
    SPOOFED_CONTRIBUTOR = "spoofed_contributor"
    ISSUE_SPAM = "issue_spam"
    REPUTATION_FARMING = "reputation_farming"
    FAKE_STATS = "fake_stats"


REPO_CATEGORIES = (
    Subcategory.FAKE_STARS,
    Subcategory.AUTOMATIC_UPDATES,
    Subcategory.KEYWORD_STUFFING,
    Subcategory.TYPO_SQUATTING,
    Subcategory.SPOOFED_CONTRIBUTOR,
    Subcategory.ISSUE_SPAM,
)
USER_CATEGORIES = (Subcategory.REPUTATION_FARMING, Subcategory.FAKE_STATS)


class IssueState(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class PullRequestState(str, Enum):
    OPEN = "open"
    CLOSED = "closed"
    MERGED = "merged"


class ActivityKind(str, Enum):
    COMMIT = "commit"
    ISSUE_OPENED = "issue_opened"
    ISSUE_COMMENT = "issue_comment"
    PR_OPENED = "pr_opened"
    PR_REVIEW = "pr_review"
    PR_COMMENT = "pr_comment"
    STAR = "star"
    FORK = "fork"
    OTHER = "other"


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise SnapshotError(msg)


def _sorted(values, key) -> bool:
    return all(key(a) <= key(b) for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class StarEvent:
    user_login: str
    starred_at: int


@dataclass(frozen=True)
class CommitRecord:
    sha: str
    author_login: str
    timestamp: int
    lines_added: int = 0
    lines_deleted: int = 0
    co_authors: tuple[str, ...] = ()
    touched_paths: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        _check(bool(_SHA.match(self.sha)), f"commit sha must be 40 hex chars: {self.sha!r}")
        _check(self.lines_added >= 0 and self.lines_deleted >= 0, f"negative diffstat on {self.sha}")

    @property
    def modified_lines(self) -> int:
        return self.lines_added + self.lines_deleted

    def attributed_to(self, login: str) -> bool:
        """True when ``login`` is the author or one of the co-authors."""
        who = login.lower()
        return self.author_login.lower() == who or any(c.lower() == who for c in self.co_authors)


@dataclass(frozen=True)
class IssueRecord:
    number: int
    author_login: str
    title: str
    body: str
    created_at: int
    state: IssueState = IssueState.OPEN
    closed_at: int | None = None

    def __post_init__(self) -> None:
        _check(self.number > 0, f"issue number must be positive: {self.number}")
        closed = self.state is IssueState.CLOSED
        _check(closed == (self.closed_at is not None), f"issue #{self.number}: closed_at iff state=closed")
        if self.closed_at is not None:
            _check(self.closed_at >= self.created_at, f"issue #{self.number} closed before creation")


@dataclass(frozen=True)
class PullRequestRecord:
    number: int
    author_login: str
    title: str
    body: str
    created_at: int
    state: PullRequestState = PullRequestState.OPEN
    merged_or_closed_at: int | None = None

    def __post_init__(self) -> None:
        _check(self.number > 0, f"pull request number must be positive: {self.number}")
        is_open = self.state is PullRequestState.OPEN
        _check(
            is_open == (self.merged_or_closed_at is None),
            f"pull request #{self.number}: merged_or_closed_at iff state != open",
        )


@dataclass(frozen=True)
class ActivityEvent:
    kind: ActivityKind
    timestamp: int
    target: str


@dataclass(frozen=True)
class RepoSnapshot:
    full_name: str
    snapshot_at: int
    description: str = ""
    readme: str = ""
    keywords: tuple[str, ...] = ()
    star_count: int = 0
    fork_count: int = 0
    star_events: tuple[StarEvent, ...] = ()
    commits: tuple[CommitRecord, ...] = ()
    issues: tuple[IssueRecord, ...] = ()
    pull_requests: tuple[PullRequestRecord, ...] = ()

    def __post_init__(self) -> None:
        _check(bool(_FULL_NAME.match(self.full_name)), f"full_name must be owner/name: {self.full_name!r}")
        _check(self.star_count >= 0 and self.fork_count >= 0, "negative star or fork count")
        _check(all(self.keywords), f"{self.full_name}: empty keyword")
        _check(len(set(self.keywords)) == len(self.keywords), f"{self.full_name}: duplicate keywords")
        _check(_sorted(self.star_events, lambda e: e.starred_at), f"{self.full_name}: star_events not sorted")
        _check(_sorted(self.commits, lambda c: c.timestamp), f"{self.full_name}: commits not sorted")
        _check(len({c.sha for c in self.commits}) == len(self.commits), f"{self.full_name}: duplicate commit sha")
        if self.star_events:
            _check(
                self.star_events[-1].starred_at <= self.snapshot_at,
                f"{self.full_name}: star event after snapshot_at",
            )

    @property
    def owner(self) -> str:
        return self.full_name.split("/", 1)[0]

    @property
    def name(self) -> str:
        return self.full_name.split("/", 1)[1]

    def star_time(self, login: str) -> int | None:
        """Earliest star timestamp for ``login``, or None if they never starred."""
        who = login.lower()
        for ev in self.star_events:
            if ev.user_login.lower() == who:
                return ev.starred_at
        return None


@dataclass(frozen=True)
class OwnedRepo:
    full_name: str
    star_count: int


@dataclass(frozen=True)
class UserSnapshot:
    login: str
    snapshot_at: int
    starred_repos: tuple[str, ...] = ()
    owned_repos: tuple[OwnedRepo, ...] = ()
    activity: tuple[ActivityEvent, ...] = ()
    profile_readme: str = ""
    stat_widget_urls: tuple[str, ...] = ()
    claimed_star_count: int | None = None
    follower_count: int = 0

    def __post_init__(self) -> None:
        _check(bool(self.login), "login must be non-empty")
        _check(self.follower_count >= 0, f"{self.login}: negative follower_count")
        _check(
            self.claimed_star_count is None or self.claimed_star_count >= 0,
            f"{self.login}: negative claimed_star_count",
        )
        _check(len(set(self.starred_repos)) == len(self.starred_repos), f"{self.login}: duplicate starred repo")
        _check(_sorted(self.activity, lambda e: e.timestamp), f"{self.login}: activity not sorted")
        if self.activity:
            _check(self.activity[-1].timestamp <= self.snapshot_at, f"{self.login}: activity after snapshot_at")
        for url in self.stat_widget_urls:
            _check(url in self.profile_readme, f"{self.login}: widget url not in profile_readme: {url}")


Snapshot = Union[RepoSnapshot, UserSnapshot]


@dataclass(frozen=True)
class ThresholdConfig:
    """Every tunable threshold used by the detectors.

    Window lengths and ``delta_t`` are in seconds.
    """

    x1: int = 2
    x2: int = 50
    x3: int = 5
    x4: int = 3
    x5: int = 10
    epsilon: int = 1
    y: float = 3.0
    theta_k: float = 0.10
    theta_t1: float = 0.80
    theta_t2: float = 0.60
    phi_p1: float = 3.0
    phi_p2: float = 0.20
    phi_p3: float = 0.50
    delta_t: int = 3600
    window_fake_stars: int = 30 * DAY
    window_auto_updates: int = 7 * DAY
    window_rep_farming: int = 90 * DAY
    farming_min_events: int = 3
    fake_stars_repo_fraction: float = 0.5
    popularity_floor: int = 1000

    def __post_init__(self) -> None:
        for name in ("x1", "x2", "x3", "x4", "x5", "epsilon", "delta_t", "popularity_floor"):
            _check(getattr(self, name) >= 0, f"{name} must be non-negative")
        _check(self.y >= 0, "y must be non-negative")
        for name in ("theta_k", "theta_t1", "theta_t2", "phi_p2", "phi_p3", "fake_stars_repo_fraction"):
            _check(0.0 <= getattr(self, name) <= 1.0, f"{name} must lie in [0, 1]")
        _check(self.phi_p1 >= 1.0, "phi_p1 must be >= 1")
        for name in ("window_fake_stars", "window_auto_updates", "window_rep_farming"):
            _check(getattr(self, name) > 0, f"{name} must be strictly positive")
        _check(self.farming_min_events >= 1, "farming_min_events must be >= 1")

    def replace(self, **changes: Any) -> ThresholdConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ThresholdConfig:
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(known))
        _check(not unknown, f"unknown threshold keys: {', '.join(unknown)}")
        values = {}
        for key, raw in data.items():
            want = int if known[key].type in ("int", int) else float
            if want is int and (isinstance(raw, bool) or not float(raw).is_integer()):
                raise SnapshotError(f"threshold {key} must be an integer, got {raw!r}")
            values[key] = want(raw)
        return cls(**values)


@dataclass(frozen=True)
class Evidence:
    clause: str
    observed: Any
    threshold: Any = None


@dataclass(frozen=True)
class DetectionVerdict:
    detector: Subcategory
    subject: str
    flagged: bool
    evidence: tuple[Evidence, ...] = ()
    indeterminate: bool = False

    def __post_init__(self) -> None:
        if self.flagged:
            _check(bool(self.evidence), "flagged verdict without evidence")
            _check(not self.indeterminate, "indeterminate verdict cannot be flagged")

    def clause(self, name: str) -> Evidence | None:
        for ev in self.evidence:
            if ev.clause == name:
                return ev
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "detector": self.detector.value,
            "subject": self.subject,
            "flagged": self.flagged,
            "indeterminate": self.indeterminate,
            "evidence": [[e.clause, e.observed, e.threshold] for e in self.evidence],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DetectionVerdict:
        return cls(
            detector=Subcategory(data["detector"]),
            subject=data["subject"],
            flagged=data["flagged"],
            indeterminate=data.get("indeterminate", False),
            evidence=tuple(Evidence(*row) for row in data["evidence"]),
        )


def activity_count(user: UserSnapshot, start: int, end: int) -> int:
    """Number of activity events with ``start <= timestamp < end``."""
    if start > end:
        raise ValueError(f"inverted interval [{start}, {end})")
    # activity is sorted, so bisect instead of scanning
    stamps = [e.timestamp for e in user.activity]
    return bisect.bisect_left(stamps, end) - bisect.bisect_left(stamps, start)


def normalized_popularity(raw: int, scale_cap: int) -> float:
    if scale_cap <= 0:
        raise ValueError("scale_cap must be positive")
    if raw <= 0:
        return 0.0
    return min(1.0, math.log10(1 + raw) / math.log10(1 + scale_cap))


def repo_popularity(star_count: int) -> float:
    return normalized_popularity(star_count, REPO_STAR_CAP)


def user_popularity(follower_count: int) -> float:
    return normalized_popularity(follower_count, USER_FOLLOWER_CAP)


def derive_keywords(topics: list[str] | tuple[str, ...], description: str) -> tuple[str, ...]:
    """Repository topics followed by description tokens of length >= 3, deduplicated."""
    from ghabuse.textkit.tokenize import tokenize

    out: list[str] = []
    for word in [t.strip().lower() for t in topics] + [t for t in tokenize(description) if len(t) >= 3]:
        if word and word not in out:
            out.append(word)
    return tuple(out)


# -- JSON boundary ---------------------------------------------------------

def parse_timestamp(value: Any) -> int:
    """Integral UTC seconds from an int or an ISO-8601 string."""
    if isinstance(value, bool):
        raise SnapshotError(f"invalid timestamp: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        try:
            dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError as exc:
            raise SnapshotError(f"invalid timestamp: {value!r}") from exc
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    raise SnapshotError(f"invalid timestamp: {value!r}")


def _take(data: dict[str, Any], where: str, required: tuple[str, ...], optional: tuple[str, ...]) -> dict:
    if not isinstance(data, dict):
        raise SnapshotError(f"{where}: expected an object")
    unknown = sorted(set(data) - set(required) - set(optional))
    if unknown:
        raise SnapshotError(f"{where}: unknown fields {', '.join(unknown)}")
    missing = [k for k in required if k not in data]
    if missing:
        raise SnapshotError(f"{where}: missing fields {', '.join(missing)}")
    return data


def _ts_opt(value: Any) -> int | None:
    return None if value is None else parse_timestamp(value)


def _build(cls, where: str, **kwargs):
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SnapshotError):
            raise
        raise SnapshotError(f"{where}: {exc}") from exc


def repo_to_dict(repo: RepoSnapshot) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "repo",
        "full_name": repo.full_name,
        "description": repo.description,
        "readme": repo.readme,
        "keywords": list(repo.keywords),
        "star_count": repo.star_count,
        "fork_count": repo.fork_count,
        "star_events": [{"user_login": e.user_login, "starred_at": e.starred_at} for e in repo.star_events],
        "commits": [
            {
                "sha": c.sha,
                "author_login": c.author_login,
                "co_authors": list(c.co_authors),
                "timestamp": c.timestamp,
                "lines_added": c.lines_added,
                "lines_deleted": c.lines_deleted,
                "touched_paths": list(c.touched_paths),
            }
            for c in repo.commits
        ],
        "issues": [
            {
                "number": i.number,
                "author_login": i.author_login,
                "title": i.title,
                "body": i.body,
                "created_at": i.created_at,
                "closed_at": i.closed_at,
                "state": i.state.value,
            }
            for i in repo.issues
        ],
        "pull_requests": [
            {
                "number": p.number,
                "author_login": p.author_login,
                "title": p.title,
                "body": p.body,
                "created_at": p.created_at,
                "merged_or_closed_at": p.merged_or_closed_at,
                "state": p.state.value,
            }
            for p in repo.pull_requests
        ],
        "snapshot_at": repo.snapshot_at,
    }


def user_to_dict(user: UserSnapshot) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "user",
        "login": user.login,
        "starred_repos": list(user.starred_repos),
        "owned_repos": [[r.full_name, r.star_count] for r in user.owned_repos],
        "activity": [{"kind": e.kind.value, "timestamp": e.timestamp, "target": e.target} for e in user.activity],
        "profile_readme": user.profile_readme,
        "stat_widget_urls": list(user.stat_widget_urls),
        "claimed_star_count": user.claimed_star_count,
        "follower_count": user.follower_count,
        "snapshot_at": user.snapshot_at,
    }


def snapshot_to_dict(snap: Snapshot) -> dict[str, Any]:
    if isinstance(snap, RepoSnapshot):
        return repo_to_dict(snap)
    return user_to_dict(snap)


def _check_header(data: dict[str, Any], kind: str) -> None:
    if not isinstance(data, dict):
        raise SnapshotError("snapshot document must be a JSON object")
    found = data.get("schema_version")
    if found != SCHEMA_VERSION:
        raise SnapshotError(f"unsupported schema_version: found {found!r}, expected {SCHEMA_VERSION}")
    if data.get("kind") != kind:
        raise SnapshotError(f"expected kind {kind!r}, found {data.get('kind')!r}")


def repo_from_dict(data: dict[str, Any]) -> RepoSnapshot:
    _check_header(data, "repo")
    d = _take(
        data,
        "repo",
        ("schema_version", "kind", "full_name", "snapshot_at"),
        ("description", "readme", "keywords", "star_count", "fork_count",
         "star_events", "commits", "issues", "pull_requests"),
    )
    where = f"repo {d['full_name']}"
    stars = []
    for raw in d.get("star_events", []):
        s = _take(raw, f"{where} star_event", ("user_login", "starred_at"), ())
        stars.append(StarEvent(s["user_login"], parse_timestamp(s["starred_at"])))
    commits = []
    for raw in d.get("commits", []):
        c = _take(raw, f"{where} commit", ("sha", "author_login", "timestamp"),
                  ("co_authors", "lines_added", "lines_deleted", "touched_paths"))
        commits.append(_build(
            CommitRecord, where,
            sha=c["sha"], author_login=c["author_login"], timestamp=parse_timestamp(c["timestamp"]),
            lines_added=c.get("lines_added", 0), lines_deleted=c.get("lines_deleted", 0),
            co_authors=tuple(c.get("co_authors", ())), touched_paths=tuple(c.get("touched_paths", ())),
        ))
    issues = []
    for raw in d.get("issues", []):
        i = _take(raw, f"{where} issue", ("number", "author_login", "created_at"),
                  ("title", "body", "closed_at", "state"))
        issues.append(_build(
            IssueRecord, where,
            number=i["number"], author_login=i["author_login"], title=i.get("title", ""),
            body=i.get("body", ""), created_at=parse_timestamp(i["created_at"]),
            closed_at=_ts_opt(i.get("closed_at")), state=IssueState(i.get("state", "open")),
        ))
    pulls = []
    for raw in d.get("pull_requests", []):
        p = _take(raw, f"{where} pull_request", ("number", "author_login", "created_at"),
                  ("title", "body", "merged_or_closed_at", "state"))
        pulls.append(_build(
            PullRequestRecord, where,
            number=p["number"], author_login=p["author_login"], title=p.get("title", ""),
            body=p.get("body", ""), created_at=parse_timestamp(p["created_at"]),
            merged_or_closed_at=_ts_opt(p.get("merged_or_closed_at")),
            state=PullRequestState(p.get("state", "open")),
        ))
    return _build(
        RepoSnapshot, where,
        full_name=d["full_name"], snapshot_at=parse_timestamp(d["snapshot_at"]),
        description=d.get("description", ""), readme=d.get("readme", ""),
        keywords=tuple(d.get("keywords", ())), star_count=d.get("star_count", 0),
        fork_count=d.get("fork_count", 0), star_events=tuple(stars), commits=tuple(commits),
        issues=tuple(issues), pull_requests=tuple(pulls),
    )


def user_from_dict(data: dict[str, Any]) -> UserSnapshot:
    _check_header(data, "user")
    d = _take(
        data,
        "user",
        ("schema_version", "kind", "login", "snapshot_at"),
        ("starred_repos", "owned_repos", "activity", "profile_readme", "stat_widget_urls",
         "claimed_star_count", "follower_count"),
    )
    where = f"user {d['login']}"
    owned = []
    for pair in d.get("owned_repos", []):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise SnapshotError(f"{where}: owned_repos entries must be [full_name, star_count]")
        owned.append(OwnedRepo(pair[0], int(pair[1])))
    activity = []
    for raw in d.get("activity", []):
        a = _take(raw, f"{where} activity", ("kind", "timestamp", "target"), ())
        try:
            kind = ActivityKind(a["kind"])
        except ValueError as exc:
            raise SnapshotError(f"{where}: unknown activity kind {a['kind']!r}") from exc
        activity.append(ActivityEvent(kind, parse_timestamp(a["timestamp"]), a["target"]))
    return _build(
        UserSnapshot, where,
        login=d["login"], snapshot_at=parse_timestamp(d["snapshot_at"]),
        starred_repos=tuple(d.get("starred_repos", ())), owned_repos=tuple(owned),
        activity=tuple(activity), profile_readme=d.get("profile_readme", ""),
        stat_widget_urls=tuple(d.get("stat_widget_urls", ())),
        claimed_star_count=d.get("claimed_star_count"), follower_count=d.get("follower_count", 0),
    )


def snapshot_from_dict(data: dict[str, Any]) -> Snapshot:
    if not isinstance(data, dict):
        raise SnapshotError("snapshot document must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SnapshotError(
            f"unsupported schema_version: found {data.get('schema_version')!r}, expected {SCHEMA_VERSION}"
        )
    kind = data.get("kind")
    if kind == "repo":
        return repo_from_dict(data)
    if kind == "user":
        return user_from_dict(data)
    raise SnapshotError(f"unknown snapshot kind: {kind!r}")
