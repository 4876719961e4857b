"""Materialise repository and user snapshots from the GitHub REST API."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime
from typing import Any, NamedTuple
from urllib.parse import unquote, urlsplit

from ghabuse.ingest.client import (
    RAW_MEDIA,
    STAR_MEDIA,
    ApiClientConfig,
    GitHubClient,
    NotFoundError,
    Tally,
)
from ghabuse.ingest.transport import Response, Transport
from ghabuse.model import (
    ActivityEvent,
    ActivityKind,
    CommitRecord,
    IssueRecord,
    IssueState,
    OwnedRepo,
    PullRequestRecord,
    PullRequestState,
    RepoSnapshot,
    SnapshotError,
    StarEvent,
    UserSnapshot,
    derive_keywords,
    parse_timestamp,
)
from ghabuse.textkit.extract import extract_links

DEFAULT_WIDGET_HOSTS = (
    "github-readme-stats.vercel.app",
    "github-readme-streak-stats.herokuapp.com",
    "streak-stats.demolab.com",
    "github-profile-trophy.vercel.app",
    "github-readme-activity-graph.vercel.app",
    "github-profile-summary-cards.vercel.app",
    "ghchart.rshah.org",
    "komarev.com",
)

_FULL_NAME = re.compile(r"^[A-Za-z0-9_.-]+/[A-Za-z0-9_.-]+$")
_CO_AUTHOR = re.compile(r"^\s*co-authored-by:\s*(.*?)\s*<([^>]+)>\s*$", re.IGNORECASE | re.MULTILINE)
_NOREPLY = re.compile(r"^(?:\d+\+)?([^@]+)@users\.noreply\.github\.com$", re.IGNORECASE)
_STAR_BADGE = re.compile(r"img\.shields\.io/badge/([^-/?\n)]*stars?[^-/?\n)]*)-([0-9][0-9.,]*[kKmM]?)-", re.IGNORECASE)


class RepoLimits(NamedTuple):
    max_commits: int = 100
    max_issues: int = 100
    max_stars: int = 100


class UserLimits(NamedTuple):
    max_starred: int = 100
    max_events: int = 100
    max_repos: int = 100


@dataclass
class FetchReport:
    subject: str
    requests_made: int = 0
    rate_limit_remaining: int | None = None
    truncated: bool = False
    warnings: list[str] = field(default_factory=list)


def _client(cfg: ApiClientConfig, client: GitHubClient | None, transport: Transport | None) -> GitHubClient:
    return client if client is not None else GitHubClient(cfg, transport)


def _snapshot_time(resp: Response, client: GitHubClient) -> int:
    date = resp.header("Date")
    if date:
        try:
            return int(parsedate_to_datetime(date).timestamp())
        except (TypeError, ValueError):
            pass
    return int(client._clock())


def _iso(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_co_authors(message: str) -> tuple[str, ...]:
    """Logins (from noreply addresses) or lowercased emails named in Co-authored-by trailers."""
    out: list[str] = []
    for _, email in _CO_AUTHOR.findall(message or ""):
        match = _NOREPLY.match(email.strip())
        who = match.group(1) if match else email.strip().lower()
        if who not in out:
            out.append(who)
    return tuple(out)


def _readme(client: GitHubClient, full_name: str, tally: Tally) -> str:
    try:
        body = client.get_json(f"/repos/{full_name}/readme", accept=RAW_MEDIA, tally=tally)
    except NotFoundError:
        return ""
    return body if isinstance(body, str) else ""


# -- repositories ----------------------------------------------------------

def _commit_record(summary: dict, detail: dict) -> CommitRecord:
    commit = summary.get("commit", {})
    author = summary.get("author") or {}
    login = author.get("login") or (commit.get("author") or {}).get("name", "")
    when = (commit.get("committer") or commit.get("author") or {}).get("date")
    stats = detail.get("stats") or {}
    return CommitRecord(
        sha=summary["sha"],
        author_login=login,
        timestamp=parse_timestamp(when),
        lines_added=int(stats.get("additions", 0)),
        lines_deleted=int(stats.get("deletions", 0)),
        co_authors=parse_co_authors(commit.get("message", "")),
        touched_paths=tuple(f["filename"] for f in detail.get("files", []) if "filename" in f),
    )


def _issue_record(raw: dict) -> IssueRecord:
    closed = raw.get("state") == "closed" and raw.get("closed_at")
    return IssueRecord(
        number=raw["number"],
        author_login=(raw.get("user") or {}).get("login", ""),
        title=raw.get("title") or "",
        body=raw.get("body") or "",
        created_at=parse_timestamp(raw["created_at"]),
        state=IssueState.CLOSED if closed else IssueState.OPEN,
        closed_at=parse_timestamp(raw["closed_at"]) if closed else None,
    )


def _pull_record(raw: dict) -> PullRequestRecord:
    merged_at = raw.get("merged_at")
    closed_at = raw.get("closed_at")
    if merged_at:
        state, when = PullRequestState.MERGED, merged_at
    elif raw.get("state") == "closed" and closed_at:
        state, when = PullRequestState.CLOSED, closed_at
    else:
        state, when = PullRequestState.OPEN, None
    return PullRequestRecord(
        number=raw["number"],
        author_login=(raw.get("user") or {}).get("login", ""),
        title=raw.get("title") or "",
        body=raw.get("body") or "",
        created_at=parse_timestamp(raw["created_at"]),
        state=state,
        merged_or_closed_at=parse_timestamp(when) if when else None,
    )


def fetch_repo_snapshot(
    client_cfg: ApiClientConfig,
    full_name: str,
    limits: RepoLimits = RepoLimits(),
    *,
    client: GitHubClient | None = None,
    transport: Transport | None = None,
) -> tuple[RepoSnapshot, FetchReport]:
    if not _FULL_NAME.match(full_name):
        raise SnapshotError(f"malformed repository name: {full_name!r}")
    gh = _client(client_cfg, client, transport)
    tally = Tally()
    report = FetchReport(full_name)

    meta_resp = gh.get(f"/repos/{full_name}", tally=tally)
    meta = meta_resp.body
    snapshot_at = _snapshot_time(meta_resp, gh)
    canonical = meta.get("full_name", full_name)

    jobs = {
        "readme": lambda: _readme(gh, canonical, tally),
        "stars": lambda: gh.paginate(f"/repos/{canonical}/stargazers", limits.max_stars, accept=STAR_MEDIA, tally=tally),
        "commits": lambda: gh.paginate(f"/repos/{canonical}/commits", limits.max_commits, tally=tally),
        "issues": lambda: gh.paginate(f"/repos/{canonical}/issues", limits.max_issues, [("state", "all")], tally=tally),
        "pulls": lambda: gh.paginate(f"/repos/{canonical}/pulls", limits.max_issues, [("state", "all")], tally=tally),
    }
    results = dict(zip(jobs, gh.map(lambda job: job(), list(jobs.values()))))

    star_rows, stars_cut = results["stars"]
    commit_rows, commits_cut = results["commits"]
    issue_rows, issues_cut = results["issues"]
    pull_rows, pulls_cut = results["pulls"]
    for label, cut in (("stargazers", stars_cut), ("commits", commits_cut), ("issues", issues_cut), ("pulls", pulls_cut)):
        if cut:
            report.truncated = True
            report.warnings.append(f"{label} truncated at limit")

    # pages can shift while paginating; keep the first row per sha
    unique: dict[str, dict] = {}
    for row in commit_rows:
        unique.setdefault(row["sha"], row)
    commit_rows = list(unique.values())
    details = gh.map(lambda row: gh.get_json(f"/repos/{canonical}/commits/{row['sha']}", tally=tally), commit_rows)
    commits = sorted((_commit_record(s, d) for s, d in zip(commit_rows, details)), key=lambda c: c.timestamp)

    stars = sorted(
        (StarEvent((row.get("user") or {}).get("login", ""), parse_timestamp(row["starred_at"])) for row in star_rows),
        key=lambda e: e.starred_at,
    )
    issues = sorted((_issue_record(r) for r in issue_rows if "pull_request" not in r), key=lambda i: i.number)
    pulls = sorted((_pull_record(r) for r in pull_rows), key=lambda p: p.number)

    latest = max([snapshot_at] + [s.starred_at for s in stars])
    if latest != snapshot_at:
        report.warnings.append("snapshot_at raised to the latest star event")
    description = meta.get("description") or ""
    snap = RepoSnapshot(
        full_name=canonical,
        snapshot_at=latest,
        description=description,
        readme=results["readme"],
        keywords=derive_keywords(meta.get("topics") or [], description),
        star_count=int(meta.get("stargazers_count", 0)),
        fork_count=int(meta.get("forks_count", 0)),
        star_events=tuple(stars),
        commits=tuple(commits),
        issues=tuple(issues),
        pull_requests=tuple(pulls),
    )
    report.requests_made = tally.count
    report.rate_limit_remaining = gh.rate_limit_remaining
    return snap, report


# -- users -----------------------------------------------------------------

def _activity(raw: dict) -> ActivityEvent:
    kind_name = raw.get("type", "")
    payload = raw.get("payload") or {}
    repo = (raw.get("repo") or {}).get("name", "")
    number = None
    kind = ActivityKind.OTHER
    if kind_name == "PushEvent":
        kind = ActivityKind.COMMIT
    elif kind_name == "WatchEvent":
        kind = ActivityKind.STAR
    elif kind_name == "ForkEvent":
        kind = ActivityKind.FORK
    elif kind_name == "IssuesEvent":
        number = (payload.get("issue") or {}).get("number")
        kind = ActivityKind.ISSUE_OPENED if payload.get("action") == "opened" else ActivityKind.OTHER
    elif kind_name == "IssueCommentEvent":
        issue = payload.get("issue") or {}
        number = issue.get("number")
        kind = ActivityKind.PR_COMMENT if "pull_request" in issue else ActivityKind.ISSUE_COMMENT
    elif kind_name == "PullRequestEvent":
        number = payload.get("number") or (payload.get("pull_request") or {}).get("number")
        kind = ActivityKind.PR_OPENED if payload.get("action") == "opened" else ActivityKind.OTHER
    elif kind_name == "PullRequestReviewEvent":
        number = (payload.get("pull_request") or {}).get("number")
        kind = ActivityKind.PR_REVIEW
    elif kind_name == "PullRequestReviewCommentEvent":
        number = (payload.get("pull_request") or {}).get("number")
        kind = ActivityKind.PR_COMMENT
    target = f"{repo}#{number}" if number is not None else repo
    return ActivityEvent(kind, parse_timestamp(raw["created_at"]), target)


def stat_widget_urls(readme: str, hosts: tuple[str, ...] = DEFAULT_WIDGET_HOSTS) -> tuple[str, ...]:
    wanted = {h.lower() for h in hosts}
    out: list[str] = []
    for url in extract_links(readme):
        host = urlsplit(url).netloc.lower()
        if host in wanted and url not in out:
            out.append(url)
    return tuple(out)


def claimed_star_count(readme: str) -> int | None:
    """Star total asserted by a static shields.io badge (``badge/Stars-1.5k-...``), if any."""
    match = _STAR_BADGE.search(unquote(readme))
    if not match:
        return None
    text = match.group(2).replace(",", "").lower()
    scale = 1
    if text.endswith("k"):
        scale, text = 1_000, text[:-1]
    elif text.endswith("m"):
        scale, text = 1_000_000, text[:-1]
    try:
        return int(round(float(text) * scale))
    except ValueError:
        return None


def fetch_user_snapshot(
    client_cfg: ApiClientConfig,
    login: str,
    limits: UserLimits = UserLimits(),
    *,
    client: GitHubClient | None = None,
    transport: Transport | None = None,
    widget_hosts: tuple[str, ...] = DEFAULT_WIDGET_HOSTS,
) -> tuple[UserSnapshot, FetchReport]:
    if not login or "/" in login:
        raise SnapshotError(f"malformed login: {login!r}")
    gh = _client(client_cfg, client, transport)
    tally = Tally()
    report = FetchReport(login)

    profile_resp = gh.get(f"/users/{login}", tally=tally)
    profile = profile_resp.body
    snapshot_at = _snapshot_time(profile_resp, gh)
    canonical = profile.get("login", login)

    jobs = {
        "starred": lambda: gh.paginate(f"/users/{canonical}/starred", limits.max_starred, tally=tally),
        "repos": lambda: gh.paginate(f"/users/{canonical}/repos", limits.max_repos, [("type", "owner")], tally=tally),
        "events": lambda: gh.paginate(f"/users/{canonical}/events", limits.max_events, tally=tally),
        "readme": lambda: _readme(gh, f"{canonical}/{canonical}", tally),
    }
    results = dict(zip(jobs, gh.map(lambda job: job(), list(jobs.values()))))
    starred_rows, starred_cut = results["starred"]
    repo_rows, repos_cut = results["repos"]
    event_rows, events_cut = results["events"]
    for label, cut in (("starred", starred_cut), ("repos", repos_cut), ("events", events_cut)):
        if cut:
            report.truncated = True
            report.warnings.append(f"{label} truncated at limit")

    starred: list[str] = []
    for row in starred_rows:
        name = row.get("full_name") or (row.get("repo") or {}).get("full_name")
        if name and name not in starred:
            starred.append(name)
    activity = sorted((_activity(e) for e in event_rows), key=lambda e: e.timestamp)
    readme = results["readme"]
    latest = max([snapshot_at] + [e.timestamp for e in activity])
    snap = UserSnapshot(
        login=canonical,
        snapshot_at=latest,
        starred_repos=tuple(starred),
        owned_repos=tuple(
            sorted((OwnedRepo(r["full_name"], int(r.get("stargazers_count", 0))) for r in repo_rows),
                   key=lambda r: r.full_name)
        ),
        activity=tuple(activity),
        profile_readme=readme,
        stat_widget_urls=stat_widget_urls(readme, widget_hosts),
        claimed_star_count=claimed_star_count(readme),
        follower_count=int(profile.get("followers", 0)),
    )
    report.requests_made = tally.count
    report.rate_limit_remaining = gh.rate_limit_remaining
    return snap, report


# -- candidate discovery ---------------------------------------------------

def candidate_repos_recent_updates(
    client_cfg: ApiClientConfig,
    min_pushes: int,
    since: int,
    *,
    max_candidates: int = 100,
    client: GitHubClient | None = None,
    transport: Transport | None = None,
) -> list[str]:
    """Repos pushed since ``since`` with at least ``min_pushes`` commits in that span.

    Ordered by most recent push, deduplicated.
    """
    gh = _client(client_cfg, client, transport)
    if since > gh._clock():
        raise ValueError("since must be in the past")
    stamp = _iso(since)
    rows, _ = gh.paginate(
        "/search/repositories",
        max_candidates,
        [("q", f"pushed:>={stamp}"), ("sort", "updated"), ("order", "desc")],
        items_key="items",
    )
    seen: dict[str, Any] = {}
    for row in rows:
        name = row.get("full_name")
        if name and name not in seen:
            seen[name] = parse_timestamp(row.get("pushed_at") or stamp)
    ordered = sorted(seen, key=lambda n: -seen[n])
    if min_pushes <= 1:
        return ordered

    def busy(name: str) -> bool:
        commits, _ = gh.paginate(f"/repos/{name}/commits", min_pushes, [("since", stamp)])
        return len(commits) >= min_pushes

    keep = gh.map(busy, ordered)
    return [name for name, ok in zip(ordered, keep) if ok]
