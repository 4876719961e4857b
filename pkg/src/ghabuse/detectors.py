"""One detector per abuse subcategory.

Each detector evaluates its symptom predicate against offline snapshots and
returns verdicts whose evidence carries every clause as
``(clause, observed, threshold)``. Clauses are always evaluated in full (no
short-circuiting) so the evidence trail is complete for flagged and clean
subjects alike.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence
from urllib.parse import parse_qs, urlsplit

from ghabuse.model import (
    REPO_STAR_CAP,
    DetectionVerdict,
    Evidence,
    IssueState,
    PullRequestState,
    RepoSnapshot,
    Subcategory,
    ThresholdConfig,
    UserSnapshot,
    activity_count,
    repo_popularity,
    user_popularity,
)
from ghabuse.textkit.bm25 import Corpus, relevance
from ghabuse.textkit.extract import extract_commands, extract_links
from ghabuse.textkit.similarity import name_similarity, readme_similarity
from ghabuse.textkit.mlp import SpamClassifier
from ghabuse.textkit.spam import SpamModel
from ghabuse.textkit.tfidf import TfIdfModel


class DetectorInputError(ValueError):
    pass


@dataclass(frozen=True)
class PopularReference:
    full_name: str
    readme: str
    star_count: int

    @classmethod
    def from_repo(cls, repo: RepoSnapshot) -> PopularReference:
        return cls(repo.full_name, repo.readme, repo.star_count)

    @property
    def name(self) -> str:
        return self.full_name.split("/", 1)[-1]


def popular_references(repos: Iterable[RepoSnapshot], cfg: ThresholdConfig) -> list[PopularReference]:
    """Repos at or above the configured popularity floor, as typo-squatting references."""
    return [PopularReference.from_repo(r) for r in repos if r.star_count >= cfg.popularity_floor]


# -- Fake Stars ------------------------------------------------------------

def detect_fake_stars(
    repo: RepoSnapshot, stargazers: Sequence[UserSnapshot], cfg: ThresholdConfig
) -> list[DetectionVerdict]:
    """Per-stargazer verdicts for inauthentic starring.

    A stargazer is flagged when they starred the repo, have starred at most
    ``x1`` repositories in total, and show at most ``epsilon`` activity
    events in ``[t_s, t_s + window_fake_stars)``. Stargazers observed before
    that window closed are returned as indeterminate.
    """
    verdicts = []
    for user in stargazers:
        t_s = repo.star_time(user.login)
        if t_s is None:
            raise DetectorInputError(f"{user.login} does not appear in star events of {repo.full_name}")
        window_end = t_s + cfg.window_fake_stars
        starred = len(user.starred_repos)
        active = activity_count(user, t_s, window_end)
        evidence = (
            Evidence("starred", 1, 1),
            Evidence("starred_repo_count", starred, cfg.x1),
            Evidence("activity_after_star", active, cfg.epsilon),
            Evidence("star_window", [t_s, window_end], None),
        )
        if user.snapshot_at < window_end:
            verdicts.append(DetectionVerdict(
                Subcategory.FAKE_STARS, user.login, False,
                evidence + (Evidence("observed_until", user.snapshot_at, window_end),), indeterminate=True,
            ))
            continue
        flagged = starred <= cfg.x1 and active <= cfg.epsilon
        verdicts.append(DetectionVerdict(Subcategory.FAKE_STARS, user.login, flagged, evidence))
    return verdicts


def summarize_fake_stars(
    repo: RepoSnapshot, verdicts: Sequence[DetectionVerdict], cfg: ThresholdConfig
) -> DetectionVerdict:
    """Repository-level roll-up: flagged fraction among determinate stargazers."""
    judged = [v for v in verdicts if not v.indeterminate]
    flagged = sum(v.flagged for v in judged)
    fraction = flagged / len(judged) if judged else 0.0
    evidence = (
        Evidence("flagged_fraction", fraction, cfg.fake_stars_repo_fraction),
        Evidence("flagged_stargazers", flagged, None),
        Evidence("judged_stargazers", len(judged), None),
        Evidence("indeterminate_stargazers", len(verdicts) - len(judged), None),
    )
    hit = bool(judged) and flagged > 0 and fraction >= cfg.fake_stars_repo_fraction
    return DetectionVerdict(Subcategory.FAKE_STARS, repo.full_name, hit, evidence)


# -- Automatic Updates -----------------------------------------------------

def detect_automatic_updates(repo: RepoSnapshot, cfg: ThresholdConfig) -> DetectionVerdict:
    """High-frequency trivial commits.

    Windows ``[t_c, t_c + window_auto_updates)`` are anchored at every commit.
    Flagged when some window holds at least ``x2`` commits whose mean
    modified line count (added + deleted) is at most ``y``.
    """
    commits = repo.commits
    width = cfg.window_auto_updates
    best = None  # (count, mean, start) of the busiest window, lowest mean on ties
    hit = None
    end = 0
    loc = 0
    for start in range(len(commits)):
        if start:
            loc -= commits[start - 1].modified_lines
        if end < start:
            end, loc = start, 0
        limit = commits[start].timestamp + width
        while end < len(commits) and commits[end].timestamp < limit:
            loc += commits[end].modified_lines
            end += 1
        count = end - start
        mean = loc / count
        window = (count, mean, commits[start].timestamp)
        if hit is None and count >= cfg.x2 and mean <= cfg.y:
            hit = window
        if best is None or (count, -mean) > (best[0], -best[1]):
            best = window
    if not commits:
        evidence = (
            Evidence("window_commit_count", 0, cfg.x2),
            Evidence("mean_modified_loc", None, cfg.y),
        )
        return DetectionVerdict(Subcategory.AUTOMATIC_UPDATES, repo.full_name, False, evidence)
    count, mean, start = hit or best
    evidence = (
        Evidence("window_commit_count", count, cfg.x2),
        Evidence("mean_modified_loc", mean, cfg.y),
        Evidence("window", [start, start + width], None),
    )
    return DetectionVerdict(Subcategory.AUTOMATIC_UPDATES, repo.full_name, hit is not None, evidence)


# -- Keyword Stuffing ------------------------------------------------------

def detect_keyword_stuffing(repo: RepoSnapshot, corpus: Corpus, cfg: ThresholdConfig) -> DetectionVerdict:
    """Flag when at least ``x3`` keywords score below ``theta_k`` against the README.

    The README must already be registered in ``corpus`` under the repo's
    full name.
    """
    low = []
    for keyword in repo.keywords:
        score = relevance(keyword, repo.full_name, corpus)
        if score < cfg.theta_k:
            low.append(Evidence(f"low_relevance:{keyword}", score, cfg.theta_k))
    evidence = (Evidence("low_relevance_count", len(low), cfg.x3), *low)
    return DetectionVerdict(Subcategory.KEYWORD_STUFFING, repo.full_name, len(low) >= cfg.x3, evidence)


# -- Typo Squatting --------------------------------------------------------

def popularity_ratio(a: float, b: float, floor: float = 1.0 / REPO_STAR_CAP) -> float:
    """max/min of two normalised popularities, with the smaller clamped at ``floor``."""
    return max(a, b) / max(min(a, b), floor)


def detect_typo_squatting(
    candidate: RepoSnapshot, references: Sequence[PopularReference], cfg: ThresholdConfig
) -> list[DetectionVerdict]:
    """Compare a candidate against popular references.

    Returns one verdict per reference whose name similarity reaches
    ``theta_t1``; a verdict is flagged when README similarity also reaches
    ``theta_t2`` and the popularity ratio reaches ``phi_p1``. Names are
    compared on the part after ``owner/``.
    """
    if not references:
        raise DetectorInputError("typo squatting needs at least one popular reference")
    verdicts = []
    p_candidate = repo_popularity(candidate.star_count)
    for ref in references:
        if ref.full_name.lower() == candidate.full_name.lower():
            continue
        name_sim = name_similarity(candidate.name, ref.name)
        if name_sim < cfg.theta_t1:
            continue
        text_sim = readme_similarity(candidate.readme, ref.readme)
        ratio = popularity_ratio(p_candidate, repo_popularity(ref.star_count))
        evidence = (
            Evidence("name_similarity", name_sim, cfg.theta_t1),
            Evidence("readme_similarity", text_sim, cfg.theta_t2),
            Evidence("popularity_ratio", ratio, cfg.phi_p1),
            Evidence("reference", ref.full_name, None),
        )
        flagged = text_sim >= cfg.theta_t2 and ratio >= cfg.phi_p1
        verdicts.append(DetectionVerdict(Subcategory.TYPO_SQUATTING, candidate.full_name, flagged, evidence))
    return verdicts


# -- Spoofed Contributor ---------------------------------------------------

def detect_spoofed_contributor(repo: RepoSnapshot, suspect: UserSnapshot, cfg: ThresholdConfig) -> DetectionVerdict:
    """A reputable account credited on only a handful of commits in an obscure repo.

    Author and ``Co-authored-by`` attributions both count.
    """
    shas = [c.sha for c in repo.commits if c.attributed_to(suspect.login)]
    if not shas:
        raise DetectorInputError(f"{suspect.login} is not credited on any commit of {repo.full_name}")
    p_repo = repo_popularity(repo.star_count)
    p_user = user_popularity(suspect.follower_count)
    evidence = (
        Evidence("attributed_commits", len(shas), cfg.x4),
        Evidence("repo_popularity", p_repo, cfg.phi_p2),
        Evidence("suspect_popularity", p_user, cfg.phi_p3),
        Evidence("attributed_shas", shas, None),
    )
    flagged = len(shas) <= cfg.x4 and p_repo <= cfg.phi_p2 and p_user >= cfg.phi_p3
    return DetectionVerdict(Subcategory.SPOOFED_CONTRIBUTOR, f"{repo.full_name}@{suspect.login}", flagged, evidence)


# -- Issue Spam ------------------------------------------------------------

def detect_issue_spam(
    repo: RepoSnapshot, classifier: SpamClassifier, tfidf: TfIdfModel, cfg: ThresholdConfig | None = None
) -> list[DetectionVerdict]:
    """Per-issue verdicts: needs a link or command and a spam probability at threshold.

    ``cfg`` is accepted for a uniform detector signature; the probability
    threshold lives on the classifier.
    """
    model = SpamModel(tfidf, classifier)
    threshold = classifier.threshold
    verdicts = []
    for issue in repo.issues:
        text = f"{issue.title}\n{issue.body}"
        links = extract_links(text)
        commands = extract_commands(text)
        prob = model.probability(text)
        evidence = (
            Evidence("has_link_or_command", int(bool(links or commands)), 1),
            Evidence("spam_probability", prob, threshold),
            Evidence("links", links, None),
            Evidence("commands", commands, None),
        )
        flagged = bool(links or commands) and prob >= threshold
        verdicts.append(DetectionVerdict(Subcategory.ISSUE_SPAM, f"{repo.full_name}#{issue.number}", flagged, evidence))
    return verdicts


# -- Reputation Farming ----------------------------------------------------

def closure_times(repos: Iterable[RepoSnapshot]) -> dict[str, int]:
    """``owner/name#number`` -> close or merge time, for every closed issue and PR."""
    out: dict[str, int] = {}
    for repo in repos:
        for issue in repo.issues:
            if issue.state is IssueState.CLOSED:
                out[f"{repo.full_name}#{issue.number}".lower()] = issue.closed_at
        for pr in repo.pull_requests:
            if pr.state is not PullRequestState.OPEN:
                out[f"{repo.full_name}#{pr.number}".lower()] = pr.merged_or_closed_at
    return out


def detect_reputation_farming(
    user: UserSnapshot, repos: Sequence[RepoSnapshot], cfg: ThresholdConfig, strict: bool = False
) -> DetectionVerdict:
    """Interactions with issues or PRs well after they were closed or merged.

    An event is stale when it targets a closed item ``a`` and falls in
    ``[t_r(a) + delta_t, t_r(a) + window_rep_farming)``. Strict mode flags
    on a single stale event; otherwise ``farming_min_events`` are needed.
    """
    closed = closure_times(repos)
    stale = []
    for event in user.activity:
        t_r = closed.get(event.target.lower())
        if t_r is None:
            continue
        if t_r + cfg.delta_t <= event.timestamp < t_r + cfg.window_rep_farming:
            stale.append(Evidence(f"stale:{event.target}", event.timestamp - t_r, cfg.delta_t))
    needed = 1 if strict else cfg.farming_min_events
    evidence = (Evidence("stale_interactions", len(stale), needed), *stale)
    return DetectionVerdict(Subcategory.REPUTATION_FARMING, user.login, len(stale) >= needed, evidence)


# -- Fake Stats ------------------------------------------------------------

_WIDGET_QUERY_KEYS = ("username", "user", "login")
# widget families that put the account in the last path segment
_PATH_ACCOUNT_HOSTS = {"ghchart.rshah.org", "github-contributions.vercel.app"}


def widget_account(url: str) -> str | None:
    """The GitHub account a stats widget URL renders, or None when unparseable."""
    try:
        parts = urlsplit(url)
    except ValueError:
        return None
    if not parts.netloc:
        return None
    query = parse_qs(parts.query)
    for key in _WIDGET_QUERY_KEYS:
        if query.get(key) and query[key][0].strip():
            return query[key][0].strip()
    host = parts.netloc.lower()
    segments = [s for s in parts.path.split("/") if s]
    if host in _PATH_ACCOUNT_HOSTS and segments:
        return segments[-1]
    return None


def detect_fake_stats(user: UserSnapshot, cfg: ThresholdConfig) -> DetectionVerdict:
    """Stat widgets rendering someone else's account, or a claimed star total off by ``x5``."""
    foreign = []
    unparseable = []
    for url in user.stat_widget_urls:
        account = widget_account(url)
        if account is None:
            unparseable.append(Evidence("unparseable_widget", url, None))
        elif account.lower() != user.login.lower():
            foreign.append(Evidence("foreign_widget", url, account))
    owned_total = sum(r.star_count for r in user.owned_repos)
    if user.claimed_star_count is None:
        gap = None
        gap_hit = False
    else:
        gap = abs(user.claimed_star_count - owned_total)
        gap_hit = gap >= cfg.x5
    evidence = (
        Evidence("foreign_widget_count", len(foreign), 1),
        Evidence("claimed_star_gap", gap, cfg.x5),
        *foreign,
        *unparseable,
    )
    return DetectionVerdict(Subcategory.FAKE_STATS, user.login, bool(foreign) or gap_hit, evidence)


# -- output ----------------------------------------------------------------

def verdicts_to_jsonl(verdicts: Iterable[DetectionVerdict]) -> str:
    return "".join(json.dumps(v.to_dict(), ensure_ascii=False) + "\n" for v in verdicts)
