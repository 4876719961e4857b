"""Deterministic synthetic corpus with positives and near-miss negatives for every subcategory.

Each positive is built to satisfy its detector's predicate under the
generating ``ThresholdConfig``. Negatives are either plainly benign or
near misses that fail exactly one conjunct; near misses record in the
manifest the threshold change that would flip them.
"""

from __future__ import annotations

import hashlib
import math
import random
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

from ghabuse.evalharness import textgen
from ghabuse.evalharness.corpus import LabeledInstance, write_manifest
from ghabuse.ingest.store import dumps_snapshot
from ghabuse.model import (
    DAY,
    REPO_STAR_CAP,
    USER_FOLLOWER_CAP,
    ActivityEvent,
    ActivityKind,
    CommitRecord,
    IssueRecord,
    IssueState,
    OwnedRepo,
    PullRequestRecord,
    PullRequestState,
    RepoSnapshot,
    Snapshot,
    StarEvent,
    Subcategory,
    ThresholdConfig,
    UserSnapshot,
    repo_popularity,
    user_popularity,
)
from ghabuse.textkit.tokenize import tokenize

T0 = 1_704_067_200  # 2024-01-01T00:00:00Z
SNAPSHOT_AT = T0 + 365 * DAY
MANIFEST_NAME = "manifest.jsonl"

# 310 repo and 82 user instances, half positive
DEFAULT_COUNTS: dict[Subcategory, tuple[int, int]] = {
    Subcategory.FAKE_STARS: (26, 26),
    Subcategory.AUTOMATIC_UPDATES: (26, 26),
    Subcategory.KEYWORD_STUFFING: (26, 26),
    Subcategory.TYPO_SQUATTING: (26, 26),
    Subcategory.SPOOFED_CONTRIBUTOR: (26, 25),
    Subcategory.ISSUE_SPAM: (25, 26),
    Subcategory.REPUTATION_FARMING: (21, 20),
    Subcategory.FAKE_STATS: (20, 21),
}

_WIDGET_TEMPLATES = (
    "https://github-readme-stats.vercel.app/api?username={login}&show_icons=true",
    "https://github-readme-streak-stats.herokuapp.com/?user={login}",
    "https://ghchart.rshah.org/{login}",
)


@dataclass
class _Batch:
    """Snapshots and manifest rows accumulated for one corpus."""

    files: dict[str, Snapshot] = field(default_factory=dict)
    instances: list[LabeledInstance] = field(default_factory=list)

    def put(self, rel: str, snap: Snapshot) -> str:
        if rel in self.files and self.files[rel] != snap:
            raise RuntimeError(f"conflicting fixture for {rel}")
        self.files[rel] = snap
        return rel


class _Names:
    """Unique, readable logins and repo names drawn from the topic vocabulary."""

    def __init__(self, rng: random.Random) -> None:
        self.rng = rng
        self.used: set[str] = set()

    def _fresh(self, make: Callable[[], str]) -> str:
        while True:
            name = make()
            if name not in self.used:
                self.used.add(name)
                return name

    def login(self) -> str:
        pool = textgen._WORD_POOL
        return self._fresh(lambda: f"{self.rng.choice(pool)}-{self.rng.choice(pool)}{self.rng.randint(1, 999)}")

    def repo(self, topic: str) -> str:
        vocab = textgen.TOPICS[topic]
        return self._fresh(lambda: f"{self.login()}/{self.rng.choice(vocab)}-{self.rng.choice(vocab)}")


def _sha(*parts: Any) -> str:
    return hashlib.sha1(":".join(map(str, parts)).encode()).hexdigest()


def _topic(rng: random.Random) -> str:
    return rng.choice(sorted(textgen.TOPICS))


def _plain_repo(rng: random.Random, full_name: str, topic: str, **overrides: Any) -> RepoSnapshot:
    name = full_name.split("/", 1)[1]
    description = textgen.description_for(rng, topic)
    fields: dict[str, Any] = dict(
        full_name=full_name,
        snapshot_at=SNAPSHOT_AT,
        description=description,
        readme=textgen.readme_text(rng, topic, name),
        keywords=(topic.split("_")[0],),
        star_count=rng.randint(0, 300),
        fork_count=rng.randint(0, 40),
    )
    fields.update(overrides)
    return RepoSnapshot(**fields)


def _sparse_commits(rng: random.Random, full_name: str, author: str, spans: list[tuple[int, int]]) -> list[CommitRecord]:
    """Ordinary commits at least eight days apart, placed inside ``spans``."""
    out = []
    for lo, hi in spans:
        t = lo + rng.randint(0, 3 * DAY)
        while t < hi:
            out.append(CommitRecord(
                sha=_sha(full_name, "c", t),
                author_login=author,
                timestamp=t,
                lines_added=rng.randint(10, 200),
                lines_deleted=rng.randint(0, 80),
                touched_paths=("src/core.py",),
            ))
            t += rng.randint(8 * DAY, 20 * DAY)
    return out


# -- Fake Stars ------------------------------------------------------------

def _stargazer(
    rng: random.Random,
    login: str,
    repo: str,
    starred_at: int,
    starred_total: int,
    window_events: int,
    cfg: ThresholdConfig,
    names: _Names,
) -> UserSnapshot:
    others = [names.repo(_topic(rng)) for _ in range(starred_total - 1)]
    window_end = starred_at + cfg.window_fake_stars
    stamps = [rng.randrange(starred_at, window_end) for _ in range(window_events)]
    # a little history before the star so the account is not empty
    stamps += [rng.randrange(T0 - 200 * DAY, starred_at) for _ in range(rng.randint(0, 3))]
    events = tuple(
        ActivityEvent(rng.choice([ActivityKind.COMMIT, ActivityKind.ISSUE_COMMENT, ActivityKind.STAR]), t, repo)
        for t in sorted(stamps)
    )
    return UserSnapshot(
        login=login,
        snapshot_at=SNAPSHOT_AT,
        starred_repos=tuple(sorted([repo, *others])),
        activity=events,
        follower_count=rng.randint(0, 5),
    )


def _fake_stars(rng, names, batch, cfg, iid, label, variant):
    topic = _topic(rng)
    full = names.repo(topic)
    n_users = 6
    if label:
        n_fake = rng.randint(4, 6)
    elif variant == "fraction":
        n_fake = 2
    elif variant == "plain":
        n_fake = rng.randint(0, 1)
    else:
        n_fake = 4
    near_miss = None
    starts = sorted(rng.sample(range(T0, T0 + 200 * DAY, 3600), n_users))
    users = []
    for k, t_s in enumerate(starts):
        login = names.login()
        fake = k < n_fake
        if fake and variant == "starred" and not label:
            starred, active = cfg.x1 + 1, rng.randint(0, cfg.epsilon)
            near_miss = {"knob": "x1", "value": cfg.x1 + 1}
        elif fake and variant == "activity" and not label:
            starred, active = rng.randint(1, cfg.x1), cfg.epsilon + 1
            near_miss = {"knob": "epsilon", "value": cfg.epsilon + 1}
        elif fake:
            starred, active = rng.randint(1, cfg.x1), rng.randint(0, cfg.epsilon)
        else:
            starred, active = rng.randint(cfg.x1 + 3, cfg.x1 + 30), rng.randint(cfg.epsilon + 4, cfg.epsilon + 25)
        users.append(_stargazer(rng, login, full, t_s, starred, active, cfg, names))
    if variant == "fraction" and not label:
        near_miss = {"knob": "fake_stars_repo_fraction", "value": n_fake / n_users}
    order = list(range(n_users))
    rng.shuffle(order)
    stars = tuple(StarEvent(users[k].login, starts[k]) for k in sorted(order, key=lambda k: starts[k]))
    repo = _plain_repo(rng, full, topic, star_count=len(stars) + rng.randint(0, 4), star_events=stars)
    context = tuple(batch.put(f"users/{iid}-sg{k}.json", users[k]) for k in order)
    return repo, context, near_miss


# -- Automatic Updates -----------------------------------------------------

def _automatic_updates(rng, names, batch, cfg, iid, label, variant):
    topic = _topic(rng)
    full = names.repo(topic)
    owner = full.split("/", 1)[0]
    burst_at = T0 + rng.randint(100, 200) * DAY
    near_miss = None
    if label:
        size = rng.randint(cfg.x2, cfg.x2 + 40)
        mods = [rng.randint(1, int(cfg.y)) for _ in range(size)]
    elif variant == "count":
        size = cfg.x2 - 1
        mods = [rng.randint(1, int(cfg.y)) for _ in range(size)]
        near_miss = {"knob": "x2", "value": size}
    elif variant == "size":
        size = rng.randint(cfg.x2, cfg.x2 + 40)
        mods = [int(cfg.y) + 1] * size
        for k in rng.sample(range(size), size // 2):
            mods[k] = rng.randint(int(cfg.y) + 1, int(cfg.y) + 2)
        near_miss = {"knob": "y", "value": sum(mods) / size}
    else:
        size, mods = 0, []
    burst_span = 6 * DAY
    stamps = sorted(rng.sample(range(burst_at, burst_at + burst_span), size))
    burst = [
        CommitRecord(
            sha=_sha(full, "b", k),
            author_login=owner,
            timestamp=t,
            lines_added=m - m // 2,
            lines_deleted=m // 2,
            touched_paths=("update.log",),
        )
        for k, (t, m) in enumerate(zip(stamps, mods))
    ]
    spans = [(T0, burst_at - 8 * DAY), (burst_at + burst_span + 8 * DAY, SNAPSHOT_AT - DAY)]
    if not size:
        spans = [(T0, SNAPSHOT_AT - DAY)]
    commits = sorted(burst + _sparse_commits(rng, full, owner, spans), key=lambda c: c.timestamp)
    return _plain_repo(rng, full, topic, commits=tuple(commits)), (), near_miss


# -- Keyword Stuffing ------------------------------------------------------

def _keyword_stuffing(rng, names, batch, cfg, iid, label, variant):
    topic = _topic(rng)
    full = names.repo(topic)
    name = full.split("/", 1)[1]
    description = textgen.description_for(rng, topic)
    readme = f"{description}\n\n" + textgen.readme_text(rng, topic, name)
    present = sorted(set(textgen.TOPICS[topic]) & set(tokenize(readme)))
    topical = rng.sample(present, min(len(present), rng.randint(2, 4)))
    near_miss = None
    if label:
        n_stuffed = rng.randint(cfg.x3, cfg.x3 + 6)
    elif variant == "count":
        n_stuffed = cfg.x3 - 1
        near_miss = {"knob": "x3", "value": n_stuffed}
    else:
        n_stuffed = rng.randint(0, 1)
    stuffed = rng.sample(textgen.TRENDING_KEYWORDS, n_stuffed)
    keywords = topical + stuffed
    rng.shuffle(keywords)
    repo = _plain_repo(rng, full, topic, description=description, readme=readme, keywords=tuple(keywords))
    return repo, (), near_miss


# -- Typo Squatting --------------------------------------------------------

def _reference_repos(seed: int, batch: _Batch) -> dict[str, tuple[str, str, RepoSnapshot]]:
    """The popular projects impersonated by typo-squatting fixtures, keyed by name."""
    rng = random.Random(f"{seed}:references")
    out = {}
    for owner, name, topic in textgen.POPULAR_PROJECTS:
        repo = RepoSnapshot(
            full_name=f"{owner}/{name}",
            snapshot_at=SNAPSHOT_AT,
            description=textgen.description_for(rng, topic),
            readme=textgen.readme_text(rng, topic, name, length=8),
            keywords=(topic,),
            star_count=rng.randint(5_000, 200_000),
            fork_count=rng.randint(500, 20_000),
        )
        rel = batch.put(f"repos/reference-{owner}-{name}.json", repo)
        out[name] = (rel, topic, repo)
    return out


def _one_edit(rng: random.Random, name: str) -> str:
    """A different name at Levenshtein distance exactly one."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    while True:
        i = rng.randrange(len(name))
        op = rng.choice(("sub", "del", "ins"))
        if op == "sub":
            out = name[:i] + rng.choice(letters) + name[i + 1:]
        elif op == "del":
            out = name[:i] + name[i + 1:]
        else:
            out = name[:i] + rng.choice(letters) + name[i:]
        if out != name and out.isalpha():
            return out


def _typo_squatting(rng, names, batch, cfg, iid, label, variant, refs):
    target = rng.choice(sorted(refs))
    ref_rel, topic, ref = refs[target]
    squat_name = _one_edit(rng, target)
    owner = names.login()
    full = f"{owner}/{squat_name}"
    copied = ref.readme.replace(target, squat_name)
    near_miss = None
    if label or variant == "popular":
        readme = copied + "\n" + textgen.description_for(rng, topic) + ".\n"
    else:
        other = rng.choice([t for t in sorted(textgen.TOPICS) if t != topic])
        readme = textgen.prose_readme(rng, other, squat_name)
    if label:
        stars = rng.randint(0, 5)
    elif variant == "popular":
        stars = rng.randint(200, 2000)
        ref_pop = repo_popularity(ref.star_count)
        near_miss = {"knob": "phi_p1", "value": ref_pop / repo_popularity(stars)}
    else:
        stars = rng.randint(0, 5)
    repo = _plain_repo(rng, full, topic, readme=readme, star_count=stars, description=ref.description)
    context = tuple(r[0] for _, r in sorted(refs.items()))
    if near_miss is None and not label:
        near_miss = {"knob": "theta_t2", "value": 0.0}
    return repo, context, near_miss


# -- Spoofed Contributor ---------------------------------------------------

def _spoofed_contributor(rng, names, batch, cfg, iid, label, variant):
    topic = _topic(rng)
    full = names.repo(topic)
    owner = full.split("/", 1)[0]
    suspect = names.login()
    near_miss = None
    attributed = rng.randint(1, cfg.x4)
    max_repo_stars = _max_repo_stars(cfg.phi_p2)
    min_followers = _min_followers(cfg.phi_p3)
    repo_stars = rng.randint(0, max_repo_stars)
    followers = rng.randint(max(min_followers, 500), 60_000)
    if not label and variant == "count":
        attributed = rng.randint(cfg.x4 + 1, cfg.x4 + 3)
        near_miss = {"knob": "x4", "value": attributed}
    elif not label and variant == "repo":
        repo_stars = rng.randint(max_repo_stars + 3, max_repo_stars + 60)
        near_miss = {"knob": "phi_p2", "value": repo_popularity(repo_stars)}
    elif not label and variant == "suspect":
        followers = rng.randint(5, min_followers - 10)
        near_miss = {"knob": "phi_p3", "value": user_popularity(followers)}
    commits = _sparse_commits(rng, full, owner, [(T0, SNAPSHOT_AT - DAY)])
    picks = sorted(rng.sample(range(len(commits)), attributed))
    for k in picks:
        c = commits[k]
        if rng.random() < 0.5:
            commits[k] = CommitRecord(c.sha, suspect, c.timestamp, c.lines_added, c.lines_deleted, (), c.touched_paths)
        else:
            commits[k] = CommitRecord(c.sha, c.author_login, c.timestamp, c.lines_added, c.lines_deleted, (suspect,), c.touched_paths)
    user = UserSnapshot(
        login=suspect,
        snapshot_at=SNAPSHOT_AT,
        starred_repos=(),
        owned_repos=tuple(OwnedRepo(names.repo(_topic(rng)), rng.randint(100, 20_000)) for _ in range(3)),
        follower_count=followers,
    )
    repo = _plain_repo(rng, full, topic, commits=tuple(commits), star_count=repo_stars)
    return repo, (batch.put(f"users/{iid}-suspect.json", user),), near_miss


def _max_repo_stars(threshold: float) -> int:
    """Largest star count whose normalised popularity stays at or below ``threshold``."""
    n = int(10 ** (threshold * math.log10(1 + REPO_STAR_CAP)))
    while n > 0 and repo_popularity(n) > threshold:
        n -= 1
    while repo_popularity(n + 1) <= threshold:
        n += 1
    return n


def _min_followers(threshold: float) -> int:
    """Smallest follower count whose normalised popularity reaches ``threshold``."""
    n = max(0, int(10 ** (threshold * math.log10(1 + USER_FOLLOWER_CAP))) - 2)
    while user_popularity(n) < threshold:
        n += 1
    return n


# -- Issue Spam ------------------------------------------------------------

def _issue_spam(rng, names, batch, cfg, iid, label, variant):
    topic = _topic(rng)
    full = names.repo(topic)
    owner, name = full.split("/", 1)
    texts = []
    for _ in range(rng.randint(2, 5)):
        texts.append(textgen.ham_issue(rng, owner, name, link=rng.random() < 0.3, command=rng.random() < 0.2))
    near_miss = None
    if label:
        for _ in range(rng.randint(1, 2)):
            link = rng.random() < 0.8
            texts.append(textgen.spam_issue(rng, link=link, command=not link or rng.random() < 0.3))
    elif variant == "linked_ham":
        texts.append(textgen.ham_issue(rng, owner, name, link=True, command=rng.random() < 0.5))
        # the flip point is this model's probability for the issue, so no fixed value
        near_miss = {"knob": "classifier_threshold"}
    rng.shuffle(texts)
    stamps = sorted(rng.sample(range(T0, SNAPSHOT_AT - DAY, 600), len(texts)))
    issues = tuple(
        IssueRecord(number=k + 1, author_login=names.login(), title=title, body=body, created_at=t)
        for k, ((title, body), t) in enumerate(zip(texts, stamps))
    )
    return _plain_repo(rng, full, topic, issues=issues), (), near_miss


# -- Reputation Farming ----------------------------------------------------

def _interaction_repo(rng, names, count: int) -> RepoSnapshot:
    topic = _topic(rng)
    full = names.repo(topic)
    issues, pulls = [], []
    for k in range(1, count + 1):
        opened = T0 + rng.randint(0, 150) * DAY
        closed = opened + rng.randint(1, 20) * DAY
        if k % 2:
            issues.append(IssueRecord(k, names.login(), f"Issue {k}", "", opened, IssueState.CLOSED, closed))
        else:
            state = rng.choice([PullRequestState.MERGED, PullRequestState.CLOSED])
            pulls.append(PullRequestRecord(k, names.login(), f"Change {k}", "", opened, state, closed))
    return _plain_repo(rng, full, topic, issues=tuple(issues), pull_requests=tuple(pulls))


def _closed_items(repo: RepoSnapshot) -> list[tuple[str, int, bool]]:
    items = [(f"{repo.full_name}#{i.number}", i.closed_at, False) for i in repo.issues]
    items += [(f"{repo.full_name}#{p.number}", p.merged_or_closed_at, True) for p in repo.pull_requests]
    return sorted(items)


def _reputation_farming(rng, names, batch, cfg, iid, label, variant):
    repos = [_interaction_repo(rng, names, rng.randint(4, 8)) for _ in range(rng.randint(1, 3))]
    items = [it for r in repos for it in _closed_items(r)]
    login = names.login()
    m = cfg.farming_min_events
    near_miss = None
    fresh_lo, fresh_hi = max(60, cfg.delta_t // 4), max(61, cfg.delta_t // 2)
    stale_lo, stale_hi = cfg.delta_t + 600, cfg.window_rep_farming - DAY
    events: list[tuple[int, str, bool]] = []
    if label:
        n_stale = rng.randint(m, m + 4)
        offsets = [rng.randint(stale_lo, stale_hi) for _ in range(n_stale)]
    elif variant == "count":
        offsets = [rng.randint(stale_lo, stale_hi) for _ in range(m - 1)]
        near_miss = {"knob": "farming_min_events", "value": m - 1}
    elif variant == "early":
        offsets = [rng.randint(cfg.delta_t - 1800, cfg.delta_t - 1) for _ in range(rng.randint(m, m + 3))]
        near_miss = {"knob": "delta_t", "value": min(offsets)}
    else:
        offsets = []
    picks = [rng.choice(items) for _ in offsets]
    for (target, closed, is_pr), off in zip(picks, offsets):
        events.append((closed + off, target, is_pr))
    # ordinary activity: interactions shortly before closure or just after it
    for target, closed, is_pr in rng.sample(items, min(len(items), rng.randint(1, 4))):
        events.append((closed - rng.randint(DAY, 5 * DAY), target, is_pr))
        if rng.random() < 0.5:
            events.append((closed + rng.randint(fresh_lo, fresh_hi), target, is_pr))
    activity = tuple(
        ActivityEvent(ActivityKind.PR_COMMENT if is_pr else ActivityKind.ISSUE_COMMENT, t, target)
        for t, target, is_pr in sorted(events)
    )
    user = UserSnapshot(
        login=login,
        snapshot_at=SNAPSHOT_AT,
        activity=activity,
        follower_count=rng.randint(0, 200),
    )
    context = tuple(batch.put(f"repos/{iid}-r{k}.json", r) for k, r in enumerate(repos))
    return user, context, near_miss


# -- Fake Stats ------------------------------------------------------------

def _fake_stats(rng, names, batch, cfg, iid, label, variant):
    login = names.login()
    owned = tuple(OwnedRepo(f"{login}/{w}", rng.randint(0, 60)) for w in rng.sample(textgen._WORD_POOL, rng.randint(1, 5)))
    total = sum(r.star_count for r in owned)
    widget_owners = [login] * rng.randint(1, 2)
    claimed: int | None = total if rng.random() < 0.6 else None
    near_miss = None
    if label:
        mode = rng.choice(("foreign", "gap", "both"))
        if mode in ("foreign", "both"):
            widget_owners[rng.randrange(len(widget_owners))] = names.login()
        if mode in ("gap", "both"):
            claimed = total + rng.randint(cfg.x5, cfg.x5 * 50)
    elif variant == "gap":
        gap = cfg.x5 - 1
        claimed = total + gap if rng.random() < 0.5 or total < gap else total - gap
        near_miss = {"knob": "x5", "value": gap}
    lines = [f"# Hi, I'm {login}", ""]
    urls = []
    for k, who in enumerate(widget_owners):
        url = _WIDGET_TEMPLATES[k % len(_WIDGET_TEMPLATES)].format(login=who)
        urls.append(url)
        lines.append(f"![stats]({url})")
    if claimed is not None:
        lines.append(f"![stars](https://img.shields.io/badge/stars-{claimed}-yellow)")
    user = UserSnapshot(
        login=login,
        snapshot_at=SNAPSHOT_AT,
        owned_repos=owned,
        profile_readme="\n".join(lines) + "\n",
        stat_widget_urls=tuple(urls),
        claimed_star_count=claimed,
        follower_count=rng.randint(0, 300),
    )
    return user, (), near_miss


# -- driver ----------------------------------------------------------------

_NEGATIVE_VARIANTS: dict[Subcategory, tuple[str, ...]] = {
    Subcategory.FAKE_STARS: ("plain", "starred", "activity", "fraction"),
    Subcategory.AUTOMATIC_UPDATES: ("plain", "count", "size"),
    Subcategory.KEYWORD_STUFFING: ("plain", "count"),
    Subcategory.TYPO_SQUATTING: ("readme", "popular"),
    Subcategory.SPOOFED_CONTRIBUTOR: ("count", "repo", "suspect"),
    Subcategory.ISSUE_SPAM: ("plain", "linked_ham"),
    Subcategory.REPUTATION_FARMING: ("plain", "count", "early"),
    Subcategory.FAKE_STATS: ("plain", "gap"),
}

_BUILDERS = {
    Subcategory.FAKE_STARS: _fake_stars,
    Subcategory.AUTOMATIC_UPDATES: _automatic_updates,
    Subcategory.KEYWORD_STUFFING: _keyword_stuffing,
    Subcategory.SPOOFED_CONTRIBUTOR: _spoofed_contributor,
    Subcategory.ISSUE_SPAM: _issue_spam,
    Subcategory.REPUTATION_FARMING: _reputation_farming,
    Subcategory.FAKE_STATS: _fake_stats,
}


def _resolve_counts(
    per_category: tuple[int, int] | Mapping[Subcategory, tuple[int, int]] | None,
) -> dict[Subcategory, tuple[int, int]]:
    if per_category is None:
        counts = dict(DEFAULT_COUNTS)
    elif isinstance(per_category, Mapping):
        counts = {Subcategory(k): tuple(v) for k, v in per_category.items()}
    else:
        counts = {sub: tuple(per_category) for sub in Subcategory}
    for sub, (pos, neg) in counts.items():
        if pos < 1 or neg < 1:
            raise ValueError(f"{sub.value}: positive and negative counts must be >= 1, got ({pos}, {neg})")
    return counts


def build_fixture_corpus(
    seed: int = 0,
    per_category: tuple[int, int] | Mapping[Subcategory, tuple[int, int]] | None = None,
    cfg: ThresholdConfig | None = None,
) -> tuple[dict[str, Snapshot], list[LabeledInstance]]:
    """In-memory corpus: snapshot files keyed by relative path, plus manifest rows."""
    cfg = cfg or ThresholdConfig()
    counts = _resolve_counts(per_category)
    batch = _Batch()
    for sub in Subcategory:
        if sub not in counts:
            continue
        pos, neg = counts[sub]
        rng = random.Random(f"{seed}:{sub.value}")
        names = _Names(rng)
        refs = _reference_repos(seed, batch) if sub is Subcategory.TYPO_SQUATTING else None
        variants = _NEGATIVE_VARIANTS[sub]
        labels = [True] * pos + [False] * neg
        for k, label in enumerate(labels):
            iid = f"{sub.value}-{k:03d}"
            variant = "positive" if label else variants[(k - pos) % len(variants)]
            if refs is not None:
                subject, context, near_miss = _typo_squatting(rng, names, batch, cfg, iid, label, variant, refs)
            else:
                subject, context, near_miss = _BUILDERS[sub](rng, names, batch, cfg, iid, label, variant)
            kind = "repo" if isinstance(subject, RepoSnapshot) else "user"
            rel = batch.put(f"{kind}s/{iid}.json", subject)
            batch.instances.append(LabeledInstance(iid, sub, kind, rel, label, context, near_miss))
    return batch.files, batch.instances


def generate_fixture_corpus(
    seed: int = 0,
    per_category: tuple[int, int] | Mapping[Subcategory, tuple[int, int]] | None = None,
    cfg: ThresholdConfig | None = None,
    out_dir: str | Path = "corpus",
) -> Path:
    """Write a corpus directory and return its manifest path.

    ``per_category`` is either one ``(positives, negatives)`` pair applied to
    every subcategory or a mapping per subcategory; the default reproduces a
    balanced 310-repo, 82-user corpus. A directory previously written by
    this function is replaced.
    """
    files, instances = build_fixture_corpus(seed, per_category, cfg)
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()):
        if not (out / MANIFEST_NAME).is_file():
            raise FileExistsError(f"{out} is not empty and holds no corpus manifest")
        for sub in ("repos", "users"):
            shutil.rmtree(out / sub, ignore_errors=True)
    for rel in sorted(files):
        path = out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_snapshot(files[rel]), encoding="utf-8")
    manifest = out / MANIFEST_NAME
    write_manifest(manifest, instances)
    return manifest
