from __future__ import annotations

import os

import pytest

from conftest import FIXTURES
from ghabuse.ingest import (
    ApiClientConfig,
    GitHubClient,
    GitHubError,
    NotFoundError,
    RecordingTransport,
    ReplayTransport,
    TransportError,
    UserLimits,
    candidate_repos_recent_updates,
    fetch_repo_snapshot,
    fetch_user_snapshot,
    load_snapshot,
)
from ghabuse.ingest.fetch import claimed_star_count, parse_co_authors, stat_widget_urls
from ghabuse.ingest.transport import Request, Response
from ghabuse.model import SnapshotError

INGEST = FIXTURES / "ingest"
CFG = ApiClientConfig(per_page=30)
NOW = 1727784000
T = 1714564800
SINCE = T - 86400


def replay(name: str) -> ReplayTransport:
    return ReplayTransport.from_file(INGEST / name)


def client(name: str, cfg: ApiClientConfig = CFG) -> GitHubClient:
    return GitHubClient(cfg, replay(name), sleep=lambda s: None, clock=lambda: NOW)


# -- fetch -----------------------------------------------------------------


def test_repo_fetch_truncates_stargazers_at_limit():
    repo, report = fetch_repo_snapshot(CFG, "octo-lab/parsekit", transport=replay("repo_transcript.json"))
    assert repo.star_count == 250
    assert len(repo.star_events) == 100
    assert report.truncated
    assert "stargazers truncated at limit" in report.warnings
    assert report.rate_limit_remaining == 4999
    assert [i.number for i in repo.issues] == [1, 3]  # the pull request listed among issues is skipped


def test_repo_fetch_matches_golden():
    repo, _ = fetch_repo_snapshot(CFG, "octo-lab/parsekit", transport=replay("repo_transcript.json"))
    assert repo == load_snapshot(INGEST / "repo_golden.json")


def test_repo_not_found():
    transport = ReplayTransport([
        {"request": {"method": "GET", "path": "/repos/no/such"}, "response": {"status": 404, "body": {"message": "Not Found"}}}
    ])
    with pytest.raises(NotFoundError):
        fetch_repo_snapshot(CFG, "no/such", transport=transport)


def test_malformed_names_rejected_before_any_request():
    with pytest.raises(SnapshotError):
        fetch_repo_snapshot(CFG, "not a repo", transport=ReplayTransport([]))
    with pytest.raises(SnapshotError):
        fetch_user_snapshot(CFG, "a/b", transport=ReplayTransport([]))


def test_quiet_user_has_empty_readme_and_no_widgets():
    user, report = fetch_user_snapshot(CFG, "quiet-person", transport=replay("quiet_user_transcript.json"))
    assert user.profile_readme == ""
    assert user.stat_widget_urls == ()
    assert user.claimed_star_count is None
    assert not report.truncated
    assert user == load_snapshot(INGEST / "quiet_user_golden.json")


def test_user_events_truncated():
    user, report = fetch_user_snapshot(
        CFG, "mallory-dev", UserLimits(max_events=4), transport=replay("user_transcript.json")
    )
    assert len(user.activity) == 4
    assert report.truncated and "events truncated at limit" in report.warnings


def test_fetched_collections_are_sorted():
    repo, _ = fetch_repo_snapshot(CFG, "octo-lab/parsekit", transport=replay("repo_transcript.json"))
    user, _ = fetch_user_snapshot(CFG, "mallory-dev", transport=replay("user_transcript.json"))
    assert [c.timestamp for c in repo.commits] == sorted(c.timestamp for c in repo.commits)
    assert [s.starred_at for s in repo.star_events] == sorted(s.starred_at for s in repo.star_events)
    assert [e.timestamp for e in user.activity] == sorted(e.timestamp for e in user.activity)
    assert [r.full_name for r in user.owned_repos] == sorted(r.full_name for r in user.owned_repos)


def test_recording_then_replay_reproduces_the_snapshot(tmp_path):
    recorder = RecordingTransport(replay("user_transcript.json"))
    first, _ = fetch_user_snapshot(CFG, "mallory-dev", transport=recorder)
    path = tmp_path / "t.json"
    recorder.dump(path)
    second, _ = fetch_user_snapshot(CFG, "mallory-dev", transport=ReplayTransport.from_file(path))
    assert first == second


# -- candidate discovery ---------------------------------------------------


def test_candidates_ordered_by_latest_push():
    gh = client("candidates_transcript.json")
    assert candidate_repos_recent_updates(CFG, 1, SINCE, client=gh) == ["late/one", "mid/two", "early/three"]


def test_candidates_filtered_by_push_count():
    gh = client("candidates_transcript.json")
    assert candidate_repos_recent_updates(CFG, 3, SINCE, client=gh) == ["late/one", "early/three"]


def test_candidates_deduplicated_across_pages():
    cfg = ApiClientConfig(per_page=3)
    gh = client("candidates_dup_transcript.json", cfg)
    assert candidate_repos_recent_updates(cfg, 1, SINCE, client=gh) == ["x/a", "x/b", "x/c", "x/d"]


def test_candidates_empty():
    assert candidate_repos_recent_updates(CFG, 1, SINCE, client=client("candidates_empty_transcript.json")) == []


def test_candidates_since_in_future():
    with pytest.raises(ValueError):
        candidate_repos_recent_updates(CFG, 1, NOW + 10, client=client("candidates_empty_transcript.json"))


# -- client behaviour ------------------------------------------------------


class Scripted:
    def __init__(self, *responses: Response) -> None:
        self.responses = list(responses)
        self.requests: list[Request] = []

    def send(self, request: Request) -> Response:
        self.requests.append(request)
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def test_server_errors_retried_then_reported():
    sleeps: list[float] = []
    ok = Response(200, {}, {"login": "x"})
    gh = GitHubClient(ApiClientConfig(), Scripted(Response(502, {}, None), ok), sleep=sleeps.append)
    assert gh.get_json("/users/x") == {"login": "x"}
    assert sleeps == [1.0]
    failing = Scripted(*[Response(500, {}, None)] * 4)
    gh = GitHubClient(ApiClientConfig(), failing, sleep=lambda s: None)
    with pytest.raises(GitHubError) as err:
        gh.get("/users/x")
    assert err.value.status == 500 and len(failing.requests) == 4


def test_transport_errors_retried():
    gh = GitHubClient(ApiClientConfig(retry_budget=1), Scripted(TransportError("reset"), Response(200, {}, [])),
                      sleep=lambda s: None)
    assert gh.get_json("/x") == []
    gh = GitHubClient(ApiClientConfig(retry_budget=0), Scripted(TransportError("reset")), sleep=lambda s: None)
    with pytest.raises(TransportError):
        gh.get("/x")


def test_pagination_without_link_header_uses_page_size():
    cfg = ApiClientConfig(per_page=2)
    gh = GitHubClient(cfg, Scripted(Response(200, {}, [1, 2]), Response(200, {}, [3])))
    assert gh.paginate("/x", 10) == ([1, 2, 3], False)
    gh = GitHubClient(cfg, Scripted(Response(200, {}, [1, 2]), Response(200, {}, [3, 4])))
    assert gh.paginate("/x", 3) == ([1, 2, 3], True)


def test_token_sent_but_not_shown():
    transport = Scripted(Response(200, {}, {}))
    cfg = ApiClientConfig(auth_token="s3cret")
    GitHubClient(cfg, transport).get("/x")
    assert ("Authorization", "Bearer s3cret") in transport.requests[0].headers
    assert "s3cret" not in repr(cfg)


def test_config_ranges():
    with pytest.raises(ValueError):
        ApiClientConfig(max_in_flight=0)
    with pytest.raises(ValueError):
        ApiClientConfig(per_page=101)
    with pytest.raises(ValueError):
        ApiClientConfig(retry_budget=-1)


# -- parsing helpers -------------------------------------------------------


def test_co_author_trailers():
    message = (
        "Fix\n\nCo-authored-by: A <1+alice@users.noreply.github.com>\n"
        "co-authored-by: B <Bob@Example.com>\nCo-authored-by: A again <alice@users.noreply.github.com>"
    )
    assert parse_co_authors(message) == ("alice", "bob@example.com")
    assert parse_co_authors("") == ()


def test_star_badge_parsing():
    assert claimed_star_count("![s](https://img.shields.io/badge/Total%20Stars-1.5k-yellow)") == 1500
    assert claimed_star_count("https://img.shields.io/badge/stars-2,345-blue") == 2345
    assert claimed_star_count("https://img.shields.io/badge/build-passing-green") is None
    assert claimed_star_count("no badge") is None


def test_widget_urls_filtered_by_host():
    readme = "![a](https://github-readme-stats.vercel.app/api?username=x) https://example.org/x"
    assert stat_widget_urls(readme) == ("https://github-readme-stats.vercel.app/api?username=x",)


@pytest.mark.skipif(not os.environ.get("GHABUSE_LIVE_TESTS"), reason="set GHABUSE_LIVE_TESTS=1 to hit the live API")
def test_live_repo_fetch():
    repo, report = fetch_repo_snapshot(ApiClientConfig(), "octocat/Hello-World")
    assert repo.full_name == "octocat/Hello-World"
    assert report.requests_made > 0
