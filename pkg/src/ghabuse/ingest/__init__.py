from ghabuse.ingest.client import (
    ApiClientConfig,
    GitHubClient,
    GitHubError,
    NotFoundError,
    RateLimitedError,
)
from ghabuse.ingest.fetch import (
    FetchReport,
    RepoLimits,
    UserLimits,
    candidate_repos_recent_updates,
    fetch_repo_snapshot,
    fetch_user_snapshot,
)
from ghabuse.ingest.store import dumps_snapshot, load_snapshot, store_snapshot
from ghabuse.ingest.transport import ReplayTransport, RecordingTransport, TransportError

__all__ = [
    "ApiClientConfig",
    "FetchReport",
    "GitHubClient",
    "GitHubError",
    "NotFoundError",
    "RateLimitedError",
    "RecordingTransport",
    "ReplayTransport",
    "RepoLimits",
    "TransportError",
    "UserLimits",
    "candidate_repos_recent_updates",
    "dumps_snapshot",
    "fetch_repo_snapshot",
    "fetch_user_snapshot",
    "load_snapshot",
    "store_snapshot",
]
