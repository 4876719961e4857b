"""GitHub REST client with bounded concurrency, pagination and rate-limit handling."""

from __future__ import annotations

import logging
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, TypeVar

from ghabuse.ingest.transport import HttpxTransport, Request, Response, Transport, TransportError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

JSON_MEDIA = "application/vnd.github+json"
STAR_MEDIA = "application/vnd.github.star+json"
RAW_MEDIA = "application/vnd.github.raw+json"

_LINK_NEXT = re.compile(r'<[^>]+>\s*;\s*rel="next"')


class GitHubError(RuntimeError):
    def __init__(self, message: str, status: int | None = None) -> None:
        super().__init__(message)
        self.status = status


class NotFoundError(GitHubError):
    pass


class RateLimitedError(GitHubError):
    def __init__(self, message: str, reset_at: int | None) -> None:
        super().__init__(message, 403)
        self.reset_at = reset_at


@dataclass
class Tally:
    """Per-fetch request counter; updated under the client's lock."""

    count: int = 0


@dataclass(frozen=True)
class ApiClientConfig:
    base_url: str = "https://api.github.com"
    auth_token: str | None = None
    max_in_flight: int = 4
    retry_budget: int = 3
    per_page: int = 100
    token_env: str = "GH_TOKEN"

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if not 1 <= self.per_page <= 100:
            raise ValueError("per_page must be within [1, 100]")
        if self.retry_budget < 0:
            raise ValueError("retry_budget must be >= 0")

    def token(self) -> str | None:
        return self.auth_token or os.environ.get(self.token_env) or None

    def __repr__(self) -> str:
        hidden = "***" if self.auth_token else None
        return (
            f"ApiClientConfig(base_url={self.base_url!r}, auth_token={hidden!r}, max_in_flight={self.max_in_flight}, "
            f"retry_budget={self.retry_budget}, per_page={self.per_page})"
        )


class GitHubClient:
    """Thread-safe client; share one instance across concurrent fetches."""

    def __init__(
        self,
        cfg: ApiClientConfig,
        transport: Transport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.time,
    ) -> None:
        self.cfg = cfg
        self._transport = transport or HttpxTransport(cfg.base_url)
        self._sleep = sleep
        self._clock = clock
        self._slots = threading.BoundedSemaphore(cfg.max_in_flight)
        self._lock = threading.Lock()
        self.requests_made = 0
        self.rate_limit_remaining: int | None = None
        self.rate_limit_reset: int | None = None

    # -- single requests ---------------------------------------------------

    def _headers(self, accept: str) -> tuple[tuple[str, str], ...]:
        headers = [("Accept", accept), ("X-GitHub-Api-Version", "2022-11-28")]
        token = self.cfg.token()
        if token:
            headers.append(("Authorization", f"Bearer {token}"))
        return tuple(headers)

    def _note_limits(self, resp: Response) -> None:
        remaining = resp.header("X-RateLimit-Remaining")
        reset = resp.header("X-RateLimit-Reset")
        with self._lock:
            if remaining is not None and remaining.isdigit():
                self.rate_limit_remaining = int(remaining)
            if reset is not None and reset.isdigit():
                self.rate_limit_reset = int(reset)

    def _wait_for_budget(self) -> None:
        with self._lock:
            exhausted = self.rate_limit_remaining == 0 and self.rate_limit_reset is not None
            reset = self.rate_limit_reset
        if exhausted:
            delay = reset - self._clock()
            if delay > 0:
                logger.warning("rate limit exhausted; sleeping %.0fs until reset", delay)
                self._sleep(delay)
            with self._lock:
                if self.rate_limit_reset == reset:
                    self.rate_limit_remaining = None

    def _rate_limit_wait(self, resp: Response) -> float | None:
        """Seconds to wait when ``resp`` is a rate-limit rejection, else None."""
        if resp.status not in (403, 429):
            return None
        retry_after = resp.header("Retry-After")
        if retry_after is not None and retry_after.strip().isdigit():
            return float(retry_after)
        if resp.header("X-RateLimit-Remaining") == "0":
            reset = resp.header("X-RateLimit-Reset")
            if reset is not None and reset.isdigit():
                return max(0.0, int(reset) - self._clock())
            return 60.0
        if resp.status == 429:
            return 60.0
        return None

    def get(
        self, path: str, query: Iterable[tuple[str, Any]] = (), accept: str = JSON_MEDIA, tally: Tally | None = None
    ) -> Response:
        request = Request("GET", path, tuple((k, str(v)) for k, v in query), self._headers(accept))
        attempts = self.cfg.retry_budget + 1
        for attempt in range(attempts):
            last = attempt == attempts - 1
            self._wait_for_budget()
            with self._slots:
                with self._lock:
                    self.requests_made += 1
                    if tally is not None:
                        tally.count += 1
                try:
                    resp = self._transport.send(request)
                except TransportError:
                    if last:
                        raise
                    resp = None
            if resp is None:
                self._sleep(2.0**attempt)
                continue
            self._note_limits(resp)
            if 200 <= resp.status < 300:
                return resp
            if resp.status == 404:
                raise NotFoundError(f"not found: {path}", 404)
            wait = self._rate_limit_wait(resp)
            if wait is not None:
                reset = resp.header("X-RateLimit-Reset")
                if last:
                    raise RateLimitedError(
                        f"rate limited on {path}; resets at {reset}", int(reset) if reset and reset.isdigit() else None
                    )
                logger.warning("rate limited on %s; waiting %.0fs", path, wait)
                self._sleep(wait)
                with self._lock:
                    # this wait already covered the advertised reset
                    self.rate_limit_remaining = None
                continue
            if resp.status >= 500 and not last:
                self._sleep(2.0**attempt)
                continue
            raise GitHubError(f"GET {path} failed with HTTP {resp.status}", resp.status)
        raise TransportError(f"GET {path}: retry budget exhausted")

    def get_json(
        self, path: str, query: Iterable[tuple[str, Any]] = (), accept: str = JSON_MEDIA, tally: Tally | None = None
    ) -> Any:
        return self.get(path, query, accept, tally).body

    # -- pagination --------------------------------------------------------

    def paginate(
        self,
        path: str,
        limit: int,
        query: Iterable[tuple[str, Any]] = (),
        accept: str = JSON_MEDIA,
        items_key: str | None = None,
        tally: Tally | None = None,
    ) -> tuple[list[Any], bool]:
        """Collect up to ``limit`` items across pages.

        Returns ``(items, truncated)`` where ``truncated`` means more items
        existed beyond ``limit``.
        """
        items: list[Any] = []
        page = 1
        base = list(query)
        if limit <= 0:
            return items, False
        while True:
            resp = self.get(path, base + [("per_page", self.cfg.per_page), ("page", page)], accept, tally)
            body = resp.body
            batch = body.get(items_key, []) if items_key else body
            if not isinstance(batch, list):
                raise GitHubError(f"expected a list from {path}, got {type(batch).__name__}")
            room = limit - len(items)
            items.extend(batch[:room])
            link = resp.header("Link")
            has_next = bool(_LINK_NEXT.search(link)) if link is not None else len(batch) == self.cfg.per_page
            if len(batch) > room:
                return items, True
            if len(items) >= limit:
                return items, has_next
            if not has_next or not batch:
                return items, False
            page += 1

    # -- fan-out -----------------------------------------------------------

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Apply ``fn`` concurrently (bounded by ``max_in_flight``), preserving order."""
        items = list(items)
        if len(items) <= 1:
            return [fn(i) for i in items]
        with ThreadPoolExecutor(max_workers=self.cfg.max_in_flight) as pool:
            return list(pool.map(fn, items))
