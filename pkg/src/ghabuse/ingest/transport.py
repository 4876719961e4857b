"""HTTP transports for the GitHub client.

The client only talks to a ``Transport``; tests swap in ``ReplayTransport``
over a recorded transcript, so nothing under test touches the network.

Transcript format: a JSON array of
``{"request": {"method", "path", "query"}, "response": {"status", "headers", "body"}}``.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Protocol

import httpx


@dataclass(frozen=True)
class Request:
    method: str
    path: str
    query: tuple[tuple[str, str], ...] = ()
    headers: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def key(self) -> tuple[str, str, tuple[tuple[str, str], ...]]:
        return (self.method.upper(), self.path, tuple(sorted(self.query)))


@dataclass(frozen=True)
class Response:
    status: int
    headers: Mapping[str, str]
    body: Any

    def header(self, name: str, default: str | None = None) -> str | None:
        lname = name.lower()
        for k, v in self.headers.items():
            if k.lower() == lname:
                return v
        return default


class Transport(Protocol):
    def send(self, request: Request) -> Response: ...


class TransportError(ConnectionError):
    pass


class HttpxTransport:
    """Live transport over httpx; the only class in the package that opens sockets."""

    def __init__(self, base_url: str, timeout: float = 30.0) -> None:
        self._client = httpx.Client(base_url=base_url, timeout=timeout, follow_redirects=True)

    def send(self, request: Request) -> Response:
        try:
            resp = self._client.request(
                request.method, request.path, params=list(request.query), headers=dict(request.headers)
            )
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        ctype = resp.headers.get("content-type", "")
        body: Any = resp.text
        if "json" in ctype and resp.content:
            try:
                body = resp.json()
            except ValueError:
                pass
        return Response(resp.status_code, dict(resp.headers), body)

    def close(self) -> None:
        self._client.close()


def _encode(request: Request, response: Response) -> dict:
    return {
        "request": {"method": request.method.upper(), "path": request.path, "query": dict(request.query)},
        "response": {"status": response.status, "headers": dict(response.headers), "body": response.body},
    }


class ReplayTransport:
    """Serves responses from a transcript; identical requests are answered in recorded order."""

    def __init__(self, exchanges: list[dict]) -> None:
        self._lock = threading.Lock()
        self._queues: dict[tuple, list[Response]] = {}
        for ex in exchanges:
            req = ex["request"]
            key = Request(req["method"], req["path"], tuple((k, str(v)) for k, v in req.get("query", {}).items())).key()
            resp = ex["response"]
            self._queues.setdefault(key, []).append(Response(resp["status"], resp.get("headers", {}), resp.get("body")))
        self.requests: list[Request] = []

    @classmethod
    def from_file(cls, path: str | Path) -> ReplayTransport:
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def send(self, request: Request) -> Response:
        with self._lock:
            self.requests.append(request)
            queue = self._queues.get(request.key())
            if not queue:
                raise TransportError(f"no recorded response for {request.method} {request.path} {dict(request.query)}")
            # the last recorded response is sticky once earlier ones are consumed
            return queue.pop(0) if len(queue) > 1 else queue[0]


class RecordingTransport:
    """Wraps another transport and keeps every exchange for later replay."""

    def __init__(self, inner: Transport) -> None:
        self._inner = inner
        self._lock = threading.Lock()
        self.exchanges: list[dict] = []

    def send(self, request: Request) -> Response:
        response = self._inner.send(request)
        with self._lock:
            self.exchanges.append(_encode(request, response))
        return response

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.exchanges, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
