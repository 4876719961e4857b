"""Link and shell-command extraction for issue text."""

from __future__ import annotations

import re

URL_PATTERN = re.compile(r"https?://[^\s<>\"'`\]\[)(]+", re.IGNORECASE)
_TRAILING = ".,;:!?*"

_FENCE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)

DEFAULT_COMMAND_PREFIXES = ("$ ", "curl ", "wget ", "powershell", "cmd /c", "bash -c")


def extract_links(text: str) -> list[str]:
    """All http(s) URLs in order of appearance, trailing punctuation trimmed."""
    links = []
    for match in URL_PATTERN.finditer(text):
        url = match.group(0).rstrip(_TRAILING)
        if url.split("://", 1)[1]:
            links.append(url)
    return links


def extract_commands(text: str, prefixes: tuple[str, ...] = DEFAULT_COMMAND_PREFIXES) -> list[str]:
    """Fenced code-block bodies plus lines that start like a shell command.

    Prefix matching is case-insensitive and ignores leading whitespace. A line
    inside a fence is reported once, as part of the fence body.
    """
    commands = []
    fenced_spans = []
    for match in _FENCE.finditer(text):
        body = match.group(1).strip("\n")
        if body.strip():
            commands.append(body)
        fenced_spans.append(match.span())
    lowered = tuple(p.lower() for p in prefixes)
    offset = 0
    for line in text.splitlines(keepends=True):
        start = offset
        offset += len(line)
        if any(lo <= start < hi for lo, hi in fenced_spans):
            continue
        if line.lstrip().lower().startswith(lowered):
            commands.append(line.strip())
    return commands


def has_link(text: str) -> bool:
    return bool(extract_links(text))


def has_command(text: str, prefixes: tuple[str, ...] = DEFAULT_COMMAND_PREFIXES) -> bool:
    return bool(extract_commands(text, prefixes))
