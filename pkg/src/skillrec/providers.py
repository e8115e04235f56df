"""Pluggable lookup providers for skill descriptions and video transcripts.

Live crawling is out of scope; these interfaces keep the pipeline testable
with fixture files while leaving room for real HTTP backends.
"""

from __future__ import annotations

import json
import logging
from typing import Optional, Protocol
from urllib.parse import quote

import requests

log = logging.getLogger(__name__)


class ProviderUnavailable(RuntimeError):
    """The provider backend cannot be reached; callers may continue without it."""


class DescriptionProvider(Protocol):
    def lookup(self, name: str) -> Optional[str]: ...


class TranscriptProvider(Protocol):
    def lookup(self, video_id: str) -> Optional[str]: ...


class FixtureProvider:
    """JSON-map backed provider; keys are matched case-insensitively."""

    def __init__(self, entries: dict[str, str]):
        self.entries = {key.lower(): value for key, value in entries.items()}

    @classmethod
    def from_file(cls, path: str) -> "FixtureProvider":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def lookup(self, name: str) -> Optional[str]:
        return self.entries.get(name.lower())


class HttpEncyclopediaProvider:
    """First-paragraph summaries from a wiki-style REST endpoint."""

    def __init__(self, base_url: str = "https://en.wikipedia.org", timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def lookup(self, name: str) -> Optional[str]:
        url = f"{self.base_url}/api/rest_v1/page/summary/{quote(name.replace(' ', '_'))}"
        try:
            response = requests.get(url, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"description lookup failed for {name!r}: {exc}") from exc
        if response.status_code == 404:
            return None
        if response.status_code != 200:
            raise ProviderUnavailable(
                f"description lookup for {name!r} returned HTTP {response.status_code}"
            )
        extract = response.json().get("extract")
        return extract or None
