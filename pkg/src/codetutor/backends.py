"""Completion backends: a remote HTTP API and a deterministic scripted mock.

Every completion in the system flows through this interface; nothing else
talks to a network.  The mock backend exists so the whole pipeline is
testable (and demoable) with no remote model.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import requests

DEFAULT_TEMPERATURE = 0.25
DEFAULT_MAX_TOKENS = 1000
DEFAULT_TIMEOUT_SECONDS = 60.0

MOCK_DEFAULT_RESPONSE = "MOCK RESPONSE"


@dataclass(frozen=True)
class CompletionParams:
    model: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self):
        if not 0 <= self.temperature <= 2:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


class BackendError(Exception):
    """Base class for completion failures; carries the prompt id."""

    def __init__(self, message: str, prompt_id: str):
        super().__init__(f"{message} (prompt {prompt_id})")
        self.prompt_id = prompt_id


class BackendTimeout(BackendError):
    pass


class BackendRateLimited(BackendError):
    pass


class BackendRejected(BackendError):
    pass


class CompletionBackend(Protocol):
    def complete(
        self, prompt: str, params: CompletionParams, prompt_id: str | None = None
    ) -> str: ...


@dataclass(frozen=True)
class MockRule:
    """First rule whose ``match`` substring appears in the prompt wins."""

    match: str
    response: str


class MockBackend:
    """Scripted, fully deterministic backend.

    Rules are an ordered (substring, response) table; prompts matching no
    rule get the default response.  Stateless, so concurrent calls are safe.
    """

    def __init__(
        self,
        rules: Sequence[MockRule | tuple[str, str]] = (),
        default: str = MOCK_DEFAULT_RESPONSE,
    ):
        self.rules = tuple(
            r if isinstance(r, MockRule) else MockRule(*r) for r in rules
        )
        self.default = default

    def complete(
        self, prompt: str, params: CompletionParams, prompt_id: str | None = None
    ) -> str:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        for rule in self.rules:
            if rule.match in prompt:
                return rule.response
        return self.default

    @classmethod
    def from_json(cls, path: str | Path) -> "MockBackend":
        """Load rules from a JSON file:
        ``{"rules": [{"match": ..., "response": ...}, ...], "default": ...}``
        """
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        rules = [MockRule(r["match"], r["response"]) for r in data.get("rules", [])]
        return cls(rules, default=data.get("default", MOCK_DEFAULT_RESPONSE))


class HTTPBackend:
    """Remote JSON completion API.

    POSTs ``{"model", "prompt", "temperature", "max_tokens"}`` to ``url``
    with a bearer token and expects ``{"completion": "..."}`` back.  Honors
    ``timeout`` and retries once on transient failures (timeouts, connection
    errors, 429s and 5xx responses) before raising.
    """

    def __init__(
        self,
        url: str,
        api_key: str = "",
        timeout: float = DEFAULT_TIMEOUT_SECONDS,
        retries: int = 1,
    ):
        self.url = url
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries

    def _post_once(self, payload: dict) -> requests.Response:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return requests.post(
            self.url, json=payload, headers=headers, timeout=self.timeout
        )

    def complete(
        self, prompt: str, params: CompletionParams, prompt_id: str | None = None
    ) -> str:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        pid = prompt_id or uuid.uuid4().hex[:12]
        payload = {
            "model": params.model,
            "prompt": prompt,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        last_error: BackendError | None = None
        for _ in range(self.retries + 1):
            try:
                resp = self._post_once(payload)
            except requests.Timeout:
                last_error = BackendTimeout(
                    f"no response within {self.timeout}s", pid
                )
                continue
            except requests.RequestException as exc:
                last_error = BackendTimeout(f"connection failed: {exc}", pid)
                continue
            if resp.status_code == 429:
                last_error = BackendRateLimited("backend rate-limited", pid)
                continue
            if 500 <= resp.status_code < 600:
                last_error = BackendRejected(
                    f"backend error {resp.status_code}", pid
                )
                continue
            if resp.status_code != 200:
                raise BackendRejected(
                    f"backend rejected request with status {resp.status_code}", pid
                )
            try:
                completion = resp.json()["completion"]
            except (ValueError, KeyError):
                raise BackendRejected("malformed backend response body", pid)
            return str(completion)
        assert last_error is not None
        raise last_error
