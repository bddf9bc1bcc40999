"""Service configuration and token provisioning."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .backends import (
    DEFAULT_MAX_TOKENS,
    DEFAULT_TEMPERATURE,
    DEFAULT_TIMEOUT_SECONDS,
    CompletionBackend,
    CompletionParams,
    HTTPBackend,
    MockBackend,
)
from .model import ClassContext


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Principal:
    user_id: str
    role: str  # "student" | "instructor"

    def __post_init__(self):
        if self.role not in ("student", "instructor"):
            raise ConfigError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class BackendRoleConfig:
    model: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    @property
    def params(self) -> CompletionParams:
        return CompletionParams(
            model=self.model, temperature=self.temperature, max_tokens=self.max_tokens
        )


@dataclass(frozen=True)
class ServiceConfig:
    """Parsed serve configuration.

    The backend section selects "mock" (rules file) or "remote" (URL plus an
    API key environment variable).  The chat and rewrite roles are
    configured independently.
    """

    host: str = "127.0.0.1"
    port: int = 8080
    data_dir: Path = Path("./data")
    class_id: str = "default"
    class_name: str = "Default class"
    avoid_set: tuple[str, ...] = ()
    backend_kind: str = "mock"
    mock_rules: Path | None = None
    remote_url: str = ""
    api_key_env: str = "CODETUTOR_API_KEY"
    timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS
    chat: BackendRoleConfig = field(
        default_factory=lambda: BackendRoleConfig(model="chat-default")
    )
    rewrite: BackendRoleConfig = field(
        default_factory=lambda: BackendRoleConfig(model="rewrite-default")
    )
    tokens_path: Path | None = None

    def class_context(self) -> ClassContext:
        return ClassContext(
            class_id=self.class_id,
            name=self.class_name,
            avoid_set=self.avoid_set,
            model=self.chat.model,
            temperature=self.chat.temperature,
            max_tokens=self.chat.max_tokens,
        )

    def build_backends(self) -> tuple[CompletionBackend, CompletionBackend]:
        """Instantiate the (chat, rewrite) backends.

        Remote backends require the API key variable to be set; the error
        names the variable so operators know what to export.
        """
        if self.backend_kind == "mock":
            if self.mock_rules is not None:
                backend = MockBackend.from_json(self.mock_rules)
            else:
                backend = MockBackend()
            return backend, backend
        if self.backend_kind == "remote":
            api_key = os.environ.get(self.api_key_env, "")
            if not api_key:
                raise ConfigError(
                    f"remote backend selected but environment variable "
                    f"{self.api_key_env} is not set"
                )
            if not self.remote_url:
                raise ConfigError("remote backend selected but no url configured")
            backend = HTTPBackend(
                self.remote_url, api_key=api_key, timeout=self.timeout_seconds
            )
            return backend, backend
        raise ConfigError(f"unknown backend kind {self.backend_kind!r}")


def _role(data: dict, fallback_model: str) -> BackendRoleConfig:
    return BackendRoleConfig(
        model=data.get("model", fallback_model),
        temperature=data.get("temperature", DEFAULT_TEMPERATURE),
        max_tokens=data.get("max_tokens", DEFAULT_MAX_TOKENS),
    )


def load_config(path: str | Path) -> ServiceConfig:
    base = Path(path).parent
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None

    def _resolve(value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    backend = data.get("backend", {})
    klass = data.get("class", {})
    try:
        return ServiceConfig(
            host=data.get("host", "127.0.0.1"),
            port=int(data.get("port", 8080)),
            data_dir=_resolve(data.get("data_dir", "./data")),
            class_id=klass.get("class_id", "default"),
            class_name=klass.get("name", "Default class"),
            avoid_set=tuple(klass.get("avoid_set", [])),
            backend_kind=backend.get("kind", "mock"),
            mock_rules=_resolve(backend.get("mock_rules")),
            remote_url=backend.get("url", ""),
            api_key_env=backend.get("api_key_env", "CODETUTOR_API_KEY"),
            timeout_seconds=float(
                backend.get("timeout_seconds", DEFAULT_TIMEOUT_SECONDS)
            ),
            chat=_role(backend.get("chat", {}), "chat-default"),
            rewrite=_role(backend.get("rewrite", {}), "rewrite-default"),
            tokens_path=_resolve(data.get("tokens")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from None


def load_tokens(path: str | Path) -> dict[str, Principal]:
    """Parse a tokens file: {"tokens": {"<token>": {"user_id", "role"}}}."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read tokens file {path}: {exc}") from None
    tokens = {}
    for token, entry in data.get("tokens", {}).items():
        tokens[token] = Principal(user_id=entry["user_id"], role=entry["role"])
    return tokens


def write_tokens(principals: dict[str, Principal], path: str | Path) -> None:
    data = {
        "tokens": {
            token: {"user_id": p.user_id, "role": p.role}
            for token, p in principals.items()
        }
    }
    Path(path).write_text(
        json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
