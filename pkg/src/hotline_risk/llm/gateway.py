"""Chat-completion gateway: one ``complete`` call shape over an HTTP or mock backend."""

from __future__ import annotations

import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Protocol

import httpx

from hotline_risk.domain import PipelineError
from hotline_risk.llm.redaction import RedactionReport, Redactor

log = logging.getLogger(__name__)

TRUNCATION_MARKER = "…[truncated]"
API_KEY_ENV = "LLM_API_KEY"

_REFUSAL_RE = re.compile(
    r"^\s*(I'?m sorry,? but I can(?:no|')t|I can(?:no|')t (?:help|assist) with|I am unable to (?:help|assist))",
    re.IGNORECASE,
)


class GatewayError(PipelineError):
    def __init__(self, message: str, attempt_count: int = 1):
        super().__init__(message)
        self.attempt_count = attempt_count


class TransportError(GatewayError):
    pass


class AuthError(GatewayError):
    pass


class BackendRefusal(GatewayError):
    pass


@dataclass(frozen=True)
class ChatRequest:
    system_prompt: str
    user_prompt: str
    max_output_chars: int = 512
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if not self.user_prompt:
            raise ValueError("user_prompt must not be empty")
        if self.max_output_chars < 1:
            raise ValueError("max_output_chars must be positive")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must lie in [0, 2]")


@dataclass(frozen=True)
class ChatResponse:
    text: str
    backend_id: str
    latency_ms: int = 0
    attempt_count: int = 1


class ChatBackend(Protocol):
    backend_id: str

    def send(self, req: ChatRequest) -> ChatResponse: ...


def truncate(text: str, limit: int) -> str:
    """Cut ``text`` to at most ``limit`` characters, ending with the truncation marker when cut."""
    if len(text) <= limit:
        return text
    if limit <= len(TRUNCATION_MARKER):
        return text[:limit]
    return text[: limit - len(TRUNCATION_MARKER)] + TRUNCATION_MARKER


@dataclass
class HttpBackend:
    """Chat-completions over HTTP with exponential backoff on timeouts, 429 and 5xx."""

    base_url: str
    model: str
    max_retries: int = 3
    timeout_ms: int = 60000
    backoff_ms: int = 500
    temperature: float | None = None
    api_key: str | None = None
    client: httpx.Client | None = None
    sleep: object = field(default=time.sleep, repr=False)

    @property
    def backend_id(self) -> str:
        return f"http:{self.model}"

    def _key(self) -> str:
        key = self.api_key if self.api_key is not None else os.environ.get(API_KEY_ENV)
        if not key:
            raise AuthError(f"environment variable {API_KEY_ENV} is not set")
        return key

    def send(self, req: ChatRequest) -> ChatResponse:
        url = self.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": req.system_prompt},
                {"role": "user", "content": req.user_prompt},
            ],
            "temperature": req.temperature if self.temperature is None else self.temperature,
        }
        headers = {"Authorization": f"Bearer {self._key()}"}
        client = self.client or httpx.Client()
        started = time.monotonic()
        last_error = "no attempt made"
        attempts = 0
        try:
            for attempt in range(self.max_retries + 1):
                attempts = attempt + 1
                if attempt:
                    self.sleep(self.backoff_ms * 2 ** (attempt - 1) / 1000)
                try:
                    resp = client.post(url, json=body, headers=headers, timeout=self.timeout_ms / 1000)
                except httpx.TimeoutException as exc:
                    last_error = f"timeout: {exc}"
                    continue
                except httpx.TransportError as exc:
                    last_error = f"transport: {exc}"
                    continue
                if resp.status_code in (401, 403):
                    raise AuthError(f"credential rejected (HTTP {resp.status_code})", attempts)
                if resp.status_code == 429 or resp.status_code >= 500:
                    last_error = f"HTTP {resp.status_code}"
                    log.debug("transient failure on attempt %d: %s", attempts, last_error)
                    continue
                if resp.status_code >= 400:
                    raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}", attempts)
                try:
                    text = resp.json()["choices"][0]["message"]["content"]
                except (ValueError, KeyError, IndexError, TypeError) as exc:
                    raise TransportError(f"malformed completion payload: {exc}", attempts) from exc
                latency = int((time.monotonic() - started) * 1000)
                return ChatResponse(text=text or "", backend_id=self.backend_id, latency_ms=latency, attempt_count=attempts)
        finally:
            if self.client is None:
                client.close()
        raise TransportError(f"gave up after {attempts} attempts ({last_error})", attempts)


class Gateway:
    """Shared entry point for every model call.

    Bounds concurrent outbound requests, truncates over-long replies, rejects
    empty or refusal replies, and exposes the redactor used before prediction.
    """

    def __init__(self, backend: ChatBackend, redactor: Redactor | None = None, max_in_flight: int = 4):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self.backend = backend
        self.redactor = redactor or Redactor()
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self.history: list[tuple[ChatRequest, ChatResponse]] = []
        self._history_lock = threading.Lock()
        self.record_history = False

    def complete(self, req: ChatRequest) -> ChatResponse:
        with self._slots:
            resp = self.backend.send(req)
        if not resp.text.strip() or _REFUSAL_RE.match(resp.text):
            raise BackendRefusal(f"backend {resp.backend_id} returned an empty or refusal reply", resp.attempt_count)
        if len(resp.text) > req.max_output_chars:
            resp = ChatResponse(
                text=truncate(resp.text, req.max_output_chars),
                backend_id=resp.backend_id,
                latency_ms=resp.latency_ms,
                attempt_count=resp.attempt_count,
            )
        if self.record_history:
            with self._history_lock:
                self.history.append((req, resp))
        return resp

    def redact(self, text: str) -> RedactionReport:
        return self.redactor.redact(text)
