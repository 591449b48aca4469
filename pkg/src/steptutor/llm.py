"""Chat-completion client that turns rendered prompts into hint text.

The client wraps a pluggable backend: an HTTP backend speaking the
chat-completions JSON wire format (any compatible server works; the base
URL is configurable), or a deterministic offline mock used by every test.
The client layer adds retry with jittered exponential backoff for
transient failures and caps the number of in-flight requests.

Environment variables: STAP_API_KEY (credential), STAP_API_BASE (endpoint
URL), STAP_MODEL (model id override). The credential is never logged and
never appears in error messages.
"""

from __future__ import annotations

import hashlib
import os
import random
import threading
import time
from dataclasses import dataclass
from typing import Callable, Protocol

__all__ = [
    "LlmError",
    "CredentialError",
    "TransientError",
    "TransportError",
    "EmptyResponseError",
    "CompletionRequest",
    "CompletionResponse",
    "MockBackend",
    "HttpBackend",
    "LlmClient",
    "make_mock",
    "default_model_id",
]

DEFAULT_MODEL = "gpt-3.5-turbo"
DEFAULT_BASE_URL = "https://api.openai.com/v1"


class LlmError(Exception):
    pass


class CredentialError(LlmError):
    """Missing or rejected API credential; never retried."""


class TransientError(LlmError):
    """A single retryable failure: HTTP 429/5xx or a network timeout."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class TransportError(LlmError):
    """Retries exhausted or a non-retryable transport failure."""


class EmptyResponseError(LlmError):
    """The model returned an empty completion."""


@dataclass(frozen=True)
class CompletionRequest:
    prompt_text: str
    temperature: float = 0.5
    model_id: str = DEFAULT_MODEL
    max_tokens: int = 256
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if not self.prompt_text:
            raise ValueError("prompt_text must be non-empty")
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    model_id: str
    latency_ms: int
    usage: dict | None = None


class Backend(Protocol):
    def send(self, request: CompletionRequest) -> CompletionResponse: ...


# --------------------------------------------------------------------------
# Deterministic mock backend
# --------------------------------------------------------------------------

_MOCK_OPENERS = (
    "Look closely at what your program does with the input so far.",
    "Think about the next piece of the output you still need to produce.",
    "Consider walking through your code with the example from the description.",
    "Check whether every value from the input is actually read somewhere.",
    "Focus on one small change before running your program again.",
    "Compare what your program prints with what the description asks for.",
    "Try describing in words what the next line of code should do.",
    "Re-read the output requirements before adding more code.",
)

_MOCK_FOLLOWUPS = (
    "A short trial run on paper can confirm it (case {tag}).",
    "Keep the change small and test it right away (case {tag}).",
    "Write down the expected result first, then adjust (case {tag}).",
    "One condition is probably all you need here (case {tag}).",
    "The example input is a good place to verify this (case {tag}).",
    "Start from the simplest input you can think of (case {tag}).",
)


class MockBackend:
    """Offline backend mapping (prompt_text, temperature) to a fixed hint.

    The same request always yields the same one-or-two-sentence text, and
    distinct prompts yield distinct texts because a digest fragment of the
    request is embedded. max_tokens is honored by truncating at a sentence
    boundary (tokens approximated as whitespace-separated words).
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def send(self, request: CompletionRequest) -> CompletionResponse:
        key = f"{self.seed}:{request.temperature}:{request.prompt_text}"
        digest = hashlib.sha256(key.encode("utf-8")).digest()
        tag = digest.hex()[:10]
        first = _MOCK_OPENERS[digest[0] % len(_MOCK_OPENERS)]
        second = _MOCK_FOLLOWUPS[digest[1] % len(_MOCK_FOLLOWUPS)].format(tag=tag)
        text = f"{first} {second}"
        if len(text.split()) > request.max_tokens:
            text = first
        return CompletionResponse(
            text=text.strip(),
            model_id=f"mock-{self.seed}",
            latency_ms=0,
        )


def make_mock(seed: int = 0) -> MockBackend:
    return MockBackend(seed=seed)


# --------------------------------------------------------------------------
# HTTP backend (chat-completions JSON)
# --------------------------------------------------------------------------

class HttpBackend:
    """One-shot chat-completion call; retry policy lives in LlmClient."""

    def __init__(self, base_url: str = DEFAULT_BASE_URL, api_key: str | None = None):
        self.base_url = base_url.rstrip("/")
        self._api_key = api_key

    def __repr__(self) -> str:
        return f"HttpBackend(base_url={self.base_url!r}, api_key=***)"

    def send(self, request: CompletionRequest) -> CompletionResponse:
        if not self._api_key:
            raise CredentialError(
                "no API credential configured (set STAP_API_KEY)"
            )
        import requests

        payload = {
            "model": request.model_id,
            "messages": [{"role": "user", "content": request.prompt_text}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        started = time.monotonic()
        try:
            response = requests.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {self._api_key}"},
                timeout=request.timeout,
            )
        except requests.exceptions.RequestException as exc:
            raise TransientError(f"request failed: {type(exc).__name__}") from exc
        latency_ms = int((time.monotonic() - started) * 1000)

        if response.status_code in (401, 403):
            raise CredentialError(f"credential rejected (HTTP {response.status_code})")
        if response.status_code == 429 or response.status_code >= 500:
            raise TransientError(
                f"HTTP {response.status_code}", status=response.status_code
            )
        if response.status_code != 200:
            raise TransportError(f"HTTP {response.status_code}: {response.text[:200]}")

        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion response: {exc}") from exc
        text = (text or "").strip()
        if not text:
            raise EmptyResponseError("model returned an empty completion")
        return CompletionResponse(
            text=text,
            model_id=body.get("model", request.model_id),
            latency_ms=latency_ms,
            usage=body.get("usage"),
        )


# --------------------------------------------------------------------------
# Client with retry and in-flight cap
# --------------------------------------------------------------------------

class LlmClient:
    """Shareable client: rate-limits concurrent calls and retries transient
    failures up to `max_retries` times with jittered exponential backoff."""

    def __init__(
        self,
        backend: Backend,
        max_in_flight: int = 4,
        max_retries: int = 3,
        backoff_base: float = 1.0,
        sleeper: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.backend = backend
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._sleep = sleeper
        self._rng = rng or random.Random()
        self._slots = threading.BoundedSemaphore(max_in_flight)

    @classmethod
    def from_env(cls, env: dict | None = None, mock_seed: int | None = None) -> "LlmClient":
        """Mock client when mock_seed is given, else HTTP client from STAP_* vars."""
        env = os.environ if env is None else env
        if mock_seed is not None:
            return cls(MockBackend(seed=mock_seed))
        backend = HttpBackend(
            base_url=env.get("STAP_API_BASE", DEFAULT_BASE_URL),
            api_key=env.get("STAP_API_KEY"),
        )
        return cls(backend)

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        with self._slots:
            attempt = 0
            while True:
                try:
                    response = self.backend.send(request)
                except TransientError as exc:
                    if attempt >= self.max_retries:
                        raise TransportError(
                            f"giving up after {attempt + 1} attempts: {exc}"
                        ) from exc
                    delay = self.backoff_base * (2**attempt)
                    delay += self._rng.uniform(0, delay / 4)
                    self._sleep(delay)
                    attempt += 1
                    continue
                if not response.text:
                    raise EmptyResponseError("model returned an empty completion")
                return response


def default_model_id(env: dict | None = None) -> str:
    env = os.environ if env is None else env
    return env.get("STAP_MODEL", DEFAULT_MODEL)
