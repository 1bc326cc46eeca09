"""Client for fetching candidate sentences from a text-generation HTTP API.

One generic JSON-over-HTTP adapter covers any vendor: the prompt template,
endpoint and the dotted path to the text field in the response are all
configuration. Generated sentences are only machine-checked for inventory
membership; judging coherence and appropriateness stays with a human, which
is why rejects are surfaced instead of discarded.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import requests

from .rechain import SentencePlan, WordInventory, batch_plans

API_KEY_ENV = "CORPUSFORGE_LLM_KEY"

# One initial attempt plus bounded retries; delays double from 1s.
MAX_ATTEMPTS = 3
BACKOFF_BASE_S = 1.0


class LlmClientError(Exception):
    """Base class for generation-client failures (CLI exit code 3)."""


class LlmConfigError(LlmClientError):
    """Bad client configuration (missing key, malformed template...)."""


class LlmServiceError(LlmClientError):
    """The service failed: network errors after retries, or an HTTP error."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class LlmResponseError(LlmClientError):
    """The service answered, but not in the configured shape."""


class LlmEmptyResultError(LlmClientError):
    """The service answered with zero usable sentence lines."""


@dataclass(frozen=True)
class GenerationRequest:
    """Everything needed for one generation call."""

    inventory_words: tuple[str, ...]
    sentence_count: int
    prompt_template: str
    endpoint_url: str
    model_name: str
    response_text_path: str = "text"
    timeout_s: float = 30.0

    def __post_init__(self):
        if self.sentence_count < 1:
            raise LlmConfigError(
                f"sentence_count must be >= 1, got {self.sentence_count}"
            )
        for placeholder in ("{words}", "{count}"):
            if placeholder not in self.prompt_template:
                raise LlmConfigError(
                    f"prompt template is missing the {placeholder} placeholder"
                )

    @property
    def prompt(self) -> str:
        return self.prompt_template.format(
            words=", ".join(self.inventory_words), count=self.sentence_count
        )


@dataclass(frozen=True)
class GenerationResult:
    raw_text: str
    sentences: tuple[str, ...]


def load_client_config(path: str | Path) -> dict:
    """Read the adapter config JSON (endpoint, model, template, text path)."""
    try:
        with open(path, encoding="utf-8") as f:
            config = json.load(f)
    except json.JSONDecodeError as exc:
        raise LlmConfigError(f"{path}: invalid JSON: {exc}") from None
    for key in ("endpoint_url", "model_name", "prompt_template"):
        if not config.get(key):
            raise LlmConfigError(f"{path}: missing {key!r}")
    return config


def _extract_text(payload, path: str) -> str:
    """Walk a dotted path like 'choices.0.text' through parsed JSON."""
    node = payload
    for part in path.split("."):
        try:
            node = node[int(part)] if part.lstrip("-").isdigit() else node[part]
        except (KeyError, IndexError, TypeError):
            raise LlmResponseError(
                f"response has no field at path {path!r} (failed at {part!r})"
            ) from None
    if not isinstance(node, str):
        raise LlmResponseError(f"field at {path!r} is not text")
    return node


def generate_sentences(
    request: GenerationRequest,
    sleep: Callable[[float], None] = time.sleep,
) -> GenerationResult:
    """POST the prompt and split the response text into sentence lines.

    Network failures and 5xx responses are retried with exponential backoff
    (1s, 2s) up to 3 attempts total, with the identical request body each
    time; other non-2xx responses fail immediately with a body excerpt.
    `sleep` is injectable so tests can assert the schedule without waiting.
    """
    api_key = os.environ.get(API_KEY_ENV)
    if not api_key:
        raise LlmConfigError(f"API key missing: set {API_KEY_ENV}")
    body = {"model": request.model_name, "prompt": request.prompt}
    headers = {"Authorization": f"Bearer {api_key}"}

    last_failure = ""
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            response = requests.post(
                request.endpoint_url,
                json=body,
                headers=headers,
                timeout=request.timeout_s,
            )
        except requests.RequestException as exc:
            last_failure = f"network error: {exc}"
        else:
            if 200 <= response.status_code < 300:
                return _parse_response(response, request)
            excerpt = response.text[:200]
            if response.status_code < 500:
                raise LlmServiceError(
                    f"HTTP {response.status_code}: {excerpt}", attempts=attempt
                )
            last_failure = f"HTTP {response.status_code}: {excerpt}"
        if attempt < MAX_ATTEMPTS:
            sleep(BACKOFF_BASE_S * 2 ** (attempt - 1))
    raise LlmServiceError(
        f"giving up after {MAX_ATTEMPTS} attempts; last failure: {last_failure}",
        attempts=MAX_ATTEMPTS,
    )


def _parse_response(response, request: GenerationRequest) -> GenerationResult:
    try:
        payload = response.json()
    except ValueError as exc:
        raise LlmResponseError(f"response is not JSON: {exc}") from exc
    raw_text = _extract_text(payload, request.response_text_path)
    sentences = tuple(line.strip() for line in raw_text.splitlines() if line.strip())
    if not sentences:
        raise LlmEmptyResultError("service returned no usable sentence lines")
    return GenerationResult(raw_text=raw_text, sentences=sentences)


def generate_validated_plans(
    request: GenerationRequest,
    inventory: WordInventory,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[list[SentencePlan], list[tuple[str, list[str]]]]:
    """Fetch sentences and keep only those fully covered by the inventory.

    Returns (accepted plans, rejected sentences with their missing words).
    The rejected list is the human-review channel; nothing here scores
    coherence. Accepted plans are re-verified against the inventory as a
    final guard.
    """
    result = generate_sentences(request, sleep=sleep)
    accepted, rejected = batch_plans(result.sentences, inventory, provenance="llm")
    for plan in accepted:
        stray = [w for w, _ in plan.words if w not in inventory]
        if stray:
            raise RuntimeError(
                f"plan escaped the inventory filter with {stray!r}"
            )
    return accepted, rejected
