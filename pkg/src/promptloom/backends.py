"""Completion backends: a deterministic oracle, a scripted fixture table,
and a client for OpenAI-style text-completion endpoints.

All backends return the continuation only — never the prompt. Empty or
whitespace-only continuations are an error, not a value.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass
from pathlib import Path

import httpx

from .errors import (
    BackendError,
    BackendTimeoutError,
    EmptyCompletionError,
    FixtureMissError,
    HttpError,
    SchemaError,
)
from .prompts import SamplingParams

DEFAULT_API_KEY_ENV = "PROMPTLOOM_API_KEY"
DEFAULT_ENDPOINT_ENV = "PROMPTLOOM_ENDPOINT"

FAILURE_MODES = ("timeout", "malformed_split", "extra_items", "duplicate_items", "overlong")


@dataclass(frozen=True)
class CompletionRequest:
    prompt_text: str
    temperature: float = 0.7
    stop_word: str | None = None
    max_tokens: int = 256

    @staticmethod
    def from_params(prompt_text: str, params: SamplingParams) -> "CompletionRequest":
        return CompletionRequest(
            prompt_text=prompt_text,
            temperature=params.temperature,
            stop_word=params.stop_word,
            max_tokens=params.max_tokens,
        )


@dataclass(frozen=True)
class BackendConfig:
    kind: str  # "oracle" | "scripted" | "http"
    endpoint_url: str = ""
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = 30.0
    fixture_path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("oracle", "scripted", "http"):
            raise SchemaError(f"unknown backend kind {self.kind!r}")
        if self.timeout <= 0:
            raise SchemaError("backend timeout must be > 0")
        if self.kind == "http" and not self.endpoint_url:
            raise SchemaError("http backend requires an endpoint_url")


class CompletionBackend:
    """Interface: complete(request) -> continuation string."""

    def complete(self, req: CompletionRequest) -> str:
        raise NotImplementedError


def _check_continuation(text: str) -> str:
    if not text.strip():
        raise EmptyCompletionError("backend returned an empty continuation")
    return text


_LABEL_LINE = re.compile(r"^([^:\n]{1,60}):(.*)$")

_LEXICON = (
    "amber", "breeze", "cedar", "delta", "ember", "fable", "grove", "harbor",
    "indigo", "juniper", "krill", "lumen", "meadow", "nectar", "onyx", "prism",
    "quartz", "raven", "sable", "tundra", "umber", "violet", "willow", "zephyr",
)


def _blocks(text: str) -> list[list[str]]:
    blocks: list[list[str]] = []
    current: list[str] = []
    for line in text.split("\n"):
        if line.strip() == "":
            if current:
                blocks.append(current)
                current = []
        else:
            current.append(line)
    if current:
        blocks.append(current)
    return blocks


def _block_labels(block: list[str]) -> list[str]:
    labels = []
    for line in block:
        m = _LABEL_LINE.match(line)
        if m:
            labels.append(m.group(1))
    return labels


class OracleBackend(CompletionBackend):
    """Deterministic mock that imitates a model following a one-shot example.

    It reads the label structure of the prompt's last complete block (the
    one-shot exemplar) and continues the final block in the same shape,
    filling values with words picked from a fixed lexicon by hashing the
    prompt. Temperature enters the hash only when positive, so temperature 0
    is maximally stable. If the request carries a stop word, it is appended
    at the very end, as a raw continuation would run into it.
    """

    def complete(self, req: CompletionRequest) -> str:
        blocks = _blocks(req.prompt_text)
        labeled = [b for b in blocks if _block_labels(b)]
        if not labeled:
            text = " " + self._value(req, "", 0) + "."
            return _check_continuation(self._finish(text, req))

        tail = labeled[-1]
        exemplar = labeled[-2] if len(labeled) >= 2 else tail
        exemplar_labels = _block_labels(exemplar)
        tail_labels = _block_labels(tail)

        last_line = req.prompt_text.rsplit("\n", 1)[-1]
        cue = _LABEL_LINE.match(last_line)
        parts: list[str] = []
        if cue and cue.group(2).strip() == "":
            cue_label = cue.group(1)
            parts.append(" " + self._value(req, cue_label, 0))
            if cue_label in exemplar_labels:
                remaining = exemplar_labels[exemplar_labels.index(cue_label) + 1 :]
            else:
                remaining = [l for l in exemplar_labels if l not in tail_labels]
        else:
            remaining = [l for l in exemplar_labels if l not in tail_labels]

        used = {p.strip() for p in parts}
        for i, label in enumerate(remaining):
            value = self._value(req, label, i + 1)
            salt = 0
            while value in used:
                salt += 1
                value = self._value(req, label, i + 1 + 100 * salt)
            used.add(value)
            parts.append(f"\n{label}: {value}")

        if not parts:
            parts.append(" " + self._value(req, "done", 0) + ".")
        text = "".join(parts)
        if len(text) > req.max_tokens * 4:
            text = text[: req.max_tokens * 4]
        return _check_continuation(self._finish(text, req))

    @staticmethod
    def _finish(text: str, req: CompletionRequest) -> str:
        if req.stop_word:
            return text + "\n" + req.stop_word
        return text

    @staticmethod
    def _value(req: CompletionRequest, label: str, index: int) -> str:
        token = f"|t={req.temperature}" if req.temperature > 0 else ""
        seed = f"{req.prompt_text}\x00{label}\x00{index}{token}".encode("utf-8")
        h = hashlib.sha256(seed).digest()
        n = 1 + h[0] % 3
        if h[1] % 7 == 0:
            n += 5  # occasional long value to stress layouts
        words = [
            _LEXICON[int.from_bytes(h[2 + 2 * k : 4 + 2 * k], "big") % len(_LEXICON)]
            for k in range(n)
        ]
        return " ".join(words).capitalize()


class ScriptedBackend(CompletionBackend):
    """Exact-match lookup of the rendered prompt in a fixture table.

    default_completion, when given, answers prompts missing from the table;
    fail_with, when given, raises instead of answering (for failure drills).
    """

    def __init__(
        self,
        fixtures: dict[str, str] | None = None,
        default_completion: str | None = None,
        fail_with: Exception | None = None,
    ):
        self.fixtures = dict(fixtures or {})
        self.default_completion = default_completion
        self.fail_with = fail_with

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        """Load a fixture file: a JSON array of {"prompt", "completion"} pairs."""
        try:
            entries = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"fixture file {path}: malformed JSON: {exc}") from exc
        if not isinstance(entries, list):
            raise SchemaError(f"fixture file {path}: expected a JSON array")
        fixtures = {}
        for entry in entries:
            if (
                not isinstance(entry, dict)
                or not isinstance(entry.get("prompt"), str)
                or not isinstance(entry.get("completion"), str)
            ):
                raise SchemaError(
                    f"fixture file {path}: entries need string 'prompt' and 'completion'"
                )
            fixtures[entry["prompt"]] = entry["completion"]
        return cls(fixtures)

    def complete(self, req: CompletionRequest) -> str:
        if self.fail_with is not None:
            raise self.fail_with
        if req.prompt_text in self.fixtures:
            return _check_continuation(self.fixtures[req.prompt_text])
        if self.default_completion is not None:
            return _check_continuation(self.default_completion)
        raise FixtureMissError(
            f"no scripted completion for prompt starting {req.prompt_text[:60]!r}"
        )


_DISHES = ("Shakshuka", "Huevos Rancheros", "Menemen", "Migas")


def inject_failure(
    mode: str, labels: tuple[str, ...] = ("Dish:", "Description:")
) -> ScriptedBackend:
    """Backend whose completions exhibit one named failure, for diagnostics drills.

    The canned content is shaped for the given attribute labels (defaults
    match the recipe-search fixture).
    """
    if mode not in FAILURE_MODES:
        raise ValueError(f"unknown failure mode {mode!r}; expected one of {FAILURE_MODES}")
    if mode == "timeout":
        return ScriptedBackend(fail_with=BackendTimeoutError("injected timeout"))

    first, rest = labels[0], labels[1:]
    if mode == "extra_items":
        # Four item groups where the mockup expects one: the model kept going.
        lines: list[str] = []
        for g, name in enumerate(_DISHES):
            lines.append(f"{first} {name}")
            for k, label in enumerate(rest):
                lines.append(f"{label} d{g + 1}" + (f".{k + 1}" if len(rest) > 1 else ""))
        completion = "\n".join(lines)
    elif mode == "duplicate_items":
        completion = "\n".join(f"{label} {_DISHES[0]}" for label in labels)
    elif mode == "malformed_split":
        completion = f"{first} {_DISHES[0]}"
    else:  # overlong
        long_value = " ".join(["very"] * 40) + " long"
        lines = [f"{first} {long_value}"]
        for k, label in enumerate(rest):
            lines.append(f"{label} fits {k + 1}")
        completion = "\n".join(lines)
    return ScriptedBackend(default_completion=completion)


class HttpBackend(CompletionBackend):
    """Client for any OpenAI-style completions endpoint.

    Wire shape: POST {"prompt", "temperature", "max_tokens", "stop"} ->
    {"choices": [{"text": ...}]}. The API key comes from an environment
    variable only and is never logged. One retry on connection errors;
    none on timeouts (the deadline is the deadline) or HTTP errors.
    """

    def __init__(
        self,
        endpoint_url: str,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        timeout: float = 30.0,
    ):
        if not endpoint_url:
            raise SchemaError("http backend requires an endpoint url")
        self.endpoint_url = endpoint_url
        self.api_key_env = api_key_env or DEFAULT_API_KEY_ENV
        self.timeout = timeout

    def complete(self, req: CompletionRequest) -> str:
        payload: dict = {
            "prompt": req.prompt_text,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        if req.stop_word is not None:
            payload["stop"] = [req.stop_word]
        headers = {}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        response = None
        for attempt in (1, 2):
            try:
                response = httpx.post(
                    self.endpoint_url, json=payload, headers=headers, timeout=self.timeout
                )
                break
            except httpx.TimeoutException as exc:
                raise BackendTimeoutError(
                    f"no response within {self.timeout}s from {self.endpoint_url}"
                ) from exc
            except httpx.TransportError as exc:
                if attempt == 2:
                    raise BackendError(f"transport error: {exc}") from exc

        if response.status_code >= 400:
            raise HttpError(response.status_code, response.text)
        try:
            body = response.json()
            text = body["choices"][0]["text"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed completions response: {exc}") from exc
        if not isinstance(text, str):
            raise BackendError("completions response text is not a string")
        return _check_continuation(text)


def backend_from_config(config: BackendConfig) -> CompletionBackend:
    if config.kind == "oracle":
        return OracleBackend()
    if config.kind == "scripted":
        if not config.fixture_path:
            raise SchemaError("scripted backend requires a fixture_path")
        return ScriptedBackend.from_file(config.fixture_path)
    endpoint = config.endpoint_url or os.environ.get(DEFAULT_ENDPOINT_ENV, "")
    return HttpBackend(
        endpoint_url=endpoint, api_key_env=config.api_key_env, timeout=config.timeout
    )
