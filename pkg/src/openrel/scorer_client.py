"""HTTP client for remote scorer services speaking protocol v1.

Presents the same backend contract as the local statistical model. Every
response is validated against the generation-result invariants before it is
returned, so invariant-violating payloads never propagate downstream.
Timeouts, connection failures, and 5xx responses are retried up to
max_retries times; 4xx responses are not retried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import requests

from .scorer import GenerationParams, GenerationResult, _input_text

DEFAULT_TIMEOUT = 30.0
DEFAULT_MAX_RETRIES = 2


class RemoteScorerError(Exception):
    """Base error for remote scorer calls."""


class TransportError(RemoteScorerError):
    """Network failure or persistent server error after retries."""


class ProtocolError(RemoteScorerError):
    """Response violates the protocol-v1 shape or a result invariant."""


@dataclass(frozen=True)
class RemoteScorerConfig:
    base_url: str
    timeout: float = DEFAULT_TIMEOUT
    max_retries: int = DEFAULT_MAX_RETRIES
    auth_token: str | None = None

    def __post_init__(self) -> None:
        if not self.base_url:
            raise ValueError("base_url must be non-empty")
        if self.timeout <= 0:
            raise ValueError(f"timeout must be > 0, got {self.timeout}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")


def _validate_payload(payload) -> GenerationResult:
    if not isinstance(payload, dict):
        raise ProtocolError("response: not a JSON object")
    for key in ("tokens", "text", "token_logprobs"):
        if key not in payload:
            raise ProtocolError(f"{key}: missing")
    tokens = payload["tokens"]
    text = payload["text"]
    logprobs = payload["token_logprobs"]
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise ProtocolError("tokens: must be a list of strings")
    if not tokens:
        raise ProtocolError("tokens: empty")
    if not isinstance(text, str):
        raise ProtocolError("text: must be a string")
    if not isinstance(logprobs, list):
        raise ProtocolError("token_logprobs: must be a list")
    if len(logprobs) != len(tokens):
        raise ProtocolError(
            f"token_logprobs: length {len(logprobs)} does not match {len(tokens)} tokens"
        )
    values: list[float] = []
    for i, lp in enumerate(logprobs):
        if isinstance(lp, bool) or not isinstance(lp, (int, float)):
            raise ProtocolError(f"token_logprobs[{i}]: not a number")
        value = float(lp)
        if not math.isfinite(value):
            raise ProtocolError(f"token_logprobs[{i}]: not finite")
        if value > 0.0:
            raise ProtocolError(f"token_logprobs[{i}]: positive log-probability {value}")
        values.append(value)
    return GenerationResult(tokens=tuple(tokens), text=text, token_logprobs=tuple(values))


class RemoteScorer:
    """Scorer backend over HTTP. last_retry_count reports the latest call's retries."""

    def __init__(self, config: RemoteScorerConfig) -> None:
        self.config = config
        self.last_retry_count = 0

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_token:
            headers["Authorization"] = f"Bearer {self.config.auth_token}"
        return headers

    def _request(self, method: str, path: str, payload: dict | None) -> object:
        url = self.config.base_url.rstrip("/") + path
        retries = 0
        while True:
            try:
                response = requests.request(
                    method,
                    url,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.config.timeout,
                )
            except (requests.Timeout, requests.ConnectionError) as exc:
                if retries >= self.config.max_retries:
                    self.last_retry_count = retries
                    raise TransportError(f"{url}: {exc} after {retries} retries") from exc
                retries += 1
                continue
            except requests.RequestException as exc:
                self.last_retry_count = retries
                raise TransportError(f"{url}: {exc}") from exc
            if response.status_code >= 500:
                if retries >= self.config.max_retries:
                    self.last_retry_count = retries
                    raise TransportError(
                        f"{url}: server error {response.status_code} after {retries} retries"
                    )
                retries += 1
                continue
            break
        self.last_retry_count = retries
        if response.status_code >= 400:
            try:
                message = response.json().get("error", "")
            except ValueError:
                message = response.text[:200]
            raise RemoteScorerError(f"{url}: rejected ({response.status_code}): {message}")
        try:
            return response.json()
        except ValueError:
            raise ProtocolError("response: invalid JSON") from None

    def health(self) -> str:
        """Model identifier from /v1/health; shape-validated."""
        payload = self._request("GET", "/v1/health", None)
        if not isinstance(payload, dict):
            raise ProtocolError("response: not a JSON object")
        if payload.get("status") != "ok":
            raise ProtocolError(f"status: expected \"ok\", got {payload.get('status')!r}")
        model = payload.get("model")
        if not isinstance(model, str) or not model:
            raise ProtocolError("model: must be a non-empty string")
        return model

    def generate(self, encoded, params: GenerationParams | None = None) -> GenerationResult:
        params = params or GenerationParams()
        payload = self._request(
            "POST",
            "/v1/generate",
            {
                "input": _input_text(encoded),
                "beam_width": params.beam_width,
                "max_len": params.max_len,
            },
        )
        return _validate_payload(payload)

    def score(self, encoded, target: Sequence[str]) -> GenerationResult:
        target = list(target)
        if not target:
            raise ValueError("empty target")
        if not all(isinstance(t, str) for t in target):
            raise ValueError("target must be a list of strings")
        payload = self._request(
            "POST", "/v1/score", {"input": _input_text(encoded), "target": target}
        )
        result = _validate_payload(payload)
        if result.tokens != tuple(target):
            raise ProtocolError("tokens: do not echo the scored target")
        return result


def remote_generate(
    config: RemoteScorerConfig, encoded, params: GenerationParams | None = None
) -> GenerationResult:
    return RemoteScorer(config).generate(encoded, params)


def remote_score(config: RemoteScorerConfig, encoded, target: Sequence[str]) -> GenerationResult:
    return RemoteScorer(config).score(encoded, target)
