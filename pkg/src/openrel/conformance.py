"""Protocol-v1 conformance suite, shared by the mock server tests and any
real service implementation.

run_conformance drives one live service through schema-level cases: response
shapes, determinism of generation, and the 400 {"error": ...} contract for
malformed requests. The cases depend only on the wire protocol, never on a
particular model's outputs, so the same suite must pass against the in-repo
mock and against a hosted model service.

run_greedy_selfconsistency checks the scoring path against the generation
path: for each fixture input, the total log-probability reported by /v1/score
for the greedy generation's own tokens must match /v1/generate.
"""

from __future__ import annotations

from dataclasses import dataclass

import requests

from .scorer import GenerationParams
from .scorer_client import RemoteScorer, RemoteScorerConfig

FIXTURE_INPUTS: tuple[str, ...] = (
    "Haste; Germany",
    "Romeries; country: France",
    "Romeries; located in the administrative territorial entity: Nord; country: France",
    "evaluation; unknown: algorithm",
    "Haste; located in the administrative territorial entity: Schaumburg; country: Germany",
    "deep learning; subclass of: machine learning",
    "Walton East; parish",
    "alpha; beta",
    "alpha; relation one: beta",
    "alpha; unknown: gamma",
    "solar system; part of: Milky Way",
    "Paris; capital of: France",
    "oxygen; unknown: water",
    "novel; author: writer",
    "river; flows into: sea",
    "algebra; branch of: mathematics",
    "engine; part of: car; manufactured by: factory",
    "star; orbited by: planet; home of: life",
    "semantics; field of: linguistics",
    "bridge; crosses: river",
)


@dataclass(frozen=True)
class CaseResult:
    name: str
    passed: bool
    detail: str = ""


def _shape_ok(payload: dict, max_len: int | None = None) -> str:
    if not isinstance(payload, dict):
        return "not a JSON object"
    tokens = payload.get("tokens")
    if not isinstance(tokens, list) or not tokens or not all(isinstance(t, str) for t in tokens):
        return "tokens must be a non-empty list of strings"
    if max_len is not None and len(tokens) > max_len:
        return f"{len(tokens)} tokens exceed max_len {max_len}"
    if not isinstance(payload.get("text"), str):
        return "text must be a string"
    logprobs = payload.get("token_logprobs")
    if not isinstance(logprobs, list) or len(logprobs) != len(tokens):
        return "token_logprobs must match tokens in length"
    for lp in logprobs:
        if isinstance(lp, bool) or not isinstance(lp, (int, float)) or not lp <= 0.0:
            return f"token_logprobs must be finite non-positive numbers, got {lp!r}"
    return ""


def _error_shape_ok(response: requests.Response) -> str:
    if response.status_code != 400:
        return f"expected status 400, got {response.status_code}"
    try:
        payload = response.json()
    except ValueError:
        return "error body is not JSON"
    if not isinstance(payload, dict) or not isinstance(payload.get("error"), str) or not payload["error"]:
        return 'error body must be {"error": <non-empty string>}'
    return ""


def run_conformance(base_url: str, timeout: float = 30.0) -> list[CaseResult]:
    """Schema-level protocol cases against a live service; one result per case."""
    base = base_url.rstrip("/")
    client = RemoteScorer(RemoteScorerConfig(base_url=base, timeout=timeout, max_retries=0))
    results: list[CaseResult] = []

    def case(name: str, run) -> None:
        try:
            detail = run() or ""
        except Exception as exc:
            results.append(CaseResult(name, False, f"{type(exc).__name__}: {exc}"))
            return
        results.append(CaseResult(name, not detail, detail))

    def raw_post(path: str, body: object, json_body: bool = True) -> requests.Response:
        if json_body:
            return requests.post(base + path, json=body, timeout=timeout)
        return requests.post(
            base + path,
            data=body,
            headers={"Content-Type": "application/json"},
            timeout=timeout,
        )

    def health_case() -> str:
        model = client.health()
        return "" if model else "empty model identifier"

    def generate_shape(beam_width: int) -> str:
        response = raw_post(
            "/v1/generate",
            {"input": FIXTURE_INPUTS[0], "beam_width": beam_width, "max_len": 8},
        )
        if response.status_code != 200:
            return f"status {response.status_code}"
        return _shape_ok(response.json(), max_len=8)

    def generate_deterministic() -> str:
        body = {"input": FIXTURE_INPUTS[1], "beam_width": 1, "max_len": 8}
        first = raw_post("/v1/generate", body)
        second = raw_post("/v1/generate", body)
        if first.status_code != 200 or second.status_code != 200:
            return f"statuses {first.status_code}/{second.status_code}"
        if first.json() != second.json():
            return "two identical generate calls returned different payloads"
        return ""

    def score_shape() -> str:
        target = ["alpha", "beta"]
        response = raw_post("/v1/score", {"input": FIXTURE_INPUTS[7], "target": target})
        if response.status_code != 200:
            return f"status {response.status_code}"
        payload = response.json()
        detail = _shape_ok(payload)
        if detail:
            return detail
        if payload["tokens"] != target:
            return "tokens must echo the scored target"
        return ""

    case("health_shape", health_case)
    case("generate_shape_greedy", lambda: generate_shape(1))
    case("generate_shape_beam", lambda: generate_shape(4))
    case("generate_deterministic", generate_deterministic)
    case("score_shape", score_shape)
    case(
        "score_empty_target_400",
        lambda: _error_shape_ok(raw_post("/v1/score", {"input": "a; b", "target": []})),
    )
    case(
        "generate_missing_input_400",
        lambda: _error_shape_ok(raw_post("/v1/generate", {"beam_width": 1, "max_len": 8})),
    )
    case(
        "generate_bool_beam_width_400",
        lambda: _error_shape_ok(
            raw_post("/v1/generate", {"input": "a; b", "beam_width": True, "max_len": 8})
        ),
    )
    case(
        "score_missing_target_400",
        lambda: _error_shape_ok(raw_post("/v1/score", {"input": "a; b"})),
    )
    case(
        "malformed_json_400",
        lambda: _error_shape_ok(raw_post("/v1/generate", b'{"input": ', json_body=False)),
    )
    return results


def run_greedy_selfconsistency(
    base_url: str,
    inputs: tuple[str, ...] = FIXTURE_INPUTS,
    timeout: float = 30.0,
    max_len: int = 32,
) -> list[tuple[str, float]]:
    """Per input: |score(input, generate(input).tokens) - generate| on totals."""
    client = RemoteScorer(RemoteScorerConfig(base_url=base_url, timeout=timeout, max_retries=0))
    params = GenerationParams(beam_width=1, max_len=max_len)
    diffs: list[tuple[str, float]] = []
    for text in inputs:
        generated = client.generate(text, params)
        scored = client.score(text, generated.tokens)
        diffs.append((text, abs(scored.total_logprob - generated.total_logprob)))
    return diffs
