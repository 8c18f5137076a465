"""HTTP front end implementing scorer protocol v1 over a hosted model.

Three routes: GET /v1/health, POST /v1/generate, POST /v1/score. Request
bodies are parsed and validated by hand so every rejection is a 400 with a
{"error": ...} body naming the offending field; booleans are rejected where
integers are required. Responses carry tokens, text, and per-token natural
log-probabilities from the hosted model's conditional distribution.

Requests may omit beam_width or max_len; the service falls back to its
configured defaults. Values beyond the model's position budget are rejected
rather than truncated.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool
from starlette.exceptions import HTTPException as StarletteHTTPException

from .hosted import HostedScorer, ScoredSequence, ServiceConfig


class RequestError(Exception):
    def __init__(self, status: int, message: str) -> None:
        super().__init__(message)
        self.status = status


def _require_str(payload: dict, key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise RequestError(400, f"{key} must be a string")
    return value


def _require_int(payload: dict, key: str, minimum: int, fallback: int) -> int:
    value = payload.get(key, fallback)
    if isinstance(value, bool) or not isinstance(value, int):
        raise RequestError(400, f"{key} must be an integer")
    if value < minimum:
        raise RequestError(400, f"{key} must be >= {minimum}")
    return value


async def _json_object(request: Request) -> dict:
    try:
        payload = await request.json()
    except Exception:
        raise RequestError(400, "malformed JSON body") from None
    if not isinstance(payload, dict):
        raise RequestError(400, "request body must be a JSON object")
    return payload


def _as_payload(result: ScoredSequence) -> dict:
    return {
        "tokens": list(result.tokens),
        "text": result.text,
        "token_logprobs": list(result.token_logprobs),
    }


def create_app(config: ServiceConfig, scorer: HostedScorer | None = None) -> FastAPI:
    scorer = scorer or HostedScorer(config)
    app = FastAPI(title="ref scorer service", docs_url=None, redoc_url=None, openapi_url=None)
    budget = scorer.sequence_budget

    @app.exception_handler(RequestError)
    async def _request_error(request: Request, exc: RequestError) -> JSONResponse:
        return JSONResponse({"error": str(exc)}, status_code=exc.status)

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        message = f"unknown path {request.url.path}" if exc.status_code == 404 else str(exc.detail)
        return JSONResponse({"error": message}, status_code=exc.status_code)

    # no pydantic request models exist, kept as a safety net for the contract
    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse({"error": "invalid request"}, status_code=400)

    @app.get("/v1/health")
    async def health() -> dict:
        return {"status": "ok", "model": scorer.model_id}

    @app.post("/v1/generate")
    async def generate(request: Request) -> dict:
        payload = await _json_object(request)
        input_text = _require_str(payload, "input")
        beam_width = _require_int(payload, "beam_width", 1, config.default_beam_width)
        max_len = _require_int(payload, "max_len", 1, config.default_max_len)
        if scorer.input_token_count(input_text) > budget:
            raise RequestError(400, "input too long for this model")
        if max_len > budget:
            raise RequestError(400, f"max_len must be <= {budget} for this model")
        result = await run_in_threadpool(scorer.generate, input_text, beam_width, max_len)
        return _as_payload(result)

    @app.post("/v1/score")
    async def score(request: Request) -> dict:
        payload = await _json_object(request)
        input_text = _require_str(payload, "input")
        target = payload.get("target")
        if not isinstance(target, list) or not all(isinstance(t, str) for t in target):
            raise RequestError(400, "target must be a list of strings")
        if not target:
            raise RequestError(400, "target must be non-empty")
        if scorer.input_token_count(input_text) > budget:
            raise RequestError(400, "input too long for this model")
        if len(target) > budget:
            raise RequestError(400, "target too long for this model")
        result = await run_in_threadpool(scorer.score, input_text, target)
        return _as_payload(result)

    return app
