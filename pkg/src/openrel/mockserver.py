"""Deterministic in-process scorer service for protocol-v1 testing.

The model is a pure echo: generation repeats the input's whitespace tokens
(truncated to max_len - 1) and appends the end marker; scoring accepts any
target. Every token log-probability comes from one fixed hash rule over
(input, position, token), so scoring a generation reproduces the generation's
numbers exactly and repeated calls are bit-identical across processes.

Request validation mirrors the protocol: malformed JSON, missing or
mistyped fields (booleans are rejected where integers are required), and
empty targets yield 400 {"error": ...}. fail_next() arms transient failures
for client retry tests.

Run standalone with: python -m openrel.mockserver --port 8123
"""

from __future__ import annotations

import argparse
import json
import threading
import zlib
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .scorer import EOS_TOKEN, detokenize

MODEL_NAME = "mock-echo-v1"


def mock_token_logprob(input_text: str, position: int, token: str) -> float:
    """Fixed deterministic log-probability in [-1.05, -0.05]."""
    digest = zlib.crc32(f"{input_text}\x00{position}\x00{token}".encode("utf-8"))
    return -0.05 - (digest % 1000) / 1000.0


def mock_generate_tokens(input_text: str, max_len: int) -> list[str]:
    return input_text.split()[: max_len - 1] + [EOS_TOKEN]


class _RequestError(Exception):
    def __init__(self, status: int, message: str) -> None:
        super().__init__(message)
        self.status = status


def _require_int(payload: dict, key: str, minimum: int) -> int:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise _RequestError(400, f"{key} must be an integer")
    if value < minimum:
        raise _RequestError(400, f"{key} must be >= {minimum}")
    return value


def _require_str(payload: dict, key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise _RequestError(400, f"{key} must be a string")
    return value


class _Handler(BaseHTTPRequestHandler):
    server: "MockScorerServer"

    def log_message(self, format: str, *args) -> None:
        pass

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _injected_failure(self) -> int | None:
        return self.server.take_injected_failure()

    def do_GET(self) -> None:
        status = self._injected_failure()
        if status is not None:
            self._reply(status, {"error": "injected failure"})
            return
        if self.path != "/v1/health":
            self._reply(404, {"error": f"unknown path {self.path}"})
            return
        self._reply(200, {"status": "ok", "model": MODEL_NAME})

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        try:
            payload = json.loads(body)
        except (ValueError, UnicodeDecodeError):
            raise _RequestError(400, "malformed JSON body") from None
        if not isinstance(payload, dict):
            raise _RequestError(400, "request body must be a JSON object")
        return payload

    def do_POST(self) -> None:
        status = self._injected_failure()
        if status is not None:
            self._reply(status, {"error": "injected failure"})
            return
        try:
            if self.path == "/v1/generate":
                self._reply(200, self._generate(self._read_json()))
            elif self.path == "/v1/score":
                self._reply(200, self._score(self._read_json()))
            else:
                self._reply(404, {"error": f"unknown path {self.path}"})
        except _RequestError as exc:
            self._reply(exc.status, {"error": str(exc)})

    def _generate(self, payload: dict) -> dict:
        input_text = _require_str(payload, "input")
        _require_int(payload, "beam_width", 1)
        max_len = _require_int(payload, "max_len", 1)
        tokens = mock_generate_tokens(input_text, max_len)
        logprobs = [mock_token_logprob(input_text, i, token) for i, token in enumerate(tokens)]
        return {"tokens": tokens, "text": detokenize(tokens), "token_logprobs": logprobs}

    def _score(self, payload: dict) -> dict:
        input_text = _require_str(payload, "input")
        target = payload.get("target")
        if not isinstance(target, list) or not all(isinstance(t, str) for t in target):
            raise _RequestError(400, "target must be a list of strings")
        if not target:
            raise _RequestError(400, "target must be non-empty")
        logprobs = [mock_token_logprob(input_text, i, token) for i, token in enumerate(target)]
        return {"tokens": target, "text": detokenize(target), "token_logprobs": logprobs}


class MockScorerServer:
    """Threaded protocol-v1 echo server bound to localhost.

    Use as a context manager in tests; base_url points at the bound port.
    """

    def __init__(self, host: str = "127.0.0.1", port: int = 0) -> None:
        self._server = ThreadingHTTPServer((host, port), _Handler)
        self._server.take_injected_failure = self.take_injected_failure  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None
        self._lock = threading.Lock()
        self._fail_remaining = 0
        self._fail_status = 503

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def fail_next(self, count: int, status: int = 503) -> None:
        """Make the next count requests fail with the given status."""
        with self._lock:
            self._fail_remaining = count
            self._fail_status = status

    def take_injected_failure(self) -> int | None:
        with self._lock:
            if self._fail_remaining > 0:
                self._fail_remaining -= 1
                return self._fail_status
        return None

    def start(self) -> "MockScorerServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "MockScorerServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Run the protocol-v1 mock scorer service.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8123)
    args = parser.parse_args(argv)
    server = MockScorerServer(host=args.host, port=args.port)
    print(f"mock scorer service listening on {server.base_url}", flush=True)
    try:
        server._server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server._server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
