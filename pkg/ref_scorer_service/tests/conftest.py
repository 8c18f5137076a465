"""Session fixtures: one built model, one live service for all tests."""

from __future__ import annotations

import socket
import threading
import time

import pytest
import requests
import uvicorn

from ref_scorer_service.app import create_app
from ref_scorer_service.hosted import HostedScorer, ServiceConfig
from ref_scorer_service.tinymodel import build_tiny_model


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory) -> str:
    return str(build_tiny_model(tmp_path_factory.mktemp("tiny_model"), seed=0))


@pytest.fixture(scope="session")
def service_config(model_dir) -> ServiceConfig:
    return ServiceConfig(model_dir=model_dir)


@pytest.fixture(scope="session")
def scorer(service_config) -> HostedScorer:
    return HostedScorer(service_config)


@pytest.fixture(scope="session")
def service_url(service_config, scorer):
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    app = create_app(service_config, scorer)
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    deadline = time.time() + 30
    while time.time() < deadline:
        try:
            if requests.get(url + "/v1/health", timeout=2).status_code == 200:
                break
        except requests.ConnectionError:
            time.sleep(0.1)
    else:
        raise RuntimeError("service did not come up within 30 s")
    yield url
    server.should_exit = True
    thread.join(timeout=10)
