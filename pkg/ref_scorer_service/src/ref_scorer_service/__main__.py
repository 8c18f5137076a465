"""Command line entry point: load the model, then serve protocol v1."""

from __future__ import annotations

import argparse
import sys

import uvicorn

from .app import create_app
from .hosted import HostedScorer, ServiceConfig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ref-scorer-service",
        description="Serve generate/score/health over a saved seq2seq model.",
    )
    parser.add_argument("--model-dir", required=True, help="directory written by build_tiny_model")
    parser.add_argument("--model-id", default="", help="override the stored model identifier")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8124)
    parser.add_argument(
        "--beam-width", type=int, default=1, help="default when requests omit beam_width"
    )
    parser.add_argument("--max-len", type=int, default=32, help="default when requests omit max_len")
    args = parser.parse_args(argv)
    config = ServiceConfig(
        model_dir=args.model_dir,
        model_id=args.model_id,
        device=args.device,
        default_beam_width=args.beam_width,
        default_max_len=args.max_len,
        host=args.host,
        port=args.port,
    )
    try:
        scorer = HostedScorer(config)  # abort before binding when the model cannot load
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    app = create_app(config, scorer)
    print(
        f"scorer service {scorer.model_id} listening on http://{config.host}:{config.port}",
        flush=True,
    )
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
