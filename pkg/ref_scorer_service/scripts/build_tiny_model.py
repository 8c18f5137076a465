#!/usr/bin/env python3
"""Build the default tiny model directory for the scorer service.

Usage: python3 scripts/build_tiny_model.py --output models/tiny [--seed 0]
"""

from __future__ import annotations

import argparse

from ref_scorer_service.tinymodel import MODEL_NAME, build_tiny_model


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output", required=True, help="directory to write the model into")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    out = build_tiny_model(args.output, seed=args.seed)
    print(f"wrote {MODEL_NAME} (seed {args.seed}) to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
