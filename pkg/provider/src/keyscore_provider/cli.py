"""Provider CLI: serve the HTTP service or build a cache file."""

from __future__ import annotations

import argparse
import sys

from .cache import build_cache
from .encoders import DEFAULT_MODEL_ID


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="keyscore-provider",
                                     description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the embedding HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8731)
    p.add_argument("--model-id", default=DEFAULT_MODEL_ID,
                   help="default model reported by /health")
    p.add_argument("--max-batch", type=int, default=256)

    p = sub.add_parser("build-cache", help="embed a phrases file into a cache")
    p.add_argument("--phrases", required=True, help="one phrase per line")
    p.add_argument("--model-id", default=DEFAULT_MODEL_ID)
    p.add_argument("--out", required=True, help="cache JSONL output path")

    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .app import create_app

        app = create_app(default_model=args.model_id, max_batch=args.max_batch)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
        return 0

    try:
        n = build_cache(args.phrases, args.model_id, args.out)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {n} entries to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
