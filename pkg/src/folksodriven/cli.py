"""Command-line entry point for the knowledge-base service."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import EngineError
from .service import load_config, serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folksodriven",
        description="Serve the Folksodriven knowledge-base workbench API.")
    parser.add_argument("--port", type=int, default=None,
                        help="listen port (default 8420)")
    parser.add_argument("--data-dir", type=Path, default=None,
                        help="journal/data directory (default ./data)")
    parser.add_argument("--theta", type=float, default=None,
                        help="FSN link-formation threshold in (0,1]")
    parser.add_argument("--seed-fixture", action="store_true", default=None,
                        help="load the news demo KB on a fresh data dir")
    parser.add_argument("--config", type=Path, default=None,
                        help="key=value config file")
    parser.add_argument("--host", default=None, help="bind address")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cli = {"port": args.port, "data_dir": args.data_dir,
           "theta": args.theta, "seed_fixture": args.seed_fixture,
           "host": args.host}
    try:
        config = load_config(config_file=args.config, cli=cli)
        serve(config)
    except EngineError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
