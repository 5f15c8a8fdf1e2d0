"""Entry point: ``semrel-bridge --config bridge.toml`` or ``python -m semrel_bridge``."""

from __future__ import annotations

import argparse
import os

import uvicorn

from .app import create_app
from .config import BridgeConfig, load_config


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="semrel-bridge", description=__doc__)
    parser.add_argument("--config", help="TOML bridge config; defaults to a 16-dim stub")
    parser.add_argument("--host", help="bind address override")
    parser.add_argument("--port", type=int, help="port override (or SEMREL_BRIDGE_PORT)")
    args = parser.parse_args(argv)

    config = load_config(args.config) if args.config else BridgeConfig()
    host = args.host or config.host
    port = args.port or int(os.environ.get("SEMREL_BRIDGE_PORT", config.port))
    uvicorn.run(create_app(config), host=host, port=port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
