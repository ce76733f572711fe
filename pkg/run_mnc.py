#!/usr/bin/env python3
"""Entry point: compile, run, inspect and verify modular neural computer programs."""

import logging
import sys

from src.config import LOG_LEVEL

logging.basicConfig(
    level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    handlers=[logging.StreamHandler(sys.stderr)],
)


def main() -> int:
    from src.cli import main as cli_main

    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
