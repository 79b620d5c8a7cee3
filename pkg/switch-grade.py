"""
switchgrade command-line entry point.

Configuration via .env files and environment variables only; see cli.py for
the subcommands (compute-lambda, verify-paper, ball, trajectory).
"""

import sys

from switchgrade.cli import main

if __name__ == '__main__':
    sys.exit(main())
