"""Command-line entry point.

    crowdbench-client [--policy goal_greedy|adapter] [--transport stdio|tcp]
                      [--host H --port P] [--name NAME]
                      [--read-timeout SECONDS] [--crash-after N]

stdio is the default transport (the benchmark server spawns this process);
tcp connects out to a listening server instead.
"""

from __future__ import annotations

import argparse
import sys

from .client import DEFAULT_READ_TIMEOUT, StdioLines, TcpLines, run_client
from .policies import POLICIES


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="crowdbench-client")
    parser.add_argument("--policy", choices=sorted(POLICIES), default="goal_greedy")
    parser.add_argument("--transport", choices=["stdio", "tcp"], default="stdio")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=None)
    parser.add_argument("--name", default=None)
    parser.add_argument("--read-timeout", type=float, default=DEFAULT_READ_TIMEOUT)
    parser.add_argument("--crash-after", type=int, default=None,
                        help="exit abruptly before answering observation N+1 "
                             "(fault injection for failure-path tests)")
    args = parser.parse_args(argv)

    if args.transport == "tcp":
        if args.port is None:
            parser.error("--port is required with --transport tcp")
        transport = TcpLines(args.host, args.port)
    else:
        transport = StdioLines()

    return run_client(POLICIES[args.policy], transport,
                      name=args.name or f"crowdbench-client/{args.policy}",
                      read_timeout=args.read_timeout,
                      crash_after=args.crash_after)


if __name__ == "__main__":
    sys.exit(main())
