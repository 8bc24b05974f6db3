"""Command line entry point: ``supersat <subcommand> [flags]``.

Each subcommand runs the matching tool. Exit codes: 0 success or pass,
1 audit failure or aborted pipeline, 2 usage, guard or input error.
"""

import argparse
import sys
from typing import Optional, Sequence

from shared.utils import configure_logging, silence_warnings_and_logs

silence_warnings_and_logs()

from dotenv import load_dotenv  # noqa: E402 - must import after warning suppression

from shared.config import load_config  # noqa: E402 - must import after warning suppression
from supersat_agent.tools import TOOLS_BY_SUBCOMMAND  # noqa: E402 - must import after warning suppression

PATTERN_HELP = "pattern as theta:a,b or complete:a1,...,ar"


def _add_guards(parser: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int, help="size guard (default from environment)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supersat", description="Balanced supersaturation and graph container toolkit.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr (repeat for debug)")
    parser.add_argument("--from-config", metavar="PATH", help="re-run from the config echoed in an earlier output")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    enum = sub.add_parser("enum", help="list copies of a pattern in a graph")
    enum.add_argument("--pattern", required=True, help=PATTERN_HELP)
    enum.add_argument("--graph", required=True, help="graph JSON file")
    enum.add_argument("--count-only", action="store_true", help="print only the count")
    enum.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    enum.add_argument("--workers", type=int)
    _add_guards(enum, "oracle_max_vertices")

    build = sub.add_parser("build", help="greedily build a balanced family")
    build.add_argument("--pattern", required=True, help=PATTERN_HELP)
    build.add_argument("--graph", required=True, help="graph JSON file")
    build.add_argument("--delta", type=float)
    build.add_argument("--k", type=float, help="density override")
    build.add_argument("--target", type=int)
    build.add_argument("--shuffle", type=int, metavar="SEED")
    build.add_argument("--workers", type=int)

    audit = sub.add_parser("audit", help="re-check a family document")
    audit.add_argument("--family", required=True, help="family JSON file")
    audit.add_argument("--alpha", type=float)
    audit.add_argument("--c-bound", dest="c_bound", type=float)
    audit.add_argument("--format", dest="fmt", choices=["json", "csv"])

    containers = sub.add_parser("containers", help="run one container step on a family")
    containers.add_argument("--family", required=True, help="family JSON file")
    containers.add_argument("--eps", type=float, required=True)
    containers.add_argument("--graph", help="graph JSON file (checked against the family)")
    containers.add_argument("--pattern", help=PATTERN_HELP)
    containers.add_argument("--tau", type=float)
    containers.add_argument("--alpha", type=float)
    containers.add_argument("--k", type=float)
    containers.add_argument("--no-verify", dest="verify", action="store_false", default=None)
    _add_guards(containers, "container_max_edges")

    count = sub.add_parser("count", help="bound the number of pattern-free graphs")
    count.add_argument("--pattern", required=True, help=PATTERN_HELP)
    count.add_argument("--n", type=int, required=True)
    count.add_argument("--eps", type=float, required=True)
    count.add_argument("--k0", type=float, required=True)
    count.add_argument("--delta", type=float)
    count.add_argument("--family-k", dest="family_k", type=float)
    count.add_argument("--tau", type=float)
    count.add_argument("--alpha", type=float)
    count.add_argument("--target", type=int)
    count.add_argument("--oracle", action="store_true", help="compare with exact counts")
    count.add_argument("--format", dest="fmt", choices=["json", "csv"])
    _add_guards(count, "free_count_max_edges")

    oracle = sub.add_parser("oracle", help="exact number of pattern-free graphs")
    oracle.add_argument("--pattern", required=True, help=PATTERN_HELP)
    oracle.add_argument("--n", type=int, required=True)
    oracle.add_argument("--max-edges", dest="max_edges", type=int)
    _add_guards(oracle, "free_count_max_edges")

    trend = sub.add_parser("trend", help="copy counts against the supersaturation benchmark")
    trend.add_argument("--pattern", required=True, help=PATTERN_HELP)
    trend.add_argument("--sizes", required=True, help="LOW..HIGH or a comma list")
    trend.add_argument("--hosts", choices=["complete", "random"])
    trend.add_argument("--density", type=float)
    trend.add_argument("--threshold-c", dest="threshold_c", type=float)
    trend.add_argument("--seed", type=int)
    trend.add_argument("--format", dest="fmt", choices=["json", "csv"])
    trend.add_argument("--workers", type=int)
    return parser


def _write(stream, text: str) -> None:
    stream.write(text if text.endswith("\n") else text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        if args.from_config:
            config = load_config(args.from_config)
            tool = TOOLS_BY_SUBCOMMAND[config.subcommand].from_config(config)
        elif args.subcommand is None:
            parser.print_usage(sys.stderr)
            return 2
        else:
            tool_class = TOOLS_BY_SUBCOMMAND[args.subcommand]
            values = {
                name: value for name, value in vars(args).items()
                if name in tool_class.model_fields and value is not None
            }
            tool = tool_class(**values)
    except (OSError, ValueError) as e:
        _write(sys.stderr, f"Error: {e}")
        return 2

    result = tool.execute()
    _write(sys.stderr if result.status == "error" else sys.stdout, result.output)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
