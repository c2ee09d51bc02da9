"""
Punto de entrada de la línea de comandos de HCN
"""
import sys
from typing import List, Optional

from cli.commands import COMMANDS
from cli.commands.common import common_parent
from cli.middleware import CliArgumentParser, exit_code_for, run_command
from patterns.singleton import configure_logging, logger


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="hcn",
        description="Hierarchical Consensus Network: agrupamiento multivista",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)
    parent = common_parent()
    for command in COMMANDS:
        command.register(subparsers, parent)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        logger.log("error", "Argumentos inválidos", {"error": str(e)})
        return exit_code_for(e)

    configure_logging(args.log_level)
    return run_command(args.handler, args)


if __name__ == "__main__":
    sys.exit(main())
