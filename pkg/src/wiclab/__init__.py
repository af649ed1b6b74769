import logging
import sys

import structlog
from rich.console import Console

from ._version import __version__
from .banner import build_banner
from .cli import cli
from .config import LabSettings

console = Console()


def set_environments() -> None:
    """Configure the structlog threshold from the environment before any log is produced."""

    settings = LabSettings.get_settings()

    level = logging.getLevelNamesMapping().get(settings.log_level.upper(), logging.INFO)
    structlog.configure(wrapper_class=structlog.make_filtering_bound_logger(level))


def run_cli() -> None:
    args = sys.argv[1:]

    if not args:
        sys.argv.append("--help")

    cli()


def entrypoint() -> None:
    """Run the wiclab command line."""

    set_environments()

    console.print(f"[cyan]{build_banner(__version__)}[/cyan]")

    run_cli()
