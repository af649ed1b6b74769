from enum import StrEnum
from pathlib import Path
from typing import Annotated

import typer
from rich.console import Console

from wiclab.env import GridSpec, dump_map, four_rooms_spec, load_map_file, open_room_spec, room_cells

console = Console()

layout_click = typer.Typer(
    rich_markup_mode="rich",
    context_settings={"help_option_names": ["-h", "--help"]},
)


class BuiltinLayout(StrEnum):
    TABULAR15 = "tabular15"
    FOUR_ROOMS = "four_rooms"


def _builtin(layout: BuiltinLayout) -> GridSpec:
    return open_room_spec(15) if layout is BuiltinLayout.TABULAR15 else four_rooms_spec()


@layout_click.command("show")
def layout_show(environment: BuiltinLayout = BuiltinLayout.FOUR_ROOMS) -> None:
    """Print a built-in layout; 'S' marks the start cell."""

    spec = _builtin(environment)

    console.print(f"[cyan]{spec.name}: {spec.width}x{spec.height}, {len(spec.valid_cells)} floor cells[/cyan]")
    console.print(dump_map(spec), highlight=False)


@layout_click.command("export")
def layout_export(
    path: Annotated[Path, typer.Argument(help="Destination text file.")],
    environment: BuiltinLayout = BuiltinLayout.FOUR_ROOMS,
) -> None:
    """Write a built-in layout as a text map."""

    path.write_text(dump_map(_builtin(environment)) + "\n")
    console.print(f"[green]Layout written to {path}[/green]")


@layout_click.command("rooms")
def layout_rooms(path: Annotated[Path, typer.Argument(help="Text map to inspect.")]) -> None:
    """Report the size of the start room of a text map."""

    spec = load_map_file(path)
    room = room_cells(spec, spec.start_cell)

    console.print(f"Start room holds {len(room)} of {len(spec.valid_cells)} floor cells")
