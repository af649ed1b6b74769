from collections.abc import Callable
from pathlib import Path
from typing import Annotated, Any

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from wiclab.config import LabSettings, load_experiment_config, parse_overrides
from wiclab.exception import ConfigurationError, LabError
from wiclab.lab import multi_seed, report_run, run_experiment

console = Console()

experiment_click = typer.Typer(
    rich_markup_mode="rich",
    context_settings={"help_option_names": ["-h", "--help"]},
)

OVERRIDE_CONTEXT = {"allow_extra_args": True, "ignore_unknown_options": True}


def _split_args(config: str | None, extra: list[str]) -> tuple[Path | None, dict[str, Any]]:
    # unknown --key=value flags may land in the positional slot
    args = [*([config] if config else []), *extra]
    paths = [a for a in args if not a.startswith("--")]
    if len(paths) > 1:
        raise ConfigurationError(f"Expected at most one config file, got {paths}")

    return (Path(paths[0]) if paths else None), parse_overrides([a for a in args if a.startswith("--")])


def _guarded[T](action: Callable[[], T]) -> T:
    try:
        return action()
    except (LabError, ValidationError) as e:
        console.print(f"[red]{e}[/red]")
        raise typer.Exit(code=1) from e


@experiment_click.command("run", context_settings=OVERRIDE_CONTEXT)
def run_command(
    ctx: typer.Context,
    config: Annotated[str | None, typer.Argument(help="Config file (key = value, .toml or .yaml).")] = None,
    output_root: Annotated[Path | None, typer.Option("--output-root", help="Overrides WICLAB_OUTPUT_ROOT.")] = None,
    report: Annotated[bool, typer.Option("--report/--no-report", help="Emit endpoints and heatmaps.")] = True,
    rollouts: Annotated[int, typer.Option(help="Evaluation rollouts per skill.")] = 100,
) -> None:
    """Train one experiment. Extra [bold]--key=value[/bold] flags override config fields."""

    cfg = _guarded(lambda: load_experiment_config(*_split_args(config, ctx.args)))

    console.print(f"[cyan]Running {cfg.run_name()} for {cfg.total_updates} updates...[/cyan]")
    result = _guarded(lambda: run_experiment(cfg, output_root=output_root))

    if report and result.record.rows:
        _guarded(lambda: report_run(result.run_dir, n_rollouts=rollouts))

    if result.record.rows:
        final = result.record.rows[-1]
        console.print(
            f"Lifetime coverage {final.lifetime_coverage}, "
            f"episodic coverage {final.episodic_coverage:.2f}, "
            f"mean return {final.mean_return:.4f}"
        )

    console.print(f"[green]Run written to {result.run_dir}[/green]")


@experiment_click.command("report")
def report_command(
    run_dir: Annotated[Path, typer.Argument(help="Directory of a finished run.")],
    rollouts: Annotated[int, typer.Option(help="Evaluation rollouts per skill.")] = 100,
) -> None:
    """Emit endpoint tables and reward heatmaps from a run's checkpoints."""

    console.print(f"[cyan]Reporting {run_dir}...[/cyan]")
    result = _guarded(lambda: report_run(run_dir, n_rollouts=rollouts))

    table = Table("skill", "mean distance", "displacement (dx, dy)")
    for w, (distance, displacement) in enumerate(
        zip(result.summary.skill_distance, result.summary.displacement, strict=True)
    ):
        table.add_row(
            str(w),
            "-" if distance is None else f"{distance:.2f}",
            "-" if displacement is None else f"({displacement[0]:.2f}, {displacement[1]:.2f})",
        )
    console.print(table)

    if result.summary.min_angle_degrees is not None:
        console.print(f"Minimum pairwise angle {result.summary.min_angle_degrees:.1f} degrees")
    console.print(f"Endpoints outside the start room: {result.summary.outside_start_room:.2%}")
    console.print("[green]Report written.[/green]")


@experiment_click.command("sweep", context_settings=OVERRIDE_CONTEXT)
def sweep_command(
    ctx: typer.Context,
    config: Annotated[str | None, typer.Argument(help="Config file (key = value, .toml or .yaml).")] = None,
    seeds: Annotated[list[int] | None, typer.Option("--seed", help="Seed to run; repeat for several.")] = None,
    workers: Annotated[int | None, typer.Option(help="Worker processes, defaults to WICLAB_WORKERS.")] = None,
    output_root: Annotated[Path | None, typer.Option("--output-root", help="Overrides WICLAB_OUTPUT_ROOT.")] = None,
    rollouts: Annotated[int, typer.Option(help="Evaluation rollouts per skill.")] = 100,
) -> None:
    """Run one config over several seeds and aggregate the metric curves."""

    cfg = _guarded(lambda: load_experiment_config(*_split_args(config, ctx.args)))
    seed_list = seeds or [0, 1, 2, 3, 4]
    n_workers = workers if workers is not None else LabSettings.get_settings().workers

    console.print(f"[cyan]Sweeping {len(seed_list)} seeds with {n_workers} workers...[/cyan]")
    result = _guarded(
        lambda: multi_seed(cfg, seed_list, workers=n_workers, output_root=output_root, n_rollouts=rollouts)
    )

    table = Table("seed", "mean endpoint distance", "outside start room", "min angle")
    for outcome in result.outcomes:
        angle = outcome.endpoints.min_angle_degrees
        table.add_row(
            str(outcome.seed),
            f"{outcome.endpoints.mean_distance:.2f}",
            f"{outcome.endpoints.outside_start_room:.2%}",
            "-" if angle is None else f"{angle:.1f}",
        )
    console.print(table)
    console.print(f"[green]Aggregate written to {result.sweep_dir}[/green]")
