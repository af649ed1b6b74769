from collections.abc import Sequence
from pathlib import Path
from typing import Final

import matplotlib as mpl
import numpy as np
import numpy.typing as npt
import structlog
from matplotlib.axes import Axes
from matplotlib.figure import Figure

from wiclab.env import GridSpec

from .metrics import EndpointRow, RunRecord

__all__ = (
    "plot_aggregate",
    "plot_endpoints",
    "plot_heatmaps",
    "plot_metrics",
)

logger = structlog.stdlib.get_logger(__name__)

# Fixed salt and no date stamp keep SVG output byte-stable across runs.
SVG_RC: Final[dict[str, object]] = {
    "svg.hashsalt": "wiclab",
    "svg.fonttype": "none",
}
SVG_METADATA: Final[dict[str, str | None]] = {"Date": None}

CURVES: Final[tuple[tuple[str, str], ...]] = (
    ("episodic_coverage", "Episodic coverage"),
    ("lifetime_coverage", "Lifetime coverage"),
    ("mean_return", "Mean intrinsic return"),
)

SKILL_COLORS: Final[tuple[str, ...]] = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple", "tab:brown")


def _save(fig: Figure, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fig.savefig(path, format="svg", metadata=SVG_METADATA)

    logger.debug("Figure written", path=str(path))
    return path


def _draw_walls(ax: Axes, spec: GridSpec) -> None:
    mask = np.zeros((spec.height, spec.width))
    for wall in spec.walls:
        mask[wall.row, wall.col] = 1.0

    ax.imshow(np.ma.masked_equal(mask, 0.0), cmap="Greys", vmin=0.0, vmax=1.0, origin="upper")


def plot_metrics(record: RunRecord, path: Path | str, title: str = "") -> Path:
    with mpl.rc_context(SVG_RC):
        fig = Figure(figsize=(4 * len(CURVES), 3.2))
        axes = fig.subplots(1, len(CURVES))
        updates = [row.update for row in record.rows]

        for ax, (key, label) in zip(axes, CURVES, strict=True):
            ax.plot(updates, [getattr(row, key) for row in record.rows], linewidth=1.0)
            ax.set_xlabel("Update")
            ax.set_title(label)
            ax.grid(True, alpha=0.3)

        if title:
            fig.suptitle(title)
        fig.tight_layout()

        return _save(fig, path)


def plot_aggregate(
    updates: Sequence[int],
    mean: dict[str, npt.NDArray[np.float64]],
    std: dict[str, npt.NDArray[np.float64]],
    path: Path | str,
    title: str = "",
) -> Path:
    """Mean curves with a one-standard-deviation band."""

    with mpl.rc_context(SVG_RC):
        fig = Figure(figsize=(4 * len(CURVES), 3.2))
        axes = fig.subplots(1, len(CURVES))

        for ax, (key, label) in zip(axes, CURVES, strict=True):
            ax.plot(updates, mean[key], linewidth=1.0)
            ax.fill_between(updates, mean[key] - std[key], mean[key] + std[key], alpha=0.25)
            ax.set_xlabel("Update")
            ax.set_title(label)
            ax.grid(True, alpha=0.3)

        if title:
            fig.suptitle(title)
        fig.tight_layout()

        return _save(fig, path)


def plot_endpoints(spec: GridSpec, rows: Sequence[EndpointRow], skills: int, path: Path | str) -> Path:
    """Endpoint scatter over the layout, one colour per skill, jittered deterministically."""

    with mpl.rc_context(SVG_RC):
        fig = Figure(figsize=(5, 5))
        ax = fig.subplots()
        _draw_walls(ax, spec)

        jitter = np.random.default_rng(0).uniform(-0.3, 0.3, size=(len(rows), 2))

        for w in range(skills):
            idx = [i for i, r in enumerate(rows) if r.skill == w]
            ax.scatter(
                [rows[i].col + jitter[i, 0] for i in idx],
                [rows[i].row + jitter[i, 1] for i in idx],
                s=8,
                color=SKILL_COLORS[w % len(SKILL_COLORS)],
                label=f"skill {w}",
            )

        ax.scatter([spec.start_cell.col], [spec.start_cell.row], marker="*", s=120, color="black", label="start")
        ax.set_xlim(-0.5, spec.width - 0.5)
        ax.set_ylim(spec.height - 0.5, -0.5)
        ax.set_aspect("equal")
        ax.legend(loc="upper right", fontsize=6)

        return _save(fig, path)


def plot_heatmaps(spec: GridSpec, values: npt.NDArray[np.float64], path: Path | str, title: str = "") -> Path:
    """One panel per skill; walls are NaN and left blank."""

    skills = values.shape[0]

    with mpl.rc_context(SVG_RC):
        fig = Figure(figsize=(3 * skills, 3.2))
        axes = fig.subplots(1, skills, squeeze=False)

        for w, ax in enumerate(axes[0]):
            image = ax.imshow(np.ma.masked_invalid(values[w]), cmap="viridis", origin="upper")
            ax.scatter([spec.start_cell.col], [spec.start_cell.row], marker="*", s=60, color="white")
            ax.set_title(f"skill {w}")
            ax.set_xticks([])
            ax.set_yticks([])
            fig.colorbar(image, ax=ax, fraction=0.046, pad=0.04)

        if title:
            fig.suptitle(title)
        fig.tight_layout()

        return _save(fig, path)
