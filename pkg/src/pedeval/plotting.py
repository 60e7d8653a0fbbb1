"""Matplotlib renders of a scene report: the four panels of a dynamics summary.

SVGs are written with a fixed hash salt and no timestamp, so the same report
always produces byte-identical files. Everything is drawn as vector paths;
no external assets are referenced.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .compare import SceneReport  # noqa: E402

FIGURE_NAMES = ("position_heatmap", "velocity_distribution", "fundamental_diagram", "nn_polar")

_RC = {
    "svg.hashsalt": "pedeval",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
}
_BAR = "#4C78A8"
_FIT = "#E45756"
_SCATTER = "#9D9D9D"


def _save(fig, path: Path, fmt: str) -> Path:
    meta = {"Date": None} if fmt == "svg" else None
    fig.savefig(path, format=fmt, metadata=meta, bbox_inches="tight")
    plt.close(fig)
    return path


def _title(rep: SceneReport, what: str) -> str:
    label = f" [{rep.label}]" if rep.label else ""
    return f"{rep.scene_id}{label}: {what}"


def _placeholder(ax, msg: str) -> None:
    ax.text(0.5, 0.5, msg, ha="center", va="center", transform=ax.transAxes, color="0.4")
    ax.set_xticks([])
    ax.set_yticks([])


def _error_text(rep: SceneReport, key: str) -> str:
    err = rep.errors.get(key)
    return f"unavailable ({err.error})" if err else "unavailable"


def plot_position_heatmap(rep: SceneReport, ax) -> None:
    h = rep.position_heatmap
    if h is None:
        _placeholder(ax, _error_text(rep, "position_heatmap"))
        return
    mesh = ax.pcolormesh(h.x_edges, h.y_edges, h.counts.T, cmap="viridis", shading="flat")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.figure.colorbar(mesh, ax=ax, label="samples")


def plot_velocity_distribution(rep: SceneReport, ax) -> None:
    h, fit = rep.velocity_histogram, rep.gaussian_fit
    if h is None or fit is None or h.total == 0:
        _placeholder(ax, _error_text(rep, "velocity_histogram"))
        return
    ax.bar(h.centers, h.density(), width=h.widths, color=_BAR, alpha=0.75, edgecolor="white", linewidth=0.4)
    if fit.std > 0:
        xs = np.linspace(h.edges[0], h.edges[-1], 400)
        ax.plot(xs, fit.pdf(xs), color=_FIT, lw=1.5, label=f"N({fit.mean:.2f}, {fit.std:.2f}²)")
        ax.legend(frameon=False, loc="upper right")
    ax.set_xlabel("longitudinal velocity [m/s]")
    ax.set_ylabel("density")


def plot_fundamental_diagram(rep: SceneReport, ax) -> None:
    fd = rep.fundamental_diagram
    if fd is None:
        _placeholder(ax, _error_text(rep, "fundamental_diagram"))
        return
    if fd.density_samples.size:
        ax.scatter(fd.density_samples, fd.speed_samples, s=3, color=_SCATTER, alpha=0.35, linewidths=0)
    keep = ~fd.empty
    ax.plot(fd.centers[keep], fd.mean_speed[keep], "o-", color=_FIT, ms=3, lw=1.2, label="bin mean")
    ax.set_xlabel("local density [1/m²]")
    ax.set_ylabel("speed [m/s]")
    ax.legend(frameon=False, loc="upper right")


def plot_nn_polar(rep: SceneReport, ax) -> None:
    h = rep.polar_histogram
    if h is None or h.total == 0:
        _placeholder(ax, _error_text(rep, "polar_histogram"))
        return
    theta, r = np.meshgrid(h.theta_edges, h.r_edges)
    ax.pcolormesh(theta, r, h.density(), cmap="magma", shading="flat")
    ax.set_theta_zero_location("N")  # heading points up
    ax.set_ylim(0, h.r_edges[-1])
    ax.grid(alpha=0.3)


def render_report_figures(rep: SceneReport, out_dir: str | os.PathLike, fmt: str = "svg") -> list[Path]:
    """Write the four dynamics panels for ``rep`` into ``out_dir``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = rep.label or rep.scene_id
    paths = []
    with matplotlib.rc_context(_RC):
        for name, fn, what, polar in (
            ("position_heatmap", plot_position_heatmap, "position heatmap", False),
            ("velocity_distribution", plot_velocity_distribution, "longitudinal velocity", False),
            ("fundamental_diagram", plot_fundamental_diagram, "fundamental diagram", False),
            ("nn_polar", plot_nn_polar, "nearest-neighbour position", True),
        ):
            fig = plt.figure(figsize=(4.2, 3.4))
            ax = fig.add_subplot(111, projection="polar" if polar else None)
            fn(rep, ax)
            ax.set_title(_title(rep, what))
            paths.append(_save(fig, out / f"{stem}_{name}.{fmt}", fmt))
    return paths
