"""Figure rendering: carpets, time series, diagram heatmaps.

Rendering is read-only and deterministic: a job's inputs and options fix the
figure size, axis ranges and content.  Figures are saved to the job's output
path and also returned for inspection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")  # batch tool, never a GUI

import matplotlib.pyplot as plt
from matplotlib.colors import LogNorm

from .io import read_profile, read_sidecar, read_sweep, read_walk

__all__ = [
    "PlotJob",
    "PlotOptions",
    "carpet_matrix",
    "render",
    "render_carpet",
    "render_heatmap",
    "render_timeseries",
]

_REGIME_CODES = {"spreading": 0, "mobile_soliton": 1, "chaotic_like": 2, "self_trapped": 3}


@dataclass(frozen=True)
class PlotOptions:
    log_color: bool = True          # carpets: logarithmic color scale
    loglog: bool = False            # time series: log-log axes
    guide: bool = False             # time series: 1/t reference line
    contours: bool = False          # heatmap: regime-boundary overlay
    cmap: str = "viridis"
    dpi: int = 150
    series: tuple[str, ...] = ("ipr", "sp")


@dataclass(frozen=True)
class PlotJob:
    kind: str                       # carpet | timeseries | heatmap
    input_paths: tuple[str, ...]
    output_path: str
    options: PlotOptions = field(default_factory=PlotOptions)


def _single_input(job: PlotJob) -> str:
    if len(job.input_paths) != 1:
        raise ValueError(f"{job.kind} takes exactly one input file, got {len(job.input_paths)}")
    return job.input_paths[0]


def carpet_matrix(data: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pivot (t, n, p) rows into (times, sites, matrix[time, site])."""
    times = np.unique(data["t"])
    n_min, n_max = int(data["n"].min()), int(data["n"].max())
    sites = np.arange(n_min, n_max + 1)
    mat = np.zeros((times.size, sites.size))
    t_index = {int(t): i for i, t in enumerate(times)}
    mat[[t_index[int(t)] for t in data["t"]], data["n"] - n_min] = data["p"]
    return times, sites, mat


def render_carpet(job: PlotJob):
    """Space-time probability carpet from a profile dump."""
    data = read_profile(_single_input(job))
    times, sites, mat = carpet_matrix(data)
    opts = job.options

    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    if opts.log_color:
        positive = mat[mat > 0]
        if positive.size:
            norm = LogNorm(vmin=positive.min(), vmax=positive.max())
        else:
            norm = None
        shown = np.ma.masked_less_equal(mat, 0.0)
    else:
        norm = None
        shown = mat
    # half-step padding keeps a single-snapshot input from collapsing the axis
    t_pad = (times[-1] - times[0]) / max(times.size - 1, 1) / 2 or 0.5
    image = ax.imshow(
        shown,
        origin="lower",
        aspect="auto",
        interpolation="nearest",
        extent=(sites[0] - 0.5, sites[-1] + 0.5,
                float(times[0]) - t_pad, float(times[-1]) + t_pad),
        norm=norm,
        cmap=opts.cmap,
    )
    ax.set_xlabel("site n")
    ax.set_ylabel("step t")
    fig.colorbar(image, ax=ax, label="site probability")
    fig.savefig(job.output_path, dpi=opts.dpi)
    return fig


def render_timeseries(job: PlotJob):
    """IPR and/or SP against t, optionally log-log with a 1/t guide."""
    if not job.input_paths:
        raise ValueError("timeseries needs at least one input file")
    opts = job.options
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    guide_anchor = None
    for path in job.input_paths:
        data = read_walk(path)
        stem = Path(path).stem
        for name in opts.series:
            t = data["t"]
            v = data[name]
            if opts.loglog:
                keep = v > 0
                t, v = t[keep], v[keep]
            ax.plot(t, v, label=f"{stem}:{name}", linewidth=1.0)
            if name == "sp" and guide_anchor is None and t.size:
                guide_anchor = (float(t[0]), float(v[0]))
    if opts.loglog:
        ax.set_xscale("log")
        ax.set_yscale("log")
    if opts.guide and guide_anchor is not None:
        t0, v0 = guide_anchor
        t_all = np.asarray(ax.get_xlim())
        t_ref = np.geomspace(max(t0, 1.0), max(t_all[1], t0 * 10), 50)
        ax.plot(t_ref, v0 * t0 / t_ref, "k--", linewidth=0.8, label="~1/t")
    ax.set_xlabel("step t")
    ax.legend(fontsize=8)
    fig.savefig(job.output_path, dpi=opts.dpi)
    return fig


def _rectangular_grid(data: dict, path: str) -> tuple[np.ndarray, np.ndarray]:
    thetas = np.unique(data["theta"])
    chis = np.unique(data["chi"])
    if thetas.size * chis.size != data["theta"].size:
        raise ValueError(
            f"{path}: non-rectangular grid "
            f"({thetas.size} x {chis.size} != {data['theta'].size} rows)"
        )
    expected_theta = np.repeat(thetas, chis.size)
    expected_chi = np.tile(chis, thetas.size)
    if not (np.array_equal(data["theta"], expected_theta)
            and np.array_equal(data["chi"], expected_chi)):
        raise ValueError(f"{path}: rows are not in row-major theta-then-chi order")
    return thetas, chis


def render_heatmap(job: PlotJob):
    """Two-panel theta-chi diagram: normalized IPR and mean SP."""
    path = _single_input(job)
    data = read_sweep(path)
    thetas, chis = _rectangular_grid(data, path)
    opts = job.options
    meta = read_sidecar(path)
    if meta is not None and "derived" in meta:
        theta_axis = meta["derived"].get("theta_values")
        chi_axis = meta["derived"].get("chi_values")
        x_range = (theta_axis[0], theta_axis[-1]) if theta_axis else (thetas[0], thetas[-1])
        y_range = (chi_axis[0], chi_axis[-1]) if chi_axis else (chis[0], chis[-1])
    else:
        x_range = (float(thetas[0]), float(thetas[-1]))
        y_range = (float(chis[0]), float(chis[-1]))

    fig, axes = plt.subplots(1, 2, figsize=(10.0, 4.0), sharey=True)
    panels = (
        ("normalized IPR", data["ipr_norm"]),
        ("mean SP", data["sp_bar"]),
    )
    for ax, (title, values) in zip(axes, panels):
        grid = values.reshape(thetas.size, chis.size)
        mesh = ax.pcolormesh(thetas, chis, grid.T, cmap=opts.cmap, shading="nearest")
        if opts.contours:
            codes = np.vectorize(_REGIME_CODES.__getitem__)(data["regime"])
            code_grid = codes.reshape(thetas.size, chis.size).astype(float)
            ax.contour(thetas, chis, code_grid.T, levels=[0.5, 1.5, 2.5],
                       colors="white", linewidths=0.7)
        ax.set_xlim(*x_range)
        ax.set_ylim(*y_range)
        ax.set_xlabel("coin angle theta")
        ax.set_title(title)
        fig.colorbar(mesh, ax=ax)
    axes[0].set_ylabel("nonlinear strength chi")
    fig.savefig(job.output_path, dpi=opts.dpi)
    return fig


_RENDERERS = {
    "carpet": render_carpet,
    "timeseries": render_timeseries,
    "heatmap": render_heatmap,
}


def render(job: PlotJob):
    try:
        renderer = _RENDERERS[job.kind]
    except KeyError:
        raise ValueError(f"unknown plot kind {job.kind!r}") from None
    return renderer(job)
