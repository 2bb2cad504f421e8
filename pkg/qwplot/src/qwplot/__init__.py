"""Rendering for quantum-walk data files.

Consumes the CSV/NDJSON schemas written by the ``qwalk`` CLI (walk time
series, light-cone probability profiles, theta-chi sweep tables) and renders
space-time probability carpets, IPR/SP time-series plots and diagram
heatmaps.  Batch tool: the matplotlib Agg backend is forced, nothing is ever
written back to the inputs.
"""

__version__ = "0.1.0"

from .io import SchemaError, read_profile, read_sidecar, read_sweep, read_walk
from .render import (
    PlotJob,
    PlotOptions,
    carpet_matrix,
    render,
    render_carpet,
    render_heatmap,
    render_timeseries,
)

__all__ = [
    "PlotJob",
    "PlotOptions",
    "SchemaError",
    "carpet_matrix",
    "read_profile",
    "read_sidecar",
    "read_sweep",
    "read_walk",
    "render",
    "render_carpet",
    "render_heatmap",
    "render_timeseries",
]
