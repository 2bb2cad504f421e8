"""Nonlinear discrete-time quantum walks with Kerr-like intensity-dependent phase.

Single-walk time evolution, localization observables (inverse participation
ratio, survival probability) and deterministic theta-chi phase-diagram
sweeps, with a CLI (``qwalk``) that writes machine-readable CSV/NDJSON.
"""

__version__ = "0.1.0"

from .core import (
    InitialState,
    LightConeError,
    SpinorField,
    WalkParams,
    coin_entries,
    evolve,
    linear_oracle_step,
    new_state,
    nonlinear_phase,
    step,
    walk_matrix,
)
from .observables import (
    LongTimeAverages,
    PowerLawFit,
    TimeSeriesRecord,
    fit_power_law,
    ipr,
    probability_distribution,
    survival_probability,
    time_average,
    walk_series,
)
from .sweep import (
    Regime,
    RegimeThresholds,
    SweepCell,
    SweepError,
    SweepSpec,
    classify_regime,
    run_sweep,
)

__all__ = [
    "InitialState",
    "LightConeError",
    "LongTimeAverages",
    "PowerLawFit",
    "Regime",
    "RegimeThresholds",
    "SpinorField",
    "SweepCell",
    "SweepError",
    "SweepSpec",
    "TimeSeriesRecord",
    "WalkParams",
    "classify_regime",
    "coin_entries",
    "evolve",
    "fit_power_law",
    "ipr",
    "linear_oracle_step",
    "new_state",
    "nonlinear_phase",
    "probability_distribution",
    "run_sweep",
    "step",
    "survival_probability",
    "time_average",
    "walk_matrix",
    "walk_series",
]
