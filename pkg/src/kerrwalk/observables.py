"""Localization diagnostics for walk states and time series.

Site probabilities are always spin-summed: P[n] = |a[n]|^2 + |b[n]|^2, which
is the quantity the probability carpets resolve.  The inverse participation
ratio 1/sum(P^2) estimates the number of occupied sites; the survival
probability is P at the starting site.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .core import SpinorField, WalkParams, _Engine

__all__ = [
    "LongTimeAverages",
    "PowerLawFit",
    "TimeSeriesRecord",
    "fit_power_law",
    "ipr",
    "probability_distribution",
    "survival_probability",
    "time_average",
    "walk_series",
]


def probability_distribution(field: SpinorField) -> np.ndarray:
    """Spin-summed site probabilities P[n] = |a[n]|^2 + |b[n]|^2."""
    a, b = field.a, field.b
    return a.real**2 + a.imag**2 + b.real**2 + b.imag**2


def ipr(field: SpinorField) -> float:
    """Inverse participation ratio 1 / sum_n P[n]^2.

    Equals 1 for a point-localized state and N for the exactly uniform one.
    Raises ValueError for an all-zero field.
    """
    p = probability_distribution(field)
    s2 = float(np.dot(p, p))
    if s2 == 0.0:
        raise ValueError("degenerate field: all site probabilities vanish")
    return 1.0 / s2


def survival_probability(field: SpinorField) -> float:
    """Probability of finding the walker at its starting site."""
    a = field.a[field.origin]
    b = field.b[field.origin]
    return float(a.real**2 + a.imag**2 + b.real**2 + b.imag**2)


@dataclass(frozen=True)
class TimeSeriesRecord:
    """Per-step observables of a walk."""

    t: int
    ipr: float
    sp: float
    norm: float


@dataclass(frozen=True)
class LongTimeAverages:
    """Window means of IPR and SP, with the window that produced them."""

    ipr_bar: float
    sp_bar: float
    window: tuple[int, int]


def walk_series(params: WalkParams, record_stride: int = 1) -> list[TimeSeriesRecord]:
    """Run a walk and record (t, ipr, sp, norm) every `record_stride` steps.

    Records are taken at t = stride, 2*stride, ... <= steps.  Note that from
    a point source the origin site is unoccupied at odd t (the walk lives on
    one parity sublattice), so sp alternates with zero there; an even stride
    samples the occupied parity.
    """
    if not (isinstance(record_stride, int) and record_stride >= 1):
        raise ValueError(f"record_stride: must be a positive integer, got {record_stride}")
    eng = _Engine(params)
    out: list[TimeSeriesRecord] = []
    for t in range(1, params.steps + 1):
        eng.advance()
        if t % record_stride == 0:
            ipr_t, sp_t, norm_t = eng.observables()
            out.append(TimeSeriesRecord(t, ipr_t, sp_t, norm_t))
    return out


def time_average(
    series: Iterable[TimeSeriesRecord], window: tuple[int, int]
) -> LongTimeAverages:
    """Arithmetic mean of ipr and sp over records with t_start <= t <= t_end."""
    t_start, t_end = window
    if not t_start < t_end:
        raise ValueError(f"window: need t_start < t_end, got {window}")
    selected = [r for r in series if t_start <= r.t <= t_end]
    if not selected:
        raise ValueError(f"window {window} selects no records")
    n = float(len(selected))
    return LongTimeAverages(
        ipr_bar=sum(r.ipr for r in selected) / n,
        sp_bar=sum(r.sp for r in selected) / n,
        window=(t_start, t_end),
    )


class PowerLawFit(NamedTuple):
    exponent: float
    amplitude: float
    residual: float


def fit_power_law(
    series: Sequence[tuple[float, float]], t_min: int = 100
) -> PowerLawFit:
    """Least-squares line fit in log-log coordinates over t >= t_min.

    Returns the slope (exponent), the amplitude A such that
    value ~ A * t**exponent, and the RMS residual of the log-log fit.
    Requires at least 10 points with strictly positive values.
    """
    pts = np.asarray([(t, v) for t, v in series if t >= t_min], dtype=np.float64)
    if pts.shape[0] < 10:
        raise ValueError(
            f"need at least 10 points with t >= {t_min}, got {pts.shape[0]}"
        )
    t, v = pts[:, 0], pts[:, 1]
    if np.any(v <= 0.0):
        raise ValueError("series contains non-positive values; cannot take log")
    log_t = np.log(t)
    log_v = np.log(v)
    slope, intercept = np.polyfit(log_t, log_v, 1)
    resid = float(np.sqrt(np.mean((log_v - (slope * log_t + intercept)) ** 2)))
    return PowerLawFit(float(slope), float(np.exp(intercept)), resid)
