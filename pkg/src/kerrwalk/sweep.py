"""Grids of independent walks over the (theta, chi) plane.

Each cell runs one walk and records long-time window averages of IPR and SP;
the table behind the localization phase diagrams.  Cells are embarrassingly
parallel; results are assembled by grid index so the output is independent
of scheduling.

Averages sample the even time steps inside the window: from a point source
the origin parity alternates, SP(odd t) = 0 identically, and mixing those
structural zeros in would halve every trapped cell's mean.

When the theta axis is symmetric about pi/2 (e.g. [0, pi]) the coin entries
of the upper half are assigned by reflection (c -> -c, s -> s) of the lower
half's values instead of independent trig evaluation.  The two differ by at
most one ulp, but only the reflected form preserves the exact mirror
symmetry of the right-handed start; chaotic cells amplify ulp-level
asymmetries into order-one table defects.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import TWO_PI, InitialState, WalkParams, _Engine

__all__ = [
    "Regime",
    "RegimeThresholds",
    "SweepCell",
    "SweepError",
    "SweepSpec",
    "classify_regime",
    "run_sweep",
]


class Regime(enum.Enum):
    """Dynamical regime labels for a sweep cell."""

    SPREADING = "spreading"
    MOBILE_SOLITON = "mobile_soliton"
    CHAOTIC_LIKE = "chaotic_like"
    SELF_TRAPPED = "self_trapped"


@dataclass(frozen=True)
class RegimeThresholds:
    """Classifier cut-offs (the regimes themselves are qualitative)."""

    self_trapped_sp: float = 0.5
    spreading_ipr: float = 0.5
    chaotic_variability: float = 0.1


DEFAULT_THRESHOLDS = RegimeThresholds()


def classify_regime(
    ipr_norm: float,
    sp_bar: float,
    neighbor_variability: float = 0.0,
    thresholds: RegimeThresholds = DEFAULT_THRESHOLDS,
) -> Regime:
    """Label a cell from its normalized IPR, mean SP and neighbourhood RMS.

    Order matters: a large survival probability wins (self-trapped), then a
    large normalized IPR (spreading); among the localized-but-mobile rest,
    strong cell-to-cell variability marks the chaotic-like region, the rest
    are travelling solitons.  `neighbor_variability` is the RMS difference
    of sp_bar against adjacent cells, 0 if unavailable.
    """
    if sp_bar >= thresholds.self_trapped_sp:
        return Regime.SELF_TRAPPED
    if ipr_norm >= thresholds.spreading_ipr:
        return Regime.SPREADING
    if neighbor_variability >= thresholds.chaotic_variability:
        return Regime.CHAOTIC_LIKE
    return Regime.MOBILE_SOLITON


@dataclass(frozen=True)
class SweepSpec:
    """Definition of a (theta, chi) grid of walks.

    Ranges are inclusive linear grids (min, max, count).  `steps` is the
    walk length per cell and `window_start_frac` the fraction of the run
    where the averaging window starts (window = [round(frac*steps), steps]).
    """

    theta_range: tuple[float, float, int]
    chi_range: tuple[float, float, int]
    steps: int
    initial: InitialState = InitialState.SYMMETRIC_CIRCULAR
    window_start_frac: float = 0.8
    margin: int = 2

    def __post_init__(self) -> None:
        for name, (lo, hi, count) in (
            ("theta_range", self.theta_range),
            ("chi_range", self.chi_range),
        ):
            if not (isinstance(count, int) and count >= 2):
                raise ValueError(f"{name}: count must be an integer >= 2, got {count}")
            if not lo < hi:
                raise ValueError(f"{name}: need min < max, got ({lo}, {hi})")
        if not (0.0 <= self.theta_range[0] and self.theta_range[1] <= TWO_PI):
            raise ValueError(f"theta_range: must lie within [0, 2*pi], got {self.theta_range}")
        if self.chi_range[0] < 0.0:
            raise ValueError(f"chi_range: must be non-negative, got {self.chi_range}")
        if not (isinstance(self.steps, int) and self.steps >= 1):
            raise ValueError(f"steps: must be a positive integer, got {self.steps}")
        if not isinstance(self.initial, InitialState):
            raise ValueError(f"initial: expected InitialState, got {self.initial!r}")
        if not 0.0 <= self.window_start_frac < 1.0:
            raise ValueError(
                f"window_start_frac: must be in [0, 1), got {self.window_start_frac}"
            )
        if not (isinstance(self.margin, int) and self.margin >= 0):
            raise ValueError(f"margin: must be a non-negative integer, got {self.margin}")

    def theta_values(self) -> np.ndarray:
        lo, hi, count = self.theta_range
        return np.linspace(lo, hi, count)

    def chi_values(self) -> np.ndarray:
        lo, hi, count = self.chi_range
        return np.linspace(lo, hi, count)

    def window(self) -> tuple[int, int]:
        t_start = int(round(self.window_start_frac * self.steps))
        return min(t_start, self.steps - 1), self.steps


@dataclass(frozen=True)
class SweepCell:
    """One grid point: coordinates, window averages, normalized IPR, label."""

    theta: float
    chi: float
    ipr_bar: float
    sp_bar: float
    ipr_norm: float
    regime: Regime


class SweepError(RuntimeError):
    """A cell failed; carries its coordinates and the cells finished so far."""

    def __init__(self, theta: float, chi: float, message: str,
                 completed: list[tuple[float, float, float, float]]):
        super().__init__(f"sweep cell (theta={theta}, chi={chi}) failed: {message}")
        self.theta = theta
        self.chi = chi
        self.completed = completed


def _mirror_coins(thetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coin entries per theta grid point, reflection-exact when applicable."""
    c = np.cos(thetas)
    s = np.sin(thetas)
    n = thetas.size
    if abs((thetas[0] + thetas[-1]) - math.pi) < 1e-12:
        for i in range(n // 2):
            j = n - 1 - i
            c[j] = -c[i]
            s[j] = s[i]
    return c, s


@dataclass(frozen=True)
class _CellTask:
    theta: float
    chi: float
    coin_c: float
    coin_s: float
    steps: int
    initial: InitialState
    margin: int
    t_start: int
    t_end: int


def _cell_averages(task: _CellTask) -> tuple[float, float]:
    """Run one cell's walk and return (ipr_bar, sp_bar) over even window steps."""
    params = WalkParams(
        theta=task.theta,
        chi=task.chi,
        steps=task.steps,
        initial=task.initial,
        margin=task.margin,
    )
    eng = _Engine(params, coin=(task.coin_c, task.coin_s))
    ipr_sum = 0.0
    sp_sum = 0.0
    count = 0
    for t in range(1, task.steps + 1):
        eng.advance()
        if t >= task.t_start and t <= task.t_end and t % 2 == 0:
            ipr_t, sp_t, _ = eng.observables()
            ipr_sum += ipr_t
            sp_sum += sp_t
            count += 1
    return ipr_sum / count, sp_sum / count


def _neighbor_variability(sp_table: np.ndarray) -> np.ndarray:
    """RMS difference of sp_bar against the existing 4-neighbours, per cell."""
    n_th, n_ch = sp_table.shape
    out = np.zeros_like(sp_table)
    for i in range(n_th):
        for j in range(n_ch):
            diffs = []
            if i > 0:
                diffs.append(sp_table[i, j] - sp_table[i - 1, j])
            if i < n_th - 1:
                diffs.append(sp_table[i, j] - sp_table[i + 1, j])
            if j > 0:
                diffs.append(sp_table[i, j] - sp_table[i, j - 1])
            if j < n_ch - 1:
                diffs.append(sp_table[i, j] - sp_table[i, j + 1])
            out[i, j] = math.sqrt(sum(d * d for d in diffs) / len(diffs))
    return out


def run_sweep(
    spec: SweepSpec,
    parallelism: int = 1,
    thresholds: RegimeThresholds = DEFAULT_THRESHOLDS,
) -> list[SweepCell]:
    """Compute every grid cell and classify it.

    Cells are returned in row-major order (theta outer, chi inner).  The
    table is a pure function of `spec`; `parallelism` only distributes the
    work, never the values.  On a cell failure a :class:`SweepError` is
    raised carrying the cell coordinates and all cells completed before it.
    """
    if not (isinstance(parallelism, int) and parallelism >= 1):
        raise ValueError(f"parallelism: must be a positive integer, got {parallelism}")
    thetas = spec.theta_values()
    chis = spec.chi_values()
    coin_c, coin_s = _mirror_coins(thetas)
    t_start, t_end = spec.window()
    tasks = [
        _CellTask(
            theta=float(thetas[i]),
            chi=float(chis[j]),
            coin_c=float(coin_c[i]),
            coin_s=float(coin_s[i]),
            steps=spec.steps,
            initial=spec.initial,
            margin=spec.margin,
            t_start=t_start,
            t_end=t_end,
        )
        for i in range(thetas.size)
        for j in range(chis.size)
    ]

    averages: list[tuple[float, float]] = []
    try:
        if parallelism == 1:
            for task in tasks:
                averages.append(_cell_averages(task))
        else:
            chunk = max(1, len(tasks) // (parallelism * 4))
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                for result in pool.map(_cell_averages, tasks, chunksize=chunk):
                    averages.append(result)
    except Exception as exc:
        failed = tasks[len(averages)]
        completed = [
            (tasks[idx].theta, tasks[idx].chi, ib, sb)
            for idx, (ib, sb) in enumerate(averages)
        ]
        raise SweepError(failed.theta, failed.chi, str(exc), completed) from exc

    ipr_bars = np.array([ib for ib, _ in averages])
    sp_bars = np.array([sb for _, sb in averages])
    ipr_max = float(ipr_bars[int(np.argmax(ipr_bars))])
    sp_table = sp_bars.reshape(thetas.size, chis.size)
    variability = _neighbor_variability(sp_table).reshape(-1)

    cells = []
    for idx, task in enumerate(tasks):
        ipr_norm = float(ipr_bars[idx]) / ipr_max
        regime = classify_regime(
            ipr_norm, float(sp_bars[idx]), float(variability[idx]), thresholds
        )
        cells.append(
            SweepCell(
                theta=task.theta,
                chi=task.chi,
                ipr_bar=float(ipr_bars[idx]),
                sp_bar=float(sp_bars[idx]),
                ipr_norm=ipr_norm,
                regime=regime,
            )
        )
    return cells
