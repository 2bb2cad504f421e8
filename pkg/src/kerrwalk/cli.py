"""Command-line front end: run configs in, deterministic data files out.

Subcommands ``walk``, ``profile`` and ``sweep`` each accept ``--config`` (a
JSON document mirroring :class:`RunConfig`) plus per-field flags that
override it.  Outputs are CSV or NDJSON with fixed schemas and shortest
round-trip float formatting, so identical configs produce identical bytes;
every data file gets a ``.meta.json`` sidecar recording the artifact version
and the full config it was produced from.

Exit codes: 0 success, 2 config error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import enum
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .core import InitialState, LightConeError, WalkParams, _Engine
from .observables import TimeSeriesRecord, walk_series
from .sweep import Regime, SweepCell, SweepError, SweepSpec, run_sweep

WALK_HEADER = "t,ipr,sp,norm"
PROFILE_HEADER = "t,n,p"
SWEEP_HEADER = "theta,chi,ipr_bar,ipr_norm,sp_bar,regime"

__all__ = [
    "ConfigError",
    "Mode",
    "OutputFormat",
    "RunConfig",
    "config_from_dict",
    "config_to_dict",
    "main",
    "parse_profile",
    "parse_sweep",
    "parse_walk",
    "profile_text",
    "run_profile",
    "run_sweep_cmd",
    "run_walk",
    "sidecar_path",
    "sweep_text",
    "walk_text",
]


class Mode(enum.Enum):
    WALK = "walk"
    SWEEP = "sweep"
    PROFILE = "profile"


class OutputFormat(enum.Enum):
    CSV = "csv"
    NDJSON = "ndjson"


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration; message names the field."""


@dataclass(frozen=True)
class RunConfig:
    """Full serializable description of a run; the unit of reproducibility."""

    mode: Mode
    output_path: str
    format: OutputFormat = OutputFormat.CSV
    walk: Optional[WalkParams] = None
    sweep: Optional[SweepSpec] = None
    snapshot_times: tuple[int, ...] = ()
    record_stride: int = 1
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.output_path:
            raise ConfigError("output_path: must be a non-empty path")
        if self.mode in (Mode.WALK, Mode.PROFILE):
            if self.walk is None:
                raise ConfigError(f"walk: required for mode '{self.mode.value}'")
            if self.sweep is not None:
                raise ConfigError(f"sweep: not allowed for mode '{self.mode.value}'")
        else:
            if self.sweep is None:
                raise ConfigError("sweep: required for mode 'sweep'")
            if self.walk is not None:
                raise ConfigError("walk: not allowed for mode 'sweep'")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ConfigError(f"record_stride: must be a positive integer, got {self.record_stride}")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise ConfigError(f"workers: must be a positive integer, got {self.workers}")
        if self.mode is Mode.PROFILE:
            if not self.snapshot_times:
                raise ConfigError("snapshot_times: required for mode 'profile'")
            assert self.walk is not None
            for t in self.snapshot_times:
                if not (isinstance(t, int) and 0 <= t <= self.walk.steps):
                    raise ConfigError(
                        f"snapshot_times: {t} outside [0, {self.walk.steps}]"
                    )


# -- config document parsing -------------------------------------------------

def _as_float(value: Any, path: str) -> float:
    # theta/chi may be given as exact decimal strings; parse once, use as-is
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a number, got {value!r}") from None


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value, 10)
        except ValueError:
            pass
    raise ConfigError(f"{path}: expected an integer, got {value!r}")


def _as_initial(value: Any, path: str) -> InitialState:
    try:
        return InitialState(value)
    except ValueError:
        choices = ", ".join(m.value for m in InitialState)
        raise ConfigError(f"{path}: expected one of {{{choices}}}, got {value!r}") from None


def _as_range(value: Any, path: str) -> tuple[float, float, int]:
    if not isinstance(value, dict) or set(value) != {"min", "max", "count"}:
        raise ConfigError(f"{path}: expected an object with keys min/max/count")
    return (
        _as_float(value["min"], f"{path}.min"),
        _as_float(value["max"], f"{path}.max"),
        _as_int(value["count"], f"{path}.count"),
    )


def _walk_from_dict(doc: Any) -> WalkParams:
    if not isinstance(doc, dict):
        raise ConfigError("walk: expected an object")
    unknown = set(doc) - {"theta", "chi", "steps", "initial", "margin"}
    if unknown:
        raise ConfigError(f"walk: unknown fields {sorted(unknown)}")
    for req in ("theta", "chi", "steps"):
        if req not in doc:
            raise ConfigError(f"walk.{req}: required")
    try:
        return WalkParams(
            theta=_as_float(doc["theta"], "walk.theta"),
            chi=_as_float(doc["chi"], "walk.chi"),
            steps=_as_int(doc["steps"], "walk.steps"),
            initial=_as_initial(doc.get("initial", "symmetric"), "walk.initial"),
            margin=_as_int(doc.get("margin", 2), "walk.margin"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"walk.{exc}") from None


def _sweep_from_dict(doc: Any) -> SweepSpec:
    if not isinstance(doc, dict):
        raise ConfigError("sweep: expected an object")
    unknown = set(doc) - {"theta", "chi", "steps", "initial", "window_start_frac", "margin"}
    if unknown:
        raise ConfigError(f"sweep: unknown fields {sorted(unknown)}")
    for req in ("theta", "chi", "steps"):
        if req not in doc:
            raise ConfigError(f"sweep.{req}: required")
    try:
        return SweepSpec(
            theta_range=_as_range(doc["theta"], "sweep.theta"),
            chi_range=_as_range(doc["chi"], "sweep.chi"),
            steps=_as_int(doc["steps"], "sweep.steps"),
            initial=_as_initial(doc.get("initial", "symmetric"), "sweep.initial"),
            window_start_frac=_as_float(doc.get("window_start_frac", 0.8), "sweep.window_start_frac"),
            margin=_as_int(doc.get("margin", 2), "sweep.margin"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"sweep.{exc}") from None


def config_from_dict(doc: dict) -> RunConfig:
    """Build and validate a RunConfig from a JSON-style document."""
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object")
    known = {"mode", "output_path", "format", "walk", "sweep",
             "snapshot_times", "record_stride", "workers"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"config: unknown fields {sorted(unknown)}")
    if "mode" not in doc:
        raise ConfigError("mode: required")
    try:
        mode = Mode(doc["mode"])
    except ValueError:
        raise ConfigError(f"mode: expected one of walk/sweep/profile, got {doc['mode']!r}") from None
    if "output_path" not in doc:
        raise ConfigError("output_path: required")
    output_path = doc["output_path"]
    if not isinstance(output_path, str):
        raise ConfigError(f"output_path: expected a string, got {output_path!r}")
    try:
        fmt = OutputFormat(doc.get("format", "csv"))
    except ValueError:
        raise ConfigError(f"format: expected csv or ndjson, got {doc['format']!r}") from None

    walk = _walk_from_dict(doc["walk"]) if "walk" in doc else None
    swp = _sweep_from_dict(doc["sweep"]) if "sweep" in doc else None

    raw_times = doc.get("snapshot_times", [])
    if not isinstance(raw_times, (list, tuple)):
        raise ConfigError("snapshot_times: expected a list of integers")
    times = tuple(_as_int(t, "snapshot_times") for t in raw_times)

    return RunConfig(
        mode=mode,
        output_path=output_path,
        format=fmt,
        walk=walk,
        sweep=swp,
        snapshot_times=times,
        record_stride=_as_int(doc.get("record_stride", 1), "record_stride"),
        workers=_as_int(doc.get("workers", 1), "workers"),
    )


def config_to_dict(cfg: RunConfig) -> dict:
    """Canonical JSON-ready form; config_from_dict inverts it exactly."""
    doc: dict[str, Any] = {
        "mode": cfg.mode.value,
        "output_path": cfg.output_path,
        "format": cfg.format.value,
    }
    if cfg.walk is not None:
        doc["walk"] = {
            "theta": cfg.walk.theta,
            "chi": cfg.walk.chi,
            "steps": cfg.walk.steps,
            "initial": cfg.walk.initial.value,
            "margin": cfg.walk.margin,
        }
    if cfg.sweep is not None:
        lo, hi, count = cfg.sweep.theta_range
        clo, chi_hi, ccount = cfg.sweep.chi_range
        doc["sweep"] = {
            "theta": {"min": lo, "max": hi, "count": count},
            "chi": {"min": clo, "max": chi_hi, "count": ccount},
            "steps": cfg.sweep.steps,
            "initial": cfg.sweep.initial.value,
            "window_start_frac": cfg.sweep.window_start_frac,
            "margin": cfg.sweep.margin,
        }
    if cfg.mode is Mode.PROFILE:
        doc["snapshot_times"] = list(cfg.snapshot_times)
    if cfg.mode is Mode.WALK:
        doc["record_stride"] = cfg.record_stride
    if cfg.mode is Mode.SWEEP:
        doc["workers"] = cfg.workers
    return doc


# -- serialization -----------------------------------------------------------

def _fmt(x: float) -> str:
    # shortest round-trip decimal; platform-independent for float64
    return repr(float(x))


def walk_text(records: Sequence[TimeSeriesRecord], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.CSV:
        lines = [WALK_HEADER]
        lines += [f"{r.t},{_fmt(r.ipr)},{_fmt(r.sp)},{_fmt(r.norm)}" for r in records]
    else:
        lines = [
            json.dumps(
                {"t": r.t, "ipr": r.ipr, "sp": r.sp, "norm": r.norm},
                separators=(",", ":"),
            )
            for r in records
        ]
    return "\n".join(lines) + "\n"


def profile_text(rows: Sequence[tuple[int, int, float]], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.CSV:
        lines = [PROFILE_HEADER]
        lines += [f"{t},{n},{_fmt(p)}" for t, n, p in rows]
    else:
        lines = [
            json.dumps({"t": t, "n": n, "p": p}, separators=(",", ":"))
            for t, n, p in rows
        ]
    return "\n".join(lines) + "\n"


def sweep_text(cells: Sequence[SweepCell], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.CSV:
        lines = [SWEEP_HEADER]
        lines += [
            f"{_fmt(c.theta)},{_fmt(c.chi)},{_fmt(c.ipr_bar)},"
            f"{_fmt(c.ipr_norm)},{_fmt(c.sp_bar)},{c.regime.value}"
            for c in cells
        ]
    else:
        lines = [
            json.dumps(
                {
                    "theta": c.theta,
                    "chi": c.chi,
                    "ipr_bar": c.ipr_bar,
                    "ipr_norm": c.ipr_norm,
                    "sp_bar": c.sp_bar,
                    "regime": c.regime.value,
                },
                separators=(",", ":"),
            )
            for c in cells
        ]
    return "\n".join(lines) + "\n"


def _split_lines(text: str, expected_header: str, fmt: OutputFormat) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if fmt is OutputFormat.CSV:
        if not lines or lines[0] != expected_header:
            got = lines[0] if lines else ""
            raise ValueError(f"bad header: expected {expected_header!r}, got {got!r}")
        return lines[1:]
    return lines


def parse_walk(text: str, fmt: OutputFormat = OutputFormat.CSV) -> list[TimeSeriesRecord]:
    records = []
    for line in _split_lines(text, WALK_HEADER, fmt):
        if fmt is OutputFormat.CSV:
            t, ipr_v, sp_v, norm_v = line.split(",")
            records.append(TimeSeriesRecord(int(t), float(ipr_v), float(sp_v), float(norm_v)))
        else:
            d = json.loads(line)
            records.append(TimeSeriesRecord(d["t"], d["ipr"], d["sp"], d["norm"]))
    return records


def parse_profile(text: str, fmt: OutputFormat = OutputFormat.CSV) -> list[tuple[int, int, float]]:
    rows = []
    for line in _split_lines(text, PROFILE_HEADER, fmt):
        if fmt is OutputFormat.CSV:
            t, n, p = line.split(",")
            rows.append((int(t), int(n), float(p)))
        else:
            d = json.loads(line)
            rows.append((d["t"], d["n"], d["p"]))
    return rows


def parse_sweep(text: str, fmt: OutputFormat = OutputFormat.CSV) -> list[SweepCell]:
    cells = []
    for line in _split_lines(text, SWEEP_HEADER, fmt):
        if fmt is OutputFormat.CSV:
            theta, chi, ipr_bar, ipr_norm, sp_bar, regime = line.split(",")
            cells.append(
                SweepCell(
                    theta=float(theta),
                    chi=float(chi),
                    ipr_bar=float(ipr_bar),
                    sp_bar=float(sp_bar),
                    ipr_norm=float(ipr_norm),
                    regime=Regime(regime),
                )
            )
        else:
            d = json.loads(line)
            cells.append(
                SweepCell(
                    theta=d["theta"],
                    chi=d["chi"],
                    ipr_bar=d["ipr_bar"],
                    sp_bar=d["sp_bar"],
                    ipr_norm=d["ipr_norm"],
                    regime=Regime(d["regime"]),
                )
            )
    return cells


# -- runners -----------------------------------------------------------------

def sidecar_path(output_path: str) -> str:
    """Metadata path with the same stem: out/walk.csv -> out/walk.meta.json."""
    p = Path(output_path)
    return str(p.with_name(p.stem + ".meta.json"))


def _write_text(path: str, text: str) -> None:
    parent = Path(path).parent
    if str(parent) and not parent.exists():
        raise FileNotFoundError(f"output directory does not exist: {parent}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_sidecar(cfg: RunConfig, derived: dict) -> None:
    meta = {
        "artifact": {"name": "kerrwalk", "version": __version__},
        "config": config_to_dict(cfg),
        "derived": derived,
    }
    _write_text(sidecar_path(cfg.output_path), json.dumps(meta, indent=2, sort_keys=True) + "\n")


def run_walk(cfg: RunConfig) -> str:
    """Time-series run: one record every `record_stride` steps."""
    assert cfg.mode is Mode.WALK and cfg.walk is not None
    records = walk_series(cfg.walk, cfg.record_stride)
    _write_text(cfg.output_path, walk_text(records, cfg.format))
    _write_sidecar(cfg, {
        "lattice_sites": cfg.walk.lattice_size,
        "origin": cfg.walk.origin,
        "rows": len(records),
    })
    return cfg.output_path


def _profile_rows(params: WalkParams, times: Sequence[int]) -> list[tuple[int, int, float]]:
    want = sorted(set(times))
    rows: list[tuple[int, int, float]] = []
    eng = _Engine(params)
    if want and want[0] == 0:
        lo, p = eng.cone_profile()
        rows += [(0, lo + i, float(p[i])) for i in range(p.size)]
        want = want[1:]
    remaining = set(want)
    last = max(want, default=0)
    for t in range(1, last + 1):
        eng.advance()
        if t in remaining:
            lo, p = eng.cone_profile()
            rows += [(t, lo + i, float(p[i])) for i in range(p.size)]
    return rows


def run_profile(cfg: RunConfig) -> str:
    """Probability-profile dump over the light cone at the requested times."""
    assert cfg.mode is Mode.PROFILE and cfg.walk is not None
    rows = _profile_rows(cfg.walk, cfg.snapshot_times)
    _write_text(cfg.output_path, profile_text(rows, cfg.format))
    _write_sidecar(cfg, {
        "lattice_sites": cfg.walk.lattice_size,
        "origin": cfg.walk.origin,
        "snapshot_times": sorted(set(cfg.snapshot_times)),
    })
    return cfg.output_path


def run_sweep_cmd(cfg: RunConfig) -> str:
    """Full grid run; CSV/NDJSON table plus metadata sidecar."""
    assert cfg.mode is Mode.SWEEP and cfg.sweep is not None
    cells = run_sweep(cfg.sweep, parallelism=cfg.workers)
    _write_text(cfg.output_path, sweep_text(cells, cfg.format))
    spec = cfg.sweep
    t_start, t_end = spec.window()
    _write_sidecar(cfg, {
        "steps": spec.steps,
        "window": [t_start, t_end],
        "thresholds": {
            "self_trapped_sp": 0.5,
            "spreading_ipr": 0.5,
            "chaotic_variability": 0.1,
        },
        "theta_values": [float(v) for v in spec.theta_values()],
        "chi_values": [float(v) for v in spec.chi_values()],
        "initial": spec.initial.value,
    })
    return cfg.output_path


# -- argument parsing --------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Nonlinear discrete-time quantum walk runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output data file path")
        p.add_argument("--format", choices=["csv", "ndjson"], help="output format")

    def walk_params(p: argparse.ArgumentParser) -> None:
        p.add_argument("--theta", help="coin angle in radians")
        p.add_argument("--chi", help="nonlinear strength")
        p.add_argument("--steps", help="number of time steps")
        p.add_argument("--initial", choices=["symmetric", "right"], help="initial state")
        p.add_argument("--margin", help="extra sites beyond the light cone")

    p_walk = sub.add_parser("walk", help="record IPR/SP/norm time series")
    common(p_walk)
    walk_params(p_walk)
    p_walk.add_argument("--stride", help="record every k-th step")

    p_prof = sub.add_parser("profile", help="dump probability profiles")
    common(p_prof)
    walk_params(p_prof)
    p_prof.add_argument("--snapshot-times", help="comma-separated step indices")

    p_sweep = sub.add_parser("sweep", help="run a theta-chi diagram grid")
    common(p_sweep)
    p_sweep.add_argument("--theta-min", help="theta grid start")
    p_sweep.add_argument("--theta-max", help="theta grid end")
    p_sweep.add_argument("--theta-count", help="theta grid size")
    p_sweep.add_argument("--chi-min", help="chi grid start")
    p_sweep.add_argument("--chi-max", help="chi grid end")
    p_sweep.add_argument("--chi-count", help="chi grid size")
    p_sweep.add_argument("--steps", help="steps per cell")
    p_sweep.add_argument("--initial", choices=["symmetric", "right"], help="initial state")
    p_sweep.add_argument("--margin", help="extra sites beyond the light cone")
    p_sweep.add_argument("--workers", help="worker process count")
    p_sweep.add_argument("--window-start-frac", help="averaging window start fraction")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object at top level")
    return doc


def _merge_args(doc: dict, args: argparse.Namespace) -> dict:
    mode = args.command
    if "mode" in doc and doc["mode"] != mode:
        raise ConfigError(f"mode: config says {doc['mode']!r} but subcommand is {mode!r}")
    doc["mode"] = mode

    if args.out is not None:
        doc["output_path"] = args.out
    if args.format is not None:
        doc["format"] = args.format

    if mode in ("walk", "profile"):
        walk = dict(doc.get("walk", {}))
        for name in ("theta", "chi", "steps", "initial", "margin"):
            value = getattr(args, name)
            if value is not None:
                walk[name] = value
        if walk:
            doc["walk"] = walk
        if mode == "walk" and args.stride is not None:
            doc["record_stride"] = args.stride
        if mode == "profile" and args.snapshot_times is not None:
            try:
                doc["snapshot_times"] = [
                    int(tok, 10) for tok in args.snapshot_times.split(",") if tok
                ]
            except ValueError:
                raise ConfigError(
                    f"snapshot_times: expected comma-separated integers, got {args.snapshot_times!r}"
                ) from None
    else:
        swp = dict(doc.get("sweep", {}))
        for axis in ("theta", "chi"):
            rng = dict(swp.get(axis, {}))
            for part in ("min", "max", "count"):
                value = getattr(args, f"{axis}_{part}")
                if value is not None:
                    rng[part] = value
            if rng:
                swp[axis] = rng
        for name, key in (("steps", "steps"), ("initial", "initial"),
                          ("margin", "margin"), ("window_start_frac", "window_start_frac")):
            value = getattr(args, name)
            if value is not None:
                swp[key] = value
        if swp:
            doc["sweep"] = swp
        if args.workers is not None:
            doc["workers"] = args.workers
    return doc


_RUNNERS = {Mode.WALK: run_walk, Mode.PROFILE: run_profile, Mode.SWEEP: run_sweep_cmd}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = _load_config_file(args.config) if args.config else {}
        doc = _merge_args(doc, args)
        cfg = config_from_dict(doc)
    except ConfigError as exc:
        print(f"qwalk: config error: {exc}", file=sys.stderr)
        return 2
    try:
        _RUNNERS[cfg.mode](cfg)
    except (OSError, LightConeError, SweepError, RuntimeError, ValueError) as exc:
        print(f"qwalk: error: {exc}", file=sys.stderr)
        return 1
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
