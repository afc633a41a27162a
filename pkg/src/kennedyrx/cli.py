"""Command-line front end: bounds/simulate/decode/sweep/fit/hist subcommands.

Every subcommand validates its configuration, runs deterministically for a
given seed, and emits machine-readable CSV (to --out or stdout).  Model
parameters come from defaults, then an optional flat ``key = value``
config file (--config), then explicit flags, in increasing precedence.
Flag names carry their units; internal canonical units are picoseconds
and Hz.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import tcspc
from ._fmt import fmt
from .bounds import (
    BoundsCurve,
    SignalParams,
    compute_bounds_curve,
    error_kennedy_real,
    error_sql,
    extinction_db_to_linear,
    fit_imperfections,
)
from .model import (
    PHOTON_REFERENCES,
    PICOSECONDS_PER_SECOND,
    DetectorModel,
    DisplacementModel,
    ReceiverModel,
    TimingConfig,
    exact_error_rate,
)
from .rng import derive_seed
from .sim import PATTERNS, generate_bits, simulate_bin_counts, simulate_event_stream

BOUNDS_CSV_HEADER = (
    "m,e_kennedy_ideal,e_sql,e_helstrom,e_kennedy_real,"
    "norm_kennedy_ideal,norm_helstrom,norm_kennedy_real"
)
SWEEP_CSV_HEADER = (
    "m,mc_error,exact_error,kennedy_real_error,sql,"
    "norm_mc,norm_exact,norm_kennedy_real,ci95"
)
FIT_CSV_HEADER = "c_linear,c_db,dc_per_bin,dark_rate_hz,residual"
HIST_CSV_HEADER = "bit,n,count"
POINTS_CSV_HEADER = "m,error"

_MAX_SEED = (1 << 64) - 1


@dataclass
class RunConfig:
    """The ten config-file keys and their defaults (demonstration setup)."""

    m: float = 1.3
    extinction_db: float = 30.969100130080564  # linear ratio 1250
    dark_rate_hz: float = 300.0
    efficiency: float = 0.65
    dead_time_ns: float = 10.0
    rep_rate_khz: float = 100.0
    n_bits: int = 1_000_000
    seed: int = 1
    guard_fraction: float = 0.0
    photon_reference: str = "detector_referred"


_CONFIG_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CONFIG_CASTS = {"float": float, "int": int, "str": str}


def _load_config(path: Path) -> dict:
    """Parse a flat ``key = value`` config file; unknown keys are rejected."""
    values: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_TYPES:
            raise ValueError(f"{path}: line {line_no}: unknown config key {key!r}")
        cast = _CONFIG_CASTS[_CONFIG_TYPES[key]]
        try:
            values[key] = cast(value)
        except ValueError as exc:
            raise ValueError(f"{path}: line {line_no}: bad value for {key!r}: {value!r}") from exc
    return values


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults < config file < explicit flags."""
    cfg = RunConfig()
    if args.config is not None:
        for key, value in _load_config(args.config).items():
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            setattr(cfg, f.name, flag_value)
    if not (0 <= cfg.seed <= _MAX_SEED):
        raise ValueError(f"seed must fit in 64 bits, got {cfg.seed}")
    if cfg.photon_reference not in PHOTON_REFERENCES:
        raise ValueError(
            f"photon_reference must be one of {PHOTON_REFERENCES}, got {cfg.photon_reference!r}"
        )
    return cfg


def _receiver(cfg: RunConfig, args: argparse.Namespace, n_bits: int | None = None) -> ReceiverModel:
    detector = DetectorModel(
        efficiency=cfg.efficiency,
        dark_rate_hz=cfg.dark_rate_hz,
        dead_time_ps=round(cfg.dead_time_ns * 1000.0),
        timing_resolution_ps=args.timing_resolution_ps,
    )
    displacement = DisplacementModel(
        transmissivity=args.transmissivity,
        extinction_linear=extinction_db_to_linear(cfg.extinction_db),
    )
    timing = TimingConfig(
        rep_rate_hz=cfg.rep_rate_khz * 1000.0,
        n_bits=cfg.n_bits if n_bits is None else n_bits,
        start_offset_ps=args.start_offset_ps,
    )
    return ReceiverModel(
        detector=detector,
        displacement=displacement,
        timing=timing,
        photon_reference=cfg.photon_reference,
    )


def parse_grid(text: str) -> np.ndarray:
    """Grid argument: ``start:stop:step`` (inclusive) or comma-separated values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"grid step must be > 0, got {step}")
        if stop < start:
            raise ValueError(f"grid stop {stop} is below start {start}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = start + step * np.arange(n)
    else:
        grid = np.array([float(p) for p in text.split(",") if p.strip() != ""])
    if grid.size == 0:
        raise ValueError("grid is empty")
    if np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise ValueError("grid values must be finite and >= 0")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("grid values must be strictly increasing")
    return grid


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _bounds_csv(curve: BoundsCurve) -> str:
    lines = [BOUNDS_CSV_HEADER]
    for i in range(len(curve)):
        lines.append(
            ",".join(
                fmt(col[i])
                for col in (
                    curve.m,
                    curve.e_kennedy_ideal,
                    curve.e_sql,
                    curve.e_helstrom,
                    curve.e_kennedy_real,
                    curve.norm_kennedy_ideal,
                    curve.norm_helstrom,
                    curve.norm_kennedy_real,
                )
            )
        )
    return "\n".join(lines) + "\n"


def cmd_bounds(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    receiver = _receiver(cfg, args, n_bits=1)
    grid = parse_grid(args.grid)
    curve = compute_bounds_curve(grid, receiver.imperfections())
    _emit(_bounds_csv(curve), args.out)
    return 0


def _run_point(
    m: float, receiver: ReceiverModel, pattern: str, guard_fraction: float, seed: int
) -> tcspc.ErrorStats:
    """One simulate -> bin -> decode -> compare pass (shared seed scheme)."""
    signal = SignalParams(m)
    bits = generate_bits(receiver.timing.n_bits, pattern, derive_seed(seed, 0))
    events = simulate_event_stream(bits, signal, receiver, derive_seed(seed, 1))
    counts = tcspc.bin_events(events, receiver.timing, guard_fraction)
    rx = tcspc.decode(counts)
    return tcspc.compare(bits, rx)


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    receiver = _receiver(cfg, args)
    signal = SignalParams(cfg.m)
    bits = generate_bits(receiver.timing.n_bits, args.pattern, derive_seed(cfg.seed, 0))
    events = simulate_event_stream(bits, signal, receiver, derive_seed(cfg.seed, 1))
    counts = tcspc.bin_events(events, receiver.timing, cfg.guard_fraction)
    stats = tcspc.compare(bits, tcspc.decode(counts))
    if args.emit_events is not None:
        prefix = str(args.emit_events)
        tcspc.write_event_file(events, prefix + ".events.txt")
        tcspc.write_bit_file(bits, prefix + ".bits.txt")
    _emit(tcspc.STATS_CSV_HEADER + "\n" + stats.csv_row() + "\n", args.out)
    return 0


def cmd_decode(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    events = tcspc.parse_event_file(args.events)
    bits = tcspc.parse_bit_file(args.bits)
    timing = TimingConfig(
        rep_rate_hz=cfg.rep_rate_khz * 1000.0,
        n_bits=bits.size,
        start_offset_ps=args.start_offset_ps,
    )
    counts = tcspc.bin_events(events, timing, cfg.guard_fraction)
    stats = tcspc.compare(bits, tcspc.decode(counts))
    _emit(tcspc.STATS_CSV_HEADER + "\n" + stats.csv_row() + "\n", args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    receiver = _receiver(cfg, args)
    grid = parse_grid(args.grid)
    imperfections = receiver.imperfections()
    lines = [SWEEP_CSV_HEADER]
    for i, m in enumerate(grid.tolist()):
        stats = _run_point(m, receiver, args.pattern, cfg.guard_fraction, derive_seed(cfg.seed, i))
        exact = exact_error_rate(SignalParams(m), receiver)
        closed = error_kennedy_real(m, imperfections)
        sql = error_sql(m)
        lines.append(
            ",".join(
                [
                    fmt(m),
                    fmt(stats.e_total),
                    fmt(exact),
                    fmt(closed),
                    fmt(sql),
                    fmt(stats.e_total / sql),
                    fmt(exact / sql),
                    fmt(closed / sql),
                    fmt(stats.ci95_total),
                ]
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _load_points(path: Path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln.strip() != ""]
    if not lines or lines[0].strip() != POINTS_CSV_HEADER:
        raise ValueError(f"{path}: expected header {POINTS_CSV_HEADER!r}")
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}: line {line_no}: expected 'm,error', got {line!r}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ValueError(f"{path}: line {line_no}: bad number in {line!r}") from exc
    return np.array(rows, dtype=np.float64)


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    points = _load_points(args.points)
    result = fit_imperfections(points)
    c = result.imperfections.extinction_linear
    dc = result.imperfections.dark_prob_per_bin
    bin_seconds = TimingConfig(rep_rate_hz=cfg.rep_rate_khz * 1000.0, n_bits=1).bin_duration_ps / PICOSECONDS_PER_SECOND
    row = ",".join(
        [fmt(c), fmt(10.0 * math.log10(c)), fmt(dc), fmt(dc / bin_seconds), fmt(result.residual)]
    )
    _emit(FIT_CSV_HEADER + "\n" + row + "\n", args.out)
    return 0


def cmd_hist(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    receiver = _receiver(cfg, args)
    signal = SignalParams(cfg.m)
    bits = generate_bits(receiver.timing.n_bits, args.pattern, derive_seed(cfg.seed, 0))
    counts = simulate_bin_counts(bits, signal, receiver, derive_seed(cfg.seed, 1))
    hist = tcspc.photocount_histogram(counts, bits)
    lines = [HIST_CSV_HEADER]
    for bit, freq in ((0, hist.bit0), (1, hist.bit1)):
        for n in sorted(freq):
            lines.append(f"{bit},{n},{freq[n]}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _add_common(parser: argparse.ArgumentParser, with_model: bool = True) -> None:
    parser.add_argument("--config", type=Path, default=None, help="flat key=value config file")
    parser.add_argument("--out", type=Path, default=None, help="output CSV path (default stdout)")
    parser.add_argument("--seed", type=int, default=None, help="64-bit master seed")
    if with_model:
        parser.add_argument("--m", type=float, default=None, help="mean photons per signal bin")
        parser.add_argument("--extinction-db", type=float, default=None, dest="extinction_db",
                            help="interference extinction in dB")
        parser.add_argument("--dark-rate-hz", type=float, default=None, dest="dark_rate_hz")
        parser.add_argument("--efficiency", type=float, default=None,
                            help="system detection efficiency (source-referred runs)")
        parser.add_argument("--dead-time-ns", type=float, default=None, dest="dead_time_ns")
        parser.add_argument("--rep-rate-khz", type=float, default=None, dest="rep_rate_khz")
        parser.add_argument("--n-bits", type=int, default=None, dest="n_bits")
        parser.add_argument("--guard-fraction", type=float, default=None, dest="guard_fraction",
                            help="fraction of each bin edge to discard when binning")
        parser.add_argument("--photon-reference", choices=PHOTON_REFERENCES, default=None,
                            dest="photon_reference")
        parser.add_argument("--transmissivity", type=float, default=0.99,
                            help="displacement beam-splitter signal transmission")
        parser.add_argument("--timing-resolution-ps", type=int, default=25,
                            dest="timing_resolution_ps")
        parser.add_argument("--start-offset-ps", type=int, default=0, dest="start_offset_ps")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kennedyrx",
        description="Kennedy-receiver error bounds and event-level Monte-Carlo simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="closed-form error curves over a grid of m")
    _add_common(p)
    p.add_argument("--grid", required=True, help="m grid: start:stop:step or v1,v2,...")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="event-level simulation of one acquisition")
    _add_common(p)
    p.add_argument("--pattern", choices=PATTERNS, default="alternating_meander")
    p.add_argument("--emit-events", type=Path, default=None, metavar="PREFIX",
                   help="also write PREFIX.events.txt and PREFIX.bits.txt")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decode", help="decode an event file against a bit file")
    _add_common(p)
    p.add_argument("--events", type=Path, required=True, help="event file (timestamp_ps)")
    p.add_argument("--bits", type=Path, required=True, help="transmitted bit file")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="Monte-Carlo error rate across a grid of m")
    _add_common(p)
    p.add_argument("--grid", required=True, help="m grid: start:stop:step or v1,v2,...")
    p.add_argument("--pattern", choices=PATTERNS, default="pseudorandom")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit extinction and dark counts to measured points")
    _add_common(p)
    p.add_argument("--points", type=Path, required=True, help="CSV of m,error points")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("hist", help="photocount histograms per transmitted bit")
    _add_common(p)
    p.add_argument("--pattern", choices=PATTERNS, default="alternating_meander")
    p.set_defaults(func=cmd_hist)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
