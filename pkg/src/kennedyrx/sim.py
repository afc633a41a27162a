"""Seeded event-level Monte-Carlo generation of the receiver experiment.

The generator mirrors the hardware chain: a bit stream drives the phase
modulator, each half-period bin sees an independent Poisson photocount
whose mean follows the transmitted bit, and every photon becomes a
time-tag quantized to the electronics resolution, thinned by the detector
dead time.  Arrival times are uniform within the bin (CW source under
rectangular phase modulation = homogeneous Poisson process per bin).

Everything is a pure function of (inputs, seed).  Sub-seeds derive from
the seed as documented in :mod:`kennedyrx.rng`, so per-bin generation is
order-independent and the two kernel backends produce identical bytes.
Drawing counts and positions from separate per-bin sub-streams makes
``simulate_bin_counts`` and binning of ``simulate_event_stream`` agree
exactly (before dead time) for the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .bounds import SignalParams
from .model import ReceiverModel, mean_counts
from .rng import derive_seed, pseudorandom_bits

ALTERNATING_MEANDER = "alternating_meander"
PSEUDORANDOM = "pseudorandom"
PATTERNS = (ALTERNATING_MEANDER, PSEUDORANDOM)


@dataclass(frozen=True)
class BitSequence:
    """Transmitted bit stream plus the pattern that produced it."""

    bits: np.ndarray
    pattern: str
    seed: int | None = None

    def __post_init__(self):
        self.bits.setflags(write=False)

    def __len__(self) -> int:
        return int(self.bits.size)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.bits, dtype=dtype)


def _bits_array(bits) -> np.ndarray:
    arr = np.asarray(getattr(bits, "bits", bits), dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bit values must be 0 or 1")
    return arr


def generate_bits(n: int, pattern: str = ALTERNATING_MEANDER, seed: int = 0) -> BitSequence:
    """n transmitted bits: 1,0,1,0,... meander or seeded unbiased random."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if pattern == ALTERNATING_MEANDER:
        bits = np.zeros(n, dtype=np.uint8)
        bits[0::2] = 1  # bit 1 occupies even-indexed bins
        return BitSequence(bits=bits, pattern=pattern, seed=None)
    if pattern == PSEUDORANDOM:
        return BitSequence(bits=pseudorandom_bits(seed, n), pattern=pattern, seed=seed)
    raise ValueError(f"unknown pattern {pattern!r}; expected one of {PATTERNS}")


def simulate_bin_counts(bits, s: SignalParams, r: ReceiverModel, seed: int) -> np.ndarray:
    """Independent Poisson photocount per bin, mean set by the bin's bit."""
    arr = _bits_array(bits)
    lam0 = mean_counts(0, s, r)
    lam1 = mean_counts(1, s, r)
    return kernels.sample_bin_counts(arr, lam0, lam1, seed)


def simulate_event_stream(bits, s: SignalParams, r: ReceiverModel, seed: int) -> np.ndarray:
    """Dead-time-filtered, sorted, quantized photon timestamps for the run.

    Timestamps are absolute picoseconds in
    [start_offset, start_offset + n_bits * bin_duration), multiples of the
    timing resolution; the bin duration must be divisible by the
    resolution so bin-relative quantization stays on the absolute grid.
    """
    arr = _bits_array(bits)
    timing = r.timing
    t_bin = timing.bin_duration_ps
    res = r.detector.timing_resolution_ps
    if t_bin % res != 0:
        raise ValueError(
            f"bin duration {t_bin} ps is not a multiple of the timing resolution {res} ps"
        )
    counts = simulate_bin_counts(arr, s, r, seed)
    events = kernels.place_bin_events(counts, seed, t_bin, res, timing.start_offset_ps)
    events.sort()
    return apply_dead_time(events, r.detector.dead_time_ps)


def apply_dead_time(events, dead_time_ps: int) -> np.ndarray:
    """Non-paralyzable dead time: drop events closer than dead_time_ps to
    the last kept one.  The first event is always kept; idempotent."""
    ts = np.ascontiguousarray(events, dtype=np.int64)
    if dead_time_ps < 0:
        raise ValueError(f"dead_time_ps must be >= 0, got {dead_time_ps}")
    if ts.size > 1 and np.any(np.diff(ts) < 0):
        raise ValueError("event list must be sorted non-decreasing")
    return kernels.filter_dead_time(ts, dead_time_ps)


@dataclass(frozen=True)
class SimulationResult:
    """One simulated acquisition: inputs, events, per-bin counts, seed."""

    tx_bits: BitSequence
    events: np.ndarray
    bin_counts: np.ndarray
    seed: int
    signal: SignalParams
    receiver: ReceiverModel


def run_simulation(
    s: SignalParams,
    r: ReceiverModel,
    pattern: str = ALTERNATING_MEANDER,
    seed: int = 0,
) -> SimulationResult:
    """Full generation pass: bits, event stream, and per-bin event counts.

    Bit generation uses sub-seed derive_seed(seed, 0) and photon generation
    derive_seed(seed, 1).  ``bin_counts`` are counted from the emitted
    (dead-time-filtered) events.
    """
    timing = r.timing
    bits = generate_bits(timing.n_bits, pattern, derive_seed(seed, 0))
    events = simulate_event_stream(bits, s, r, derive_seed(seed, 1))
    rel = events - timing.start_offset_ps
    bin_counts = np.bincount(rel // timing.bin_duration_ps, minlength=timing.n_bits)
    return SimulationResult(
        tx_bits=bits,
        events=events,
        bin_counts=bin_counts.astype(np.int64),
        seed=seed,
        signal=s,
        receiver=r,
    )
