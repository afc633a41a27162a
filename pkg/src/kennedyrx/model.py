"""Physical parameterization of the receiver chain and exact click rates.

The receiver is a displacement stage (highly transmissive beam splitter
interfering the signal with a mode-matched local oscillator) followed by a
single-photon detector read out by time-tagging electronics.  Per signal
bin the detector sees a Poisson photocount whose mean depends on the
transmitted bit:

    lambda_1 = g * 4m + dc          (bright bin, constructive interference)
    lambda_0 = g * 4m / c + dc      (nulled bin, residual extinction leak)

with dc the mean dark counts per bin (dark rate x bin duration), c the
linear interference extinction and g the photon-reference gain: g = 1 in
the detector-referred convention (m already counts detected photons, the
default) or g = efficiency * transmissivity when m is source-referred.

The exact click/no-click error rate that the event simulator converges to
is 0.5 * exp(-lambda_1) + 0.5 * (1 - exp(-lambda_0)).  It differs from the
fitted closed form :func:`kennedyrx.bounds.error_kennedy_real` only through
the dark-count term in the bright exponent, a gap of at most 0.5 * dc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import ImperfectionParams, SignalParams, _mean, error_sql

DETECTOR_REFERRED = "detector_referred"
SOURCE_REFERRED = "source_referred"
PHOTON_REFERENCES = (DETECTOR_REFERRED, SOURCE_REFERRED)

PICOSECONDS_PER_SECOND = 1e12


@dataclass(frozen=True)
class DetectorModel:
    """Single-photon detector: efficiency, dark rate, dead time, time-tag grid."""

    efficiency: float = 0.65
    dark_rate_hz: float = 300.0
    dead_time_ps: int = 10_000
    timing_resolution_ps: int = 25

    def __post_init__(self):
        if not (0.0 <= self.efficiency <= 1.0):
            raise ValueError(f"efficiency must be in [0, 1], got {self.efficiency!r}")
        if not (math.isfinite(self.dark_rate_hz) and self.dark_rate_hz >= 0):
            raise ValueError(f"dark_rate_hz must be >= 0, got {self.dark_rate_hz!r}")
        if int(self.dead_time_ps) != self.dead_time_ps or self.dead_time_ps < 0:
            raise ValueError(f"dead_time_ps must be a nonnegative integer, got {self.dead_time_ps!r}")
        if int(self.timing_resolution_ps) != self.timing_resolution_ps or self.timing_resolution_ps < 1:
            raise ValueError(
                f"timing_resolution_ps must be a positive integer, got {self.timing_resolution_ps!r}"
            )


@dataclass(frozen=True)
class DisplacementModel:
    """Displacement stage: beam-splitter transmissivity and extinction ratio."""

    transmissivity: float = 0.99
    extinction_linear: float = 1250.0

    def __post_init__(self):
        if not (0.0 < self.transmissivity <= 1.0):
            raise ValueError(f"transmissivity must be in (0, 1], got {self.transmissivity!r}")
        if not (math.isfinite(self.extinction_linear) and self.extinction_linear >= 1.0):
            raise ValueError(f"extinction_linear must be >= 1, got {self.extinction_linear!r}")


@dataclass(frozen=True)
class TimingConfig:
    """Modulation timing: square-wave repetition rate and record length.

    One signal bin is half a modulation period; at the default 100 kHz the
    bin lasts 5 us = 5e6 ps.
    """

    rep_rate_hz: float = 100_000.0
    n_bits: int = 1_000_000
    start_offset_ps: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.rep_rate_hz) and self.rep_rate_hz > 0):
            raise ValueError(f"rep_rate_hz must be > 0, got {self.rep_rate_hz!r}")
        if int(self.n_bits) != self.n_bits or self.n_bits < 1:
            raise ValueError(f"n_bits must be a positive integer, got {self.n_bits!r}")
        if int(self.start_offset_ps) != self.start_offset_ps or self.start_offset_ps < 0:
            raise ValueError(f"start_offset_ps must be a nonnegative integer, got {self.start_offset_ps!r}")

    @property
    def bin_duration_ps(self) -> int:
        """Half the modulation period, in ps."""
        return round(PICOSECONDS_PER_SECOND / (2.0 * self.rep_rate_hz))

    @property
    def span_ps(self) -> int:
        """Total record length n_bits * bin_duration_ps."""
        return self.n_bits * self.bin_duration_ps


@dataclass(frozen=True)
class ReceiverModel:
    """Complete receiver: detector + displacement + timing + m convention."""

    detector: DetectorModel = DetectorModel()
    displacement: DisplacementModel = DisplacementModel()
    timing: TimingConfig = TimingConfig()
    photon_reference: str = DETECTOR_REFERRED

    def __post_init__(self):
        if self.photon_reference not in PHOTON_REFERENCES:
            raise ValueError(
                f"photon_reference must be one of {PHOTON_REFERENCES}, got {self.photon_reference!r}"
            )

    @property
    def gain(self) -> float:
        """Scale from the declared m to detected mean photons."""
        if self.photon_reference == DETECTOR_REFERRED:
            return 1.0
        return self.detector.efficiency * self.displacement.transmissivity

    @property
    def dark_prob_per_bin(self) -> float:
        """Mean dark counts per signal bin: dark rate x bin duration."""
        return self.detector.dark_rate_hz * self.timing.bin_duration_ps / PICOSECONDS_PER_SECOND

    def imperfections(self) -> ImperfectionParams:
        """The (c, dc) pair seen by the closed-form error formulas."""
        return ImperfectionParams(
            extinction_linear=self.displacement.extinction_linear,
            dark_prob_per_bin=self.dark_prob_per_bin,
        )


def default_receiver(n_bits: int = 1_000_000, **overrides) -> ReceiverModel:
    """Receiver with the demonstration-setup defaults (see field defaults)."""
    timing = TimingConfig(n_bits=n_bits)
    return ReceiverModel(timing=timing, **overrides)


def mean_counts(bit: int, s: SignalParams, r: ReceiverModel) -> float:
    """Mean photocount of a bin transmitting ``bit``."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    m_eff = _mean(s) * r.gain
    dc = r.dark_prob_per_bin
    if bit == 1:
        return 4.0 * m_eff + dc
    return 4.0 * m_eff / r.displacement.extinction_linear + dc


def click_probability(mean: float) -> float:
    """P(at least one count) = 1 - exp(-mean) for a Poisson bin."""
    if not (math.isfinite(mean) and mean >= 0):
        raise ValueError(f"mean must be finite and >= 0, got {mean!r}")
    return -math.expm1(-mean)


def exact_error_rate(s, r: ReceiverModel) -> float | np.ndarray:
    """Exact click/no-click error rate the event simulator converges to.

    0.5 * P(no click | bright) + 0.5 * P(click | nulled); accepts a scalar
    or an array of m.
    """
    m_eff = _mean(s) * r.gain
    dc = r.dark_prob_per_bin
    lam1 = 4.0 * m_eff + dc
    lam0 = 4.0 * m_eff / r.displacement.extinction_linear + dc
    return 0.5 * np.exp(-lam1) + 0.5 * (-np.expm1(-lam0))


_WINDOW_BRACKET = (1e-3, 10.0)
_WINDOW_SCAN_POINTS = 4001


def _bisect(fn, lo: float, hi: float, iterations: int = 200) -> float:
    """Root of fn on [lo, hi] (fn(lo), fn(hi) of opposite sign) by bisection."""
    flo = fn(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fmid = fn(mid)
        if (flo > 0) == (fmid > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sub_sql_window(r: ReceiverModel) -> tuple[float, float] | None:
    """Interval of m where the exact error rate beats the shot-noise limit.

    Scans m in (1e-3, 10), bisects the crossings of
    exact_error_rate(m) = e_sql(m), and returns (m_low, m_high); m_high is
    the bracket end when the receiver stays below the SQL up to m = 10.
    Returns None when no sub-SQL region exists (e.g. extinction below the
    ~20 dB threshold).
    """
    lo, hi = _WINDOW_BRACKET
    grid = np.linspace(lo, hi, _WINDOW_SCAN_POINTS)
    diff = exact_error_rate(grid, r) - error_sql(grid)

    def f(m: float) -> float:
        return float(exact_error_rate(float(m), r) - error_sql(float(m)))

    below = diff <= 0
    if not below.any():
        return None
    first = int(np.argmax(below))
    if first == 0:
        m_low = lo  # already sub-SQL at the bracket start
    else:
        m_low = _bisect(f, float(grid[first - 1]), float(grid[first]))
    above_after = (~below) & (np.arange(grid.size) > first)
    if not above_after.any():
        return (m_low, hi)
    nxt = int(np.argmax(above_after))
    m_high = _bisect(f, float(grid[nxt - 1]), float(grid[nxt]))
    return (m_low, m_high)
