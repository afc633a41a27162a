"""kennedyrx: Kennedy-receiver error bounds and event-level simulation.

Discrimination of binary phase-shift-keyed coherent states with a
displacement + single-photon-detection receiver: closed-form error rates
(ideal receiver, shot-noise limit, Helstrom bound, imperfect receiver),
an exact per-bin click model, a seeded event-level Monte-Carlo simulator
producing time-tag records, and the decoding pipeline that turns time
tags back into bits and error statistics.
"""

from .bounds import (
    BoundsCurve,
    FitResult,
    FitUnderdeterminedError,
    ImperfectionParams,
    SignalParams,
    compute_bounds_curve,
    error_helstrom,
    error_kennedy_ideal,
    error_kennedy_real,
    error_sql,
    extinction_db_to_linear,
    fit_imperfections,
    poisson_pmf,
)
from .kernels import BACKEND, COMPILED_AVAILABLE
from .model import (
    DetectorModel,
    DisplacementModel,
    ReceiverModel,
    TimingConfig,
    click_probability,
    default_receiver,
    exact_error_rate,
    mean_counts,
    sub_sql_window,
)
from .rng import Xoshiro256StarStar, derive_seed
from .sim import (
    BitSequence,
    SimulationResult,
    apply_dead_time,
    generate_bits,
    run_simulation,
    simulate_bin_counts,
    simulate_event_stream,
)
from .tcspc import (
    CountHistogram,
    ErrorStats,
    EventFileError,
    MalformedLineError,
    MissingHeaderError,
    NonMonotoneTimestampError,
    bin_events,
    compare,
    decode,
    parse_bit_file,
    parse_event_file,
    photocount_histogram,
    write_bit_file,
    write_event_file,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "COMPILED_AVAILABLE",
    "BitSequence",
    "BoundsCurve",
    "CountHistogram",
    "DetectorModel",
    "DisplacementModel",
    "ErrorStats",
    "EventFileError",
    "FitResult",
    "FitUnderdeterminedError",
    "ImperfectionParams",
    "MalformedLineError",
    "MissingHeaderError",
    "NonMonotoneTimestampError",
    "ReceiverModel",
    "SignalParams",
    "SimulationResult",
    "TimingConfig",
    "Xoshiro256StarStar",
    "apply_dead_time",
    "bin_events",
    "click_probability",
    "compare",
    "compute_bounds_curve",
    "decode",
    "default_receiver",
    "derive_seed",
    "error_helstrom",
    "error_kennedy_ideal",
    "error_kennedy_real",
    "error_sql",
    "exact_error_rate",
    "extinction_db_to_linear",
    "fit_imperfections",
    "generate_bits",
    "mean_counts",
    "parse_bit_file",
    "parse_event_file",
    "photocount_histogram",
    "poisson_pmf",
    "run_simulation",
    "simulate_bin_counts",
    "simulate_event_stream",
    "sub_sql_window",
    "write_bit_file",
    "write_event_file",
]
