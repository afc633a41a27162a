"""Backend dispatch for the hot simulation kernels.

The compiled extension (``kennedyrx._kernels``, Cython) is preferred when
importable; otherwise the pure NumPy implementation is used.  Both produce
byte-identical output for the same seed.  Set ``KENNEDYRX_BACKEND=python``
or ``=cython`` to force a choice (useful for the benchmark in
``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built; fall back to NumPy
    _compiled = None

COMPILED_AVAILABLE = _compiled is not None

_env = os.environ.get("KENNEDYRX_BACKEND", "").strip().lower()
if _env == "python":
    _active = _kernels_py
    BACKEND = "python"
elif _env == "cython":
    if _compiled is None:
        raise ImportError("KENNEDYRX_BACKEND=cython but the compiled extension is not available")
    _active = _compiled
    BACKEND = "cython"
elif _env == "":
    _active = _compiled if COMPILED_AVAILABLE else _kernels_py
    BACKEND = "cython" if COMPILED_AVAILABLE else "python"
else:
    raise ImportError(f"unknown KENNEDYRX_BACKEND value: {_env!r}")

# Poisson sampling thresholds: plain inversion below mean 30; above, the
# mean is split into chunks of at most 16 so the chunk's exp(-mu) keeps
# ample headroom above double underflow and the walk stays short.
INVERSION_MAX_MEAN = 30.0
CHUNK_TARGET_MEAN = 16.0


def get_backend(name: str | None = None):
    """Kernel module for ``name`` ('cython' | 'python'); active one if None."""
    if name is None:
        return _active
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ValueError("compiled backend not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def inversion_chunks(mean: float) -> tuple[int, float, float]:
    """(q, chunk mean, exp(-chunk mean)) for drawing Poisson(mean) as q chunks."""
    if mean < 0 or not math.isfinite(mean):
        raise ValueError(f"Poisson mean must be finite and nonnegative, got {mean}")
    if mean == 0.0:
        return 0, 0.0, 1.0
    if mean < INVERSION_MAX_MEAN:
        return 1, mean, math.exp(-mean)
    q = math.ceil(mean / CHUNK_TARGET_MEAN)
    mu = mean / q
    return q, mu, math.exp(-mu)


def sample_bin_counts(bits: np.ndarray, mean0: float, mean1: float, seed: int,
                      backend: str | None = None) -> np.ndarray:
    """Poisson photocount per bin: mean0 for tx-0 bins, mean1 for tx-1 bins."""
    q0, mu0, p0 = inversion_chunks(mean0)
    q1, mu1, p1 = inversion_chunks(mean1)
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    return get_backend(backend).poisson_counts(bits, seed, q0, mu0, p0, q1, mu1, p1)


def place_bin_events(counts: np.ndarray, seed: int, bin_duration_ps: int,
                     resolution_ps: int, start_offset_ps: int = 0,
                     backend: str | None = None) -> np.ndarray:
    """Uniform timestamps for each bin's counts, quantized to the timing grid."""
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    return get_backend(backend).place_events(
        counts, seed, int(bin_duration_ps), int(resolution_ps), int(start_offset_ps)
    )


def filter_dead_time(timestamps: np.ndarray, dead_time_ps: int,
                     backend: str | None = None) -> np.ndarray:
    """Keep each event only if it trails the last kept event by >= dead time."""
    timestamps = np.ascontiguousarray(timestamps, dtype=np.int64)
    return get_backend(backend).dead_time_filter(timestamps, int(dead_time_ps))
