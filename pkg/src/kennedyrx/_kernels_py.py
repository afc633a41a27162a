"""Pure NumPy event-generation kernels.

Fallback backend used when the compiled extension is unavailable (or when
forced via ``KENNEDYRX_BACKEND=python``).  Every routine consumes exactly
the same uniform stream as its compiled twin in ``_kernels.pyx`` and is
therefore byte-identical to it; the vectorized code below only ever
advances a lane's generator when the scalar algorithm would, restoring the
previous state of retired lanes after each masked step.

Sampling scheme (shared contract, see also :mod:`kennedyrx.rng`):

* bin k owns sub-seed ``b_k = derive_seed(seed, k)``; photocounts come
  from the xoshiro256** stream seeded ``derive_seed(b_k, 0)``, event
  positions from the stream seeded ``derive_seed(b_k, 1)``;
* a Poisson variate of mean ``mu`` is drawn as ``q`` independent
  inversion-by-sequential-search variates of mean ``mu / q`` (one uniform
  each); ``q = 1`` for ``mu < 30``, else the smallest integer bringing the
  chunk mean to <= 16.  Sums of independent Poisson variates are Poisson,
  so the split is exact, and the walk needs no per-draw transcendentals:
  the chunk's ``exp(-mu/q)`` is precomputed once by the dispatcher;
* an event at uniform u in bin k gets timestamp
  ``offset + k*T + ((int64)(u*T) - (int64)(u*T) % resolution)``.
"""

from __future__ import annotations

import numpy as np

from .rng import U01_SCALE, derive_seed_vec, mix64_vec

_MASK64 = (1 << 64) - 1
# j * GOLDEN mod 2**64, precomputed so no numpy scalar op has to wrap
_JG = [np.uint64((j * 0x9E3779B97F4A7C15) & _MASK64) for j in range(5)]

#
# Vectorized xoshiro256** over independent per-bin lanes.  State is a
# (4, n) uint64 array; _next_u64_at advances only the lanes in ``idx``.
#


def _init_states(stream_seeds: np.ndarray) -> np.ndarray:
    s = np.empty((4, stream_seeds.shape[0]), dtype=np.uint64)
    for j in range(4):
        s[j] = mix64_vec(stream_seeds + _JG[j + 1])
    return s


def _rotl(x: np.ndarray, k: int) -> np.ndarray:
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


def _next_u64_at(state: np.ndarray, idx: np.ndarray) -> np.ndarray:
    s0 = state[0, idx]
    s1 = state[1, idx]
    s2 = state[2, idx]
    s3 = state[3, idx]
    out = _rotl(s1 * np.uint64(5), 7) * np.uint64(9)
    t = s1 << np.uint64(17)
    s2 = s2 ^ s0
    s3 = s3 ^ s1
    s1 = s1 ^ s2
    s0 = s0 ^ s3
    s2 = s2 ^ t
    s3 = _rotl(s3, 45)
    state[0, idx] = s0
    state[1, idx] = s1
    state[2, idx] = s2
    state[3, idx] = s3
    return out


def _next_u01_at(state: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return (_next_u64_at(state, idx) >> np.uint64(11)).astype(np.float64) * U01_SCALE


def poisson_counts(
    bits: np.ndarray,
    seed: int,
    q0: int,
    mu0: float,
    p0_0: float,
    q1: int,
    mu1: float,
    p0_1: float,
) -> np.ndarray:
    """Per-bin Poisson photocounts; chunk parameters precomputed by the caller."""
    n = bits.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    if n == 0 or (q0 == 0 and q1 == 0):
        return counts
    lanes = np.arange(n, dtype=np.uint64)
    b = derive_seed_vec(seed, lanes)
    state = _init_states(mix64_vec(b + _JG[1]))  # count stream: derive_seed(b, 0)

    ones = bits != 0
    q = np.where(ones, np.int64(q1), np.int64(q0))
    mu = np.where(ones, mu1, mu0)
    p0 = np.where(ones, p0_1, p0_0)

    for chunk in range(int(q.max())):
        act = np.nonzero(q > chunk)[0]
        u = _next_u01_at(state, act)
        # inversion by sequential search on the chunk's single uniform
        k = np.zeros(act.size, dtype=np.float64)
        p = p0[act].copy()
        cdf = p.copy()
        mu_act = mu[act]
        live = np.nonzero(u > cdf)[0]
        while live.size:
            k[live] += 1.0
            p[live] *= mu_act[live] / k[live]
            cdf[live] += p[live]
            live = live[(u[live] > cdf[live]) & (k[live] < 1024.0)]
        counts[act] += k.astype(np.int64)
    return counts


def place_events(
    counts: np.ndarray,
    seed: int,
    bin_duration_ps: int,
    resolution_ps: int,
    start_offset_ps: int,
) -> np.ndarray:
    """Timestamps for ``counts[k]`` events per bin, in bin/draw order (unsorted)."""
    n = counts.shape[0]
    total = int(counts.sum())
    out = np.empty(total, dtype=np.int64)
    if total == 0:
        return out
    starts = np.zeros(n, dtype=np.int64)
    np.cumsum(counts[:-1], out=starts[1:])

    lanes = np.arange(n, dtype=np.uint64)
    b = derive_seed_vec(seed, lanes)
    state = _init_states(mix64_vec(b + _JG[2]))  # derive_seed(b, 1)

    base = start_offset_ps + np.arange(n, dtype=np.int64) * np.int64(bin_duration_ps)
    dur = float(bin_duration_ps)
    res = np.int64(resolution_ps)
    for j in range(int(counts.max())):
        act = np.nonzero(counts > j)[0]
        u = _next_u01_at(state, act)
        off = (u * dur).astype(np.int64)
        off -= off % res
        out[starts[act] + j] = base[act] + off
    return out


def dead_time_filter(timestamps: np.ndarray, dead_time_ps: int) -> np.ndarray:
    """Non-paralyzable dead-time filter over a sorted timestamp array."""
    if dead_time_ps <= 0 or timestamps.shape[0] == 0:
        return timestamps.copy()
    kept = []
    last = None
    for t in timestamps.tolist():
        if last is None or t - last >= dead_time_ps:
            kept.append(t)
            last = t
    return np.array(kept, dtype=np.int64)
