# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event-generation kernels.

Scalar C implementations of the routines in ``_kernels_py``; the two
backends consume identical uniform streams and must stay byte-identical
(enforced by the backend-equivalence tests).  See ``_kernels_py`` and
``rng`` for the stream-derivation and sampling contract.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t MIX_A = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t MIX_B = <uint64_t>0x94D049BB133111EB
cdef double U01_SCALE = 1.0 / 9007199254740992.0  # 2**-53


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX_A
    z = (z ^ (z >> 27)) * MIX_B
    return z ^ (z >> 31)


cdef inline uint64_t _derive(uint64_t parent, uint64_t index) noexcept nogil:
    return _mix64(parent + (index + 1) * GOLDEN)


cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline void _seed_state(uint64_t stream_seed, uint64_t* s) noexcept nogil:
    s[0] = _mix64(stream_seed + GOLDEN)
    s[1] = _mix64(stream_seed + 2 * GOLDEN)
    s[2] = _mix64(stream_seed + 3 * GOLDEN)
    s[3] = _mix64(stream_seed + 4 * GOLDEN)


cdef inline uint64_t _next_u64(uint64_t* s) noexcept nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


cdef inline double _next_u01(uint64_t* s) noexcept nogil:
    return <double>(_next_u64(s) >> 11) * U01_SCALE


cdef inline int64_t _poisson_inv(uint64_t* s, int q, double mu, double p0) noexcept nogil:
    # q chunk draws, each inversion-by-sequential-search on one uniform
    cdef int64_t total = 0, k
    cdef double u, p, cdf
    cdef int chunk
    for chunk in range(q):
        u = _next_u01(s)
        k = 0
        p = p0
        cdf = p
        while u > cdf and k < 1024:
            k += 1
            p *= mu / k
            cdf += p
        total += k
    return total


def poisson_counts(const unsigned char[::1] bits, seed,
                   int q0, double mu0, double p0_0,
                   int q1, double mu1, double p0_1):
    """Per-bin Poisson photocounts; chunk parameters precomputed by the caller."""
    cdef Py_ssize_t n = bits.shape[0]
    out = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef uint64_t base_seed = <uint64_t>seed
    cdef uint64_t b, s[4]
    cdef Py_ssize_t i
    if n == 0 or (q0 == 0 and q1 == 0):
        return out
    with nogil:
        for i in range(n):
            b = _derive(base_seed, <uint64_t>i)
            _seed_state(_derive(b, 0), s)
            if bits[i]:
                o[i] = _poisson_inv(s, q1, mu1, p0_1)
            else:
                o[i] = _poisson_inv(s, q0, mu0, p0_0)
    return out


def place_events(const int64_t[::1] counts, seed,
                 int64_t bin_duration_ps, int64_t resolution_ps,
                 int64_t start_offset_ps):
    """Timestamps for ``counts[k]`` events per bin, in bin/draw order (unsorted)."""
    cdef Py_ssize_t n = counts.shape[0]
    cdef int64_t total = 0
    cdef Py_ssize_t i
    for i in range(n):
        total += counts[i]
    out = np.empty(total, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef uint64_t base_seed = <uint64_t>seed
    cdef uint64_t b, s[4]
    cdef int64_t c, j, off, pos = 0, bin_start
    cdef double u, dur = <double>bin_duration_ps
    if total == 0:
        return out
    with nogil:
        for i in range(n):
            c = counts[i]
            if c == 0:
                continue
            b = _derive(base_seed, <uint64_t>i)
            _seed_state(_derive(b, 1), s)
            bin_start = start_offset_ps + i * bin_duration_ps
            for j in range(c):
                u = _next_u01(s)
                off = <int64_t>(u * dur)
                off -= off % resolution_ps
                o[pos] = bin_start + off
                pos += 1
    return out


def dead_time_filter(const int64_t[::1] timestamps, int64_t dead_time_ps):
    """Non-paralyzable dead-time filter over a sorted timestamp array."""
    cdef Py_ssize_t n = timestamps.shape[0]
    if dead_time_ps <= 0 or n == 0:
        return np.asarray(timestamps).copy()
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t i, m = 1
    cdef int64_t last = timestamps[0]
    o[0] = last
    with nogil:
        for i in range(1, n):
            if timestamps[i] - last >= dead_time_ps:
                o[m] = timestamps[i]
                m += 1
                last = timestamps[i]
    return out[:m].copy()
