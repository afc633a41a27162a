"""Deterministic random-number primitives shared by every simulation backend.

The simulator's reproducibility contract is built on two public-domain
generators:

* ``splitmix64`` (Steele, Lea & Flood) supplies seed derivation.  The i-th
  child of a 64-bit parent seed ``s`` is ``mix64(s + (i + 1) * GOLDEN)``,
  i.e. the (i+1)-th output of a splitmix64 stream started at ``s``.  Child
  seeds are O(1)-indexable, which is what makes chunked or parallel event
  generation order-independent.
* ``xoshiro256**`` (Blackman & Vigna) supplies the per-stream uniform
  variates.  A stream seeded with ``t`` starts from the state
  ``(mix64(t + G), mix64(t + 2G), mix64(t + 3G), mix64(t + 4G))``, the
  seeding recommended by the xoshiro authors.

Uniform doubles are ``(next_u64() >> 11) * 2**-53``, exact in IEEE double,
so the scalar reference here, the vectorized NumPy path and the compiled C
path all produce bit-identical streams.

Seed plumbing used by the simulator (see :mod:`kennedyrx.sim`):

* pseudorandom bit k of a sequence seeded with ``s`` is the top bit of
  ``derive_seed(s, k)``;
* signal bin k of a run seeded with ``s`` owns the sub-seed
  ``b = derive_seed(s, k)``; its photocount is drawn from the stream seeded
  ``derive_seed(b, 0)`` and its event timestamps from the stream seeded
  ``derive_seed(b, 1)``.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

GOLDEN = 0x9E3779B97F4A7C15

_U64_GOLDEN = np.uint64(GOLDEN)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

#: 2**-53, exact; maps the top 53 bits of a u64 onto [0, 1).
U01_SCALE = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """splitmix64 output function on a 64-bit integer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(parent: int, index: int) -> int:
    """Child seed ``index`` of ``parent``: mix64(parent + (index+1)*GOLDEN)."""
    if index < 0:
        raise ValueError(f"seed index must be nonnegative, got {index}")
    return mix64((parent + (index + 1) * GOLDEN) & _MASK64)


def mix64_vec(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64` on a uint64 array."""
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def derive_seed_vec(parent, index: np.ndarray) -> np.ndarray:
    """Vectorized :func:`derive_seed` over a uint64 index array."""
    parent = np.uint64(parent & _MASK64) if isinstance(parent, int) else parent
    return mix64_vec(parent + (index + np.uint64(1)) * _U64_GOLDEN)


def pseudorandom_bits(seed: int, n: int) -> np.ndarray:
    """n unbiased bits: the top bit of each derived child seed of ``seed``."""
    idx = np.arange(n, dtype=np.uint64)
    return (derive_seed_vec(seed, idx) >> np.uint64(63)).astype(np.uint8)


class Xoshiro256StarStar:
    """Scalar reference generator; the compiled kernels mirror it exactly.

    Kept in pure Python integers so tests can validate the vectorized and
    compiled streams against an implementation with no shared code.
    """

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        self.s0 = derive_seed(seed, 0)
        self.s1 = derive_seed(seed, 1)
        self.s2 = derive_seed(seed, 2)
        self.s3 = derive_seed(seed, 3)

    def next_u64(self) -> int:
        s1 = self.s1
        result = (_rotl(s1 * 5 & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        self.s2 ^= self.s0
        self.s3 ^= s1
        self.s1 = s1 ^ self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = _rotl(self.s3, 45)
        return result

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * U01_SCALE


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64
