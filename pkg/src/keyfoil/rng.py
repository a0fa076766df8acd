"""Counter-addressed deterministic randomness.

All stochastic behavior in this package (codebook draws, game play, solver
restarts, instance generation) derives from a 64-bit master seed through keyed
integer hashing: every draw is a pure function of (seed, purpose label,
counter indices).  Streams can be regenerated independently, in any order, on
any platform, with bit-identical results; there is no hidden generator state,
so parallel schedules cannot change outcomes.

The mixer is the splitmix64 finalizer applied over a Weyl sequence.  It is not
cryptographic; it is a fast, well-dispersed hash adequate for Monte Carlo
work.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

__all__ = [
    "Stream",
    "UWORDS",
    "VWORDS",
    "SOURCE",
    "KEY",
    "DECODE",
    "TRIAL",
    "RESTART",
    "INSTANCE",
]

# Purpose labels. Fixed small integers; part of the determinism contract, so
# never renumber.
UWORDS = 1
VWORDS = 2
SOURCE = 3
KEY = 4
DECODE = 5
TRIAL = 6
RESTART = 7
INSTANCE = 8

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix_int(x: int) -> int:
    """splitmix64 finalizer on Python ints (no numpy scalar overflow noise)."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * _M1) & _MASK
    x = ((x ^ (x >> 27)) * _M2) & _MASK
    return (x ^ (x >> 31)) & _MASK


def _mix_array(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(_M1)
    x ^= x >> np.uint64(27)
    x *= np.uint64(_M2)
    x ^= x >> np.uint64(31)
    return x


class Stream:
    """A pure function from counters to uniforms, keyed by (seed, *path).

    ``u01(c)`` is deterministic in ``(key, c)`` alone.  ``child(*path)``
    derives an independent stream; derivation is associative enough for
    hierarchical use (trial -> decode -> step).
    """

    __slots__ = ("key",)

    def __init__(self, seed: int, *path: int):
        key = _mix_int(seed)
        for item in path:
            key = _mix_int(key ^ _mix_int((item & _MASK) + _GAMMA))
        self.key = key

    def child(self, *path: int) -> "Stream":
        s = Stream.__new__(Stream)
        s.key = self.key
        for item in path:
            s.key = _mix_int(s.key ^ _mix_int((item & _MASK) + _GAMMA))
        return s

    def raw(self, counters) -> np.ndarray:
        """64-bit hash words at the given counter positions."""
        c = np.asarray(counters, dtype=np.uint64)
        state = np.uint64(self.key) + (c + np.uint64(1)) * np.uint64(_GAMMA)
        return _mix_array(state)

    def u01(self, counters) -> np.ndarray:
        """Uniforms in [0, 1), shaped like ``counters``. Pure in counters."""
        return (self.raw(counters) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def uniforms(self, count: int, offset: int = 0) -> np.ndarray:
        return self.u01(np.arange(offset, offset + count, dtype=np.uint64))

    def integers(self, counters, bound: int) -> np.ndarray:
        """Integers in [0, bound). Exact for powers of two, else floor(u*bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound & (bound - 1) == 0:
            bits = bound.bit_length() - 1
            if bits == 0:
                return np.zeros(np.shape(counters), dtype=np.int64)
            return (self.raw(counters) >> np.uint64(64 - bits)).astype(np.int64)
        return np.minimum((self.u01(counters) * bound).astype(np.int64), bound - 1)

    def categorical(self, counters, pmf: np.ndarray) -> np.ndarray:
        """Inverse-CDF draws from a single pmf at the given counters."""
        cum = np.cumsum(np.asarray(pmf, dtype=np.float64))
        cum[-1] = 1.0
        u = self.u01(counters)
        return np.searchsorted(cum, u, side="right").astype(np.int64)


def categorical_rows(u: np.ndarray, pmf_rows: np.ndarray) -> np.ndarray:
    """Inverse-CDF draws where each position has its own pmf.

    ``u`` has shape ``(..., n)`` and ``pmf_rows`` shape ``(n, k)``; result is
    integer draws in [0, k) with draw ``[..., t] ~ pmf_rows[t]``.
    """
    cum = np.cumsum(np.asarray(pmf_rows, dtype=np.float64), axis=-1)
    cum[..., -1] = 1.0
    # (..., n, 1) >= (n, k-1) broadcasts to (..., n, k-1); row t uses cum[t].
    return (u[..., None] >= cum[..., :-1]).sum(axis=-1)


def fold_indices(items: Iterable[int]) -> int:
    """Stable scalar fold of an index tuple, for cache keys and child paths."""
    acc = 0
    for it in items:
        acc = _mix_int(acc ^ _mix_int((it & _MASK) + _GAMMA))
    return acc
