"""Pinned pseudo-random source shared by every generator in the package.

All randomness comes from SplitMix64 (Steele, Lea & Flood 2014).  The
algorithm is fixed here rather than taken from numpy because numpy does not
promise stream stability across releases, and Monte Carlo outputs must be
bit-reproducible.

Seed derivation
---------------
A stream is identified by a 64-bit master seed plus a path of non-negative
indices (replica index, size index, ...).  The stream seed is::

    h = master
    for idx in path:
        h = finalize(h + GAMMA * (idx + 1))      # arithmetic mod 2**64

where ``finalize`` is the SplitMix64 output function.  The result depends
only on ``(master, path)``, never on execution order or worker count.

Bounded integers use rejection: draw ``x``; reject while
``x < 2**64 mod b``; return ``x mod b``.  The accepted range is an exact
multiple of ``b``, so there is no modulo bias.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


def finalize(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def derive_seed(master: int, *path: int) -> int:
    """Stream seed for ``master`` and an index path (see module docstring)."""
    h = check_seed(master)
    for idx in path:
        if idx < 0:
            raise ValueError(f"seed path indices must be non-negative, got {idx}")
        h = finalize(h + GAMMA * (idx + 1))
    return h


class SplitMix64:
    """Scalar pure-Python SplitMix64 stream, for small jobs and test vectors."""

    def __init__(self, seed: int):
        self.state = check_seed(seed)

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return finalize(self.state)

    def below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (1 << 64) % bound
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % bound

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


# -- numba kernels -----------------------------------------------------------
# The stream state is a length-1 uint64 array so kernels can advance it in place.

_G = np.uint64(GAMMA)
_M1 = np.uint64(_MUL1)
_M2 = np.uint64(_MUL2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


@nb.njit(cache=True, nogil=True)
def next_u64(state):
    state[0] += _G
    z = state[0]
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@nb.njit(cache=True, nogil=True)
def below(state, bound):
    """Unbiased integer in [0, bound) for a positive int64 ``bound``."""
    b = np.uint64(bound)
    threshold = (np.uint64(0) - b) % b
    while True:
        x = next_u64(state)
        if x >= threshold:
            return np.int64(x % b)


@nb.njit(cache=True, nogil=True)
def uniform01(state):
    return np.float64(next_u64(state) >> _S11) * (1.0 / 9007199254740992.0)


def new_state(seed: int) -> np.ndarray:
    return np.array([check_seed(seed)], dtype=np.uint64)


def u64_stream(seed: int, count: int) -> np.ndarray:
    state = new_state(seed)
    return _u64_stream(state, count)


@nb.njit(cache=True, nogil=True)
def _u64_stream(state, count):
    out = np.empty(count, dtype=np.uint64)
    for i in range(count):
        out[i] = next_u64(state)
    return out


@nb.njit(cache=True, nogil=True)
def _normal_fill(state, out):
    # Box-Muller; 1 - u keeps the log argument in (0, 1].
    i = 0
    n = out.shape[0]
    while i < n:
        u1 = 1.0 - uniform01(state)
        u2 = uniform01(state)
        r = math.sqrt(-2.0 * math.log(u1))
        out[i] = r * math.cos(2.0 * math.pi * u2)
        if i + 1 < n:
            out[i + 1] = r * math.sin(2.0 * math.pi * u2)
        i += 2


def normal_samples(seed: int, count: int) -> np.ndarray:
    """Standard normal variates from the pinned stream (Box-Muller)."""
    out = np.empty(count, dtype=np.float64)
    _normal_fill(new_state(seed), out)
    return out
