"""Counter-based 64-bit random streams.

Every sample drawn by the toolkit is addressed by ``(seed, index)``.  The
stream for a key is the SplitMix64 output sequence started from the state
``key = mix(mix(seed) ^ index)``, so the j-th value is a pure function of
``(seed, index, j)``:

    state_j = key + (j + 1) * 0x9E3779B97F4A7C15   (mod 2**64)
    out_j   = mix(state_j)

with ``mix`` the SplitMix64 finaliser.  Floats use the top 53 bits.  Any
language with 64-bit unsigned arithmetic reproduces the same stream.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def stream_key(seed: int, index: int = 0) -> int:
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    return mix64(mix64(seed) ^ (index & MASK64))


def raw_uint64(seed: int, index: int, count: int) -> np.ndarray:
    """The first ``count`` 64-bit outputs of stream ``(seed, index)``."""
    key = np.uint64(stream_key(seed, index))
    j = np.arange(1, count + 1, dtype=np.uint64)
    x = key + j * np.uint64(GOLDEN_GAMMA)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_M1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_M2)
    return x ^ (x >> np.uint64(31))


def uniform(seed: int, index: int, size, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Uniform floats in ``[low, high)`` with the given shape."""
    shape = (size,) if isinstance(size, int) else tuple(size)
    count = int(np.prod(shape, dtype=np.int64))
    bits = raw_uint64(seed, index, count) >> np.uint64(11)
    unit = bits.astype(np.float64) * 2.0**-53
    return (low + (high - low) * unit).reshape(shape)


def complex_uniform(seed: int, index: int, size) -> np.ndarray:
    """Complex samples with real and imaginary parts uniform in [-1, 1).

    Real parts take the first half of the stream, imaginary parts the second.
    """
    shape = (size,) if isinstance(size, int) else tuple(size)
    flat = uniform(seed, index, (2,) + shape)
    return flat[0] + 1j * flat[1]
