"""Vectorized bit twiddling on packed assignments (int64 arrays)."""
from __future__ import annotations

import numpy as np


def mask_bits(mask: int) -> list:
    """Positions of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(xs) -> np.ndarray:
    return np.bitwise_count(np.asarray(xs, dtype=np.int64)).astype(np.int64)


def extract(xs, mask: int) -> np.ndarray:
    """Gather the bits of ``xs`` selected by ``mask`` into the low bits (pext)."""
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros(xs.shape, dtype=np.int64)
    for k, pos in enumerate(mask_bits(mask)):
        out |= ((xs >> pos) & 1) << k
    return out


def deposit(xs, positions) -> np.ndarray:
    """Scatter low bit ``k`` of ``xs`` to bit ``positions[k]`` (pdep)."""
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros(xs.shape, dtype=np.int64)
    for k, pos in enumerate(positions):
        out |= ((xs >> k) & 1) << pos
    return out


def deposit_int(x: int, positions) -> int:
    out = 0
    for k, pos in enumerate(positions):
        if (x >> k) & 1:
            out |= 1 << pos
    return out


def submasks(mask: int) -> np.ndarray:
    """All values whose set bits lie inside ``mask``, in increasing pext order."""
    return deposit(np.arange(1 << bin(mask).count("1"), dtype=np.int64), mask_bits(mask))


def walsh_hadamard(values) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform of a length-2^n integer vector."""
    a = np.array(values, dtype=np.int64)
    size = a.shape[0]
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        lo = a[:, 0, :] + a[:, 1, :]
        hi = a[:, 0, :] - a[:, 1, :]
        a = np.stack([lo, hi], axis=1).reshape(size)
        h *= 2
    return a
