"""Arithmetic in GF(2^m) via log/antilog tables, vectorized over numpy arrays."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

# primitive polynomials, x^m term included
PRIMITIVE = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
    17: 0x20009,
    18: 0x40081,
    19: 0x80027,
    20: 0x100009,
}


class GF2m:
    def __init__(self, m: int):
        if m not in PRIMITIVE:
            raise ValueError(f"GF(2^{m}) not supported (m must be in 1..20)")
        self.m = m
        self.order = 1 << m
        self.poly = PRIMITIVE[m]
        q1 = self.order - 1
        exp = np.zeros(2 * q1 + 1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(q1):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= self.poly
        if x != 1 or len(set(exp[:q1].tolist())) != q1:
            raise ValueError(f"polynomial {self.poly:#x} is not primitive")
        exp[q1: 2 * q1] = exp[:q1]
        self.exp = exp
        self.log = log

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        r = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, r)

    def powers(self, a, count: int) -> np.ndarray:
        """``out[..., i] = a**i`` for ``i < count`` (with ``0**0 == 1``)."""
        a = np.asarray(a, dtype=np.int64)
        out = np.empty(a.shape + (count,), dtype=np.int64)
        cur = np.ones(a.shape, dtype=np.int64)
        for i in range(count):
            out[..., i] = cur
            cur = self.mul(cur, a)
        return out

    def poly_eval(self, coeffs, point):
        """Horner evaluation; ``coeffs`` has shape ``(k, ...)``, lowest degree first."""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        acc = coeffs[-1].copy()
        for c in coeffs[-2::-1]:
            acc = self.mul(acc, point) ^ c
        return acc


@lru_cache(maxsize=None)
def field(m: int) -> GF2m:
    return GF2m(m)
