"""Enumerable pseudorandom distributions over {0,1}^n and exact fooling measurements.

Every distribution is the uniform distribution over the multiset of outputs
of a deterministic generator on all ``2**r`` seeds.  Outputs are packed ints
(coordinate ``i`` in bit ``i``).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import ceil, log2
from typing import Callable, Optional, Sequence

import numpy as np

from . import bitops
from .cnf import Assignment, CnfFormula, satisfied
from .counting import ExhaustiveLimitError, exact_bias, exhaustive_limit
from .gf2m import field

MAX_SEED_BITS = 26


@dataclass(frozen=True, eq=False)
class EnumerableDistribution:
    n: int
    r: int
    name: str
    generator: Callable[[np.ndarray], np.ndarray] = dc_field(repr=False)
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return 1 << self.r

    def outputs(self) -> np.ndarray:
        """All outputs in seed order (cached)."""
        if "out" not in self._cache:
            if self.r > MAX_SEED_BITS:
                raise ExhaustiveLimitError(f"seed length {self.r} too large to enumerate")
            out = self.generator(np.arange(self.size, dtype=np.int64))
            out.setflags(write=False)
            self._cache["out"] = out
        return self._cache["out"]

    def generate(self, seed: int) -> Assignment:
        if not 0 <= seed < self.size:
            raise ValueError(f"seed {seed} outside [0, 2^{self.r})")
        value = int(self.generator(np.array([seed], dtype=np.int64))[0])
        return Assignment.from_int(self.n, value)

    def support(self):
        for v in self.outputs():
            yield Assignment.from_int(self.n, int(v))

    def expectation(self, F: CnfFormula) -> Fraction:
        """``E_{y ~ D}[F(y)]`` exactly."""
        if F.n != self.n:
            raise ValueError(f"formula has n={F.n}, distribution has n={self.n}")
        return Fraction(int(np.count_nonzero(satisfied(F, self.outputs()))), self.size)


def uniform_distribution(n: int, limit: Optional[int] = None) -> EnumerableDistribution:
    lim = exhaustive_limit(limit)
    if n > lim:
        raise ExhaustiveLimitError(f"n={n} exceeds the exhaustive limit {lim}")
    return EnumerableDistribution(n, n, "uniform", lambda s: s.copy())


def point_distribution(x) -> EnumerableDistribution:
    """Point mass on one assignment (seed length 0)."""
    x = x if isinstance(x, Assignment) else Assignment(str(x))
    value = x.as_int()
    return EnumerableDistribution(x.n, 0, f"point:{x.bits}", lambda s: np.full(s.shape, value, dtype=np.int64))


def _field_bits(n: int) -> int:
    return max(1, ceil(log2(n))) if n > 1 else 1


def kwise_distribution(n: int, k: int) -> EnumerableDistribution:
    """Exactly k-wise uniform bits from random degree-(k-1) polynomials over GF(2^m).

    The seed holds ``k`` coefficients; output bit ``i`` is the low bit of the
    polynomial evaluated at the field element ``i``.  Any ``k`` distinct
    evaluation points see uniformly random values (Vandermonde), so any ``k``
    output bits are uniform.
    """
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    m = _field_bits(n)
    F = field(m)
    qmask = (1 << m) - 1
    points = np.arange(n, dtype=np.int64)

    def gen(seeds):
        coeffs = np.stack([(seeds >> (j * m)) & qmask for j in range(k)])
        out = np.zeros(seeds.shape, dtype=np.int64)
        for i in range(n):
            out |= (F.poly_eval(coeffs, points[i]) & 1) << i
        return out

    return EnumerableDistribution(n, k * m, f"kwise:k={k}", gen)


def smallbias_distribution(n: int, delta) -> EnumerableDistribution:
    """Powering construction: seed ``(alpha, beta)``, bit ``i`` = <alpha^i, beta> over GF(2).

    The bias of any nonempty parity is at most ``(n - 1) / 2^m``; ``m`` is the
    smallest field degree making that at most ``delta``.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    need = Fraction(max(n - 1, 1)) / delta
    m = max(1, ceil(log2(need))) if need > 1 else 1
    while Fraction(max(n - 1, 0), 1 << m) > delta:
        m += 1
    F = field(m)
    qmask = (1 << m) - 1
    table = F.powers(np.arange(1 << m, dtype=np.int64), n)

    def gen(seeds):
        alpha = seeds & qmask
        beta = seeds >> m
        out = np.zeros(seeds.shape, dtype=np.int64)
        for i in range(n):
            out |= (bitops.popcount(table[alpha, i] & beta) & 1) << i
        return out

    return EnumerableDistribution(n, 2 * m, f"smallbias:delta={delta}", gen)


@dataclass(frozen=True)
class FoolingReport:
    measured_error: Fraction
    worst_case_formula: Optional[int]
    max_width: int
    corpus_size: int


def measure_fooling_error(D: EnumerableDistribution, corpus: Sequence[CnfFormula], limit: Optional[int] = None) -> FoolingReport:
    """Exact ``max |E_D[F] - E_U[F]|`` over the corpus, with the argmax index."""
    lim = exhaustive_limit(limit)
    worst, worst_i = Fraction(0), None
    for i, F in enumerate(corpus):
        if F.n != D.n:
            raise ValueError(f"corpus formula {i} has n={F.n}, distribution has n={D.n}")
        if len(F.variables) > lim:
            raise ExhaustiveLimitError(f"corpus formula {i} exceeds the exhaustive limit")
        err = abs(D.expectation(F) - exact_bias(F, "brute", lim))
        if worst_i is None or err > worst:
            worst, worst_i = err, i
    return FoolingReport(worst, worst_i, max((F.width for F in corpus), default=0), len(corpus))


def parity_biases(D: EnumerableDistribution) -> np.ndarray:
    """``sum_s (-1)^{<S, D(s)>}`` for every ``S`` (indexed as packed ints)."""
    hist = np.bincount(D.outputs(), minlength=1 << D.n)
    return bitops.walsh_hadamard(hist)


def max_parity_bias(D: EnumerableDistribution) -> Fraction:
    """Largest ``|E_D[(-1)^{sum_{i in S} x_i}]|`` over nonempty ``S``."""
    if D.n == 0:
        return Fraction(0)
    coeffs = np.abs(parity_biases(D)[1:])
    return Fraction(int(coeffs.max()), D.size)


def dump_support(D: EnumerableDistribution, path) -> None:
    with open(path, "w") as fh:
        for a in D.support():
            fh.write(a.bits + "\n")
