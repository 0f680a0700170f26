"""Deterministic bias estimation: exact brute force, DPLL, and counter objects.

A counter is anything with an ``accuracy`` (its additive error guarantee) and
an ``estimate(F)`` method returning a :class:`BiasEstimate`.  Biases are exact
``Fraction`` values; the bias of ``F`` is the fraction of all ``2**F.n``
assignments that satisfy it, which for a restricted formula equals the
fraction of satisfying completions of its free coordinates.
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import bitops
from .cnf import CnfFormula, Restriction, normalize, restrict

DEFAULT_EXHAUSTIVE_LIMIT = 24
_CHUNK_BITS = 20


class ExhaustiveLimitError(ValueError):
    pass


def exhaustive_limit(limit: Optional[int] = None) -> int:
    """Resolve the brute-force variable limit (``DERAND_MAX_EXHAUSTIVE`` overrides the default)."""
    if limit is not None:
        return limit
    env = os.environ.get("DERAND_MAX_EXHAUSTIVE")
    return int(env) if env else DEFAULT_EXHAUSTIVE_LIMIT


@dataclass
class CostCounter:
    counter_calls: int = 0
    assignments_enumerated: int = 0
    candidates_examined: int = 0

    def merge(self, other: "CostCounter") -> None:
        self.counter_calls += other.counter_calls
        self.assignments_enumerated += other.assignments_enumerated
        self.candidates_examined += other.candidates_examined

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BiasEstimate:
    value: Fraction
    accuracy: Fraction = Fraction(0)

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError(f"bias estimate {self.value} outside [0, 1]")


def satisfying_table(F: CnfFormula, limit: Optional[int] = None) -> np.ndarray:
    """Boolean truth table of ``F`` over ``F.variables`` (local bit k = k-th variable)."""
    variables = F.variables
    k = len(variables)
    lim = exhaustive_limit(limit)
    if k > lim:
        raise ExhaustiveLimitError(f"{k} variables exceed the exhaustive limit {lim}")
    local = {v: i for i, v in enumerate(variables)}
    masks = []
    for c in F.clauses:
        pos = neg = 0
        for lit in c:
            if lit > 0:
                pos |= 1 << local[lit]
            else:
                neg |= 1 << local[-lit]
        masks.append((pos, neg))
    xs = np.arange(1 << k, dtype=np.int64)
    sat = np.ones(1 << k, dtype=bool)
    for pos, neg in masks:
        sat &= ((xs & pos) != 0) | ((~xs & neg) != 0)
    return sat


def brute_force_count(F: CnfFormula, limit: Optional[int] = None) -> int:
    """Satisfying assignments of ``F`` over all ``F.n`` variables, by enumeration."""
    if F.is_false():
        return 0
    variables = F.variables
    k = len(variables)
    lim = exhaustive_limit(limit)
    if k > lim:
        raise ExhaustiveLimitError(f"{k} variables exceed the exhaustive limit {lim}")
    if k <= _CHUNK_BITS:
        total = int(np.count_nonzero(satisfying_table(F, limit=lim)))
    else:
        # high variables enumerated in the outer loop keep memory bounded
        hi = variables[_CHUNK_BITS:]
        total = 0
        for h in range(1 << len(hi)):
            pi = ["*"] * F.n
            for j, v in enumerate(hi):
                pi[v - 1] = "1" if (h >> j) & 1 else "0"
            G = restrict(F, Restriction("".join(pi)))
            total += brute_force_count(G, limit=lim) >> len(hi)
        return total
    return total << (F.n - k)


def dpll_count(F: CnfFormula) -> int:
    """Exact model count by unit propagation and branching on the lowest variable."""
    clauses = [frozenset(c) for c in normalize(F).clauses]
    return _dpll(clauses, F.n)


def _assign(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
        out.append(c)
    return out


def _dpll(clauses, free: int) -> int:
    while True:
        if any(not c for c in clauses):
            return 0
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        (lit,) = unit
        clauses = _assign(clauses, lit)
        free -= 1
    if not clauses:
        return 1 << free
    v = min(abs(l) for c in clauses for l in c)
    return _dpll(_assign(clauses, v), free - 1) + _dpll(_assign(clauses, -v), free - 1)


def exact_count(F: CnfFormula, method: str = "auto", limit: Optional[int] = None) -> int:
    """``|F^{-1}(1)|`` over ``{0,1}^n``.

    ``method`` is ``"brute"`` (raises :class:`ExhaustiveLimitError` past the
    limit), ``"dpll"``, or ``"auto"`` (brute force when within the limit).
    """
    if method == "brute":
        return brute_force_count(F, limit)
    if method == "dpll":
        return dpll_count(F)
    if method != "auto":
        raise ValueError(f"unknown counting method {method!r}")
    if len(F.variables) <= exhaustive_limit(limit):
        return brute_force_count(F, limit)
    return dpll_count(F)


def exact_bias(F: CnfFormula, method: str = "auto", limit: Optional[int] = None) -> Fraction:
    return Fraction(exact_count(F, method, limit), 1 << F.n)


class ExactCounter:
    """The zero-error counter.  ``estimate_fixings`` batches many restrictions."""

    def __init__(self, method: str = "auto", limit: Optional[int] = None, cost: Optional[CostCounter] = None):
        self.method = method
        self.limit = limit
        self.cost = cost if cost is not None else CostCounter()

    @property
    def accuracy(self) -> Fraction:
        return Fraction(0)

    def exact(self, F: CnfFormula) -> Fraction:
        return exact_bias(F, self.method, self.limit)

    def estimate(self, F: CnfFormula) -> BiasEstimate:
        self.cost.counter_calls += 1
        return BiasEstimate(self.exact(F), self.accuracy)

    def estimate_fixings(self, F: CnfFormula, fixed_mask: int, patterns: Sequence[int]) -> list:
        """Estimates for ``F`` restricted by fixing ``fixed_mask`` to each pattern.

        Patterns are packed over ``F``'s variables with bits only inside
        ``fixed_mask``.  Counts one counter call per pattern.
        """
        patterns = np.asarray(patterns, dtype=np.int64)
        self.cost.counter_calls += len(patterns)
        return [BiasEstimate(v, self.accuracy) for v in self._fixing_biases(F, fixed_mask, patterns)]

    def _fixing_biases(self, F, fixed_mask, patterns) -> list:
        G = normalize(F)
        if G.is_false():
            return [Fraction(0)] * len(patterns)
        variables = G.variables
        if len(variables) > exhaustive_limit(self.limit) or self.method == "dpll":
            return [self.exact(restrict(G, Restriction.from_masks(G.n, fixed_mask, int(p)))) for p in patterns]
        sat = satisfying_table(G, self.limit)
        local_fixed = 0
        for k, v in enumerate(variables):
            if (fixed_mask >> (v - 1)) & 1:
                local_fixed |= 1 << k
        width = bin(local_fixed).count("1")
        hist = np.bincount(
            bitops.extract(np.flatnonzero(sat), local_fixed), minlength=1 << width
        )
        var_mask = sum(1 << (v - 1) for v in variables)
        keys = bitops.extract(patterns, fixed_mask & var_mask)
        denom = 1 << (len(variables) - width)
        return [Fraction(int(hist[k]), denom) for k in keys]


SKEWS = ("down", "up", "random", "flatten")


class AdversarialCounter(ExactCounter):
    """Exact bias moved by a deterministic amount of magnitude at most ``delta``.

    ``down``/``up`` push by the full ``delta``; ``random`` draws a signed
    offset from a hash of ``(seed, formula)``; ``flatten`` pulls toward 1/2.
    Results are clamped to [0, 1], which never increases the error.
    """

    def __init__(self, delta, skew: str = "random", seed: int = 0, **kwargs):
        super().__init__(**kwargs)
        if skew not in SKEWS:
            raise ValueError(f"unknown skew {skew!r}")
        self.delta = Fraction(delta)
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        self.skew = skew
        self.seed = seed

    @property
    def accuracy(self) -> Fraction:
        return self.delta

    def _offset(self, F: CnfFormula, exact: Fraction) -> Fraction:
        d = self.delta
        if self.skew == "down":
            return -d
        if self.skew == "up":
            return d
        if self.skew == "flatten":
            gap = Fraction(1, 2) - exact
            return max(-d, min(d, gap))
        h = hashlib.blake2b(repr((self.seed, F.n, F.clauses)).encode(), digest_size=8).digest()
        u = Fraction(int.from_bytes(h, "big"), 1 << 64)
        return d * (2 * u - 1)

    def perturb(self, F: CnfFormula, exact: Fraction) -> Fraction:
        return min(Fraction(1), max(Fraction(0), exact + self._offset(F, exact)))

    def estimate(self, F: CnfFormula) -> BiasEstimate:
        self.cost.counter_calls += 1
        G = normalize(F)
        return BiasEstimate(self.perturb(G, self.exact(G)), self.delta)

    def estimate_fixings(self, F, fixed_mask, patterns) -> list:
        # the offset depends on the restricted formula itself, so the batch
        # path agrees exactly with estimate(restrict(F, pi))
        patterns = np.asarray(patterns, dtype=np.int64)
        self.cost.counter_calls += len(patterns)
        exact = self._fixing_biases(F, fixed_mask, patterns)
        if self.skew != "random":
            return [BiasEstimate(self.perturb(F, e), self.delta) for e in exact]
        out = []
        for p, e in zip(patterns, exact):
            G = normalize(restrict(F, Restriction.from_masks(F.n, fixed_mask, int(p))))
            out.append(BiasEstimate(self.perturb(G, e), self.delta))
        return out


def approx_bias(F: CnfFormula, delta=0, counter: Optional[ExactCounter] = None) -> BiasEstimate:
    """A ``delta``-accurate bias estimate; the default counter is exact."""
    if Fraction(delta) < 0:
        raise ValueError("delta must be non-negative")
    counter = counter or ExactCounter()
    if counter.accuracy > Fraction(delta):
        raise ValueError(f"counter accuracy {counter.accuracy} is worse than requested {delta}")
    est = counter.estimate(F)
    return BiasEstimate(est.value, Fraction(delta))


def adversarial_counter(F: CnfFormula, delta, skew: str = "random", seed: int = 0) -> BiasEstimate:
    return AdversarialCounter(delta, skew=skew, seed=seed).estimate(F)
