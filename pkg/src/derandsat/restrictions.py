"""Pseudorandom star sets and restriction distributions.

A star distribution is an enumerable distribution over subsets ``L`` of the
``n`` coordinates, stored as packed masks in seed order.  ``L`` is the live
set of the switching-lemma restriction (the complement gets random bits) and
the fixed set of the gentle restriction (``L`` gets the pseudorandom fill).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

import numpy as np

from . import bitops
from .cnf import CnfFormula, Restriction, normalize, restrict
from .counting import ExhaustiveLimitError
from .gf2m import field
from .prg import MAX_SEED_BITS, EnumerableDistribution, _field_bits

FAMILIES = ("exhaustive", "kwise-select", "blockwise")


class EmptySupportError(ValueError):
    pass


def dyadic_exponent(p) -> int:
    """``a`` with ``p == 2**-a``; raises for anything else."""
    p = Fraction(p)
    if p <= 0 or p > 1 or p.numerator != 1 or p.denominator & (p.denominator - 1):
        raise ValueError(f"p={p} is not of the form 2^-a")
    return p.denominator.bit_length() - 1


@dataclass(frozen=True, eq=False)
class StarDistribution:
    n: int
    p: Fraction
    r: int
    family: str
    generator: Callable[[np.ndarray], np.ndarray] = dc_field(repr=False)
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return 1 << self.r

    def masks(self) -> np.ndarray:
        if "masks" not in self._cache:
            if self.r > MAX_SEED_BITS:
                raise ExhaustiveLimitError(f"seed length {self.r} too large to enumerate")
            out = self.generator(np.arange(self.size, dtype=np.int64))
            out.setflags(write=False)
            self._cache["masks"] = out
        return self._cache["masks"]

    def star_set(self, seed: int) -> frozenset:
        mask = int(self.generator(np.array([seed], dtype=np.int64))[0])
        return frozenset(bitops.mask_bits(mask))

    def live_fractions(self) -> list:
        """Exact ``Pr[i in L]`` for every coordinate."""
        masks = self.masks()
        return [Fraction(int(np.count_nonzero((masks >> i) & 1)), self.size) for i in range(self.n)]


def star_distribution(n: int, p, family: str = "exhaustive", k: int = 2) -> StarDistribution:
    """A p-regular star distribution, ``p = 2**-a``.

    ``exhaustive``: ``a*n`` seed bits, coordinate ``i`` live iff its ``a``-bit
    block is zero.  ``kwise-select``: the blocks are the low ``a`` bits of a
    random degree-(k-1) polynomial over GF(2^m) evaluated at ``i``.
    ``blockwise``: an ``a``-bit shift ``s``; ``L = {i : i = s mod 2^a}``.
    """
    p = Fraction(p)
    a = dyadic_exponent(p)
    blk = (1 << a) - 1
    if family == "exhaustive":
        r = a * n

        def gen(seeds):
            out = np.zeros(seeds.shape, dtype=np.int64)
            for i in range(n):
                out |= (((seeds >> (a * i)) & blk) == 0).astype(np.int64) << i
            return out

    elif family == "kwise-select":
        if k < 1:
            raise ValueError("k must be positive")
        m = max(a, _field_bits(max(n, 1)))
        F = field(m)
        qmask = (1 << m) - 1
        r = k * m

        def gen(seeds):
            coeffs = np.stack([(seeds >> (j * m)) & qmask for j in range(k)])
            out = np.zeros(seeds.shape, dtype=np.int64)
            for i in range(n):
                out |= ((F.poly_eval(coeffs, i) & blk) == 0).astype(np.int64) << i
            return out

    elif family == "blockwise":
        r = a
        period = 1 << a

        def gen(seeds):
            out = np.zeros(seeds.shape, dtype=np.int64)
            for i in range(n):
                out |= (seeds == (i % period)).astype(np.int64) << i
            return out

    else:
        raise ValueError(f"unknown star family {family!r}")
    name = family if family != "kwise-select" else f"kwise-select:k={k}"
    return StarDistribution(n, p, r, name, gen)


@dataclass(frozen=True, eq=False)
class ConditionedStarDistribution:
    """``base`` conditioned on ``|L| >= p n / 2`` (seed order kept)."""

    base: StarDistribution
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def p(self) -> Fraction:
        return self.base.p

    @property
    def threshold(self) -> Fraction:
        return self.base.p * self.base.n / 2

    def masks(self) -> np.ndarray:
        if "masks" not in self._cache:
            base = self.base.masks()
            # |L| >= p n / 2 in integers; comparing an array to a Fraction goes through objects
            p = self.base.p
            keep = 2 * p.denominator * bitops.popcount(base) >= p.numerator * self.n
            out = base[keep]
            out.setflags(write=False)
            self._cache["masks"] = out
        return self._cache["masks"]

    @property
    def size(self) -> int:
        return len(self.masks())

    def survival_fraction(self) -> Fraction:
        return Fraction(self.size, self.base.size)


def condition_on_stars(base: StarDistribution) -> ConditionedStarDistribution:
    cond = ConditionedStarDistribution(base)
    if cond.size == 0:
        raise EmptySupportError(f"no star set of {base.family} reaches |L| >= pn/2")
    return cond


@dataclass(frozen=True, eq=False)
class GentleRestrictionDistribution:
    """Uniform over ``pi(L, y)``: ``pi_i = y_i`` on ``L``, star elsewhere.

    Outcomes are indexed stars-major, fill-minor:
    ``index = star_index * 2**fill.r + fill_seed``.
    """

    stars: ConditionedStarDistribution
    fill: EnumerableDistribution

    @property
    def n(self) -> int:
        return self.fill.n

    @property
    def size(self) -> int:
        return self.stars.size * self.fill.size

    @property
    def seed_bits(self) -> int:
        return self.stars.base.r + self.fill.r

    def outcome(self, index: int) -> Restriction:
        si, fi = divmod(index, self.fill.size)
        mask = int(self.stars.masks()[si])
        return Restriction.from_masks(self.n, mask, int(self.fill.outputs()[fi]))

    def outcomes(self) -> Iterator[Restriction]:
        fills = self.fill.outputs()
        for mask in self.stars.masks():
            for y in fills:
                yield Restriction.from_masks(self.n, int(mask), int(y))

    def distinct_candidates(self) -> Iterator[tuple]:
        """``(star_index, mask, patterns, first_indices)`` per distinct star set.

        Repeated star sets and repeated fill patterns on ``L`` give the same
        restriction; only the first occurrence (lowest index) is reported.
        Patterns are the fill values masked to ``L``, sorted by first index.
        """
        fills = self.fill.outputs()
        seen = set()
        for si, mask in enumerate(self.stars.masks()):
            mask = int(mask)
            if mask in seen:
                continue
            seen.add(mask)
            vals, first = np.unique(fills & mask, return_index=True)
            order = np.argsort(first, kind="stable")
            yield si, mask, vals[order], si * self.fill.size + first[order]


def gentle_distribution(stars: ConditionedStarDistribution, fill: EnumerableDistribution) -> GentleRestrictionDistribution:
    if stars.n != fill.n:
        raise ValueError(f"star distribution has n={stars.n}, fill has n={fill.n}")
    return GentleRestrictionDistribution(stars, fill)


@dataclass(frozen=True)
class SwitchingReport:
    fraction_simplified: Fraction
    w_prime: int
    method: str
    star_sets: int


def narrow_after_fixing(F: CnfFormula, live_mask: int, rhos: np.ndarray, w_prime: int) -> np.ndarray:
    """For each packed ``rho`` on the complement of ``live_mask``: is ``F|rho`` of width <= w'?

    A clause that ``rho`` falsifies completely makes ``F|rho`` the canonical
    false formula, which has width 0.
    """
    rhos = np.asarray(rhos, dtype=np.int64)
    killed = np.zeros(rhos.shape, dtype=bool)
    wide_alive = np.zeros(rhos.shape, dtype=bool)
    G = normalize(F)
    if G.is_false():
        return np.ones(rhos.shape, dtype=bool)
    for pos, neg in G.masks:
        live_width = bin((pos | neg) & live_mask).count("1")
        po, no = pos & ~live_mask, neg & ~live_mask
        falsified = ((rhos & po) == 0) & ((rhos & no) == no)
        if live_width == 0:
            killed |= falsified
        elif live_width > w_prime:
            wide_alive |= falsified
    return killed | ~wide_alive


@lru_cache(maxsize=100_000)
def _dt_depth(table: bytes, nvars: int) -> int:
    tt = np.frombuffer(table, dtype=bool)
    if tt.all() or not tt.any():
        return 0
    best = nvars
    idx = np.arange(1 << nvars)
    for v in range(nvars):
        lo = tt[(idx >> v) & 1 == 0]
        hi = tt[(idx >> v) & 1 == 1]
        d = 1 + max(_dt_depth(lo.tobytes(), nvars - 1), _dt_depth(hi.tobytes(), nvars - 1))
        best = min(best, d)
        if best == 1:
            break
    return best


def decision_tree_depth(F: CnfFormula, limit: int = 10) -> int:
    """Minimum depth of a decision tree computing ``F`` (exponential; small inputs only)."""
    from .counting import satisfying_table

    G = normalize(F)
    if G.is_false() or G.is_true():
        return 0
    k = len(G.variables)
    if k > limit:
        raise ExhaustiveLimitError(f"{k} variables exceed the decision-tree limit {limit}")
    return _dt_depth(satisfying_table(G).tobytes(), k)


def switching_proxy_report(
    F: CnfFormula,
    stars: ConditionedStarDistribution,
    w_prime: int,
    method: str = "syntactic-width",
    samples: Optional[int] = None,
    seed: int = 0,
    exact_limit: int = 12,
) -> SwitchingReport:
    """Fraction of ``(L, rho)`` for which ``F|rho`` (``rho`` uniform off ``L``) is simple.

    ``syntactic-width`` counts width <= w'; ``decision-tree-depth`` counts
    decision-tree depth <= w' (a depth-d tree is a width-d CNF).  Exact
    enumeration for ``n <= exact_limit``; otherwise ``samples`` seeded draws
    of ``rho`` per star set.
    """
    if method not in ("syntactic-width", "decision-tree-depth"):
        raise ValueError(f"unknown method {method!r}")
    if stars.n != F.n:
        raise ValueError("star distribution and formula disagree on n")
    full = (1 << F.n) - 1
    if F.n > exact_limit and samples is None:
        raise ExhaustiveLimitError(f"n={F.n} needs sampled rho (pass samples=...)")
    if F.n > 16:
        raise ExhaustiveLimitError("switching proxy supports n <= 16")
    rng = np.random.default_rng(seed)
    good = Fraction(0)
    masks, counts = np.unique(stars.masks(), return_counts=True)
    for mask, mult in zip(masks.tolist(), counts.tolist()):
        comp = full & ~mask
        if samples is None:
            rhos = bitops.submasks(comp)
        else:
            rhos = bitops.deposit(rng.integers(0, 1 << bin(comp).count("1"), size=samples), bitops.mask_bits(comp))
        if method == "syntactic-width":
            ok = narrow_after_fixing(F, mask, rhos, w_prime)
        else:
            ok = np.array([
                decision_tree_depth(restrict(F, Restriction.from_masks(F.n, comp, int(rho)))) <= w_prime
                for rho in rhos
            ])
        good += Fraction(mult * int(np.count_nonzero(ok)), len(rhos))
    return SwitchingReport(good / stars.size, w_prime, method, stars.size)
