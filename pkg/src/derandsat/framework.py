"""One stage of the search: bias preservation and restriction selection."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import bitops
from .cnf import CnfFormula, Restriction, restrict, satisfied
from .counting import BiasEstimate, ExactCounter, ExhaustiveLimitError, exact_bias, exhaustive_limit
from .prg import EnumerableDistribution
from .restrictions import EmptySupportError, GentleRestrictionDistribution, narrow_after_fixing


@dataclass(frozen=True)
class BiasPreservationReport:
    L: frozenset
    delta_sl: Fraction
    delta_prg: Fraction
    delta_sand: Fraction
    uniform_bias: Fraction
    lhs: Fraction
    rhs_bound: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs_bound


def _as_mask(L) -> int:
    if isinstance(L, int):
        return L
    return sum(1 << i for i in L)


def verify_bias_preservation(
    F: CnfFormula, L: Iterable[int], D: EnumerableDistribution, w_prime: int, limit: Optional[int] = None
) -> BiasPreservationReport:
    """Check, exactly, that filling ``L`` from ``D`` and the rest uniformly loses little bias.

    ``rho`` ranges over all assignments to the complement of ``L``.  A
    restricted formula counts as simple when its width is at most ``w_prime``;
    it is then its own lower approximator (``delta_sand = 0``).
    ``delta_sl`` is the fraction of non-simple ``rho`` and ``delta_prg`` the
    largest ``|E_D - E_U|`` over simple ones.
    """
    if D.n != F.n:
        raise ValueError(f"distribution has n={D.n}, formula has n={F.n}")
    lim = exhaustive_limit(limit)
    if F.n > lim:
        raise ExhaustiveLimitError(f"n={F.n} exceeds the exhaustive limit {lim}")
    n = F.n
    lmask = _as_mask(L)
    comp = ((1 << n) - 1) & ~lmask
    live = bin(lmask).count("1")
    table = satisfied(F, np.arange(1 << n, dtype=np.int64))
    rhos = bitops.submasks(comp)
    narrow = narrow_after_fixing(F, lmask, rhos, w_prime)

    yvals, ycounts = np.unique(D.outputs() & lmask, return_counts=True)
    on_d = table[rhos[:, None] | yvals[None, :]].astype(np.int64) @ ycounts
    on_u = table[rhos[:, None] | bitops.submasks(lmask)[None, :]].sum(axis=1)

    # E_D[F|rho] = on_d / |D|, E_U[F|rho] = on_u / 2^|L|
    scale_d, scale_u = D.size, 1 << live
    gaps = np.abs(on_d * scale_u - on_u * scale_d)[narrow]
    delta_prg = Fraction(int(gaps.max()) if gaps.size else 0, scale_d * scale_u)
    delta_sl = Fraction(int(np.count_nonzero(~narrow)), len(rhos))
    lhs = Fraction(int(on_d.sum()), scale_d * len(rhos))
    uniform = Fraction(int(np.count_nonzero(table)), 1 << n)
    return BiasPreservationReport(
        L=frozenset(bitops.mask_bits(lmask)),
        delta_sl=delta_sl,
        delta_prg=delta_prg,
        delta_sand=Fraction(0),
        uniform_bias=uniform,
        lhs=lhs,
        rhs_bound=uniform - (delta_prg + delta_sl),
    )


@dataclass(frozen=True)
class StageResult:
    chosen: Restriction
    global_restriction: Restriction
    estimated_bias: BiasEstimate
    index: int
    candidates_examined: int
    support_size: int
    slack_budget: Fraction

    @property
    def fixed_count(self) -> int:
        return self.chosen.num_fixed


def _lift(n: int, free: Sequence[int], local: Restriction) -> Restriction:
    chars = ["*"] * n
    for j, pos in enumerate(free):
        chars[pos] = local.values[j]
    return Restriction("".join(chars))


def select_stage(
    F: CnfFormula,
    gentle: GentleRestrictionDistribution,
    counter=None,
    slack=0,
    free: Optional[Sequence[int]] = None,
    early_exit: bool = True,
) -> StageResult:
    """Estimate the bias of ``F|pi`` for every gentle outcome and keep the best.

    ``free`` maps the gentle distribution's coordinates to positions of ``F``
    (default: all of them).  Ties go to the lowest outcome index.  Identical
    outcomes are estimated once.  With ``early_exit`` the scan stops once an
    estimate reaches 1, which cannot change the winner.  ``slack`` is the
    bias loss allowed for the best outcome; the returned budget adds twice
    the counter's accuracy.
    """
    counter = counter or ExactCounter()
    free = tuple(range(F.n)) if free is None else tuple(free)
    if len(free) != gentle.n:
        raise ValueError(f"gentle distribution has n={gentle.n}, but {len(free)} free positions given")
    best = None
    examined = 0
    for _, mask, patterns, indices in gentle.distinct_candidates():
        gmask = bitops.deposit_int(mask, free)
        gpatterns = bitops.deposit(patterns, free)
        estimates = counter.estimate_fixings(F, gmask, gpatterns)
        examined += len(estimates)
        j = max(range(len(estimates)), key=lambda i: (estimates[i].value, -i))
        if best is None or estimates[j].value > best[0].value:
            best = (estimates[j], int(indices[j]), mask, int(patterns[j]))
        if early_exit and best[0].value == 1:
            break
    if best is None:
        raise EmptySupportError("gentle distribution has an empty support")
    est, index, mask, pattern = best
    chosen = Restriction.from_masks(gentle.n, mask, pattern)
    return StageResult(
        chosen=chosen,
        global_restriction=_lift(F.n, free, chosen),
        estimated_bias=est,
        index=index,
        candidates_examined=examined,
        support_size=gentle.size,
        slack_budget=Fraction(slack) + 2 * counter.accuracy,
    )


def stage_slack_audit(F: CnfFormula, result: StageResult, limit: Optional[int] = None) -> Fraction:
    """Realized bias loss ``E[F] - E[F|pi]`` of the chosen restriction, exactly."""
    before = exact_bias(F, "brute", limit)
    after = exact_bias(restrict(F, result.global_restriction), "brute", limit)
    return before - after
