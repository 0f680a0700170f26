"""End-to-end search drivers and their traces."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2
from typing import Callable, List, Optional

import numpy as np

from .cnf import Assignment, CnfFormula, Restriction, evaluate, pad, restrict, satisfied, trim
from .counting import CostCounter, ExactCounter, exact_bias, exhaustive_limit
from .framework import select_stage
from .params import ParameterSet
from .prg import EnumerableDistribution, kwise_distribution, smallbias_distribution, uniform_distribution
from .restrictions import EmptySupportError, condition_on_stars, gentle_distribution, star_distribution

FAILURES = ("promise", "audit", "stage-budget", "degenerate-stars", "unsatisfied", "not-found", "eps-floor")


@dataclass
class StageRecord:
    stage: int
    n_t: int
    candidates: int
    counter_calls: int
    chosen: str          # restriction picked this stage, over the n_t free coordinates
    prefix: str          # composed restriction over all n coordinates
    estimate: Fraction
    audited: Optional[Fraction] = None


@dataclass
class SearchTrace:
    driver: str
    n: int
    eps: Optional[Fraction]
    stages: List[StageRecord] = field(default_factory=list)
    outcome: Optional[Assignment] = None
    failure: Optional[str] = None
    failure_stage: Optional[int] = None
    cost: CostCounter = field(default_factory=CostCounter)
    attempts: list = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.outcome is not None

    def fail(self, reason: str, stage: Optional[int] = None) -> "SearchTrace":
        self.failure, self.failure_stage = reason, stage
        return self

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stage", "n_t", "candidates", "chosen_restriction", "est_bias_num", "est_bias_den",
                    "audited_bias_num", "audited_bias_den", "counter_calls"])
        for s in self.stages:
            a = s.audited
            w.writerow([s.stage, s.n_t, s.candidates, s.prefix, s.estimate.numerator, s.estimate.denominator,
                        "" if a is None else a.numerator, "" if a is None else a.denominator, s.counter_calls])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "driver": self.driver,
            "n": self.n,
            "eps": None if self.eps is None else str(self.eps),
            "success": self.success,
            "assignment": None if self.outcome is None else self.outcome.bits,
            "failure": self.failure,
            "failure_stage": self.failure_stage,
            "stages": len(self.stages),
            "attempts": [str(e) for e in self.attempts],
            **self.cost.as_dict(),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def prepare(F: CnfFormula, eps) -> tuple:
    """Pad to ``M >= n`` and trim to width ``ceil(log2(2M/eps))``.

    Returns ``(F', eps/2)``: the trimmed formula keeps at least ``eps/2`` of
    its bias, and every satisfying assignment of it satisfies ``F``.
    """
    eps = Fraction(eps)
    G = pad(F)
    w = max(1, ceil(log2(2 * max(G.M, 1) / eps) - 1e-12))
    return trim(G, w), eps / 2


def _audit(F: CnfFormula, limit) -> Optional[Fraction]:
    if len(F.variables) > exhaustive_limit(limit):
        return None
    return exact_bias(F, "brute", limit)


def search_naive(F: CnfFormula, eps, counter=None, limit: Optional[int] = None) -> SearchTrace:
    """Bit-by-bit search: fix each variable to the value with the larger estimate.

    Makes exactly ``2n`` counter calls.  With a counter of accuracy ``d`` the
    prefix keeps bias at least ``eps - 2 i d``; a best estimate below
    ``eps - (2i - 1) d`` proves the promise ``E[F] >= eps`` false.
    """
    eps = Fraction(eps)
    counter = counter or ExactCounter(limit=limit)
    trace = SearchTrace("naive", F.n, eps)
    cost_before = counter.cost.counter_calls
    d = counter.accuracy
    prefix = ""
    for i in range(1, F.n + 1):
        rest = "*" * (F.n - i)
        e0 = counter.estimate(restrict(F, Restriction(prefix + "0" + rest)))
        e1 = counter.estimate(restrict(F, Restriction(prefix + "1" + rest)))
        bit = "1" if e1.value > e0.value else "0"
        best = max(e0.value, e1.value)
        prefix += bit
        pi = Restriction(prefix + rest)
        trace.stages.append(StageRecord(i, F.n - i + 1, 2, 2, bit, pi.values, best,
                                        _audit(restrict(F, pi), limit)))
        if best < eps - (2 * i - 1) * d:
            trace.cost.counter_calls = counter.cost.counter_calls - cost_before
            return trace.fail("promise", i)
    trace.cost.counter_calls = counter.cost.counter_calls - cost_before
    trace.cost.candidates_examined = 2 * F.n
    x = Assignment(prefix)
    if not evaluate(F, x):
        return trace.fail("unsatisfied", F.n)
    trace.outcome = x
    return trace


@dataclass
class StageComponents:
    """How each stage builds its star sets, fill and counter for ``n_t`` coordinates."""

    stars: str = "exhaustive"
    star_k: int = 2
    fill: str = "uniform"
    fill_k: int = 3
    fill_delta: Fraction = Fraction(1, 8)
    counter: Optional[ExactCounter] = None

    def fill_for(self, n: int) -> EnumerableDistribution:
        if self.fill == "uniform":
            return uniform_distribution(n)
        if self.fill == "kwise":
            return kwise_distribution(n, min(self.fill_k, n))
        if self.fill == "smallbias":
            return smallbias_distribution(n, self.fill_delta)
        raise ValueError(f"unknown fill {self.fill!r}")


def search_stagewise(
    F: CnfFormula,
    eps,
    params: ParameterSet,
    components: Optional[StageComponents] = None,
    halt_on_audit: bool = True,
    limit: Optional[int] = None,
) -> SearchTrace:
    """Fix a block of coordinates per stage, each time keeping the gentle outcome
    with the highest estimated bias, until no coordinate is free.

    Star sets and fills are rebuilt for the current number of free
    coordinates every stage; ``params`` (p, T, tau, error budgets) stay fixed.
    When the restricted formula is small enough its bias is recounted exactly
    and must stay at least ``eps - t tau`` after stage ``t``.
    """
    eps = Fraction(eps)
    comp = components or StageComponents()
    counter = comp.counter or ExactCounter(limit=limit)
    trace = SearchTrace("stagewise", F.n, eps)
    calls_before = counter.cost.counter_calls
    composed = Restriction.all_stars(F.n)
    G = F
    t = 0

    def finish():
        trace.cost.counter_calls = counter.cost.counter_calls - calls_before

    while not composed.is_total():
        t += 1
        if t > params.T:
            finish()
            return trace.fail("stage-budget", t)
        free = composed.star_positions
        n_t = len(free)
        try:
            stars = condition_on_stars(star_distribution(n_t, params.p, comp.stars, comp.star_k))
        except EmptySupportError:
            finish()
            return trace.fail("degenerate-stars", t)
        gentle = gentle_distribution(stars, comp.fill_for(n_t))
        result = select_stage(G, gentle, counter, slack=params.slack, free=free)
        trace.cost.candidates_examined += result.candidates_examined
        composed = composed.compose(result.chosen)
        G = restrict(F, composed)
        audited = _audit(G, limit)
        trace.stages.append(StageRecord(
            t, n_t, result.support_size, result.candidates_examined, result.chosen.values,
            composed.values, result.estimated_bias.value, audited,
        ))
        if result.estimated_bias.value < eps - t * params.tau - counter.accuracy:
            finish()
            return trace.fail("promise", t)
        if halt_on_audit and audited is not None and audited < eps - t * params.tau:
            finish()
            return trace.fail("audit", t)
    finish()
    x = composed.to_assignment()
    if not evaluate(F, x):
        return trace.fail("unsatisfied", t)
    trace.outcome = x
    return trace


def search_prg_enumeration(F: CnfFormula, D: EnumerableDistribution, cost: Optional[CostCounter] = None) -> Optional[Assignment]:
    """First output of ``D`` (seed order) satisfying ``F``, else ``None``."""
    if D.n != F.n:
        raise ValueError(f"distribution has n={D.n}, formula has n={F.n}")
    outs = D.outputs()
    hits = np.flatnonzero(satisfied(F, outs))
    if cost is not None:
        cost.assignments_enumerated += int(hits[0]) + 1 if hits.size else D.size
    if not hits.size:
        return None
    return Assignment.from_int(F.n, int(outs[hits[0]]))


def search_smallbias_high_eps(F: CnfFormula, cost: Optional[CostCounter] = None) -> Optional[Assignment]:
    """Enumerate a ``1/(4M)``-biased space; guaranteed to hit when ``E[F] >= 1 - 1/(4M)``."""
    delta = Fraction(1, 4 * max(F.M, 1))
    return search_prg_enumeration(F, smallbias_distribution(F.n, delta), cost)


def _wrap(driver: str, F: CnfFormula, eps, x: Optional[Assignment], cost: CostCounter) -> SearchTrace:
    trace = SearchTrace(driver, F.n, None if eps is None else Fraction(eps), cost=cost)
    if x is None:
        return trace.fail("not-found")
    trace.outcome = x
    return trace


def run_prg_enumeration(F: CnfFormula, D: EnumerableDistribution, eps=None) -> SearchTrace:
    cost = CostCounter()
    return _wrap("prg-enum", F, eps, search_prg_enumeration(F, D, cost), cost)


def run_smallbias(F: CnfFormula, eps=None) -> SearchTrace:
    cost = CostCounter()
    return _wrap("smallbias", F, eps, search_smallbias_high_eps(F, cost), cost)


def search_with_unknown_eps(
    F: CnfFormula, inner: Callable[[CnfFormula, Fraction], SearchTrace], floor=Fraction(1, 64)
) -> SearchTrace:
    """Try ``eps = 1/2, 1/4, ...`` down to ``floor``; return the first success."""
    floor = Fraction(floor)
    eps = Fraction(1, 2)
    attempts = []
    total = CostCounter()
    last = None
    while eps >= floor:
        attempts.append(eps)
        last = inner(F, eps)
        total.merge(last.cost)
        if last.success:
            break
        eps /= 2
    trace = last if last is not None else SearchTrace("unknown-eps", F.n, None)
    trace.attempts = attempts
    trace.cost = total
    if not trace.success:
        trace.fail("eps-floor", trace.failure_stage)
    return trace
