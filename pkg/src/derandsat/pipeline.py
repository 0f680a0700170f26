"""pad -> trim -> driver, shared by ``solve`` and ``bench``."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cnf import CnfFormula, evaluate
from .counting import AdversarialCounter, ExactCounter
from .params import compute_parameters
from .prg import uniform_distribution
from .search import (SearchTrace, StageComponents, prepare, run_prg_enumeration, run_smallbias,
                     search_naive, search_stagewise, search_with_unknown_eps)

DRIVERS = ("stagewise", "naive", "prg-enum", "smallbias", "auto")


@dataclass
class SolveOptions:
    driver: str = "auto"
    mode: str = "practical"
    C: float = 1.0
    p: Fraction = Fraction(1, 2)
    stars: str = "exhaustive"
    fill: str = "uniform"
    counter: str = "exact"          # exact | adversarial
    delta: Optional[Fraction] = None  # adversarial accuracy; default eps/(4n)
    skew: str = "random"
    seed: int = 0
    limit: Optional[int] = None
    eps_floor: Fraction = Fraction(1, 64)
    extra: dict = field(default_factory=dict)


def pick_driver(F: CnfFormula, eps, driver: str) -> str:
    if driver != "auto":
        return driver
    if eps is not None and Fraction(eps) >= 1 - Fraction(1, 4 * max(F.M, 1)):
        return "smallbias"
    return "stagewise"


def _counter(opts: SolveOptions, n: int, eps: Fraction):
    if opts.counter == "exact":
        return ExactCounter(limit=opts.limit)
    if opts.counter == "adversarial":
        delta = opts.delta if opts.delta is not None else eps / (4 * max(n, 1))
        return AdversarialCounter(Fraction(delta), opts.skew, seed=opts.seed, limit=opts.limit)
    raise ValueError(f"unknown counter {opts.counter!r}")


def run_once(F: CnfFormula, eps: Fraction, driver: str, opts: SolveOptions) -> SearchTrace:
    """One driver run at a known ``eps``; the result always satisfies ``F`` when it succeeds."""
    if driver == "smallbias":
        # trimming could push the bias below the 1 - 1/(4M) regime, so run on F itself
        return run_smallbias(F, eps)
    if driver == "prg-enum":
        return run_prg_enumeration(F, uniform_distribution(F.n, opts.limit), eps)
    G, eps2 = prepare(F, eps)
    if driver == "naive":
        trace = search_naive(G, eps2, _counter(opts, G.n, eps2), opts.limit)
    elif driver == "stagewise":
        kw = {} if opts.mode == "paper" else {"p": opts.p}
        params = compute_parameters(G.M, G.n, eps2, opts.C, opts.mode, **kw)
        if params.p.numerator != 1 or params.p.denominator & (params.p.denominator - 1):
            raise ValueError(f"star density p={float(params.p):.3g} from {opts.mode} mode is not 2^-a; "
                             "the enumerable star families need a dyadic p (use practical mode)")
        comp = StageComponents(stars=opts.stars, fill=opts.fill, counter=_counter(opts, G.n, eps2))
        trace = search_stagewise(G, eps2, params, comp, limit=opts.limit)
    else:
        raise ValueError(f"unknown driver {driver!r}")
    trace.eps = Fraction(eps)
    if trace.success and not evaluate(F, trace.outcome):
        trace.outcome = None
        trace.fail("unsatisfied")
    return trace


def solve(F: CnfFormula, eps=None, opts: Optional[SolveOptions] = None) -> SearchTrace:
    """Run the configured driver; without ``eps`` fall back to halving guesses."""
    opts = opts or SolveOptions()
    if opts.driver not in DRIVERS:
        raise ValueError(f"driver must be one of {DRIVERS}")
    if eps is not None:
        eps = Fraction(eps)
        if not 0 < eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        return run_once(F, eps, pick_driver(F, eps, opts.driver), opts)
    driver = pick_driver(F, None, opts.driver)
    return search_with_unknown_eps(F, lambda G, e: run_once(G, e, driver, opts), opts.eps_floor)


def exit_status(trace: SearchTrace) -> int:
    if trace.success:
        return 0
    if trace.failure in ("promise", "audit"):
        return 2
    return 1
