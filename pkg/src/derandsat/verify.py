"""Invariant suites behind ``derandsat verify``.

Each check returns an :class:`InvariantResult`; a failing check carries a
concrete counterexample (formula in DIMACS, restriction strings, ...).
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import bitops
from .cnf import (CnfFormula, Restriction, compose, pad, parse_dimacs, restrict,
                  satisfied, to_dimacs, trim)
from .counting import AdversarialCounter, brute_force_count, dpll_count, exact_bias
from .framework import select_stage, stage_slack_audit, verify_bias_preservation
from .params import compute_parameters, verify_proposition
from .prg import kwise_distribution, max_parity_bias, smallbias_distribution, uniform_distribution
from .restrictions import (FAMILIES, condition_on_stars, gentle_distribution, star_distribution)


@dataclass
class InvariantResult:
    name: str
    passed: bool
    detail: str = ""
    counterexample: Optional[str] = None


def random_cnf(rng: random.Random, n: int, M: int, min_w: int = 1, max_w: int = 3) -> CnfFormula:
    clauses = []
    for _ in range(M):
        k = rng.randint(min_w, min(max_w, n))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), k)))
    return CnfFormula(n, tuple(clauses))


def random_restriction(rng: random.Random, n: int) -> Restriction:
    return Restriction("".join(rng.choice("01*") for _ in range(n)))


def _all_xs(n):
    return np.arange(1 << n, dtype=np.int64)


# --- core -----------------------------------------------------------------

def check_restrict_coherence(trials=60, seed=0) -> InvariantResult:
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(1, 8)
        F = random_cnf(rng, n, rng.randint(0, 2 * n))
        pi = random_restriction(rng, n)
        G = restrict(F, pi)
        xs = _all_xs(n)
        over = (xs & ~pi.fixed_mask) | pi.fixed_bits
        if not np.array_equal(satisfied(G, xs), satisfied(F, over)):
            return InvariantResult("restrict_evaluate_coherence", False, f"pi={pi}", to_dimacs(F))
    return InvariantResult("restrict_evaluate_coherence", True, f"{trials} random (F, pi), all completions")


def check_trim(trim_fn: Callable = trim, trials=200, seed=0) -> InvariantResult:
    """Trimmed clauses have width exactly w, others are untouched, satisfying sets shrink
    and the count drops by at most (#trimmed) 2^(n-w)."""
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(2, 12)
        F = random_cnf(rng, n, rng.randint(1, 6), 1, n)
        w = rng.randint(1, n)
        G = trim_fn(F, w)
        name = "trim_monotonicity"
        if G.M != F.M:
            return InvariantResult(name, False, f"clause count changed (w={w})", to_dimacs(F))
        for c, d in zip(F.clauses, G.clauses):
            if len(c) <= w and c != d:
                return InvariantResult(name, False, f"clause {c} of width <= {w} changed to {d}", to_dimacs(F))
            if len(c) > w and (len(d) != w or not set(d) <= set(c)):
                return InvariantResult(name, False, f"clause {c} trimmed to {d}, expected width {w}", to_dimacs(F))
        xs = _all_xs(n)
        sf, sg = satisfied(F, xs), satisfied(G, xs)
        if np.any(sg & ~sf):
            return InvariantResult(name, False, f"new satisfying assignment after trim (w={w})", to_dimacs(F))
        trimmed = sum(1 for c in F.clauses if len(c) > w)
        if int(sf.sum()) - int(sg.sum()) > trimmed * (1 << (n - w)):
            return InvariantResult(name, False, f"count dropped too much (w={w})", to_dimacs(F))
    return InvariantResult("trim_monotonicity", True, f"{trials} random formulas")


def check_compose(trials=300, seed=0) -> InvariantResult:
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(0, 8)
        a = random_restriction(rng, n)
        b = random_restriction(rng, a.num_stars)
        c = random_restriction(rng, b.num_stars)
        if compose(compose(a, b), c) != compose(a, compose(b, c)):
            return InvariantResult("compose_associativity", False, "", f"{a} {b} {c}")
        if compose(a, Restriction.all_stars(a.num_stars)) != a or compose(Restriction.all_stars(n), a) != a:
            return InvariantResult("compose_associativity", False, "identity failed", str(a))
    return InvariantResult("compose_associativity", True, f"{trials} random triples")


def check_pad(trials=100, seed=0) -> InvariantResult:
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(1, 10)
        F = random_cnf(rng, n, rng.randint(0, n + 2))
        P = pad(F)
        xs = _all_xs(n)
        if P.M < n or not np.array_equal(satisfied(F, xs), satisfied(P, xs)):
            return InvariantResult("pad_preserves_solutions", False, "", to_dimacs(F))
    return InvariantResult("pad_preserves_solutions", True, f"{trials} random formulas")


def check_dimacs_roundtrip(trials=100, seed=0) -> InvariantResult:
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(0, 12)
        F = random_cnf(rng, n, rng.randint(0, 10)) if n else CnfFormula(0, ())
        if parse_dimacs(to_dimacs(F)) != F:
            return InvariantResult("dimacs_roundtrip", False, "", to_dimacs(F))
    return InvariantResult("dimacs_roundtrip", True, f"{trials} random formulas")


# --- counting -------------------------------------------------------------

def check_counter_agreement(trials=200, seed=0, max_n=16) -> InvariantResult:
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(1, max_n)
        F = random_cnf(rng, n, rng.randint(0, 3 * n))
        if brute_force_count(F) != dpll_count(F):
            return InvariantResult("brute_dpll_agreement", False, "", to_dimacs(F))
    return InvariantResult("brute_dpll_agreement", True, f"{trials} random formulas, n <= {max_n}")


def check_additivity(trials=40, seed=0) -> InvariantResult:
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(1, 10)
        F = random_cnf(rng, n, rng.randint(0, 2 * n))
        b = exact_bias(F)
        for i in range(n):
            lo = restrict(F, Restriction("*" * i + "0" + "*" * (n - i - 1)))
            hi = restrict(F, Restriction("*" * i + "1" + "*" * (n - i - 1)))
            if b != (exact_bias(lo) + exact_bias(hi)) / 2:
                return InvariantResult("restriction_additivity", False, f"variable {i + 1}", to_dimacs(F))
    return InvariantResult("restriction_additivity", True, f"{trials} formulas, every variable")


# --- prg ------------------------------------------------------------------

def check_kwise_marginals(max_n=10, max_k=3) -> InvariantResult:
    for n in range(1, max_n + 1):
        for k in range(1, min(max_k, n) + 1):
            D = kwise_distribution(n, k)
            outs = D.outputs()
            if len(outs) != D.size:
                return InvariantResult("kwise_marginals", False, f"support size n={n} k={k}")
            for size in range(1, k + 1):
                for S in _subsets(n, size):
                    mask = sum(1 << i for i in S)
                    counts = np.bincount(bitops.extract(outs, mask), minlength=1 << size)
                    if not np.all(counts == D.size >> size):
                        return InvariantResult("kwise_marginals", False, f"n={n} k={k} S={S}", str(counts.tolist()))
    return InvariantResult("kwise_marginals", True, f"n <= {max_n}, k <= {max_k}, all projections")


def _subsets(n, size):
    from itertools import combinations
    return combinations(range(n), size)


def check_smallbias(max_n=14, delta=Fraction(1, 8)) -> InvariantResult:
    for n in range(1, max_n + 1):
        D = smallbias_distribution(n, delta)
        b = max_parity_bias(D)
        if b > delta or len(D.outputs()) != D.size:
            return InvariantResult("smallbias_certificate", False, f"n={n}: bias {b} > {delta}")
    return InvariantResult("smallbias_certificate", True, f"n <= {max_n}, delta = {delta}")


# --- restrictions ---------------------------------------------------------

def check_regularity(n=8, ps=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)), events=20, seed=0) -> InvariantResult:
    rng = np.random.default_rng(seed)
    for p in ps:
        for family in FAMILIES:
            for k in ((2, 3) if family == "kwise-select" else (2,)):
                base = star_distribution(n, p, family, k)
                tag = f"{base.family} n={n} p={p}"
                if any(f != p for f in base.live_fractions()):
                    return InvariantResult("p_regularity", False, tag, str(base.live_fractions()))
                cond = condition_on_stars(base)
                surv = cond.survival_fraction()
                if surv < p / 2:
                    return InvariantResult("conditioning_survival", False, f"{tag}: {surv}")
                bm, cm = base.masks(), cond.masks()
                for _ in range(events):
                    event = rng.random(1 << n) < rng.random()
                    pb = Fraction(int(event[bm].sum()), base.size)
                    pc = Fraction(int(event[cm].sum()), cond.size)
                    if pc > pb * 2 / p:
                        return InvariantResult("conditioning_inflation", False, f"{tag}: {pc} > {pb} * 2/p")
    return InvariantResult("p_regularity_and_conditioning", True,
                           f"n={n}, p in {[str(p) for p in ps]}, all families, {events} events each")


def check_gentle(seed=0) -> InvariantResult:
    rng = random.Random(seed)
    for _ in range(10):
        n = rng.randint(2, 7)
        stars = condition_on_stars(star_distribution(n, Fraction(1, 2), rng.choice(FAMILIES)))
        fill = kwise_distribution(n, min(2, n))
        g = gentle_distribution(stars, fill)
        outs = list(g.outcomes())
        if len(outs) != stars.size * fill.size:
            return InvariantResult("gentle_structure", False, "support size")
        for idx, pi in enumerate(outs):
            si, fi = divmod(idx, fill.size)
            mask, y = int(stars.masks()[si]), int(fill.outputs()[fi])
            if pi.fixed_mask != mask or pi.fixed_bits != (y & mask) or 2 * pi.num_fixed < stars.p * n:
                return InvariantResult("gentle_structure", False, f"outcome {idx}", str(pi))
    return InvariantResult("gentle_structure", True, "10 random gentle distributions")


# --- framework ------------------------------------------------------------

def random_lemma_triple(rng: random.Random, max_n=10):
    n = rng.randint(3, max_n)
    F = random_cnf(rng, n, rng.randint(1, 2 * n), 1, 3)
    L = frozenset(rng.sample(range(n), rng.randint(0, n)))
    kind = rng.choice(["uniform", "kwise2", "kwise3", "smallbias"])
    if kind == "uniform":
        D = uniform_distribution(n)
    elif kind == "smallbias":
        D = smallbias_distribution(n, Fraction(1, 8))
    else:
        D = kwise_distribution(n, min(int(kind[-1]), n))
    return F, L, D, rng.randint(1, 3)


def check_bias_preservation(trials=100, seed=0) -> InvariantResult:
    rng = random.Random(seed)
    for _ in range(trials):
        F, L, D, wp = random_lemma_triple(rng)
        rep = verify_bias_preservation(F, L, D, wp)
        if not rep.holds:
            return InvariantResult("bias_preservation", False, f"L={sorted(L)} D={D.name} w'={wp}", to_dimacs(F))
    return InvariantResult("bias_preservation", True, f"{trials} random (F, L, D, w') triples")


def check_stage_selection(trials=20, seed=0) -> InvariantResult:
    """Argmax dominance against the full outcome list, and the slack guarantee."""
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(3, 7)
        F = random_cnf(rng, n, rng.randint(1, 2 * n))
        stars = condition_on_stars(star_distribution(n, Fraction(1, 2), rng.choice(FAMILIES)))
        g = gentle_distribution(stars, uniform_distribution(n))
        for delta in (Fraction(0), Fraction(1, 20)):
            counter = AdversarialCounter(delta, "random", seed=rng.randrange(1 << 30))
            res = select_stage(F, g, counter, early_exit=False)
            best = max(counter.estimate(restrict(F, pi)).value for pi in g.outcomes())
            if res.estimated_bias.value != best:
                return InvariantResult("argmax_dominance", False, f"delta={delta}", to_dimacs(F))
            # uniform fill: some outcome loses nothing, so the realized loss is <= 2 delta
            if stage_slack_audit(F, res) > res.slack_budget:
                return InvariantResult("stage_slack", False, f"delta={delta}", to_dimacs(F))
    return InvariantResult("stage_selection", True, f"{trials} formulas, delta in {{0, 1/20}}")


# --- params ---------------------------------------------------------------

def check_params() -> InvariantResult:
    for M in (2 ** 14, 2 ** 17, 2 ** 20):
        for eps in (Fraction(1, 2), Fraction(1, 8), Fraction(1, 64)):
            ps = compute_parameters(M, M, eps, C=1)
            rep = verify_proposition(ps)
            if not rep.ineq2:
                return InvariantResult("proposition_grid", False, f"M={M} eps={eps}")
            if ps.tau * ps.T != eps / 2:
                return InvariantResult("tau_identity", False, f"M={M} eps={eps}")
            if ps.delta_prg + 2 * ps.delta_count != 5 * ps.tau / 6:
                return InvariantResult("budget_identity", False, f"M={M} eps={eps}")
    return InvariantResult("params_grid", True, "M in {2^14, 2^17, 2^20}, eps in {1/2, 1/8, 1/64}")


SUITES = {
    "core": [check_restrict_coherence, check_trim, check_compose, check_pad, check_dimacs_roundtrip],
    "counting": [check_counter_agreement, check_additivity],
    "prg": [check_kwise_marginals, check_smallbias],
    "restrictions": [check_regularity, check_gentle],
    "framework": [check_bias_preservation, check_stage_selection],
    "params": [check_params],
}


def run_suite(name: str) -> list:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for s in names:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}; choose from {sorted(SUITES)} or 'all'")
        out.extend(check() for check in SUITES[s])
    return out


def report_json(results) -> str:
    return json.dumps({"passed": all(r.passed for r in results), "results": [asdict(r) for r in results]}, indent=2)
