import csv
import io
import json
import random
from dataclasses import replace
from fractions import Fraction
from math import ceil, log2

import pytest

import oracles
from conftest import random_cnf
from derandsat.cnf import CnfFormula, evaluate
from derandsat.counting import AdversarialCounter, ExactCounter
from derandsat.params import compute_parameters
from derandsat.planted import generate_planted
from derandsat.prg import kwise_distribution, measure_fooling_error, uniform_distribution
from derandsat.search import (StageComponents, prepare, run_prg_enumeration, search_naive,
                              search_prg_enumeration, search_smallbias_high_eps, search_stagewise,
                              search_with_unknown_eps)


def practical(F, eps, p=Fraction(1, 2)):
    return compute_parameters(max(F.M, F.n), F.n, eps, mode="practical", p=p)


@pytest.fixture(scope="module")
def corpus():
    return [generate_planted(n, 2 * n, 3, Fraction(1, 4), seed) for seed, n in enumerate([6, 8, 9, 10, 12] * 2)]


# preparation

def test_prepare_width():
    F = CnfFormula(6, ((1, 2, 3, 4, 5, 6), (1, -2)))
    G, e = prepare(F, Fraction(1, 2))
    # pad to M = 6; w = log2(2 * 6 / (1/2)) = log2 24 -> 5
    assert G.M == 6 and e == Fraction(1, 4)
    assert G.width == ceil(log2(24)) == 5
    assert oracles.bias(G.clauses, 6) >= oracles.bias(F.clauses, 6) - Fraction(1, 4)


# stage-wise

def test_stagewise_constant_true():
    F = CnfFormula(5, ())
    tr = search_stagewise(F, 1, practical(F, 1))
    assert tr.success and len(tr.outcome) == 5


@pytest.mark.parametrize("stars", ["exhaustive", "kwise-select", "blockwise"])
@pytest.mark.parametrize("fill", ["uniform", "kwise"])
def test_stagewise_planted(corpus, stars, fill):
    for inst in corpus:
        F, eps = inst.formula, Fraction(1, 4)
        ps = practical(F, eps)
        tr = search_stagewise(F, eps, ps, StageComponents(stars=stars, fill=fill))
        if fill == "uniform":
            assert tr.success, (inst.seed, tr.failure)
        if tr.success:
            assert evaluate(F, tr.outcome)
        n = F.n
        for rec in tr.stages:
            free_after = rec.prefix.count("*")
            assert free_after <= n * (1 - ps.p / 2) ** rec.stage
            if rec.audited is not None and fill == "uniform":
                assert rec.audited >= eps - rec.stage * ps.tau
        assert len(tr.stages) <= ps.T


def test_stagewise_blockwise_stage_count(corpus):
    for inst in corpus:
        F = inst.formula
        tr = search_stagewise(F, Fraction(1, 4), practical(F, Fraction(1, 4)), StageComponents(stars="blockwise"))
        assert tr.success
        assert len(tr.stages) <= ceil(log2(F.n)) + 2


def test_stagewise_counts_calls():
    F = CnfFormula(6, ((1, 2), (3, -4), (5, 6)))
    tr = search_stagewise(F, Fraction(1, 4), practical(F, Fraction(1, 4)), StageComponents(stars="blockwise"))
    assert tr.cost.counter_calls == sum(r.counter_calls for r in tr.stages)
    rows = list(csv.DictReader(io.StringIO(tr.to_csv())))
    assert list(rows[0]) == ["stage", "n_t", "candidates", "chosen_restriction", "est_bias_num", "est_bias_den",
                             "audited_bias_num", "audited_bias_den", "counter_calls"]
    assert len(rows) == len(tr.stages)
    assert rows[-1]["chosen_restriction"] == tr.outcome.bits
    s = json.loads(tr.summary_json())
    assert s["success"] and s["assignment"] == tr.outcome.bits


def test_stagewise_promise_violation():
    # bias 1/16; fixing any two coordinates still leaves at most 1/4
    F = CnfFormula(4, ((1,), (2,), (3,), (4,)))
    tr = search_stagewise(F, Fraction(1, 2), practical(F, Fraction(1, 2)), StageComponents(stars="blockwise"))
    assert not tr.success and tr.failure == "promise"


def test_stagewise_stage_budget():
    F = CnfFormula(8, ((1, 2),))
    ps = practical(F, Fraction(1, 4))
    tr = search_stagewise(F, Fraction(1, 4), replace(ps, T=1), StageComponents(stars="blockwise"))
    assert tr.failure == "stage-budget"


# naive

def test_naive_single_clause():
    F = CnfFormula(2, ((1, 2),))
    c = ExactCounter()
    tr = search_naive(F, Fraction(3, 4), c)
    assert tr.success and evaluate(F, tr.outcome)
    assert c.cost.counter_calls == 4 == tr.cost.counter_calls


def test_naive_adversarial_corpus(corpus):
    for inst in corpus:
        F, eps = inst.formula, Fraction(1, 4)
        d = eps / (4 * F.n)
        for skew in ("down", "up", "random", "flatten"):
            tr = search_naive(F, eps, AdversarialCounter(d, skew, seed=inst.seed))
            assert tr.success and evaluate(F, tr.outcome)
            assert tr.cost.counter_calls == 2 * F.n
            for rec in tr.stages:
                assert rec.audited >= eps - 2 * rec.stage * d


def test_naive_over_budget_misled():
    # estimates flattened to 1/2 for both halves: the tie picks x1 = 0
    F = CnfFormula(1, ((1,),))
    tr = search_naive(F, Fraction(1, 2), AdversarialCounter(Fraction(1, 2), "flatten"))
    assert not tr.success and tr.failure == "unsatisfied"


def test_naive_promise_detected():
    # with an exact counter the prefix bias never drops, so only a first
    # step already below eps can expose the broken promise
    F = CnfFormula(3, ((1,), (2,), (3,)))
    tr = search_naive(F, Fraction(1, 2))
    assert tr.failure == "promise"


# enumeration baselines

def test_prg_enum_uniform_finds():
    F = CnfFormula(5, ((1, -2), (3,), (-4, -5)))
    x = search_prg_enumeration(F, uniform_distribution(5))
    assert evaluate(F, x)


def test_prg_enum_fooled_formula():
    rng = random.Random(2)
    while True:
        F = random_cnf(rng, 8, 4, 2, 3)
        if abs(oracles.bias(F.clauses, 8) - Fraction(1, 2)) < Fraction(1, 16):
            break
    D = kwise_distribution(8, 2)
    assert measure_fooling_error(D, [F]).measured_error <= Fraction(1, 10)
    assert evaluate(F, search_prg_enumeration(F, D))


def test_prg_enum_unsat():
    tr = run_prg_enumeration(CnfFormula(2, ((1,), (-1,))), uniform_distribution(2))
    assert tr.failure == "not-found"


def test_smallbias_constant_true():
    assert search_smallbias_high_eps(CnfFormula(4, ())).bits == "0000"


@pytest.mark.parametrize("n", [3, 6, 9, 12])
def test_smallbias_single_falsifier(n):
    rng = random.Random(n)
    clause = tuple(v if rng.random() < 0.5 else -v for v in range(1, n + 1))
    F = CnfFormula(n, (clause,))
    assert F.M <= n
    assert evaluate(F, search_smallbias_high_eps(F))


def test_smallbias_half_bias_no_claim():
    F = CnfFormula(4, ((1,),))
    x = search_smallbias_high_eps(F)
    assert x is None or evaluate(F, x)


# unknown eps

def naive_inner(F, eps):
    G, e2 = prepare(F, eps)
    return search_naive(G, e2)


def test_unknown_eps_constant_true():
    tr = search_with_unknown_eps(CnfFormula(3, ()), naive_inner)
    assert tr.success and tr.attempts == [Fraction(1, 2)]


def test_unknown_eps_around_point_three():
    F = CnfFormula(6, ((1,), (2, 3), (4, 5, 6)))
    assert oracles.bias(F.clauses, 6) == Fraction(21, 64)
    tr = search_with_unknown_eps(F, naive_inner)
    assert tr.success and evaluate(F, tr.outcome)
    assert tr.attempts[-1] >= Fraction(1, 4)


def test_unknown_eps_floor():
    F = CnfFormula(2, ((1,), (-1,)))
    tr = search_with_unknown_eps(F, naive_inner, Fraction(1, 64))
    assert not tr.success and tr.failure == "eps-floor"
    assert len(tr.attempts) == 6
