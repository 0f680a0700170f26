import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import cnfs, random_cnf
from derandsat.cnf import CnfFormula, restrict
from derandsat.counting import AdversarialCounter, ExactCounter
from derandsat.framework import select_stage, stage_slack_audit, verify_bias_preservation
from derandsat.prg import kwise_distribution, smallbias_distribution, uniform_distribution
from derandsat.restrictions import (FAMILIES, StarDistribution, condition_on_stars, gentle_distribution,
                                    star_distribution)


def fixed_stars(n, mask, p=Fraction(1, 2)):
    return condition_on_stars(StarDistribution(n, p, 0, "fixed", lambda s: np.full(s.shape, mask, dtype=np.int64)))


def samples(D):
    return [[(int(v) >> i) & 1 for i in range(D.n)] for v in D.outputs()]


# bias preservation

def test_constant_true():
    rep = verify_bias_preservation(CnfFormula(5, ()), {0, 2}, kwise_distribution(5, 2), 1)
    assert rep.lhs == 1 and rep.holds and rep.delta_sl == 0


def test_uniform_fill_is_exact():
    rng = random.Random(4)
    F = random_cnf(rng, 7, 9)
    rep = verify_bias_preservation(F, {1, 3, 4}, uniform_distribution(7), 1)
    assert rep.delta_prg == 0
    assert rep.lhs == rep.uniform_bias == oracles.bias(F.clauses, 7)
    assert rep.lhs - rep.rhs_bound == rep.delta_sl


def test_against_double_loop_kwise3():
    rng = random.Random(12)
    F = random_cnf(rng, 10, 14, 3, 3)
    L = set(rng.sample(range(10), 5))
    D = kwise_distribution(10, 3)
    rep = verify_bias_preservation(F, L, D, 2)
    lhs, dsl, dprg, uni = oracles.bias_preservation(F.clauses, 10, L, samples(D), 2)
    assert (rep.lhs, rep.delta_sl, rep.delta_prg, rep.uniform_bias) == (lhs, dsl, dprg, uni)
    assert rep.holds


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_matches_oracle_random(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    F = random_cnf(rng, n, rng.randint(1, 2 * n))
    L = set(rng.sample(range(n), rng.randint(0, n)))
    D = rng.choice([uniform_distribution(n), kwise_distribution(n, min(2, n)),
                    smallbias_distribution(n, Fraction(1, 4))])
    wp = rng.randint(0, 3)
    rep = verify_bias_preservation(F, L, D, wp)
    lhs, dsl, dprg, uni = oracles.bias_preservation(F.clauses, n, L, samples(D), wp)
    assert (rep.lhs, rep.delta_sl, rep.delta_prg, rep.uniform_bias) == (lhs, dsl, dprg, uni)
    assert rep.holds


def test_size_mismatch():
    with pytest.raises(ValueError):
        verify_bias_preservation(CnfFormula(3, ()), {0}, uniform_distribution(4), 1)


# stage selection

def test_stage_constant_true():
    g = gentle_distribution(condition_on_stars(star_distribution(4, Fraction(1, 2))), uniform_distribution(4))
    res = select_stage(CnfFormula(4, ()), g)
    assert res.estimated_bias.value == 1 and res.index == 0


def test_stage_two_clauses_fixed_pair():
    F = CnfFormula(4, ((1, 2), (3, 4)))
    g = gentle_distribution(fixed_stars(4, 0b0011), uniform_distribution(4))
    res = select_stage(F, g)
    per_fill = {pi.values: oracles.restricted_bias(F.clauses, 4, pi.values) for pi in g.outcomes()}
    assert max(per_fill.values()) == Fraction(3, 4) == res.estimated_bias.value
    assert res.chosen.values[:2] in ("01", "10", "11")
    assert res.chosen.values[2:] == "**"
    assert oracles.bias(F.clauses, 4) == Fraction(9, 16)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.booleans())
def test_argmax_lowest_index_and_max_ge_mean(seed, early):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    F = random_cnf(rng, n, rng.randint(1, 2 * n))
    stars = condition_on_stars(star_distribution(n, Fraction(1, 2), rng.choice(FAMILIES)))
    g = gentle_distribution(stars, uniform_distribution(n))
    res = select_stage(F, g, ExactCounter(), early_exit=early)
    values = [oracles.restricted_bias(F.clauses, n, pi.values) for pi in g.outcomes()]
    best = max(values)
    assert res.estimated_bias.value == best
    assert res.index == values.index(best)
    assert best >= sum(values) / len(values) == oracles.bias(F.clauses, n)
    assert stage_slack_audit(F, res) <= 0


def test_argmax_with_kwise_fill():
    rng = random.Random(8)
    F = random_cnf(rng, 8, 12)
    g = gentle_distribution(condition_on_stars(star_distribution(8, Fraction(1, 4), "kwise-select")),
                            kwise_distribution(8, 2))
    res = select_stage(F, g, early_exit=False)
    values = [oracles.restricted_bias(F.clauses, 8, pi.values) for pi in g.outcomes()]
    assert res.index == values.index(max(values))
    assert res.support_size == g.size


def test_adversarial_stage_budget():
    rng = random.Random(9)
    for _ in range(15):
        n = rng.randint(3, 7)
        F = random_cnf(rng, n, rng.randint(1, 2 * n))
        g = gentle_distribution(condition_on_stars(star_distribution(n, Fraction(1, 2), "blockwise")),
                                uniform_distribution(n))
        d = Fraction(1, 16)
        c = AdversarialCounter(d, "random", seed=rng.randrange(1000))
        res = select_stage(F, g, c)
        assert res.slack_budget == 2 * d
        assert res.estimated_bias.value == max(c.estimate(restrict(F, pi)).value for pi in g.outcomes())
        assert stage_slack_audit(F, res) <= res.slack_budget


def test_free_positions_lift():
    F = CnfFormula(5, ((2, 4), (-5,)))
    g = gentle_distribution(fixed_stars(2, 0b11, Fraction(1)), uniform_distribution(2))
    res = select_stage(F, g, free=(1, 3))
    assert res.global_restriction.values[0] == "*" and res.global_restriction.values[4] == "*"
    assert oracles.restricted_bias(F.clauses, 5, res.global_restriction.values) == Fraction(1, 2)


@given(cnfs(max_n=6))
def test_stage_never_exceeds_one(F):
    g = gentle_distribution(condition_on_stars(star_distribution(F.n, Fraction(1, 2))), uniform_distribution(F.n))
    assert 0 <= select_stage(F, g).estimated_bias.value <= 1
