import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import random_cnf
from derandsat.cnf import CnfFormula
from derandsat.prg import kwise_distribution, uniform_distribution
from derandsat.restrictions import (FAMILIES, condition_on_stars, decision_tree_depth,
                                    dyadic_exponent, gentle_distribution, narrow_after_fixing,
                                    star_distribution, switching_proxy_report)

P = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]


def test_dyadic_exponent():
    assert dyadic_exponent(Fraction(1, 8)) == 3
    assert dyadic_exponent(1) == 0
    for bad in (Fraction(3, 8), Fraction(1, 3), 0, 2):
        with pytest.raises(ValueError):
            dyadic_exponent(bad)


@pytest.mark.parametrize("family", FAMILIES)
def test_p_one_is_everything(family):
    D = star_distribution(6, 1, family)
    assert set(D.masks().tolist()) == {63}


def test_kwise_select_quarter():
    D = star_distribution(8, Fraction(1, 4), "kwise-select", k=2)
    masks = D.masks()
    for i in range(8):
        live = sum((int(m) >> i) & 1 for m in masks)
        assert Fraction(live, len(masks)) == Fraction(1, 4)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("p", P[:2])
def test_regular_and_expected_size(family, p):
    D = star_distribution(7, p, family)
    assert D.live_fractions() == [p] * 7
    sizes = [bin(int(m)).count("1") for m in D.masks()]
    assert Fraction(sum(sizes), len(sizes)) == p * 7


def test_conditioning_unchanged_when_all_large():
    D = star_distribution(5, 1, "exhaustive")
    assert condition_on_stars(D).size == D.size


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("p", P[:2])
def test_conditioning_survival_and_inflation(family, p):
    n = 6
    base = star_distribution(n, p, family)
    cond = condition_on_stars(base)
    assert all(2 * bin(int(m)).count("1") >= p * n for m in cond.masks())
    assert cond.survival_fraction() >= p / 2
    rng = random.Random(1)
    bm = base.masks().tolist()
    cm = cond.masks().tolist()
    for _ in range(10):
        event = {m for m in range(1 << n) if rng.random() < 0.3}
        pb = Fraction(sum(m in event for m in bm), len(bm))
        pc = Fraction(sum(m in event for m in cm), len(cm))
        assert pc <= pb * 2 / p


def test_conditioning_drops_empty_star_sets():
    # blockwise p = 1/8 on n = 3: shifts 3..7 give L = {}, below the threshold 3/16
    cond = condition_on_stars(star_distribution(3, Fraction(1, 8), "blockwise"))
    assert sorted(cond.masks().tolist()) == [1, 2, 4]
    assert cond.survival_fraction() == Fraction(3, 8)


def test_gentle_with_full_stars_is_all_assignments():
    stars = condition_on_stars(star_distribution(3, 1))
    g = gentle_distribution(stars, uniform_distribution(3))
    assert sorted(pi.values for pi in g.outcomes()) == sorted("".join(x) for x in product("01", repeat=3))


@pytest.mark.parametrize("family", FAMILIES)
def test_gentle_outcomes(family):
    n, p = 6, Fraction(1, 2)
    stars = condition_on_stars(star_distribution(n, p, family))
    fill = kwise_distribution(n, 2)
    g = gentle_distribution(stars, fill)
    outs = list(g.outcomes())
    assert len(outs) == g.size == stars.size * 2 ** fill.r
    for idx, pi in enumerate(outs):
        assert 2 * pi.num_fixed >= p * n
        assert g.outcome(idx) == pi


def test_distinct_candidates_cover_support():
    stars = condition_on_stars(star_distribution(5, Fraction(1, 2), "exhaustive"))
    g = gentle_distribution(stars, kwise_distribution(5, 2))
    outs = list(g.outcomes())
    seen = {}
    for idx, pi in enumerate(outs):
        seen.setdefault(pi, idx)
    reported = {}
    for si, mask, patterns, firsts in g.distinct_candidates():
        assert list(firsts) == sorted(firsts)
        for pat, first in zip(patterns, firsts):
            pi = outs[int(first)]
            assert pi.fixed_mask == mask and pi.fixed_bits == int(pat)
            reported[pi] = int(first)
    assert reported == seen


def test_gentle_size_mismatch():
    with pytest.raises(ValueError):
        gentle_distribution(condition_on_stars(star_distribution(4, Fraction(1, 2))), uniform_distribution(5))


# switching-lemma proxy

def _oracle_fraction(F, masks, w_prime):
    total = Fraction(0)
    for m in masks:
        live = {i for i in range(F.n) if (m >> i) & 1}
        off = [i for i in range(F.n) if i not in live]
        good = 0
        for bits in product((0, 1), repeat=len(off)):
            rho = [0] * F.n
            for i, b in zip(off, bits):
                rho[i] = b
            good += oracles.restricted_width(F.clauses, F.n, live, rho) <= w_prime
        total += Fraction(good, 2 ** len(off))
    return total / len(masks)


def test_switching_width4_clause():
    F = CnfFormula(4, ((1, 2, 3, 4),))
    stars = condition_on_stars(star_distribution(4, Fraction(1, 2)))
    rep = switching_proxy_report(F, stars, 2)
    assert rep.fraction_simplified == _oracle_fraction(F, stars.masks().tolist(), 2)
    assert rep.star_sets == stars.size


def test_switching_already_narrow():
    F = CnfFormula(5, ((1, -2), (3, 4)))
    stars = condition_on_stars(star_distribution(5, Fraction(1, 4)))
    assert switching_proxy_report(F, stars, 2).fraction_simplified == 1


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_switching_matches_oracle_and_is_monotone(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    F = random_cnf(rng, n, rng.randint(1, 6), 1, n)
    stars = condition_on_stars(star_distribution(n, Fraction(1, 2), rng.choice(FAMILIES)))
    fracs = [switching_proxy_report(F, stars, w).fraction_simplified for w in range(0, n + 1)]
    assert fracs == sorted(fracs)
    w = rng.randint(0, n)
    assert fracs[w] == _oracle_fraction(F, stars.masks().tolist(), w)


def test_decision_tree_proxy():
    assert decision_tree_depth(CnfFormula(3, ((1, 2),))) == 2
    assert decision_tree_depth(CnfFormula(3, ((1,), (-1,)))) == 0
    # parity of 2 bits needs depth 2; width-2 clauses allow it
    F = CnfFormula(2, ((1, 2), (-1, -2)))
    assert decision_tree_depth(F) == 2
    stars = condition_on_stars(star_distribution(4, Fraction(1, 2)))
    G = CnfFormula(4, ((1, 2, 3), (-1, 4)))
    a = switching_proxy_report(G, stars, 1, "decision-tree-depth").fraction_simplified
    b = switching_proxy_report(G, stars, 1).fraction_simplified
    assert 0 <= a <= 1 and 0 <= b <= 1


def test_sampled_switching_is_seeded():
    F = random_cnf(random.Random(0), 14, 10, 2, 5)
    stars = condition_on_stars(star_distribution(14, Fraction(1, 2), "blockwise"))
    a = switching_proxy_report(F, stars, 2, samples=64, seed=5)
    b = switching_proxy_report(F, stars, 2, samples=64, seed=5)
    assert a == b


def test_narrow_after_fixing_killed_clause():
    F = CnfFormula(3, ((1,), (2, 3)))
    # L = {x3}; rho sets x1 = 0 which falsifies the unit clause
    rhos = np.array([0b000, 0b001], dtype=np.int64)
    assert narrow_after_fixing(F, 0b100, rhos, 0).tolist() == [True, False]
    assert narrow_after_fixing(F, 0b100, rhos, 1).tolist() == [True, True]
    assert narrow_after_fixing(F, 0b110, rhos, 1).tolist() == [True, False]
