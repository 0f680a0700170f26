from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from derandsat import bitops
from derandsat.cnf import Assignment, CnfFormula
from derandsat.gf2m import PRIMITIVE, field
from derandsat.prg import (kwise_distribution, max_parity_bias, measure_fooling_error, point_distribution,
                           smallbias_distribution, uniform_distribution)


def samples(D):
    return [[(int(v) >> i) & 1 for i in range(D.n)] for v in D.outputs()]


# GF(2^m)

@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 8])
def test_field_mul_matches_carryless(m):
    F = field(m)
    a = np.arange(1 << m)
    for x in range(1 << m):
        got = F.mul(np.full_like(a, x), a)
        assert got.tolist() == [oracles.gf2_mul(x, y, m, PRIMITIVE[m]) for y in range(1 << m)]


@given(st.integers(1, 20), st.data())
def test_field_axioms(m, data):
    F = field(m)
    x, y, z = (data.draw(st.integers(0, (1 << m) - 1)) for _ in range(3))
    assert int(F.mul(x, F.mul(y, z))) == int(F.mul(F.mul(x, y), z))
    assert int(F.mul(x, y ^ z)) == int(F.mul(x, y)) ^ int(F.mul(x, z))
    assert int(F.mul(x, 1)) == x


# uniform and point

def test_uniform_support():
    D = uniform_distribution(3)
    assert sorted(a.bits for a in D.support()) == sorted(format(i, "03b") for i in range(8))
    assert measure_fooling_error(D, [CnfFormula(3, ((1, -2),)), CnfFormula(3, ((3,),))]).measured_error == 0


def test_expectation_single_clause():
    assert uniform_distribution(4).expectation(CnfFormula(4, ((1, 2),))) == Fraction(3, 4)


def test_point_mass_error():
    F = CnfFormula(3, ((1, 2), (-3,)))
    x = Assignment("001")
    rep = measure_fooling_error(point_distribution(x), [F])
    assert rep.measured_error == abs(oracles.evaluate(F.clauses, [0, 0, 1]) - oracles.bias(F.clauses, 3))


def test_generate_matches_outputs():
    D = kwise_distribution(6, 3)
    outs = D.outputs()
    for s in (0, 1, 17, D.size - 1):
        assert D.generate(s).as_int() == int(outs[s])
    with pytest.raises(ValueError):
        D.generate(D.size)


# k-wise

@pytest.mark.parametrize("n,k", [(8, 2), (8, 3), (5, 5), (10, 3), (3, 1)])
def test_kwise_every_k_projection_uniform(n, k):
    D = kwise_distribution(n, k)
    X = samples(D)
    for S in combinations(range(n), k):
        counts = {}
        for x in X:
            key = tuple(x[i] for i in S)
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 2 ** k
        assert set(counts.values()) == {D.size // 2 ** k}


def test_kwise_pairs_exact_count():
    D = kwise_distribution(8, 2)
    assert D.r == 6
    outs = D.outputs()
    for i, j in combinations(range(8), 2):
        proj = bitops.extract(outs, (1 << i) | (1 << j))
        assert np.bincount(proj, minlength=4).tolist() == [2 ** (D.r - 2)] * 4


def test_kwise_not_trivially_uniform():
    # the point of the construction: far fewer seeds than 2^n
    assert kwise_distribution(16, 2).size < 2 ** 16


def test_kwise_fooling_width2_corpus():
    D = kwise_distribution(8, 3)
    corpus = [CnfFormula(8, ((1, -2), (3, 4), (-5, 8))), CnfFormula(8, ((2, 7),)),
              CnfFormula(8, ((1, 2), (-1, 3), (-2, -3), (4, 5), (6, -7)))]
    X = samples(D)
    want = max(abs(oracles.expectation(X, F.clauses) - oracles.bias(F.clauses, 8)) for F in corpus)
    rep = measure_fooling_error(D, corpus)
    assert rep.measured_error == want
    assert rep.max_width == 2 and rep.corpus_size == 3
    # a single clause touches 2 <= k coordinates, so it is fooled exactly
    assert measure_fooling_error(D, [corpus[1]]).measured_error == 0


# small-bias

def test_smallbias_n10_fourier():
    D = smallbias_distribution(10, Fraction(1, 8))
    b = max_parity_bias(D)
    assert b <= Fraction(1, 8)
    assert b == oracles.parity_bias(samples(D), 10)


@pytest.mark.parametrize("n,delta", [(4, Fraction(1, 2)), (7, Fraction(1, 4)), (6, Fraction(1, 16))])
def test_smallbias_against_direct_sum(n, delta):
    D = smallbias_distribution(n, delta)
    assert max_parity_bias(D) == oracles.parity_bias(samples(D), n) <= delta


def test_smallbias_vacuous_delta():
    D = smallbias_distribution(5, 2)
    assert D.size >= 1 and len(D.outputs()) == D.size


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.sampled_from([Fraction(1, 4), Fraction(1, 8), Fraction(1, 32)]))
def test_smallbias_certificate(n, delta):
    assert max_parity_bias(smallbias_distribution(n, delta)) <= delta


def test_smallbias_hits_dense_formula():
    # one falsifying assignment among 2^6, M = 6 clauses so E[F] = 1 - 1/64 >= 1 - 1/(4M)
    F = CnfFormula(6, ((1, 2, 3, 4, 5, 6),) * 6)
    assert oracles.bias(F.clauses, 6) == Fraction(63, 64)
    D = smallbias_distribution(6, Fraction(1, 24))
    assert any(oracles.evaluate(F.clauses, x) for x in samples(D))
