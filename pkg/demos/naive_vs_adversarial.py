"""Bit-by-bit search with an exact counter and with delta-accurate ones.

Within budget (delta = eps/(4n)) every skew still ends in a satisfying
assignment; a counter that is off by 1/2 can be steered into a wrong bit.
"""
from fractions import Fraction

from derandsat import CnfFormula
from derandsat.counting import AdversarialCounter, ExactCounter
from derandsat.planted import generate_planted
from derandsat.search import search_naive

inst = generate_planted(10, 15, 3, Fraction(1, 8), seed=3)
F, eps = inst.formula, Fraction(1, 8)
d = eps / (4 * F.n)
print(f"n={F.n} M={F.M} bias={inst.true_bias}, delta={d}")

for name, counter in [("exact", ExactCounter())] + [
        (skew, AdversarialCounter(d, skew, seed=1)) for skew in ("down", "up", "random", "flatten")]:
    tr = search_naive(F, eps, counter)
    worst = min(r.audited - (eps - 2 * r.stage * d) for r in tr.stages)
    print(f"{name:>8}: success={tr.success} calls={tr.cost.counter_calls} "
          f"min margin over eps - 2 i delta = {worst}")

# one unit clause, and estimates flattened all the way to 1/2
tr = search_naive(CnfFormula(1, ((1,),)), Fraction(1, 2), AdversarialCounter(Fraction(1, 2), "flatten"))
print("over budget:", tr.failure)
