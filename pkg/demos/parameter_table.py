"""Parameter sets and the symbolic cost model over a small (M, eps) grid."""
import math
from fractions import Fraction

from derandsat.params import compute_parameters, cost_model, verify_proposition

print(f"{'M':>8} {'eps':>5} {'w':>6} {'T':>12} {'log2 1/p':>9} {'ineq1':>6} {'ineq2':>6} {'log2 cost':>10}")
for k in (10, 14, 17, 20):
    for eps in (Fraction(1, 2), Fraction(1, 8), Fraction(1, 64)):
        ps = compute_parameters(2 ** k, eps=eps)
        rep = verify_proposition(ps)
        cost = cost_model(ps)
        print(f"{'2^' + str(k):>8} {str(eps):>5} {ps.w:6.2f} {ps.T:12.3g} {-math.log2(float(ps.p)):9.2f} "
              f"{str(rep.ineq1):>6} {str(rep.ineq2):>6} {cost.log2_total:10.1f}")
