"""Stage-wise search on one planted instance, stage by stage.

Blockwise stars fix a block of coordinates per stage, so the run takes
several stages; the audited bias is compared with eps - t*tau after each one.
"""
from fractions import Fraction

from derandsat import evaluate
from derandsat.counting import exact_bias
from derandsat.params import compute_parameters
from derandsat.planted import generate_planted
from derandsat.search import StageComponents, search_stagewise

inst = generate_planted(12, 20, 3, Fraction(1, 4), seed=7)
F, eps = inst.formula, Fraction(1, 4)
print(f"n={F.n} M={F.M} exact bias={inst.true_bias} ({float(inst.true_bias):.4f})")

ps = compute_parameters(F.M, F.n, eps, mode="practical")
print(f"p={ps.p} T={ps.T} tau={ps.tau}")

trace = search_stagewise(F, eps, ps, StageComponents(stars="blockwise"))
print(f"{'t':>2} {'n_t':>4} {'support':>8} {'calls':>6}  prefix        audited   floor")
for r in trace.stages:
    floor = eps - r.stage * ps.tau
    print(f"{r.stage:>2} {r.n_t:>4} {r.candidates:>8} {r.counter_calls:>6}  {r.prefix}  "
          f"{float(r.audited):.4f}    {float(floor):.4f}")

x = trace.outcome
print("assignment", x.bits, "satisfies F:", bool(evaluate(F, x)))
print("bias never dropped:", all(r.audited >= exact_bias(F) for r in trace.stages))
