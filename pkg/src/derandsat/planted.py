"""Random k-CNF instances with a planted witness and an exactly counted bias."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cnf import Assignment, CnfFormula, evaluate, to_dimacs
from .counting import ExhaustiveLimitError, exact_bias, exhaustive_limit


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PlantedInstance:
    formula: CnfFormula
    true_bias: Fraction
    witness: Assignment
    seed: int
    k: int
    target_eps: Fraction

    def sidecar(self) -> dict:
        return {
            "n": self.formula.n,
            "M": self.formula.M,
            "k": self.k,
            "seed": self.seed,
            "target_eps": str(self.target_eps),
            "true_bias": str(self.true_bias),
            "true_bias_num": self.true_bias.numerator,
            "true_bias_den": self.true_bias.denominator,
            "witness": self.witness.bits,
        }

    def write(self, stem) -> tuple:
        """Write ``<stem>.cnf`` and ``<stem>.json``; returns both paths."""
        stem = Path(stem)
        cnf_path, json_path = stem.with_suffix(".cnf"), stem.with_suffix(".json")
        cnf_path.write_text(to_dimacs(self.formula, [f"planted seed={self.seed} bias={self.true_bias}"]))
        json_path.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n")
        return cnf_path, json_path


def _planted_formula(rng: random.Random, n: int, M: int, k: int, witness: str, agree: float = 0.5) -> CnfFormula:
    # each literal agrees with the witness with probability `agree`; clauses
    # the witness falsifies are resampled
    clauses = []
    for _ in range(M):
        variables = rng.sample(range(1, n + 1), k)
        while True:
            clause = [v if (witness[v - 1] == "1") == (rng.random() < agree) else -v for v in variables]
            if any((witness[abs(l) - 1] == "1") == (l > 0) for l in clause):
                break
        clauses.append(tuple(clause))
    return CnfFormula(n, tuple(clauses))


def generate_planted(n: int, M: int, k: int, target_eps=Fraction(1, 4), seed: int = 0, max_tries: int = 1000) -> PlantedInstance:
    """Sample planted k-CNFs from ``seed`` until the exact bias reaches ``target_eps``.

    Attempt ``j`` aligns literal signs with the witness with probability
    ``1/2 + j/max_tries`` (capped at 1), so plain planted instances are tried
    first and denser targets still become reachable.

    ``target_eps == 1`` is only met by a tautology, so it yields ``M``
    clauses of the form ``(x_i | ~x_i)``.
    """
    target_eps = Fraction(target_eps)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > exhaustive_limit():
        raise ExhaustiveLimitError(f"n={n} too large to count exactly")
    rng = random.Random(seed)
    witness = "".join(rng.choice("01") for _ in range(n))
    if target_eps >= 1:
        F = CnfFormula(n, tuple(((i % n) + 1, -((i % n) + 1)) for i in range(M)))
        return PlantedInstance(F, exact_bias(F), Assignment(witness), seed, k, target_eps)
    for j in range(max_tries):
        agree = min(1.0, 0.5 + j / max_tries)
        F = _planted_formula(rng, n, M, k, witness, agree)
        bias = exact_bias(F)
        if bias >= target_eps:
            assert evaluate(F, witness)
            return PlantedInstance(F, bias, Assignment(witness), seed, k, target_eps)
    raise GenerationError(f"no instance with bias >= {target_eps} after {max_tries} tries (n={n}, M={M}, k={k})")


def dyadic_floor(x: Fraction) -> Fraction:
    """Largest ``2**-j`` not exceeding ``x`` (``x`` in (0, 1])."""
    e = Fraction(1)
    while e > x:
        e /= 2
    return e
