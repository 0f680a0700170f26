"""Deterministic search for satisfying assignments of CNFs with many solutions."""
from .cnf import (Assignment, CnfFormula, DimacsError, Restriction, compose, evaluate, pad, parse_dimacs,
                  read_dimacs, restrict, to_dimacs, trim, write_dimacs)
from .counting import (AdversarialCounter, BiasEstimate, CostCounter, ExactCounter, ExhaustiveLimitError,
                       approx_bias, brute_force_count, dpll_count, exact_bias, exact_count)
from .framework import select_stage, stage_slack_audit, verify_bias_preservation
from .params import ParameterSet, compute_parameters, cost_model, verify_proposition
from .pipeline import SolveOptions, solve
from .planted import PlantedInstance, generate_planted
from .prg import (EnumerableDistribution, kwise_distribution, max_parity_bias, measure_fooling_error,
                  smallbias_distribution, uniform_distribution)
from .restrictions import (condition_on_stars, gentle_distribution, star_distribution,
                           switching_proxy_report)
from .search import (SearchTrace, StageComponents, search_naive, search_prg_enumeration,
                     search_smallbias_high_eps, search_stagewise, search_with_unknown_eps)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CnfFormula",
    "DimacsError",
    "Restriction",
    "compose",
    "evaluate",
    "pad",
    "parse_dimacs",
    "read_dimacs",
    "restrict",
    "to_dimacs",
    "trim",
    "write_dimacs",
    "AdversarialCounter",
    "BiasEstimate",
    "CostCounter",
    "ExactCounter",
    "ExhaustiveLimitError",
    "approx_bias",
    "brute_force_count",
    "dpll_count",
    "exact_bias",
    "exact_count",
    "select_stage",
    "stage_slack_audit",
    "verify_bias_preservation",
    "ParameterSet",
    "compute_parameters",
    "cost_model",
    "verify_proposition",
    "SolveOptions",
    "solve",
    "PlantedInstance",
    "generate_planted",
    "EnumerableDistribution",
    "kwise_distribution",
    "max_parity_bias",
    "measure_fooling_error",
    "smallbias_distribution",
    "uniform_distribution",
    "condition_on_stars",
    "gentle_distribution",
    "star_distribution",
    "switching_proxy_report",
    "SearchTrace",
    "StageComponents",
    "search_naive",
    "search_prg_enumeration",
    "search_smallbias_high_eps",
    "search_stagewise",
    "search_with_unknown_eps",
]
