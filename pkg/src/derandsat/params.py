"""Parameter calculus for the stage-wise search and its cost model.

Logarithms are base 2 except where natural logs appear in the formulas: the
stage budget ``T = ceil(2 ln n / p)`` and the ``192 ln M`` term of ``w'``.
Error budgets and ``tau`` are exact fractions so ``tau * T == eps / 2``
holds exactly; ``p`` is exact too (in paper mode it is the exact value of the
float the formula produces).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Optional

MODES = ("paper", "practical")


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class ParameterSet:
    M: int
    n: int
    eps: Fraction
    C: float
    mode: str
    w: float            # log2(2M/eps), the trimming threshold
    w_prime: float      # target width of the simple class
    p: Fraction         # star density
    eta: float          # switching-lemma parameter; cost model only
    delta_sand: Fraction
    delta_prg: Fraction
    delta_count: Fraction
    delta_sl: Fraction  # 2(delta_sand + eta^(w'/4)) / p unless overridden
    T: int              # stage budget
    tau: Fraction       # per-stage bias budget, eps / (2T)

    @property
    def trim_width(self) -> int:
        """Smallest integer width with ``M * 2^-w <= eps/2``."""
        return max(1, math.ceil(self.w - 1e-12))

    @property
    def slack(self) -> Fraction:
        """Per-stage loss allowed for the best candidate (before counting error)."""
        return self.delta_prg + self.delta_sand + self.delta_sl

    @property
    def stage_budget_total(self) -> Fraction:
        return self.slack + 2 * self.delta_count

    def to_json(self) -> str:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            d[f.name] = f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v
        return json.dumps(d, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ParameterSet":
        d = json.loads(text)
        kw = {}
        for f in fields(cls):
            v = d[f.name]
            if f.type == "Fraction":
                v = Fraction(v)
            kw[f.name] = v
        return cls(**kw)


def _stage_budget(n: int, p: Fraction) -> int:
    return max(1, math.ceil(2 * math.log(n) / float(p)))


def _eta_power(eta: float, w_prime: float) -> Fraction:
    if eta == 0:
        return Fraction(0)
    return Fraction(eta ** (w_prime / 4))


def compute_parameters(
    M: int,
    n: Optional[int] = None,
    eps=Fraction(1, 2),
    C: float = 1.0,
    mode: str = "paper",
    *,
    p=None,
    eta: Optional[float] = None,
    w_prime: Optional[float] = None,
    delta_sand=None,
    delta_prg=None,
    delta_count=None,
    delta_sl=None,
) -> ParameterSet:
    """All stage parameters from ``(M, n, eps)``.

    Paper mode evaluates the closed-form choices (the keyword overrides are
    rejected).  Practical mode takes ``p`` (default 1/2) and the error
    budgets (default 0) from the caller and only checks that
    ``delta_prg + delta_sand + delta_sl + 2 delta_count <= tau``.
    """
    n = M if n is None else n
    eps = Fraction(eps)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not 1 <= n <= M:
        raise ValueError(f"need 1 <= n <= M (pad first), got n={n}, M={M}")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if C <= 0:
        raise ValueError("C must be positive")
    w = math.log2(2 * M / eps)

    if mode == "paper":
        if any(v is not None for v in (p, eta, w_prime, delta_sand, delta_prg, delta_count, delta_sl)):
            raise ValueError("paper mode does not take overrides")
        inner = math.log2(math.log2(M) / eps) if M > 1 else 0.0
        base = w * inner
        if base <= 1:
            raise ValueError(f"M={M}, eps={eps} too small for paper-mode formulas")
        eta = 1 / base
        p = Fraction(base ** (-2 * C * math.log2(w)))
        if p == 0:
            raise ValueError("p underflows double precision")
        w_prime = 16 * C * math.log2(w) + 4 * math.log2(192 * math.log(M) / eps)
        T = _stage_budget(n, p)
        tau = eps / (2 * T)
        delta_count = tau / 3
        delta_prg = tau / 6
        delta_sand = p * tau / 48
        delta_sl = 2 * (delta_sand + _eta_power(eta, w_prime)) / p
    else:
        p = Fraction(1, 2) if p is None else Fraction(p)
        if not 0 < p <= 1:
            raise ValueError("p must lie in (0, 1]")
        eta = 0.0 if eta is None else float(eta)
        w_prime = float(math.ceil(w)) if w_prime is None else float(w_prime)
        T = _stage_budget(n, p)
        tau = eps / (2 * T)
        delta_sand = Fraction(delta_sand or 0)
        delta_prg = Fraction(delta_prg or 0)
        delta_count = Fraction(delta_count or 0)
        if delta_sl is None:
            delta_sl = 2 * (delta_sand + _eta_power(eta, w_prime)) / p
        delta_sl = Fraction(delta_sl)
        if min(delta_sand, delta_prg, delta_count, delta_sl) < 0:
            raise ValueError("error budgets must be non-negative")
        total = delta_prg + delta_sand + delta_sl + 2 * delta_count
        if total > tau:
            raise BudgetError(f"budgets sum to {float(total):.3g} > tau = {float(tau):.3g}")
    return ParameterSet(
        M=M, n=n, eps=eps, C=C, mode=mode, w=w, w_prime=w_prime, p=p, eta=eta,
        delta_sand=delta_sand, delta_prg=delta_prg, delta_count=delta_count,
        delta_sl=delta_sl, T=T, tau=tau,
    )


@dataclass(frozen=True)
class PropositionReport:
    ineq1: bool
    ineq2: bool
    eta_check: bool
    # ineq1 compared in log2 space: log2 p <= log2(eta / (w log2(1/delta_sand))^(C log2 w))
    ineq1_lhs_log2: float
    ineq1_rhs_log2: float
    ineq2_lhs: Fraction
    ineq2_rhs: Fraction
    eta_power: Fraction
    eta_bound: float


def _log2_fraction(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


def verify_proposition(ps: ParameterSet) -> PropositionReport:
    """Check the switching-lemma precondition on ``p`` and the per-stage budget."""
    lg_p = _log2_fraction(ps.p)
    lg_inv_sand = -_log2_fraction(ps.delta_sand) if ps.delta_sand > 0 else math.inf
    if ps.eta > 0 and ps.w > 1:
        rhs1 = math.log2(ps.eta) - ps.C * math.log2(ps.w) * math.log2(ps.w * lg_inv_sand)
    else:
        rhs1 = -math.inf
    lhs2 = ps.delta_prg + ps.delta_sand + ps.delta_sl + 2 * ps.delta_count
    eta_pow = _eta_power(ps.eta, ps.w_prime)
    bound = float(ps.eps * ps.p * ps.p) / (192 * math.log(ps.n)) if ps.n > 1 else math.inf
    return PropositionReport(
        ineq1=lg_p <= rhs1,
        ineq2=lhs2 <= ps.tau,
        eta_check=float(eta_pow) <= bound,
        ineq1_lhs_log2=lg_p,
        ineq1_rhs_log2=rhs1,
        ineq2_lhs=lhs2,
        ineq2_rhs=ps.tau,
        eta_power=eta_pow,
        eta_bound=bound,
    )


@dataclass(frozen=True)
class CostReport:
    r_sl: float
    r_prg: float
    log2_t_count: float
    log2_stages: float
    log2_total: float

    @property
    def t_count(self) -> float:
        return 2.0 ** self.log2_t_count if self.log2_t_count < 1024 else math.inf

    @property
    def total(self) -> float:
        return 2.0 ** self.log2_total if self.log2_total < 1024 else math.inf


def _lg(x: float) -> float:
    # logs of logs go negative (or undefined) on tiny inputs; floor at 0
    return math.log2(x) if x > 1 else 0.0


def _lg_inv(delta: Fraction) -> float:
    return math.inf if delta == 0 else -_log2_fraction(delta)


def cost_model(ps: ParameterSet, c_sl: float = 1.0, c_prg: float = 1.0, c_count: float = 1.0) -> CostReport:
    """Seed lengths, counting time and total stage-wise time, hidden constants configurable.

    Everything is carried in log2 so astronomically large totals stay finite;
    ``CostReport.total`` turns into ``inf`` past double range.
    """
    w, wp, n = ps.w, ps.w_prime, ps.n
    lg_inv_eta = math.inf if ps.eta == 0 else -math.log2(ps.eta)
    r_sl = c_sl * (
        _lg(w) * (_lg(n) + wp * (_lg(_lg(w)) + lg_inv_eta))
        + w * _lg(w * _lg_inv(ps.delta_sand))
    )
    inv_prg = _lg_inv(ps.delta_prg)
    r_prg = c_prg * (
        wp ** 2 * _lg(wp * inv_prg) ** 2 + wp * _lg(wp) * inv_prg + _lg(_lg(n))
    )
    lg_w_over = _lg(w) + _lg_inv(ps.delta_count)
    log2_t_count = (
        _lg(ps.M)
        + c_count * lg_w_over * _lg(n)
        + c_count * w * _lg(_lg(n))
        + c_count * w * lg_w_over * _lg(lg_w_over) ** 2
    )
    log2_stages = math.log2(ps.T)
    return CostReport(r_sl, r_prg, log2_t_count, log2_stages, r_sl + r_prg + log2_t_count + log2_stages)
