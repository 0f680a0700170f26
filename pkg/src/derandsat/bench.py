"""Instance x driver benchmark matrix."""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .cnf import CnfFormula, read_dimacs
from .pipeline import SolveOptions, solve
from .planted import dyadic_floor, generate_planted

COLUMNS = ["instance", "driver", "n", "M", "eps", "counter_calls", "candidates", "stages",
           "success", "failure", "wall_time"]


@dataclass(frozen=True)
class BenchInstance:
    name: str
    formula: CnfFormula
    eps: Optional[Fraction] = None


def load_instance(path) -> BenchInstance:
    """DIMACS file plus optional ``.json`` sidecar; eps is the dyadic floor of its true bias."""
    path = Path(path)
    eps = None
    side = path.with_suffix(".json")
    if side.exists():
        eps = dyadic_floor(Fraction(json.loads(side.read_text())["true_bias"]))
    return BenchInstance(path.stem, read_dimacs(path), eps)


def planted_instances(count: int, n: int = 10, M: int = 20, k: int = 3, target_eps=Fraction(1, 4), seed: int = 0):
    out = []
    for i in range(count):
        inst = generate_planted(n, M, k, target_eps, seed + i)
        out.append(BenchInstance(f"planted-{seed + i:04d}", inst.formula, dyadic_floor(inst.true_bias)))
    return out


def _row(args) -> dict:
    inst, driver, opts, eps = args
    eps = eps if eps is not None else inst.eps
    t0 = time.perf_counter()
    row = {"instance": inst.name, "driver": driver, "n": inst.formula.n, "M": inst.formula.M,
           "eps": "" if eps is None else str(eps)}
    try:
        trace = solve(inst.formula, eps, replace(opts, driver=driver))
        c = trace.cost
        row.update(counter_calls=c.counter_calls, candidates=c.candidates_examined + c.assignments_enumerated,
                   stages=len(trace.stages), success=trace.success, failure=trace.failure or "")
    except Exception as exc:  # per-row failures are recorded, the matrix continues
        row.update(counter_calls="", candidates="", stages="", success=False,
                   failure=f"{type(exc).__name__}: {exc}")
    row["wall_time"] = round(time.perf_counter() - t0, 6)
    return row


def run_bench(instances: Sequence[BenchInstance], drivers: Sequence[str], opts: Optional[SolveOptions] = None,
              eps=None, jobs: int = 1) -> list:
    """One row per (instance, driver), sorted by (instance, driver)."""
    opts = opts or SolveOptions()
    eps = None if eps is None else Fraction(eps)
    tasks = [(inst, d, opts, eps) for inst in instances for d in drivers]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_row, tasks))
    else:
        rows = [_row(t) for t in tasks]
    return sorted(rows, key=lambda r: (r["instance"], r["driver"]))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
