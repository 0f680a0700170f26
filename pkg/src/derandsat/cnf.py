"""CNF formulas, assignments and restrictions.

Variables are 1-based (DIMACS style); a literal is a signed int.  Restriction
and assignment strings are 0-based: character ``i`` talks about variable
``i + 1``.  When an assignment is packed into an int, variable ``v`` lives in
bit ``v - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

Literal = int
Clause = tuple  # tuple[Literal, ...], sorted by variable


class DimacsError(ValueError):
    """Malformed DIMACS input; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _normalize_clause(lits: Iterable[int], n: int) -> tuple:
    seen = set()
    for lit in lits:
        lit = int(lit)
        if lit == 0 or abs(lit) > n:
            raise ValueError(f"literal {lit} out of range for n={n}")
        seen.add(lit)
    return tuple(sorted(seen, key=lambda l: (abs(l), l < 0)))


def is_tautology(clause: Sequence[int]) -> bool:
    s = set(clause)
    return any(-l in s for l in clause)


@dataclass(frozen=True)
class CnfFormula:
    """Conjunction of clauses over variables ``1..n``.

    Duplicate literals inside a clause are merged; duplicate clauses and
    tautological clauses are kept (use :func:`normalize` to drop the latter).
    The canonical false formula is one empty clause, canonical true has none.
    """

    n: int
    clauses: tuple = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        object.__setattr__(
            self, "clauses", tuple(_normalize_clause(c, self.n) for c in self.clauses)
        )

    @property
    def M(self) -> int:
        return len(self.clauses)

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    @cached_property
    def masks(self) -> list:
        """Per-clause ``(positive_mask, negative_mask)`` over packed assignments."""
        out = []
        for c in self.clauses:
            pos = neg = 0
            for lit in c:
                if lit > 0:
                    pos |= 1 << (lit - 1)
                else:
                    neg |= 1 << (-lit - 1)
            out.append((pos, neg))
        return out

    @cached_property
    def variables(self) -> tuple:
        """Sorted variables that occur in some clause."""
        return tuple(sorted({abs(l) for c in self.clauses for l in c}))

    def is_true(self) -> bool:
        return not self.clauses

    def is_false(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    def __str__(self):
        if not self.clauses:
            return "TRUE"
        parts = []
        for c in self.clauses:
            lits = " | ".join(f"x{l}" if l > 0 else f"~x{-l}" for l in c)
            parts.append(f"({lits})")
        return " & ".join(parts)


def true_formula(n: int) -> CnfFormula:
    return CnfFormula(n, ())


def false_formula(n: int) -> CnfFormula:
    return CnfFormula(n, ((),))


@dataclass(frozen=True)
class Assignment:
    bits: str

    def __post_init__(self):
        if set(self.bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {self.bits!r}")

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return self.bits

    @property
    def n(self) -> int:
        return len(self.bits)

    def as_int(self) -> int:
        return sum(1 << i for i, b in enumerate(self.bits) if b == "1")

    @classmethod
    def from_int(cls, n: int, value: int) -> "Assignment":
        return cls("".join("1" if (value >> i) & 1 else "0" for i in range(n)))


AssignmentLike = Union[Assignment, str, Sequence[int]]


def _bits(x: AssignmentLike) -> str:
    if isinstance(x, Assignment):
        return x.bits
    if isinstance(x, str):
        return Assignment(x).bits
    return Assignment("".join(str(int(b)) for b in x)).bits


@dataclass(frozen=True)
class Restriction:
    """A string over ``0``, ``1`` and ``*`` (star = free coordinate)."""

    values: str

    def __post_init__(self):
        if set(self.values) - {"0", "1", "*"}:
            raise ValueError(f"not a restriction: {self.values!r}")

    @classmethod
    def all_stars(cls, n: int) -> "Restriction":
        return cls("*" * n)

    @classmethod
    def from_masks(cls, n: int, fixed_mask: int, bits: int) -> "Restriction":
        chars = []
        for i in range(n):
            if (fixed_mask >> i) & 1:
                chars.append("1" if (bits >> i) & 1 else "0")
            else:
                chars.append("*")
        return cls("".join(chars))

    def __len__(self):
        return len(self.values)

    def __str__(self):
        return self.values

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def star_positions(self) -> tuple:
        return tuple(i for i, c in enumerate(self.values) if c == "*")

    @property
    def num_stars(self) -> int:
        return self.values.count("*")

    @property
    def num_fixed(self) -> int:
        return self.n - self.num_stars

    @property
    def fixed_mask(self) -> int:
        return sum(1 << i for i, c in enumerate(self.values) if c != "*")

    @property
    def fixed_bits(self) -> int:
        return sum(1 << i for i, c in enumerate(self.values) if c == "1")

    def is_total(self) -> bool:
        return "*" not in self.values

    def to_assignment(self) -> Assignment:
        if not self.is_total():
            raise ValueError("restriction still has free coordinates")
        return Assignment(self.values)

    def overlay(self, x: AssignmentLike) -> Assignment:
        """Fill the stars from the full-length assignment ``x``."""
        bits = _bits(x)
        if len(bits) != self.n:
            raise ValueError(f"assignment length {len(bits)} != {self.n}")
        return Assignment("".join(b if c == "*" else c for c, b in zip(self.values, bits)))

    def compose(self, inner: "Restriction") -> "Restriction":
        return compose(self, inner)


def compose(outer: Restriction, inner: Restriction) -> Restriction:
    """Refine ``outer``: its i-th star takes the i-th value of ``inner``."""
    if len(inner) != outer.num_stars:
        raise ValueError(
            f"inner restriction has length {len(inner)}, outer has {outer.num_stars} stars"
        )
    it = iter(inner.values)
    return Restriction("".join(next(it) if c == "*" else c for c in outer.values))


def evaluate(F: CnfFormula, x: AssignmentLike) -> int:
    bits = _bits(x)
    if len(bits) != F.n:
        raise ValueError(f"assignment length {len(bits)} != n={F.n}")
    for clause in F.clauses:
        if not any((bits[abs(l) - 1] == "1") == (l > 0) for l in clause):
            return 0
    return 1


def satisfied(F: CnfFormula, xs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`evaluate` over packed assignments (an int64 array)."""
    xs = np.asarray(xs, dtype=np.int64)
    out = np.ones(xs.shape, dtype=bool)
    for pos, neg in F.masks:
        out &= ((xs & pos) != 0) | ((~xs & neg) != 0)
    return out


def restrict(F: CnfFormula, pi: Restriction) -> CnfFormula:
    """Substitute the fixed coordinates of ``pi`` and simplify.

    Variable numbering is kept; the stars of ``pi`` are the free variables.
    Satisfied and tautological clauses vanish, falsified literals are removed,
    and an emptied clause collapses the whole formula to the canonical false.
    """
    if len(pi) != F.n:
        raise ValueError(f"restriction length {len(pi)} != n={F.n}")
    vals = pi.values
    out = []
    for clause in F.clauses:
        if is_tautology(clause):
            continue
        kept = []
        for lit in clause:
            v = vals[abs(lit) - 1]
            if v == "*":
                kept.append(lit)
            elif (v == "1") == (lit > 0):
                break
        else:
            if not kept:
                return false_formula(F.n)
            out.append(tuple(kept))
    return CnfFormula(F.n, tuple(out))


def normalize(F: CnfFormula) -> CnfFormula:
    """Drop tautological clauses; collapse to canonical false if a clause is empty."""
    if F.is_false():
        return false_formula(F.n)
    return CnfFormula(F.n, tuple(c for c in F.clauses if not is_tautology(c)))


def trim(F: CnfFormula, w: int) -> CnfFormula:
    """Cut every clause wider than ``w`` down to its ``w`` lowest-index variables."""
    if w < 1:
        raise ValueError("trim width must be at least 1")
    return CnfFormula(F.n, tuple(c[:w] if len(c) > w else c for c in F.clauses))


def pad(F: CnfFormula) -> CnfFormula:
    """Append tautologies ``(x_i | ~x_i)`` until there are at least ``n`` clauses."""
    if F.M >= F.n:
        return F
    extra = tuple((i, -i) for i in range(1, F.n - F.M + 1))
    return CnfFormula(F.n, F.clauses + extra)


def width(F: CnfFormula) -> int:
    return F.width


def parse_dimacs(text: str) -> CnfFormula:
    n = m = None
    clauses = []
    current = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if n is not None:
                raise DimacsError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"bad header {line!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"bad header {line!r}", lineno) from None
            if n < 0 or m < 0:
                raise DimacsError("negative counts in header", lineno)
            continue
        if n is None:
            raise DimacsError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad token {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(current)
                current = []
            elif abs(lit) > n:
                raise DimacsError(f"variable {abs(lit)} exceeds n={n}", lineno)
            else:
                current.append(lit)
    if n is None:
        raise DimacsError("missing 'p cnf' header", max(lineno, 1))
    if current:
        clauses.append(current)
    if len(clauses) != m:
        raise DimacsError(f"header declares {m} clauses, found {len(clauses)}", max(lineno, 1))
    return CnfFormula(n, tuple(tuple(c) for c in clauses))


def to_dimacs(F: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {F.n} {F.M}")
    for c in F.clauses:
        lines.append(" ".join([str(l) for l in c] + ["0"]))
    return "\n".join(lines) + "\n"


def read_dimacs(path) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read())


def write_dimacs(F: CnfFormula, path, comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(to_dimacs(F, comments))
