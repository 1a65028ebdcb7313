"""3-CNF formula model, DIMACS I/O, occurrence statistics, and brute-force oracles.

Clauses always have exactly three literals on three pairwise distinct
variables; tautological clauses are therefore impossible.  Literal order
inside a clause is preserved by parsing and writing because downstream
vertex numbering depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import BudgetExceededError

MAXSAT_VARIABLE_BUDGET = 30

# An assignment is one boolean per variable, index i-1 for variable i.
Assignment = tuple[bool, ...]


class DimacsError(ValueError):
    """Malformed DIMACS CNF or assignment input."""


@dataclass(frozen=True, order=True)
class Literal:
    """A variable occurrence: ``var`` is 1-based, ``positive`` is the polarity."""

    var: int
    positive: bool = True

    def negated(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def to_int(self) -> int:
        return self.var if self.positive else -self.var

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("literal cannot be 0")
        return cls(abs(lit), lit > 0)

    def render(self) -> str:
        return f"x{self.var}" if self.positive else f"~x{self.var}"

    def satisfied_by(self, assignment: Assignment) -> bool:
        return assignment[self.var - 1] == self.positive


Clause = tuple[Literal, Literal, Literal]


@dataclass(frozen=True)
class Formula:
    """A 3-CNF formula on variables 1..n with an ordered clause list."""

    n: int
    clauses: tuple[Clause, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.n < 1:
            raise ValueError("formula needs at least one variable")
        if len(self.clauses) < 1:
            raise ValueError("formula needs at least one clause")
        for idx, clause in enumerate(self.clauses, start=1):
            if len(clause) != 3:
                raise ValueError(f"clause {idx} has {len(clause)} literals, expected 3")
            vs = [lit.var for lit in clause]
            if len(set(vs)) != 3:
                raise ValueError(f"clause {idx} repeats a variable: {vs}")
            for lit in clause:
                if not 1 <= lit.var <= self.n:
                    raise ValueError(f"clause {idx} uses variable {lit.var} outside 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    @classmethod
    def from_ints(cls, n: int, clauses: Iterable[Iterable[int]]) -> "Formula":
        """Build from DIMACS-style signed integer triples."""
        return cls(n, tuple(tuple(Literal.from_int(l) for l in c) for c in clauses))


@dataclass(frozen=True)
class OccurrenceProfile:
    """Per-variable counts of positive and negative occurrences."""

    positive: tuple[int, ...]
    negative: tuple[int, ...]

    def p(self, var: int) -> int:
        return self.positive[var - 1]

    def q(self, var: int) -> int:
        return self.negative[var - 1]

    def occurrences(self, var: int) -> int:
        return self.p(var) + self.q(var)


@dataclass(frozen=True)
class Validation32B:
    """Report of the every-variable-twice-positive-twice-negative check."""

    ok: bool
    bad_variables: tuple[int, ...]
    variable_count_ok: bool  # whether 4n == 3m


def parse_dimacs(text: str | bytes) -> Formula:
    """Parse DIMACS CNF text: ``c`` comments, one ``p cnf n m`` header, then
    m clauses given as 0-terminated signed integer lists."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    n = m = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if n is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: non-integer header fields") from None
            if n < 1 or m < 1:
                raise DimacsError(f"line {lineno}: header must declare n >= 1 and m >= 1")
            continue
        if n is None:
            raise DimacsError(f"line {lineno}: clause data before header")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer token in clause data") from None
    if n is None:
        raise DimacsError("missing 'p cnf' header")

    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for tok in tokens:
        if tok == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(tok)
    if current:
        raise DimacsError("unterminated clause (missing trailing 0)")
    if len(clauses) != m:
        raise DimacsError(f"header declares {m} clauses but file has {len(clauses)}")
    for idx, clause in enumerate(clauses, start=1):
        if len(clause) != 3:
            raise DimacsError(f"clause {idx} has {len(clause)} literals, expected 3")
        if len({abs(l) for l in clause}) != 3:
            raise DimacsError(f"clause {idx} repeats a variable")
        for l in clause:
            if not 1 <= abs(l) <= n:
                raise DimacsError(f"clause {idx}: literal {l} out of range 1..{n}")
    return Formula.from_ints(n, clauses)


def write_dimacs(f: Formula) -> str:
    lines = [f"p cnf {f.n} {f.m}"]
    for clause in f.clauses:
        lines.append(" ".join(str(lit.to_int()) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def occurrence_profile(f: Formula) -> OccurrenceProfile:
    pos = [0] * f.n
    neg = [0] * f.n
    for clause in f.clauses:
        for lit in clause:
            if lit.positive:
                pos[lit.var - 1] += 1
            else:
                neg[lit.var - 1] += 1
    return OccurrenceProfile(tuple(pos), tuple(neg))


def validate_32b(f: Formula) -> Validation32B:
    """Check that every variable occurs exactly twice positively and twice
    negatively, and that the variable count matches 3m/4."""
    prof = occurrence_profile(f)
    bad = tuple(
        i
        for i in range(1, f.n + 1)
        if prof.p(i) != 2 or prof.q(i) != 2
    )
    return Validation32B(ok=not bad, bad_variables=bad, variable_count_ok=4 * f.n == 3 * f.m)


def duplicate(f: Formula, k: int) -> Formula:
    """Concatenate k copies of f on pairwise disjoint variables.

    Copy t (0-based) maps variable i to t*n + i; clause order is copy 0's
    clauses, then copy 1's, and so on.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    clauses = []
    for t in range(k):
        off = t * f.n
        for clause in f.clauses:
            clauses.append(tuple(Literal(lit.var + off, lit.positive) for lit in clause))
    return Formula(k * f.n, tuple(clauses))


def evaluate(f: Formula, assignment: Assignment) -> int:
    """Number of clauses with at least one true literal under the assignment."""
    if len(assignment) != f.n:
        raise ValueError(f"assignment has {len(assignment)} values, formula has {f.n} variables")
    return sum(
        1
        for clause in f.clauses
        if any(lit.satisfied_by(assignment) for lit in clause)
    )


def max_sat_bruteforce(f: Formula, max_vars: int = MAXSAT_VARIABLE_BUDGET) -> tuple[int, Assignment]:
    """Exhaust all 2^n assignments; return the best satisfied-clause count and
    the numerically smallest witness attaining it."""
    if f.n > max_vars:
        raise BudgetExceededError(f"{f.n} variables exceed the 2^n budget of {max_vars}")
    masks = []
    for clause in f.clauses:
        pos = neg = 0
        for lit in clause:
            if lit.positive:
                pos |= 1 << (lit.var - 1)
            else:
                neg |= 1 << (lit.var - 1)
        masks.append((pos, neg))
    best = -1
    best_assign = 0
    for a in range(1 << f.n):
        count = 0
        na = ~a
        for pos, neg in masks:
            if a & pos or na & neg:
                count += 1
        if count > best:
            best = count
            best_assign = a
            if best == f.m:
                break
    witness = tuple(bool(best_assign >> i & 1) for i in range(f.n))
    return best, witness


def parse_assignment(text: str | bytes, n: int) -> Assignment:
    """Parse a solver-style assignment: whitespace-separated signed integers,
    one per variable, optional trailing 0; each variable exactly once."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    try:
        values = [int(t) for t in text.split()]
    except ValueError:
        raise DimacsError("non-integer token in assignment") from None
    if values and values[-1] == 0:
        values.pop()
    if len(values) != n:
        raise DimacsError(f"assignment has {len(values)} literals, expected {n}")
    seen: dict[int, bool] = {}
    for v in values:
        if v == 0 or not 1 <= abs(v) <= n:
            raise DimacsError(f"assignment literal {v} out of range 1..{n}")
        if abs(v) in seen:
            raise DimacsError(f"variable {abs(v)} assigned twice")
        seen[abs(v)] = v > 0
    return tuple(seen[i] for i in range(1, n + 1))


def write_assignment(assignment: Assignment) -> str:
    return " ".join(str(i + 1 if val else -(i + 1)) for i, val in enumerate(assignment)) + "\n"
