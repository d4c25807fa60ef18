"""3CNF formulas: model, random generation, DIMACS I/O and an exact oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import seeding
from .errors import InvalidParameterError, ParseError, UnsupportedError, UnsupportedInstanceError

#: Largest variable count accepted by :func:`solve_exact` and by
#: ``generate_instance(..., require_satisfiable=True)``.
ORACLE_MAX_VARIABLES = 30

#: Give up on ``require_satisfiable`` after this many whole-instance redraws.
MAX_GENERATION_ATTEMPTS = 10_000

Assignment = tuple[int, ...]


@dataclass(frozen=True, order=True)
class Literal:
    variable: int
    negated: bool = False

    def __post_init__(self):
        if self.variable < 1:
            raise InvalidParameterError(f"variable index must be >= 1, got {self.variable}")

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise InvalidParameterError("literal 0 is not a variable")
        return cls(abs(lit), lit < 0)

    def to_int(self) -> int:
        return -self.variable if self.negated else self.variable

    def value(self, bit: int) -> bool:
        """Truth value of the literal when its variable is set to ``bit``."""
        return bool(bit) != self.negated

    def __neg__(self) -> "Literal":
        return Literal(self.variable, not self.negated)

    def __str__(self):
        return f"{'¬' if self.negated else ''}x{self.variable}"


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, Literal, Literal]

    def __post_init__(self):
        lits = tuple(self.literals)
        if len(lits) != 3:
            raise UnsupportedInstanceError(f"clauses must have exactly 3 literals, got {len(lits)}")
        if len({lit.variable for lit in lits}) != 3:
            raise UnsupportedInstanceError(
                f"clause {[lit.to_int() for lit in lits]} repeats a variable")
        object.__setattr__(self, "literals", lits)

    @classmethod
    def from_ints(cls, lits: Iterable[int]) -> "Clause":
        return cls(tuple(Literal.from_int(int(v)) for v in lits))

    def to_ints(self) -> tuple[int, int, int]:
        return tuple(lit.to_int() for lit in self.literals)

    @property
    def variables(self) -> tuple[int, int, int]:
        return tuple(lit.variable for lit in self.literals)

    @property
    def num_negated(self) -> int:
        return sum(lit.negated for lit in self.literals)

    def is_satisfied(self, assignment: Sequence[int]) -> bool:
        return any(lit.value(assignment[lit.variable - 1]) for lit in self.literals)

    def __iter__(self):
        return iter(self.literals)

    def __str__(self):
        return "(" + " ∨ ".join(str(lit) for lit in self.literals) + ")"


@dataclass(frozen=True)
class CnfFormula:
    num_variables: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        clauses = tuple(self.clauses)
        if self.num_variables < 1:
            raise InvalidParameterError("a formula needs at least one variable")
        if not clauses:
            raise InvalidParameterError("a formula needs at least one clause")
        for clause in clauses:
            for lit in clause.literals:
                if lit.variable > self.num_variables:
                    raise InvalidParameterError(
                        f"literal {lit} exceeds num_variables={self.num_variables}")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def from_ints(cls, num_variables: int, clauses: Iterable[Iterable[int]]) -> "CnfFormula":
        return cls(num_variables, tuple(Clause.from_ints(c) for c in clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def to_ints(self) -> list[list[int]]:
        return [list(c.to_ints()) for c in self.clauses]

    def __str__(self):
        return " ∧ ".join(str(c) for c in self.clauses)


def _check_assignment(formula: CnfFormula, assignment: Sequence[int]) -> None:
    if len(assignment) != formula.num_variables:
        raise InvalidParameterError(
            f"assignment has {len(assignment)} bits, formula has {formula.num_variables} variables")


def evaluate(formula: CnfFormula, assignment: Sequence[int]) -> tuple[bool, int]:
    """Return ``(satisfied, number of satisfied clauses)``."""
    _check_assignment(formula, assignment)
    count = sum(clause.is_satisfied(assignment) for clause in formula.clauses)
    return count == formula.num_clauses, count


def is_satisfied(formula: CnfFormula, assignment: Sequence[int]) -> bool:
    return evaluate(formula, assignment)[0]


def sort_clause(clause: Clause) -> Clause:
    """Stable reorder: positive literals first, negated literals last."""
    pos = [lit for lit in clause.literals if not lit.negated]
    neg = [lit for lit in clause.literals if lit.negated]
    return Clause(tuple(pos + neg))


def _random_formula(n: int, m: int, rng) -> CnfFormula:
    clauses = []
    for _ in range(m):
        variables = rng.choice(n, size=3, replace=False) + 1
        negations = rng.random(3) < 0.5
        clauses.append(Clause(tuple(Literal(int(v), bool(s)) for v, s in zip(variables, negations))))
    return CnfFormula(n, tuple(clauses))


def generate_instance(n: int, m: int, seed: int, require_satisfiable: bool = False) -> CnfFormula:
    """Draw a uniform random 3CNF formula.

    Each clause picks three distinct variables uniformly and negates each with
    probability 1/2.  With ``require_satisfiable`` the whole instance is redrawn
    from a fresh child stream (attempt 0, 1, ...) until :func:`solve_exact`
    finds a model; individual clauses are never resampled.
    """
    if n < 3:
        raise InvalidParameterError(f"need n >= 3 to draw three distinct variables, got n={n}")
    if m < 1:
        raise InvalidParameterError(f"need m >= 1, got m={m}")
    if require_satisfiable and n > ORACLE_MAX_VARIABLES:
        raise UnsupportedError(
            f"satisfiability filtering is limited to n <= {ORACLE_MAX_VARIABLES}, got n={n}")
    for attempt in range(MAX_GENERATION_ATTEMPTS):
        formula = _random_formula(n, m, seeding.generator(seed, attempt))
        if not require_satisfiable or solve_exact(formula)[0]:
            return formula
    raise UnsupportedError(
        f"no satisfiable instance with n={n}, m={m} after {MAX_GENERATION_ATTEMPTS} attempts")


def generate_corpus(n: int, m: int, count: int, seed: int,
                    require_satisfiable: bool = True) -> list[CnfFormula]:
    """Instance ``i`` uses the child seed ``(seed, INSTANCE, i)``."""
    return [generate_instance(n, m, seeding.child_seed(seed, seeding.INSTANCE, i), require_satisfiable)
            for i in range(count)]


# ---------------------------------------------------------------------------
# exact oracle


def solve_exact(formula: CnfFormula) -> tuple[bool, Optional[Assignment]]:
    """Decide satisfiability by complete backtracking search.

    Variables are branched in index order (FALSE first); a branch is cut as
    soon as any clause has all three literals assigned FALSE, and clauses with
    a single open literal force it.  Unconstrained variables in the witness
    default to FALSE.
    """
    n = formula.num_variables
    if n > ORACLE_MAX_VARIABLES:
        raise UnsupportedError(f"exact solver is limited to n <= {ORACLE_MAX_VARIABLES}, got n={n}")
    clauses = [c.to_ints() for c in formula.clauses]
    occurs: list[list[int]] = [[] for _ in range(n + 1)]
    for idx, clause in enumerate(clauses):
        for lit in clause:
            occurs[abs(lit)].append(idx)

    values = [None] * (n + 1)

    def lit_state(lit):
        v = values[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def propagate(var, trail):
        """Assign and run unit propagation; False on conflict."""
        queue = [var]
        while queue:
            u = queue.pop()
            for idx in occurs[u]:
                open_lits = []
                satisfied = False
                for lit in clauses[idx]:
                    s = lit_state(lit)
                    if s is True:
                        satisfied = True
                        break
                    if s is None:
                        open_lits.append(lit)
                if satisfied:
                    continue
                if not open_lits:
                    return False
                if len(open_lits) == 1:
                    lit = open_lits[0]
                    values[abs(lit)] = lit > 0
                    trail.append(abs(lit))
                    queue.append(abs(lit))
        return True

    def search(var):
        while var <= n and values[var] is not None:
            var += 1
        if var > n:
            return True
        for choice in (False, True):
            trail = [var]
            values[var] = choice
            if propagate(var, trail) and search(var + 1):
                return True
            for u in trail:
                values[u] = None
        return False

    if not search(1):
        return False, None
    witness = tuple(1 if values[i] else 0 for i in range(1, n + 1))
    return True, witness


# ---------------------------------------------------------------------------
# DIMACS


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text.  Comment lines (``c ...``) are ignored."""
    header = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if header is not None:
                raise ParseError(f"line {lineno}: duplicate header")
            if len(fields) != 4 or fields[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 1 or header[1] < 1:
                raise ParseError(f"line {lineno}: header counts must be positive")
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        try:
            tokens.extend(int(tok) for tok in line.split())
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token in {line!r}") from None
    if header is None:
        raise ParseError("missing 'p cnf' header")

    n, m = header
    raw_clauses: list[list[int]] = []
    current: list[int] = []
    for tok in tokens:
        if tok == 0:
            raw_clauses.append(current)
            current = []
        else:
            if abs(tok) > n:
                raise ParseError(f"literal {tok} exceeds declared variable count {n}")
            current.append(tok)
    if current:
        raise ParseError("last clause is not terminated by 0")
    if len(raw_clauses) != m:
        raise ParseError(f"header declares {m} clauses, found {len(raw_clauses)}")
    return CnfFormula.from_ints(n, raw_clauses)


def write_dimacs(formula: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {formula.num_variables} {formula.num_clauses}")
    lines.extend(" ".join(str(v) for v in c.to_ints()) + " 0" for c in formula.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(path) -> CnfFormula:
    with open(path, encoding="utf-8") as fh:
        return parse_dimacs(fh.read())
