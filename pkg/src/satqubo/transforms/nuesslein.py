"""Pattern-QUBO transformation with one ancilla ``K`` per clause.

Literals are sorted so negated ones come last; the number of negations then
selects one of four fixed 4x4 patterns over ``(a, b, c, K)`` where ``a, b, c``
are the clause's variables in sorted order.  Blank cells are zero.
"""

from __future__ import annotations

from ..cnf import CnfFormula, sort_clause
from ..errors import InvalidParameterError
from ..qubo import Qubo
from .base import NUESSLEIN, ClauseGadget, TransformOutput, superimpose, variables_and_ancillas

A, B, C, K = 0, 1, 2, 3

PATTERNS: dict[int, dict[tuple[int, int], float]] = {
    # (a ∨ b ∨ c)
    0: {(A, B): 2, (A, K): -2, (B, K): -2, (C, C): -1, (C, K): 1, (K, K): 1},
    # (a ∨ b ∨ ¬c)
    1: {(A, B): 2, (A, K): -2, (B, K): -2, (C, C): 1, (C, K): -1, (K, K): 2},
    # (a ∨ ¬b ∨ ¬c)
    2: {(A, A): 2, (A, B): -2, (A, K): -2, (B, K): 2, (C, C): 1, (C, K): -1},
    # (¬a ∨ ¬b ∨ ¬c)
    3: {(A, A): -1, (A, B): 1, (A, C): 1, (A, K): 1, (B, B): -1, (B, C): 1, (B, K): 1,
        (C, C): -1, (C, K): 1, (K, K): -1},
}

#: Common minimum over ``K`` of the seven satisfying assignments.
SATISFYING_ENERGY = {0: -1.0, 1: 0.0, 2: 0.0, 3: -1.0}


def nuesslein_pattern(num_negated: int) -> ClauseGadget:
    if num_negated not in PATTERNS:
        raise InvalidParameterError(f"num_negated must be 0..3, got {num_negated}")
    negated = (False,) * (3 - num_negated) + (True,) * num_negated
    return ClauseGadget(Qubo(4, PATTERNS[num_negated]), negated, SATISFYING_ENERGY[num_negated])


def nuesslein_transform(formula: CnfFormula) -> TransformOutput:
    n, m = formula.num_variables, formula.num_clauses
    placed = []
    for l, clause in enumerate(formula.clauses):
        ordered = sort_clause(clause)
        indices = [lit.variable - 1 for lit in ordered.literals] + [n + l]
        placed.append((nuesslein_pattern(ordered.num_negated).qubo, indices))
    return TransformOutput(
        qubo=superimpose(formula, placed),
        kind=NUESSLEIN,
        num_variables=n,
        num_clauses=m,
        variable_map=variables_and_ancillas(n, m),
        params={},
    )
