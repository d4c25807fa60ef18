"""Clause gadgets built around a three-bit parity check with one ancilla.

For a clause with literal signs ``c_i`` (+1 plain, -1 negated) write
``t_i = c_i s_i`` so that ``t_i = +1`` exactly when literal ``i`` is TRUE.  In
these variables

    -8 * (l1 ∨ l2 ∨ l3) = -7 - sum t_i + sum_{i<j} t_i t_j - t_1 t_2 t_3

The cubic term is produced by the parity gadget

    J sum_{i<j} t_i t_j + h sum t_i + 2J sum t_i s_a + 2h s_a

whose minimum over the ancilla ``s_a`` equals ``-3J + h t_1 t_2 t_3`` whenever
``J >= |h|``; hence ``h = -1``.  The remaining linear and quadratic terms are
added on top.  Below ``J = |h|`` the minimum is no longer an exact parity
function and satisfying assignments stop sharing one energy, so such ``J`` are
rejected even though ``2J > |h|`` may hold.

The spin model is converted to Boolean form and divided by ``8 |h|``.  After
that the gadget's minimum over the ancilla is ``E0`` on the seven satisfying
assignments and ``E0 + 1`` on the falsifying one, the same unit gap as the
pattern QUBOs in :mod:`.nuesslein`.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..cnf import CnfFormula
from ..errors import InvalidParameterError
from ..qubo import IsingModel, from_ising, multiply
from .. import seeding
from .base import (CHANCELLOR, MODIFIED_CHANCELLOR, ClauseGadget, TransformOutput,
                   gadget_from_qubo, superimpose, variables_and_ancillas)

#: Sign of the cubic term of ``-(l1 ∨ l2 ∨ l3)``; fixes the gadget field.
CUBIC_FIELD = -1.0
DEFAULT_MULTIPLIERS = (1.0, 500.0, 1001.0)


def _parity_term(c, J, h):
    hs = {i: h * c[i] for i in range(3)}
    Js = {(i, j): J * c[i] * c[j] for i in range(3) for j in range(i + 1, 3)}
    for i in range(3):
        Js[(i, 3)] = 2 * J * c[i]
    hs[3] = 2 * h
    return hs, Js


def _clause_expansion(c):
    hs = {i: -1.0 * c[i] for i in range(3)}
    Js = {(i, j): 1.0 * c[i] * c[j] for i in range(3) for j in range(i + 1, 3)}
    return hs, Js


def chancellor_clause_gadget(negated: Sequence[bool], J: float = 1.0) -> ClauseGadget:
    """Clause QUBO over (x_a, x_b, x_c, ancilla) for the given sign pattern."""
    h = CUBIC_FIELD
    if not 2 * J > abs(h):
        raise InvalidParameterError(f"parity gadget needs 2J > |h| = {abs(h)}, got J={J}")
    if J < abs(h):
        raise InvalidParameterError(
            f"J={J} < |h| breaks the degeneracy of satisfying assignments; use J >= {abs(h)}")
    if len(negated) != 3:
        raise InvalidParameterError("a clause gadget needs exactly three signs")
    c = [-1.0 if s else 1.0 for s in negated]

    hs, Js = _parity_term(c, float(J), h)
    lin, quad = _clause_expansion(c)
    for i, v in lin.items():
        hs[i] += v
    for key, v in quad.items():
        Js[key] += v
    qubo, _ = from_ising(IsingModel(4, hs, Js))
    return gadget_from_qubo(multiply(qubo, 1.0 / (8.0 * abs(h))), negated)


def _clause_indices(formula: CnfFormula, l: int) -> list[int]:
    clause = formula.clauses[l]
    return [lit.variable - 1 for lit in clause.literals] + [formula.num_variables + l]


def _gadgets(formula: CnfFormula, J: float):
    cache: dict = {}
    placed = []
    for l, clause in enumerate(formula.clauses):
        key = tuple(lit.negated for lit in clause.literals)
        if key not in cache:
            cache[key] = chancellor_clause_gadget(key, J)
        placed.append((cache[key].qubo, _clause_indices(formula, l)))
    return placed


def chancellor_transform(formula: CnfFormula, J: float = 1.0) -> TransformOutput:
    """Superimpose one parity gadget per clause; clause ``l`` owns ancilla ``n + l``."""
    n, m = formula.num_variables, formula.num_clauses
    return TransformOutput(
        qubo=superimpose(formula, _gadgets(formula, J)),
        kind=CHANCELLOR,
        num_variables=n,
        num_clauses=m,
        variable_map=variables_and_ancillas(n, m),
        params={"J": float(J)},
    )


def clause_multipliers(num_clauses: int, multipliers: Iterable[float], seed: int) -> list[float]:
    """Clause ``l`` draws uniformly from the sorted multipliers using stream ``(seed, l)``."""
    values = sorted({float(k) for k in multipliers})
    if not values:
        raise InvalidParameterError("multipliers must be nonempty")
    if values[0] <= 0:
        raise InvalidParameterError(f"multipliers must be positive, got {values}")
    return [values[int(seeding.generator(seed, l).integers(len(values)))] for l in range(num_clauses)]


def modified_chancellor_transform(formula: CnfFormula, J: float = 1.0,
                                  multipliers: Iterable[float] = DEFAULT_MULTIPLIERS,
                                  seed: int = 0) -> TransformOutput:
    """Chancellor transform with every clause gadget scaled by a random positive factor.

    A positive factor keeps each clause's satisfying assignments tied at its
    minimum, so the minimizing bit strings of a satisfiable formula are the
    same as for :func:`chancellor_transform`.
    """
    n, m = formula.num_variables, formula.num_clauses
    multipliers = sorted({float(k) for k in multipliers})
    factors = clause_multipliers(m, multipliers, seed)
    return TransformOutput(
        qubo=superimpose(formula, _gadgets(formula, J), factors),
        kind=MODIFIED_CHANCELLOR,
        num_variables=n,
        num_clauses=m,
        variable_map=variables_and_ancillas(n, m),
        params={"J": float(J), "multipliers": multipliers, "seed": int(seed),
                "clause_multipliers": factors},
    )
