"""3SAT -> maximum-weight independent set -> QUBO.

One graph node per literal occurrence; each clause is a triangle and literal
occurrences that contradict each other (``x`` vs ``¬x`` in different clauses)
are joined by a conflict edge.  The QUBO is written in minimization form:
every node carries ``vertex_weight`` (< 0) on the diagonal and every edge
carries ``edge_weight`` (> |vertex_weight|).  Negating the objective gives the
familiar maximization ``sum c_i x_i - sum Q_ij x_i x_j`` with ``c_i = -vertex_weight``,
and ``edge_weight > c`` is the strict form of ``Q_ij >= min(c_i, c_j)``.

A formula with ``m`` clauses is satisfiable iff the ground energy is ``m * vertex_weight``.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..cnf import Assignment, CnfFormula
from ..errors import InvalidParameterError
from ..qubo import Qubo
from .base import CHOI, TransformOutput

DEFAULT_VERTEX_WEIGHT = -1.0
DEFAULT_EDGE_WEIGHT = 3.0


def choi_edges(formula: CnfFormula) -> list[tuple[int, int]]:
    """Triangle and conflict edges ``(u, v)``, ``u < v``, over nodes ``3 * clause + position``."""
    edges = []
    lits = [lit.to_int() for clause in formula.clauses for lit in clause.literals]
    m = formula.num_clauses
    for l in range(m):
        base = 3 * l
        edges += [(base, base + 1), (base, base + 2), (base + 1, base + 2)]
    by_literal: dict[int, list[int]] = {}
    for node, lit in enumerate(lits):
        by_literal.setdefault(lit, []).append(node)
    for node, lit in enumerate(lits):
        for other in by_literal.get(-lit, ()):
            # distinct variables per clause, so complementary nodes are never in one clause
            if node < other:
                edges.append((node, other))
    return sorted(edges)


def choi_transform(formula: CnfFormula, vertex_weight: float = DEFAULT_VERTEX_WEIGHT,
                   edge_weight: float = DEFAULT_EDGE_WEIGHT) -> TransformOutput:
    if not vertex_weight < 0:
        raise InvalidParameterError(f"vertex_weight must be negative, got {vertex_weight}")
    if not edge_weight > -vertex_weight:
        raise InvalidParameterError(
            f"edge_weight must exceed |vertex_weight| = {-vertex_weight}, got {edge_weight}")
    m = formula.num_clauses
    terms = {(u, u): float(vertex_weight) for u in range(3 * m)}
    for u, v in choi_edges(formula):
        terms[(u, v)] = float(edge_weight)
    labels = tuple(("node", l, p, lit.to_int())
                   for l, clause in enumerate(formula.clauses)
                   for p, lit in enumerate(clause.literals))
    return TransformOutput(
        qubo=Qubo(3 * m, terms),
        kind=CHOI,
        num_variables=formula.num_variables,
        num_clauses=m,
        variable_map=labels,
        params={"vertex_weight": float(vertex_weight), "edge_weight": float(edge_weight)},
    )


def choi_decode(out: TransformOutput, bits: Sequence[int]) -> Optional[Assignment]:
    """Read an assignment off an independent set that covers every clause.

    Returns ``None`` when the selected nodes are not independent or some
    clause has no selected node.  Variables no selected literal mentions
    default to FALSE.
    """
    if out.kind != CHOI:
        raise InvalidParameterError(f"choi_decode does not apply to kind {out.kind!r}")
    if len(bits) != out.dimension:
        raise InvalidParameterError(f"expected {out.dimension} bits, got {len(bits)}")
    selected = [k for k, b in enumerate(bits) if b]
    chosen = set(selected)
    for (i, j) in out.qubo.quadratic:
        if i in chosen and j in chosen:
            return None
    covered = {out.variable_map[k][1] for k in selected}
    if len(covered) != out.num_clauses:
        return None
    values = [0] * out.num_variables
    for k in selected:
        lit = out.variable_map[k][3]
        values[abs(lit) - 1] = 1 if lit > 0 else 0
    return tuple(values)
