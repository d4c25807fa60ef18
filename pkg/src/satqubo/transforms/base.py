from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from ..cnf import Assignment, CnfFormula
from ..errors import InvalidParameterError, ParseError
from ..qubo import Qubo, energy, qubo_from_dict, qubo_to_dict

CHOI = "choi"
CHANCELLOR = "chancellor"
NUESSLEIN = "nuesslein"
MODIFIED_CHANCELLOR = "modified_chancellor"

KINDS = (CHOI, CHANCELLOR, NUESSLEIN, MODIFIED_CHANCELLOR)
NM_KINDS = (CHANCELLOR, NUESSLEIN, MODIFIED_CHANCELLOR)


@dataclass(frozen=True)
class ClauseGadget:
    """A 4-variable clause QUBO over (literal variable 1, 2, 3, ancilla).

    ``negated`` records the clause sign pattern the gadget was built for, so
    the single falsifying assignment of the three clause variables is
    ``tuple(int(s) for s in negated)``.
    """

    qubo: Qubo
    negated: tuple[bool, bool, bool]
    satisfying_energy: float

    @property
    def falsifying_assignment(self) -> tuple[int, int, int]:
        return tuple(int(s) for s in self.negated)

    def min_over_ancilla(self, bits: Sequence[int]) -> float:
        a, b, c = (int(v) for v in bits)
        return min(energy(self.qubo, (a, b, c, k)) for k in (0, 1))

    def table(self) -> dict[tuple[int, int, int], float]:
        """Minimum energy over the ancilla for each of the 8 clause assignments."""
        return {bits: self.min_over_ancilla(bits) for bits in itertools.product((0, 1), repeat=3)}


def gadget_from_qubo(qubo: Qubo, negated: Sequence[bool]) -> ClauseGadget:
    negated = tuple(bool(s) for s in negated)
    fals = tuple(int(s) for s in negated)
    sat_values = [min(energy(qubo, bits + (k,)) for k in (0, 1))
                  for bits in itertools.product((0, 1), repeat=3) if bits != fals]
    return ClauseGadget(qubo, negated, min(sat_values))


@dataclass(frozen=True)
class TransformOutput:
    """A transformed formula.

    ``variable_map[k]`` labels QUBO index ``k``: ``("x", v)`` for formula
    variable ``v``, ``("a", l)`` for the ancilla of clause ``l`` and, for the
    Choi graph, ``("node", l, p, lit)`` for literal ``lit`` at position ``p``
    of clause ``l``.
    """

    qubo: Qubo
    kind: str
    num_variables: int
    num_clauses: int
    variable_map: tuple[tuple, ...]
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown transform kind {self.kind!r}")
        expected = 3 * self.num_clauses if self.kind == CHOI else self.num_variables + self.num_clauses
        if self.qubo.dimension != expected:
            raise InvalidParameterError(
                f"{self.kind} output must have dimension {expected}, got {self.qubo.dimension}")
        if len(self.variable_map) != expected:
            raise InvalidParameterError("variable_map length does not match the QUBO dimension")

    @property
    def dimension(self) -> int:
        return self.qubo.dimension

    def sidecar(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.num_variables,
            "m": self.num_clauses,
            "params": dict(self.params),
            "variable_map": [list(label) for label in self.variable_map],
        }


def variables_and_ancillas(n: int, m: int) -> tuple[tuple, ...]:
    return tuple(("x", v) for v in range(1, n + 1)) + tuple(("a", l) for l in range(m))


def place(terms: dict, gadget: Qubo, indices: Sequence[int], factor: float = 1.0) -> None:
    """Add ``factor * gadget`` into ``terms`` with local index ``k`` mapped to ``indices[k]``."""
    for (a, b), v in gadget.terms.items():
        i, j = indices[a], indices[b]
        key = (i, j) if i <= j else (j, i)
        terms[key] = terms.get(key, 0.0) + factor * v


def superimpose(formula: CnfFormula, gadgets: Sequence[tuple[Qubo, Sequence[int]]],
                factors: Optional[Sequence[float]] = None) -> Qubo:
    """Sum clause gadgets positionally into one ``n + m`` QUBO."""
    n, m = formula.num_variables, formula.num_clauses
    terms: dict = {}
    for l, (gadget, indices) in enumerate(gadgets):
        place(terms, gadget, indices, 1.0 if factors is None else factors[l])
    return Qubo(n + m, terms)


def nm_decode(out: TransformOutput, bits: Sequence[int]) -> Assignment:
    """Project an ``n + m`` bit vector onto the formula variables (ancillas dropped)."""
    if out.kind not in NM_KINDS:
        raise InvalidParameterError(f"nm_decode does not apply to kind {out.kind!r}")
    if len(bits) != out.dimension:
        raise InvalidParameterError(f"expected {out.dimension} bits, got {len(bits)}")
    return tuple(int(b) for b in bits[:out.num_variables])


def dumps_sidecar(out: TransformOutput) -> str:
    return json.dumps(out.sidecar())


def output_from_json(qubo_data: Mapping, sidecar: Mapping) -> TransformOutput:
    try:
        return TransformOutput(
            qubo=qubo_from_dict(qubo_data),
            kind=sidecar["kind"],
            num_variables=int(sidecar["n"]),
            num_clauses=int(sidecar["m"]),
            variable_map=tuple(tuple(label) for label in sidecar["variable_map"]),
            params=dict(sidecar.get("params", {})),
        )
    except KeyError as exc:
        raise ParseError(f"sidecar map lacks field {exc}") from None
