"""3SAT -> QUBO constructions and their decoders.

``METHODS`` maps the method names used by the CLI and the benchmark harness to
factories with the published default parameters.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from ..cnf import Assignment, CnfFormula
from ..errors import InvalidParameterError
from .base import (CHANCELLOR, CHOI, KINDS, MODIFIED_CHANCELLOR, NM_KINDS, NUESSLEIN, ClauseGadget,
                   TransformOutput, dumps_sidecar, nm_decode, output_from_json, superimpose)
from .chancellor import (DEFAULT_MULTIPLIERS, chancellor_clause_gadget, chancellor_transform,
                         clause_multipliers, modified_chancellor_transform)
from .choi import choi_decode, choi_edges, choi_transform
from .nuesslein import PATTERNS, SATISFYING_ENERGY, nuesslein_pattern, nuesslein_transform


def decode(out: TransformOutput, bits: Sequence[int]) -> Optional[Assignment]:
    """Decode a QUBO bit vector to a formula assignment (``None`` if Choi rejects it)."""
    if out.kind == CHOI:
        return choi_decode(out, bits)
    return nm_decode(out, bits)


MethodFactory = Callable[..., TransformOutput]


def _choi(formula, seed=0, vertex_weight=-1.0, edge_weight=3.0):
    return choi_transform(formula, vertex_weight, edge_weight)


def _chancellor(J):
    def build(formula, seed=0, J=J):
        return chancellor_transform(formula, J)
    return build


def _nuesslein(formula, seed=0):
    return nuesslein_transform(formula)


def _modchancellor(formula, seed=0, J=1.0, multipliers=DEFAULT_MULTIPLIERS):
    return modified_chancellor_transform(formula, J, multipliers, seed)


METHODS: dict[str, MethodFactory] = {
    "choi": _choi,
    "chancellorJ1": _chancellor(1.0),
    "chancellorJ5": _chancellor(5.0),
    "nuesslein": _nuesslein,
    "modchancellor": _modchancellor,
}


def build(method: str, formula: CnfFormula, seed: int = 0, **params) -> TransformOutput:
    """Run a named method; ``seed`` only matters for ``modchancellor``."""
    try:
        factory = METHODS[method]
    except KeyError:
        raise InvalidParameterError(
            f"unknown method {method!r}; choose from {sorted(METHODS)}") from None
    return factory(formula, seed=seed, **params)


__all__ = [
    "CHANCELLOR", "CHOI", "KINDS", "MODIFIED_CHANCELLOR", "NM_KINDS", "NUESSLEIN",
    "ClauseGadget", "TransformOutput", "METHODS", "DEFAULT_MULTIPLIERS", "PATTERNS",
    "SATISFYING_ENERGY", "build", "chancellor_clause_gadget", "chancellor_transform",
    "choi_decode", "choi_edges", "choi_transform", "clause_multipliers", "decode",
    "dumps_sidecar", "modified_chancellor_transform", "nm_decode", "nuesslein_pattern",
    "nuesslein_transform", "output_from_json", "superimpose",
]
