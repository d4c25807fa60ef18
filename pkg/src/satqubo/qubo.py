"""QUBO and Ising containers, energy, hardware-range scaling and structure metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidParameterError, ParseError

#: Annealer field/coupling ranges used by :func:`scale_factor` by default.
DEFAULT_H_RANGE = (-4.0, 4.0)
DEFAULT_J_RANGE = (-1.0, 1.0)

Term = tuple[int, int]


def _clean_terms(terms: Mapping[Term, float], dimension: int) -> dict[Term, float]:
    out: dict[Term, float] = {}
    for (i, j), value in terms.items():
        i, j = int(i), int(j)
        if not (0 <= i <= j < dimension):
            raise InvalidParameterError(
                f"term ({i}, {j}) is not upper-triangular within dimension {dimension}")
        value = float(value)
        if value != 0.0:
            out[(i, j)] = value
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class Qubo:
    """Upper-triangular QUBO ``min sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j``.

    ``terms`` maps ``(i, j)`` with ``i <= j`` to a nonzero coefficient; zero
    entries are dropped on construction.
    """

    dimension: int
    terms: Mapping[Term, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidParameterError(f"dimension must be positive, got {self.dimension}")
        object.__setattr__(self, "terms", _clean_terms(self.terms, self.dimension))

    @classmethod
    def from_dense(cls, matrix) -> "Qubo":
        """Build from a square matrix; lower-triangle entries are folded onto the upper one."""
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidParameterError(f"expected a square matrix, got shape {a.shape}")
        terms: dict[Term, float] = {}
        d = a.shape[0]
        for i in range(d):
            for j in range(i, d):
                v = a[i, j] + (a[j, i] if j != i else 0.0)
                if v:
                    terms[(i, j)] = v
        return cls(d, terms)

    @property
    def linear(self) -> dict[int, float]:
        return {i: v for (i, j), v in self.terms.items() if i == j}

    @property
    def quadratic(self) -> dict[Term, float]:
        return {(i, j): v for (i, j), v in self.terms.items() if i != j}

    def to_dense(self) -> np.ndarray:
        return self._dense.copy()

    @cached_property
    def _dense(self) -> np.ndarray:
        a = np.zeros((self.dimension, self.dimension))
        for (i, j), v in self.terms.items():
            a[i, j] = v
        return a

    @cached_property
    def symmetric_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """``(diag, S)`` with ``S`` symmetric, zero-diagonal couplings; used by the samplers."""
        diag = np.zeros(self.dimension)
        sym = np.zeros((self.dimension, self.dimension))
        for (i, j), v in self.terms.items():
            if i == j:
                diag[i] = v
            else:
                sym[i, j] = v
                sym[j, i] = v
        return diag, sym

    def __eq__(self, other):
        if not isinstance(other, Qubo):
            return NotImplemented
        return self.dimension == other.dimension and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.dimension, tuple(self.terms.items())))


@dataclass(frozen=True)
class IsingModel:
    """``H(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j`` over spins in {-1, +1}.

    ``offset`` is carried alongside so that ``energy(q, x) == ising_energy(m, s) + m.offset``
    for the image ``m = to_ising(q)``.
    """

    dimension: int
    h: Mapping[int, float] = field(default_factory=dict)
    J: Mapping[Term, float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        for i in self.h:
            if not 0 <= i < self.dimension:
                raise InvalidParameterError(f"field index {i} out of range")
        for i, j in self.J:
            if not 0 <= i < j < self.dimension:
                raise InvalidParameterError(f"coupling ({i}, {j}) must satisfy 0 <= i < j < d")
        object.__setattr__(self, "h", {int(i): float(v) for i, v in sorted(self.h.items()) if v})
        object.__setattr__(self, "J", {(int(i), int(j)): float(v)
                                       for (i, j), v in sorted(self.J.items()) if v})


def _bits(x, dimension: int) -> np.ndarray:
    arr = np.asarray(x)
    if arr.shape != (dimension,):
        raise InvalidParameterError(f"expected {dimension} bits, got shape {arr.shape}")
    return arr


def energy(q: Qubo, x: Sequence[int]) -> float:
    """``sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j`` for a bit vector ``x``."""
    bits = _bits(x, q.dimension)
    total = 0.0
    for (i, j), v in q.terms.items():
        if bits[i] and bits[j]:
            total += v
    return total


def energies(q: Qubo, states) -> np.ndarray:
    """Vectorized :func:`energy` for a ``(k, d)`` array of bit vectors."""
    xs = np.asarray(states, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != q.dimension:
        raise InvalidParameterError(f"expected shape (k, {q.dimension}), got {xs.shape}")
    return np.einsum("ki,ij,kj->k", xs, q._dense, xs)


def ising_energy(m: IsingModel, s: Sequence[int]) -> float:
    spins = _bits(s, m.dimension)
    total = sum(v * spins[i] for i, v in m.h.items())
    total += sum(v * spins[i] * spins[j] for (i, j), v in m.J.items())
    return float(total)


def to_ising(q: Qubo) -> IsingModel:
    """Substitute ``x_i = (s_i + 1) / 2``."""
    h: dict[int, float] = {}
    J: dict[Term, float] = {}
    offset = 0.0
    for (i, j), v in q.terms.items():
        if i == j:
            h[i] = h.get(i, 0.0) + v / 2
            offset += v / 2
        else:
            J[(i, j)] = J.get((i, j), 0.0) + v / 4
            h[i] = h.get(i, 0.0) + v / 4
            h[j] = h.get(j, 0.0) + v / 4
            offset += v / 4
    return IsingModel(q.dimension, h, J, offset)


def from_ising(m: IsingModel) -> tuple[Qubo, float]:
    """Inverse of :func:`to_ising`.

    Returns ``(q, c)`` with ``ising_energy(m, s) + m.offset == energy(q, x) + c``.
    """
    terms: dict[Term, float] = {}
    const = m.offset
    for i, v in m.h.items():
        terms[(i, i)] = terms.get((i, i), 0.0) + 2 * v
        const -= v
    for (i, j), v in m.J.items():
        terms[(i, j)] = terms.get((i, j), 0.0) + 4 * v
        terms[(i, i)] = terms.get((i, i), 0.0) - 2 * v
        terms[(j, j)] = terms.get((j, j), 0.0) - 2 * v
        const += v
    return Qubo(m.dimension, terms), const


def _check_range(r, name):
    lo, hi = float(r[0]), float(r[1])
    if not (lo < 0 < hi):
        raise InvalidParameterError(f"{name} must straddle zero (lo < 0 < hi), got {r}")
    return lo, hi


def _raw_scale_factor(m: IsingModel, h_range, J_range) -> float:
    h_lo, h_hi = _check_range(h_range, "h_range")
    j_lo, j_hi = _check_range(J_range, "J_range")

    def ratio(values, lo, hi):
        if not values:
            return 0.0
        return max(max(max(values) / hi, 0.0), max(min(values) / lo, 0.0))

    return max(ratio(list(m.h.values()), h_lo, h_hi), ratio(list(m.J.values()), j_lo, j_hi))


def scale_factor(m: IsingModel, h_range=DEFAULT_H_RANGE, J_range=DEFAULT_J_RANGE,
                 allow_upscale: bool = True) -> float:
    """Divisor that maps ``m`` into the annealer ranges.

    For fields and couplings separately the largest positive value is compared
    with the upper bound and the most negative one with the lower bound (ratios
    clipped at 0); the larger of the two results is returned.  A model with no
    nonzero coefficient returns 1.  With ``allow_upscale=False`` the result is
    additionally floored at 1, so small problems are left untouched.
    """
    raw = _raw_scale_factor(m, h_range, J_range)
    if raw == 0.0:
        return 1.0
    if not allow_upscale:
        return max(raw, 1.0)
    return raw


def multiply(q: Qubo, k: float) -> Qubo:
    if not k > 0:
        raise InvalidParameterError(f"multiplier must be positive, got {k}")
    return Qubo(q.dimension, {t: v * k for t, v in q.terms.items()})


def apply_dwave_scaling(q: Qubo, h_range=DEFAULT_H_RANGE, J_range=DEFAULT_J_RANGE,
                        allow_upscale: bool = True) -> Qubo:
    """Divide every coefficient of ``q`` by the scale factor of its Ising image."""
    factor = scale_factor(to_ising(q), h_range, J_range, allow_upscale)
    if factor == 1.0:
        return q
    return Qubo(q.dimension, {t: v / factor for t, v in q.terms.items()})


# ---------------------------------------------------------------------------
# structure metrics


@dataclass(frozen=True)
class StructureMetrics:
    dimension: int
    num_distinct_quadratic: int
    num_distinct_linear: int
    quadratic_range_size: float
    linear_range_size: float
    scale_factor: float
    density: float

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "num_distinct_quadratic": self.num_distinct_quadratic,
            "num_distinct_linear": self.num_distinct_linear,
            "quadratic_range_size": self.quadratic_range_size,
            "linear_range_size": self.linear_range_size,
            "scale_factor": self.scale_factor,
            "density": self.density,
        }


def structure_metrics(q: Qubo) -> StructureMetrics:
    """Value-structure statistics of an (unscaled) QUBO.

    Distinct counts use exact equality over stored nonzero values; range sizes
    are ``max - min`` over the nonzero off-diagonal (resp. diagonal) values.
    ``scale_factor`` is the raw hardware-range factor of the Ising image (0 for
    an all-zero QUBO).
    """
    quad = list(q.quadratic.values())
    lin = list(q.linear.values())
    d = q.dimension
    pairs = d * (d - 1) // 2
    return StructureMetrics(
        dimension=d,
        num_distinct_quadratic=len(set(quad)),
        num_distinct_linear=len(set(lin)),
        quadratic_range_size=(max(quad) - min(quad)) if quad else 0.0,
        linear_range_size=(max(lin) - min(lin)) if lin else 0.0,
        scale_factor=_raw_scale_factor(to_ising(q), DEFAULT_H_RANGE, DEFAULT_J_RANGE),
        density=(len(quad) / pairs) if pairs else 0.0,
    )


# ---------------------------------------------------------------------------
# JSON


def qubo_to_dict(q: Qubo) -> dict:
    return {"dimension": q.dimension, "terms": [[i, j, v] for (i, j), v in q.terms.items()]}


def qubo_from_dict(data: Mapping) -> Qubo:
    try:
        d = int(data["dimension"])
        raw_terms = data["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"QUBO JSON needs 'dimension' and 'terms': {exc}") from None
    terms: dict[Term, float] = {}
    for entry in raw_terms:
        if len(entry) != 3:
            raise ParseError(f"QUBO term must be [i, j, value], got {entry!r}")
        i, j, v = int(entry[0]), int(entry[1]), float(entry[2])
        if i > j:
            raise ParseError(f"lower-triangular term ({i}, {j}) rejected")
        if not (0 <= i and j < d):
            raise ParseError(f"term ({i}, {j}) outside dimension {d}")
        if (i, j) in terms:
            raise ParseError(f"duplicate term ({i}, {j})")
        terms[(i, j)] = v
    return Qubo(d, terms)


def dumps_qubo(q: Qubo) -> str:
    return json.dumps(qubo_to_dict(q))


def loads_qubo(text: str) -> Qubo:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid QUBO JSON: {exc}") from None
    return qubo_from_dict(data)
