"""Exact enumeration and a seeded simulated-annealing sampler for QUBOs.

Both kernels work on the symmetric split of a QUBO: diagonal ``diag`` and a
zero-diagonal symmetric coupling matrix ``S``.  They track local fields
``f_i = diag_i + sum_j S_ij x_j`` so a single-bit flip costs
``(1 - 2 x_i) * f_i`` to evaluate and ``O(d)`` to apply.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numba
import numpy as np

from . import seeding
from .errors import InvalidParameterError, ParseError, UnsupportedError
from .qubo import Qubo, energies

#: Largest dimension :func:`brute_force` accepts by default.
BRUTE_FORCE_MAX_DIMENSION = 26
DEFAULT_NUM_SWEEPS = 1000
FALLBACK_BETAS = (0.1, 10.0)

# relative tolerance for "attains the minimum" on accumulated float energies
_TIE_RTOL = 1e-9


@numba.njit(cache=True, nogil=True)
def _gray_code_min(diag, sym):
    d = diag.shape[0]
    x = np.zeros(d, dtype=np.int8)
    fields = diag.copy()
    e = 0.0
    best = 0.0
    for k in range(1, 1 << d):
        b = 0
        while not (k >> b) & 1:
            b += 1
        if x[b] == 0:
            e += fields[b]
            x[b] = 1
            for j in range(d):
                fields[j] += sym[j, b]
        else:
            e -= fields[b]
            x[b] = 0
            for j in range(d):
                fields[j] -= sym[j, b]
        if e < best:
            best = e
    return best


@numba.njit(cache=True, nogil=True)
def _gray_code_collect(diag, sym, threshold, out):
    """Write Gray-code states with energy <= threshold into ``out``; return how many matched."""
    d = diag.shape[0]
    x = np.zeros(d, dtype=np.int8)
    fields = diag.copy()
    e = 0.0
    code = 0
    count = 0
    if e <= threshold:
        if count < out.shape[0]:
            out[count] = code
        count += 1
    for k in range(1, 1 << d):
        b = 0
        while not (k >> b) & 1:
            b += 1
        code ^= 1 << b
        if x[b] == 0:
            e += fields[b]
            x[b] = 1
            for j in range(d):
                fields[j] += sym[j, b]
        else:
            e -= fields[b]
            x[b] = 0
            for j in range(d):
                fields[j] -= sym[j, b]
        if e <= threshold:
            if count < out.shape[0]:
                out[count] = code
            count += 1
    return count


def _codes_to_bits(codes: np.ndarray, d: int) -> np.ndarray:
    return ((codes[:, None] >> np.arange(d, dtype=np.int64)) & 1).astype(np.int8)


def brute_force(q: Qubo, max_dimension: int = BRUTE_FORCE_MAX_DIMENSION):
    """Exhaustively minimize ``q``.

    Returns ``(min_energy, minimizers)`` where ``minimizers`` is a list of
    every bit-vector tuple attaining the minimum, in ascending integer order
    (bit ``i`` is the ``2**i`` digit).
    """
    d = q.dimension
    if d > max_dimension:
        raise UnsupportedError(f"brute force is capped at dimension {max_dimension}, got {d}")
    diag, sym = q.symmetric_parts
    best = _gray_code_min(diag, sym)
    slack = _TIE_RTOL * max(1.0, abs(best)) + 1e-12 * float(np.abs(sym).sum() + np.abs(diag).sum())
    capacity = 1 << 12
    while True:
        out = np.empty(capacity, dtype=np.int64)
        count = _gray_code_collect(diag, sym, best + slack, out)
        if count <= capacity:
            break
        capacity = count
    codes = np.sort(out[:count])
    bits = _codes_to_bits(codes, d)
    exact = energies(q, bits)
    min_energy = float(exact.min())
    keep = exact <= min_energy + _TIE_RTOL * max(1.0, abs(min_energy))
    return min_energy, [tuple(int(v) for v in row) for row in bits[keep]]


# ---------------------------------------------------------------------------
# simulated annealing


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric inverse-temperature ladder, one full sweep per rung."""

    num_sweeps: int = DEFAULT_NUM_SWEEPS
    beta_start: float = FALLBACK_BETAS[0]
    beta_end: float = FALLBACK_BETAS[1]

    def __post_init__(self):
        if self.num_sweeps < 1:
            raise InvalidParameterError(f"num_sweeps must be >= 1, got {self.num_sweeps}")
        if not 0 < self.beta_start < self.beta_end:
            raise InvalidParameterError(
                f"need 0 < beta_start < beta_end, got {self.beta_start}, {self.beta_end}")

    def betas(self) -> np.ndarray:
        if self.num_sweeps == 1:
            return np.array([self.beta_end])
        return np.geomspace(self.beta_start, self.beta_end, self.num_sweeps)

    def as_dict(self) -> dict:
        return {"num_sweeps": self.num_sweeps, "beta_start": self.beta_start,
                "beta_end": self.beta_end, "interpolation": "geometric"}


def default_schedule_for(q: Qubo, num_sweeps: int = DEFAULT_NUM_SWEEPS) -> AnnealSchedule:
    """``beta_start = 1 / max|Q|``, ``beta_end = 10 / min nonzero |Q|``."""
    mags = np.abs(np.fromiter(q.terms.values(), dtype=float, count=len(q.terms)))
    if mags.size == 0:
        return AnnealSchedule(num_sweeps, *FALLBACK_BETAS)
    largest = float(mags.max())
    # coefficients below 1e-9 of the largest are noise, not an energy scale
    smallest = float(max(mags.min(), largest * 1e-9))
    return AnnealSchedule(num_sweeps, 1.0 / largest, 10.0 / smallest)


@numba.njit(cache=True, nogil=True)
def _anneal_reads(diag, sym, betas, seeds):
    d = diag.shape[0]
    reads = seeds.shape[0]
    out = np.empty((reads, d), dtype=np.int8)
    fields = np.empty(d)
    x = np.empty(d, dtype=np.int8)
    for r in range(reads):
        np.random.seed(seeds[r])
        for i in range(d):
            x[i] = 1 if np.random.random() < 0.5 else 0
        for i in range(d):
            acc = diag[i]
            for j in range(d):
                if x[j]:
                    acc += sym[i, j]
            fields[i] = acc
        for beta in betas:
            for i in range(d):
                delta = fields[i] if x[i] == 0 else -fields[i]
                if delta <= 0.0 or np.random.random() < math.exp(-beta * delta):
                    if x[i] == 0:
                        x[i] = 1
                        for j in range(d):
                            fields[j] += sym[j, i]
                    else:
                        x[i] = 0
                        for j in range(d):
                            fields[j] -= sym[j, i]
        out[r] = x
    return out


@dataclass(frozen=True)
class SampleSet:
    """Aggregated reads, ascending by ``(energy, bits)``.

    ``records`` holds ``(bits, energy, count)`` triples; ``bits`` is a tuple of 0/1.
    """

    records: tuple[tuple[tuple[int, ...], float, int], ...]
    info: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def num_reads(self) -> int:
        return sum(c for _, _, c in self.records)

    @property
    def lowest_energy(self) -> float:
        return self.records[0][1]

    def to_dict(self, include_timing: bool = True) -> dict:
        info = dict(self.info)
        if not include_timing:
            info.pop("wall_time", None)
        return {
            "backend": info.pop("backend", None),
            "seed": info.pop("seed", None),
            "info": info,
            "reads": [{"bits": "".join(map(str, bits)), "energy": e, "count": c}
                      for bits, e, c in self.records],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SampleSet":
        try:
            records = tuple((tuple(int(ch) for ch in r["bits"]), float(r["energy"]), int(r["count"]))
                            for r in data["reads"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed SampleSet JSON: {exc}") from None
        info = dict(data.get("info", {}))
        info["backend"] = data.get("backend")
        info["seed"] = data.get("seed")
        return cls(records, info)


def _aggregate(q: Qubo, states: np.ndarray, info: dict) -> SampleSet:
    uniq, counts = np.unique(states, axis=0, return_counts=True)
    es = energies(q, uniq)
    records = sorted(((tuple(int(v) for v in row), float(e), int(c))
                      for row, e, c in zip(uniq, es, counts)), key=lambda r: (r[1], r[0]))
    return SampleSet(tuple(records), info)


def read_seeds(seed: int, num_reads: int) -> np.ndarray:
    """Read ``r`` uses child stream ``(seed, r)``, independent of ``num_reads``."""
    return np.array([seeding.child_seed32(seed, r) for r in range(num_reads)], dtype=np.int64)


def simulated_annealing(q: Qubo, num_reads: int = 100, schedule: Optional[AnnealSchedule] = None,
                        seed: int = 0) -> SampleSet:
    """Independent single-flip Metropolis restarts, sweeping variables in index order."""
    if num_reads < 1:
        raise InvalidParameterError(f"num_reads must be >= 1, got {num_reads}")
    schedule = schedule or default_schedule_for(q)
    diag, sym = q.symmetric_parts
    start = time.perf_counter()
    states = _anneal_reads(diag, sym, schedule.betas(), read_seeds(seed, num_reads))
    info = {"backend": "simulated_annealing", "seed": int(seed), "num_reads": int(num_reads),
            "schedule": schedule.as_dict(), "wall_time": time.perf_counter() - start}
    return _aggregate(q, states, info)


def exact_sampleset(q: Qubo, max_dimension: int = BRUTE_FORCE_MAX_DIMENSION) -> SampleSet:
    """All minimizers of ``q`` as a SampleSet (one count each)."""
    start = time.perf_counter()
    min_energy, states = brute_force(q, max_dimension)
    info = {"backend": "brute_force", "seed": None, "wall_time": time.perf_counter() - start}
    return SampleSet(tuple((s, min_energy, 1) for s in states), info)


def dumps_sampleset(ss: SampleSet) -> str:
    return json.dumps(ss.to_dict(), sort_keys=True)
