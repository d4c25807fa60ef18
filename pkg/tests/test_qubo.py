import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satqubo import qubo as Q
from satqubo.errors import InvalidParameterError, ParseError
from satqubo.qubo import IsingModel, Qubo
from satqubo.transforms import nuesslein_pattern

import oracles


@st.composite
def qubos(draw, max_dim=6, integer=False):
    d = draw(st.integers(1, max_dim))
    values = st.integers(-5, 5) if integer else st.floats(-10, 10, allow_nan=False, width=32)
    terms = {}
    for i in range(d):
        for j in range(i, d):
            if draw(st.booleans()):
                terms[(i, j)] = draw(values)
    return Qubo(d, terms)


def test_construction_cleans_terms():
    q = Qubo(3, {(1, 2): 2.0, (0, 0): 0.0, (0, 1): -1})
    assert q.terms == {(0, 1): -1.0, (1, 2): 2.0}
    with pytest.raises(InvalidParameterError):
        Qubo(3, {(2, 1): 1.0})
    with pytest.raises(InvalidParameterError):
        Qubo(3, {(0, 3): 1.0})


def test_from_dense_folds_lower_triangle():
    q = Qubo.from_dense([[1, 2], [3, 4]])
    assert q.terms == {(0, 0): 1.0, (0, 1): 5.0, (1, 1): 4.0}


def test_energy_examples():
    assert Q.energy(Qubo(1, {(0, 0): -1}), (1,)) == -1
    q = Qubo(3, {(0, 0): 4, (0, 2): -1, (1, 2): 7})
    assert Q.energy(q, (0, 0, 0)) == 0
    assert Q.energy(nuesslein_pattern(0).qubo, (0, 0, 0, 1)) == 1
    with pytest.raises(InvalidParameterError):
        Q.energy(q, (0, 1))


@given(qubos())
@settings(max_examples=60, deadline=None)
def test_energy_matches_naive(q):
    states = list(itertools.product((0, 1), repeat=q.dimension))
    vec = Q.energies(q, states)
    for x, e in zip(states, vec):
        ref = oracles.naive_energy(q.terms, x)
        assert Q.energy(q, x) == pytest.approx(ref, abs=1e-9)
        assert e == pytest.approx(ref, abs=1e-9)


def test_to_ising_single_diagonal():
    m = Q.to_ising(Qubo(1, {(0, 0): 1.0}))
    assert m.h == {0: 0.5} and m.J == {} and m.offset == 0.5


def test_zero_qubo_to_ising():
    m = Q.to_ising(Qubo(4))
    assert m.h == {} and m.J == {} and m.offset == 0.0


def test_ising_identity_random_d10():
    rng = np.random.default_rng(0)
    dense = np.triu(rng.normal(size=(10, 10)))
    q = Qubo.from_dense(dense)
    m = Q.to_ising(q)
    for x in itertools.product((0, 1), repeat=10):
        s = [2 * b - 1 for b in x]
        assert Q.energy(q, x) == pytest.approx(Q.ising_energy(m, s) + m.offset, abs=1e-9)


@given(qubos())
@settings(max_examples=60, deadline=None)
def test_ising_roundtrip(q):
    back, const = Q.from_ising(Q.to_ising(q))
    assert const == pytest.approx(0.0, abs=1e-9)
    for key in q.terms.keys() | back.terms.keys():
        assert back.terms.get(key, 0.0) == pytest.approx(q.terms.get(key, 0.0), abs=1e-12)


def test_scale_factor_examples():
    m = IsingModel(3, {0: -8, 1: 8}, {(0, 1): 3})
    assert Q.scale_factor(m) == 3
    small = IsingModel(2, {0: 1}, {(0, 1): -0.5})
    assert Q.scale_factor(small, allow_upscale=False) == 1
    assert Q.scale_factor(IsingModel(3)) == 1
    assert Q.scale_factor(IsingModel(3), allow_upscale=False) == 1


def test_scale_factor_upscales_by_default():
    small = IsingModel(2, {0: 1}, {(0, 1): -0.5})
    assert Q.scale_factor(small) == 0.5


def test_scale_factor_uses_signed_extremes():
    # only negative couplings: compare min(J) against the lower bound
    m = IsingModel(2, {}, {(0, 1): -2.5})
    assert Q.scale_factor(m) == 2.5
    asym = IsingModel(2, {0: 3.0}, {}, 0.0)
    assert Q.scale_factor(asym, h_range=(-2, 6)) == 0.5


@pytest.mark.parametrize("rng", [(0, 1), (-1, 0), (1, 2)])
def test_scale_factor_degenerate_ranges(rng):
    with pytest.raises(InvalidParameterError):
        Q.scale_factor(IsingModel(2, {0: 1}), h_range=rng)
    with pytest.raises(InvalidParameterError):
        Q.scale_factor(IsingModel(2, {0: 1}), J_range=rng)


def test_multiply():
    q = Qubo(2, {(0, 0): -1, (0, 1): 2})
    assert Q.multiply(q, 1) == q
    with pytest.raises(InvalidParameterError):
        Q.multiply(q, 0)
    with pytest.raises(InvalidParameterError):
        Q.multiply(q, -2)


@given(qubos(), st.floats(0.01, 2000))
@settings(max_examples=40, deadline=None)
def test_multiply_scales_energy(q, k):
    qk = Q.multiply(q, k)
    for x in itertools.product((0, 1), repeat=q.dimension):
        assert Q.energy(qk, x) == pytest.approx(k * Q.energy(q, x), rel=1e-9, abs=1e-9)


@given(qubos(max_dim=8, integer=True))
@settings(max_examples=60, deadline=None)
def test_scaling_collapses_1500(q):
    a = Q.apply_dwave_scaling(q)
    b = Q.apply_dwave_scaling(Q.multiply(q, 1500))
    assert a.terms.keys() == b.terms.keys()
    for key in a.terms:
        assert abs(a.terms[key] - b.terms[key]) <= 1e-9


def test_scaling_leaves_in_range_qubo_alone():
    q = Qubo(2, {(0, 0): 0.5, (0, 1): -0.5})
    assert Q.apply_dwave_scaling(q, allow_upscale=False) == q


@given(qubos(max_dim=8, integer=True))
@settings(max_examples=40, deadline=None)
def test_scaling_preserves_argmin(q):
    assert oracles.naive_ground_states(Q.apply_dwave_scaling(q).terms, q.dimension)[1] == \
        oracles.naive_ground_states(q.terms, q.dimension)[1]


def test_scaled_model_is_within_ranges():
    q = Qubo(3, {(0, 0): 40, (0, 1): -12, (1, 2): 9, (2, 2): -3})
    m = Q.to_ising(Q.apply_dwave_scaling(q))
    assert max(abs(v) for v in m.h.values()) <= 4 + 1e-12
    assert max(abs(v) for v in m.J.values()) <= 1 + 1e-12
    assert Q.scale_factor(m) == pytest.approx(1.0)


def test_metrics_nuesslein_pattern_a():
    met = Q.structure_metrics(nuesslein_pattern(0).qubo)
    assert met.num_distinct_quadratic == 3
    assert met.quadratic_range_size == 4
    assert met.dimension == 4


def test_metrics_diagonal_only_and_zero():
    met = Q.structure_metrics(Qubo(3, {(0, 0): 1, (2, 2): -2}))
    assert met.num_distinct_quadratic == 0 and met.quadratic_range_size == 0
    assert met.num_distinct_linear == 2 and met.linear_range_size == 3
    zero = Q.structure_metrics(Qubo(5))
    assert zero.as_dict() == {"dimension": 5, "num_distinct_quadratic": 0, "num_distinct_linear": 0,
                              "quadratic_range_size": 0.0, "linear_range_size": 0.0,
                              "scale_factor": 0.0, "density": 0.0}


@given(qubos(), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_metrics_permutation_invariant(q, rnd):
    perm = list(range(q.dimension))
    rnd.shuffle(perm)
    terms = {}
    for (i, j), v in q.terms.items():
        a, b = sorted((perm[i], perm[j]))
        terms[(a, b)] = v
    assert Q.structure_metrics(Qubo(q.dimension, terms)) == Q.structure_metrics(q)


@given(qubos())
@settings(max_examples=40, deadline=None)
def test_json_roundtrip(q):
    assert Q.loads_qubo(Q.dumps_qubo(q)) == q


@pytest.mark.parametrize("payload", [
    {"dimension": 2, "terms": [[1, 0, 1.0]]},
    {"dimension": 2, "terms": [[0, 2, 1.0]]},
    {"dimension": 2, "terms": [[0, 1, 1.0], [0, 1, 2.0]]},
    {"dimension": 2, "terms": [[0, 1]]},
    {"terms": []},
])
def test_json_rejects_bad_payloads(payload):
    with pytest.raises(ParseError):
        Q.loads_qubo(json.dumps(payload))
    with pytest.raises(ParseError):
        Q.loads_qubo("{nope")
