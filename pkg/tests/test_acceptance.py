"""Acceptance suite: each test checks one criterion at its stated tolerance.

Every check records a PASS/FAIL line (printed in the terminal summary) before
asserting, so a failing sub-check still reports the measured values.
"""

import itertools
import json
import random
import statistics
import time

import pytest

from satqubo import bench, cnf, sampler
from satqubo import transforms as T
from satqubo.cnf import CnfFormula
from satqubo.qubo import apply_dwave_scaling, multiply
from satqubo.seeding import MULTIPLIER, child_seed

import oracles
from acceptance_log import record

NM_METHODS = ("chancellorJ1", "chancellorJ5", "nuesslein", "modchancellor")
SIGNS = list(itertools.product((False, True), repeat=3))


# 1 -------------------------------------------------------------------------

def test_c1_gadget_soundness():
    start = time.perf_counter()
    problems = []
    gadgets = [(f"chancellorJ{int(J)} {neg}", T.chancellor_clause_gadget(neg, J), None)
               for J in (1.0, 5.0) for neg in SIGNS]
    hstar = {0: -1, 1: 0, 2: 0, 3: -1}
    gadgets += [(f"nuesslein ({'abcd'[k]})", T.nuesslein_pattern(k), hstar[k]) for k in range(4)]
    for name, g, expected in gadgets:
        energies = {}
        for x in itertools.product((0, 1), repeat=4):
            energies[x] = oracles.naive_energy(g.qubo.terms, x)
        table = {bits: min(energies[bits + (0,)], energies[bits + (1,)])
                 for bits in itertools.product((0, 1), repeat=3)}
        fals = g.falsifying_assignment
        sat = {v for b, v in table.items() if b != fals}
        if len(sat) != 1 or not table[fals] > min(sat):
            problems.append(name)
        if expected is not None and (sat != {expected} or table[fals] != expected + 1):
            problems.append(name + " H*")
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 1.0
    record("C1 gadget soundness", ok,
           f"{len(gadgets)} gadgets, failures={problems}, {elapsed:.3f}s")
    assert ok


# 2 -------------------------------------------------------------------------

def test_c2_size_claims():
    rng = random.Random(2)
    sizes = [(11, 46), (3, 1), (20, 85), (8, 12), (5, 30)]
    bad = []
    count = 0
    for n, m in sizes:
        for rep in range(4):
            f = CnfFormula.from_ints(n, oracles.random_clauses(rng, n, m))
            for method in T.METHODS:
                out = T.build(method, f, seed=rep)
                expected = 3 * m if method == "choi" else n + m
                count += 1
                if out.dimension != expected or out.qubo.dimension != expected:
                    bad.append((method, n, m, out.dimension))
    record("C2 size claims", not bad, f"{count} QUBOs checked, mismatches={bad}")
    assert not bad


# 3 -------------------------------------------------------------------------

def _unsat_core(rng, n):
    vs = rng.sample(range(1, n + 1), 3)
    return [[s0 * vs[0], s1 * vs[1], s2 * vs[2]] for s0, s1, s2 in itertools.product((1, -1), repeat=3)]


def _acceptance_formulas(count=200, seed=3):
    """Mixed corpus: random formulas plus ones seeded with a full 8-clause unsat core."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(3, 8)
        if i % 2:
            clauses = _unsat_core(rng, n) + oracles.random_clauses(rng, n, rng.randint(0, 4))
            rng.shuffle(clauses)
        else:
            clauses = oracles.random_clauses(rng, n, rng.randint(1, 12))
        out.append((n, clauses))
    return out


@pytest.mark.slow
def test_c3_oracle_equivalence():
    start = time.perf_counter()
    failures = []
    sat_count = 0
    for idx, (n, clauses) in enumerate(_acceptance_formulas()):
        f = CnfFormula.from_ints(n, clauses)
        table = oracles.truth_table(n, clauses)
        sat = max(table.values()) == len(clauses)
        sat_count += sat
        for method in NM_METHODS:
            out = T.build(method, f, seed=idx)
            _, ground = sampler.brute_force(out.qubo)
            all_good = all(table[T.decode(out, g)] == len(clauses) for g in ground)
            if all_good != sat:
                failures.append((idx, method))
    # Choi: n <= 6, m <= 7
    rng = random.Random(4)
    choi_cases = 0
    for idx in range(200):
        n = rng.randint(3, 6)
        m = rng.randint(1, 7)
        clauses = oracles.random_clauses(rng, n, m)
        f = CnfFormula.from_ints(n, clauses)
        table = oracles.truth_table(n, clauses)
        sat = max(table.values()) == m
        out = T.choi_transform(f)
        e0, ground = sampler.brute_force(out.qubo)
        decoded = [T.choi_decode(out, g) for g in ground]
        all_good = all(a is not None and table[a] == m for a in decoded)
        if all_good != sat or (e0 == -m) != sat:
            failures.append((idx, "choi"))
        choi_cases += 1
    elapsed = time.perf_counter() - start
    record("C3 oracle equivalence", not failures,
           f"200 n+m formulas ({sat_count} sat / {200 - sat_count} unsat) x {len(NM_METHODS)} "
           f"transforms + {choi_cases} Choi formulas, failures={failures[:5]}, {elapsed:.1f}s")
    assert not failures


# 4 -------------------------------------------------------------------------

@pytest.mark.slow
def test_c4_experiment2_invariance():
    formulas = cnf.generate_corpus(11, 46, 100, seed=0)
    worst = 0.0
    for f in formulas:
        q = T.chancellor_transform(f, 1.0).qubo
        a = apply_dwave_scaling(q)
        b = apply_dwave_scaling(multiply(q, 1500))
        keys = a.terms.keys() | b.terms.keys()
        worst = max([worst] + [abs(a.terms.get(k, 0.0) - b.terms.get(k, 0.0)) for k in keys])
    coeff_ok = worst <= 1e-9
    record("C4a scaled inputs identical", coeff_ok, f"100 instances, max |delta| = {worst:.3g}")

    cfg = bench.ExperimentConfig(num_instances=20, seed=0, reads_per_instance=200,
                                 transforms=("chancellorJ1",))
    one = bench.run_experiment1(cfg).to_dict()
    two = bench.run_experiment2(cfg).to_dict()
    same = all(json.dumps(one[k], sort_keys=True) == json.dumps(two[k], sort_keys=True)
               for k in ("summary", "instances"))
    record("C4b experiment-2 report identity", same,
           f"20 instances x 200 reads, solved {two['summary'][0]['solved_instances']}/20, "
           f"correct {two['summary'][0]['correct_solutions']}")
    assert coeff_ok and same


# 5 -------------------------------------------------------------------------

def test_c5_modified_optima_preserved():
    formulas = cnf.generate_corpus(6, 12, 50, seed=5, require_satisfiable=True)
    mismatches = []
    for i, f in enumerate(formulas):
        plain = T.chancellor_transform(f, 1.0)
        modified = T.modified_chancellor_transform(f, 1.0, (1, 500, 1001),
                                                   seed=child_seed(5, MULTIPLIER, i))
        if set(sampler.brute_force(plain.qubo)[1]) != set(sampler.brute_force(modified.qubo)[1]):
            mismatches.append(i)
    record("C5 modified optima preserved", not mismatches,
           f"50 satisfiable (n=6, m=12) instances, mismatches={mismatches}")
    assert not mismatches


# 6 -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def corpus_metrics():
    formulas = cnf.generate_corpus(11, 46, 100, seed=0)
    out = {}
    for method in ("chancellorJ1", "nuesslein", "chancellorJ5", "modchancellor"):
        rows = bench.analyze_corpus(formulas, method, 0)["rows"]
        out[method] = {
            "count": [r["num_distinct_quadratic"] for r in rows],
            "range": [r["quadratic_range_size"] for r in rows],
        }
    return out


def test_c6a_distinct_count_ordering(corpus_metrics):
    med = {k: statistics.median(v["count"]) for k, v in corpus_metrics.items()}
    ok = med["chancellorJ1"] < med["nuesslein"] < med["chancellorJ5"]
    record("C6a median distinct-quadratic J1 < N < J5", ok,
           f"J1={med['chancellorJ1']}, N={med['nuesslein']}, J5={med['chancellorJ5']}")
    assert ok


def test_c6b_range_ordering(corpus_metrics):
    med = {k: statistics.median(v["range"]) for k, v in corpus_metrics.items()}
    ok = med["chancellorJ1"] < med["nuesslein"] < med["chancellorJ5"]
    record("C6b median quadratic range J1 < N < J5", ok,
           f"J1={med['chancellorJ1']}, N={med['nuesslein']}, J5={med['chancellorJ5']}")
    assert ok


def test_c6c_modified_count_bounds(corpus_metrics):
    counts = corpus_metrics["modchancellor"]["count"]
    ok = 8 <= min(counts) and max(counts) <= 18
    record("C6c modified distinct-quadratic in [8, 18]", ok, f"observed [{min(counts)}, {max(counts)}]")
    assert ok


def test_c6d_modified_count_mean(corpus_metrics):
    mean = statistics.fmean(corpus_metrics["modchancellor"]["count"])
    ok = abs(mean - 13) <= 3
    record("C6d modified distinct-quadratic mean 13 +- 3", ok, f"observed mean {mean:.2f}")
    assert ok


def test_c6e_modified_range_bounds(corpus_metrics):
    ranges = corpus_metrics["modchancellor"]["range"]
    ok = 1500 <= min(ranges) and max(ranges) <= 5504
    record("C6e modified quadratic range in [1500, 5504]", ok,
           f"observed [{min(ranges):g}, {max(ranges):g}]")
    assert ok


def test_c6f_modified_range_mean(corpus_metrics):
    mean = statistics.fmean(corpus_metrics["modchancellor"]["range"])
    ok = abs(mean - 2765) <= 0.2 * 2765
    record("C6f modified quadratic range mean 2765 +- 20%", ok, f"observed mean {mean:.1f}")
    assert ok


# 7 -------------------------------------------------------------------------

SA_SOLVED_THRESHOLD = 0.90


@pytest.mark.slow
def test_c7_sampler_calibration():
    cfg = bench.ExperimentConfig(num_instances=50, seed=7, reads_per_instance=1000,
                                 transforms=("chancellorJ1",))
    start = time.perf_counter()
    arm = bench.run_experiment1(cfg).arm("chancellorJ1")
    elapsed = time.perf_counter() - start
    ok = arm.solved_instances >= SA_SOLVED_THRESHOLD * 50
    record("C7 SA calibration on ChancellorJ1", ok,
           f"solved {arm.solved_instances}/50 ({arm.solved_pct:.1f}%), correct reads "
           f"{arm.correct_pct:.2f}%, {elapsed:.0f}s")
    assert ok


# 8 -------------------------------------------------------------------------

def test_c8_determinism(tmp_path):
    cfg = bench.ExperimentConfig(num_instances=4, seed=11, reads_per_instance=50, num_sweeps=300)
    runs = {"experiment1": bench.run_experiment1, "experiment2": bench.run_experiment2,
            "experiment3": bench.run_experiment3}
    differing = []
    for name, fn in runs.items():
        a = bench.emit_report(fn(cfg), tmp_path / "a" / name)
        b = bench.emit_report(fn(cfg), tmp_path / "b" / name)
        for pa, pb in zip(a, b):
            if pa.read_bytes() != pb.read_bytes():
                differing.append(f"{name}/{pa.name}")
    record("C8 determinism", not differing,
           f"3 experiments x (json, csv) rerun byte-identical; differing={differing}")
    assert not differing
