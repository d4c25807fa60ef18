"""Independent reference implementations used by the tests.

Nothing here imports package internals beyond plain data access, so a bug in
the package cannot leak into its own oracle.
"""

import itertools


def clause_true(clause, bits):
    return any((bits[abs(lit) - 1] == 1) if lit > 0 else (bits[abs(lit) - 1] == 0) for lit in clause)


def truth_table(num_variables, clauses):
    """{assignment: number of satisfied clauses} for every assignment."""
    table = {}
    for bits in itertools.product((0, 1), repeat=num_variables):
        table[bits] = sum(clause_true(c, bits) for c in clauses)
    return table


def satisfiable(num_variables, clauses):
    m = len(clauses)
    return any(v == m for v in truth_table(num_variables, clauses).values())


def naive_energy(terms, x):
    total = 0.0
    for (i, j), v in terms.items():
        total += v * x[i] * x[j]
    return total


def naive_ground_states(terms, d):
    """(min energy, sorted list of minimizing tuples) by plain enumeration."""
    best = None
    states = []
    for x in itertools.product((0, 1), repeat=d):
        e = naive_energy(terms, x)
        if best is None or e < best - 1e-9:
            best, states = e, [x]
        elif abs(e - best) <= 1e-9:
            states.append(x)
    return best, sorted(states)


def chancellor_spin_energy(negated, J, h, s):
    """Unnormalized clause energy in spins ``s = (s1, s2, s3, s_anc)``.

    Parity gadget plus the remaining clause-expansion terms, written out term
    by term with ``t_i = c_i s_i``.
    """
    c = [-1 if n else 1 for n in negated]
    t = [c[i] * s[i] for i in range(3)]
    a = s[3]
    pairs = t[0] * t[1] + t[0] * t[2] + t[1] * t[2]
    parity = J * pairs + h * sum(t) + 2 * J * sum(t) * a + 2 * h * a
    expansion = -sum(t) + pairs
    return parity + expansion


def random_clauses(rng, n, m):
    out = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        out.append([v if rng.random() < 0.5 else -v for v in vs])
    return out
