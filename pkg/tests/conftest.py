"""Shared fixtures and brute-force oracles.

The oracle helpers below work on plain dicts and itertools enumeration,
with no shared code paths with the library's vectorized internals, so
agreement between the two is evidence rather than tautology.
"""

import itertools
import warnings

import numpy as np
import pytest

from shiftpath import (
    CylinderFunction,
    DensityMeasure,
    build_subshift,
    fixed_density_measure,
    strongly_invariant_measure,
)

FULL2 = [[1, 1], [1, 1]]
GOLDEN = [[1, 1], [1, 0]]
BLOCK4 = [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]
PERM2 = [[0, 1], [1, 0]]
IDENT2 = [[1, 0], [0, 1]]

# column-stochastic prepend law used by the sampler fixture: V = 2 P
SAMPLER_P = np.array([[1.0 / 3.0, 0.5], [2.0 / 3.0, 0.5]])


@pytest.fixture
def full2():
    return build_subshift(FULL2)


@pytest.fixture
def golden():
    return build_subshift(GOLDEN)


@pytest.fixture
def block4():
    return build_subshift(BLOCK4)


@pytest.fixture
def perm2():
    return build_subshift(PERM2)


@pytest.fixture
def ident2():
    return build_subshift(IDENT2)


def quiet_invariant(shift):
    """Strongly invariant measure with the non-uniqueness warning silenced."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return strongly_invariant_measure(shift)


def weight_full_half(shift):
    """V = (3/2, 1/2) on the full 2-shift."""
    return CylinderFunction.from_table(shift, 1, {(1,): 1.5, (2,): 0.5})


def weight_markov_full(shift):
    """Depth-2 weight 2*P on the full 2-shift; prepend law is exactly P."""
    table = {
        (a, j): 2.0 * SAMPLER_P[a - 1, j - 1] for a in (1, 2) for j in (1, 2)
    }
    return CylinderFunction.from_table(shift, 2, table)


def weight_markov_golden(shift):
    """Depth-2 weight on the golden-mean shift with fixed density one."""
    return CylinderFunction.from_table(
        shift, 2, {(1, 1): 4.0 / 3.0, (2, 1): 2.0 / 3.0, (1, 2): 1.0}
    )


def stock_systems():
    """Non-degenerate (name, shift, weight) triples used across the suite."""
    full = build_subshift(FULL2)
    gold = build_subshift(GOLDEN)
    perm = build_subshift(PERM2)
    block = build_subshift(BLOCK4)
    return [
        ("full_half", full, weight_full_half(full)),
        ("full_markov", full, weight_markov_full(full)),
        ("golden_flat", gold, CylinderFunction.constant(gold, 1.0)),
        ("golden_markov", gold, weight_markov_golden(gold)),
        ("perm_flat", perm, CylinderFunction.constant(perm, 1.0)),
        ("block_flat", block, CylinderFunction.constant(block, 1.0)),
    ]


def solved_base(shift, v):
    """mu0 = h d(rho) for the weight, built from the solver."""
    return fixed_density_measure(shift, v, rho=quiet_invariant(shift))


# ---------------------------------------------------------------------------
# brute-force oracles (dict and loop based on purpose)


def brute_words(matrix, depth):
    """All admissible words by direct product enumeration, lexicographic."""
    k = len(matrix)
    out = []
    for w in itertools.product(range(1, k + 1), repeat=depth):
        if all(matrix[w[i] - 1][w[i + 1] - 1] == 1 for i in range(depth - 1)):
            out.append(w)
    return out


def brute_column_sums(matrix):
    k = len(matrix)
    return [sum(matrix[i][j] for i in range(k)) for j in range(k)]


def table_value(table, word):
    """Value of a cylinder-function dict on a (possibly longer) word."""
    depth = len(next(iter(table)))
    assert len(word) >= depth
    return table[tuple(word[:depth])]


def measure_mass(mu, word):
    """Mass of [word] from a dict of masses at some fixed finer depth."""
    depth = len(next(iter(mu)))
    word = tuple(word)
    if len(word) == depth:
        return mu.get(word, 0.0)
    assert len(word) < depth
    return sum(m for u, m in mu.items() if u[: len(word)] == word)


def brute_invariant_mass(matrix, q, word):
    """Product formula for the preimage-averaging invariant measure."""
    cols = brute_column_sums(matrix)
    mass = q[word[-1] - 1]
    for a, b in zip(word, word[1:]):
        mass *= matrix[a - 1][b - 1] / cols[b - 1]
    return mass


def brute_transfer(matrix, v, f, out_depth):
    """Preimage average of v*f as a dict over depth-out_depth words."""
    k = len(matrix)
    cols = brute_column_sums(matrix)
    out = {}
    for w in brute_words(matrix, out_depth):
        total = 0.0
        for a in range(1, k + 1):
            if matrix[a - 1][w[0] - 1]:
                aw = (a,) + w
                total += table_value(v, aw) * table_value(f, aw)
        out[w] = total / cols[w[0] - 1]
    return out


def brute_pushforward(matrix, v, mu, out_depth):
    """Raw transform sum_a v(aw) mu([aw]) as a dict (no preimage averaging)."""
    k = len(matrix)
    out = {}
    for w in brute_words(matrix, out_depth):
        total = 0.0
        for a in range(1, k + 1):
            if matrix[a - 1][w[0] - 1]:
                aw = (a,) + w
                total += table_value(v, aw) * measure_mass(mu, aw)
        out[w] = total
    return out


def brute_weight_product(matrix, v, n, depth):
    """Running product of v along the first n truncations, at given depth."""
    out = {}
    for u in brute_words(matrix, depth):
        prod = 1.0
        for i in range(n):
            prod *= table_value(v, u[i:])
        out[u] = prod
    return out


def random_subshift(rng, k, require_irreducible=True, max_tries=500):
    """A random 0/1 transition matrix with every column hit, via rejection."""
    for _ in range(max_tries):
        m = (rng.random((k, k)) < 0.6).astype(int)
        if (m.sum(axis=0) == 0).any():
            continue
        shift = build_subshift(m)
        if not require_irreducible or shift.irreducible:
            return shift
    raise RuntimeError("no admissible random matrix found")


def random_weight(shift, rng, depth, low=0.1, high=2.0):
    vals = rng.uniform(low, high, shift.word_count(depth))
    return CylinderFunction(shift, depth, vals)


def random_function(shift, rng, depth, scale=2.0):
    vals = rng.uniform(-scale, scale, shift.word_count(depth))
    return CylinderFunction(shift, depth, vals)


def function_dict(f):
    return {w: x for w, x in zip(f.shift.words(f.depth), f.values)}


def measure_dict(mu, depth):
    return {w: m for w, m in zip(mu.shift.words(depth), mu.masses_at(depth))}
