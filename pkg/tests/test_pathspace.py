"""Path-space marginals, exact sampling, martingales, and the filter isometry."""

import numpy as np
import pytest

from conftest import (
    SAMPLER_P,
    quiet_invariant,
    random_function,
    solved_base,
    stock_systems,
    weight_full_half,
    weight_markov_full,
    weight_markov_golden,
)
from shiftpath import (
    CylinderFunction,
    DensityMeasure,
    FilterMismatch,
    NotFixedPoint,
    RawMeasure,
    ZeroMassConditioning,
    build_path_measure,
    check_consistency,
    check_isometry,
    check_quasi_invariance,
    empirical_check,
    martingale_coordinates,
    project_once,
    sample_path,
    sample_paths,
    weight_product,
)


def make_pm(shift, v):
    return build_path_measure(shift, v, solved_base(shift, v), tol=1e-11)


def test_build_rejects_non_fixed_point(full2):
    rho = quiet_invariant(full2)
    v = weight_full_half(full2)
    skew = DensityMeasure(
        CylinderFunction.from_table(full2, 1, {(1,): 1.6, (2,): 0.4}), rho
    )
    with pytest.raises(NotFixedPoint):
        build_path_measure(full2, v, skew, tol=1e-10)


def test_marginals_are_reweighted_base(full2):
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    mu0 = pm.marginal(0)
    for n in range(1, 4):
        w = weight_product(v, n)
        mu_n = pm.marginal(n)
        depth = w.depth
        expect = w.values * mu0.masses_at(depth)
        assert np.allclose(mu_n.masses_at(depth), expect, atol=1e-14)


def test_marginal_total_masses_constant(golden):
    v = weight_markov_golden(golden)
    pm = make_pm(golden, v)
    for n in range(7):
        assert pm.marginal(n).total_mass() == pytest.approx(1.0, abs=1e-11)


def test_consistency_and_quasi_invariance_all_systems():
    for name, shift, v in stock_systems():
        pm = make_pm(shift, v)
        for depth in range(1, 5):
            for n in range(6):
                assert check_consistency(pm, n, depth) <= 1e-12, name
            assert check_quasi_invariance(pm, depth, 6) <= 1e-12, name


def test_corrupted_marginal_breaks_consistency(full2):
    """Swapping one level for the flat measure must leave a visible defect."""
    v = CylinderFunction.constant(full2, 1.0)
    rho = quiet_invariant(full2)
    mu0 = DensityMeasure(
        CylinderFunction.from_table(full2, 1, {(1,): 2.0, (2,): 0.0}), rho
    )
    override = {1: RawMeasure(full2, 2, rho.masses_at(2))}
    pm = build_path_measure(
        full2, v, mu0, tol=float("inf"), marginal_overrides=override
    )
    assert check_consistency(pm, 0, 1) >= 0.1
    assert check_quasi_invariance(pm, 1, 2) >= 0.1


def test_sampler_prepend_law_is_exact(full2):
    """Conditional one-step ratios must equal the column-stochastic P."""
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    mu0, mu1 = pm.marginal(0), pm.marginal(1)
    for depth in (1, 2, 3):
        for u in full2.words(depth):
            for a in (1, 2):
                ratio = mu1.mass((a,) + u) / mu0.mass(u)
                assert ratio == pytest.approx(SAMPLER_P[a - 1, u[0] - 1], abs=1e-14)


def test_sampler_prepend_law_golden(golden):
    v = weight_markov_golden(golden)
    pm = make_pm(golden, v)
    mu0, mu1 = pm.marginal(0), pm.marginal(1)
    p = {(1, 1): 2.0 / 3.0, (2, 1): 1.0 / 3.0, (1, 2): 1.0}
    for u in golden.words(2):
        for a in (1, 2):
            if not golden.is_admissible((a,) + u):
                continue
            ratio = mu1.mass((a,) + u) / mu0.mass(u)
            assert ratio == pytest.approx(p[(a, u[0])], abs=1e-14)


def test_sample_paths_shapes_and_admissibility(full2):
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    batch = sample_paths(pm, n_steps=4, n_samples=500, base_depth=2, seed=5)
    assert len(batch) == 500
    assert batch.base_words.shape == (500, 2)
    assert batch.prepends.shape == (500, 4)
    # every recorded truncation must be admissible
    for n in range(5):
        arr = batch.theta_words(n, 2)
        for row in arr[:50]:
            assert full2.is_admissible(tuple(int(x) for x in row))


def test_sampled_transitions_respect_matrix(golden):
    """On the golden shift a prepended 2 can never follow a leading 2."""
    v = weight_markov_golden(golden)
    pm = make_pm(golden, v)
    batch = sample_paths(pm, n_steps=6, n_samples=400, base_depth=1, seed=9)
    for n in range(1, 7):
        arr = batch.theta_words(n, 2)
        for a, b in arr:
            assert golden.matrix[a - 1, b - 1] == 1


def test_sampler_deterministic_across_workers(full2):
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    runs = [
        sample_paths(pm, 3, 999, 2, seed=12, workers=w) for w in (1, 2, 4, 7)
    ]
    for other in runs[1:]:
        assert np.array_equal(runs[0].base_words, other.base_words)
        assert np.array_equal(runs[0].prepends, other.prepends)


def test_sampler_deterministic_across_runs(full2):
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    a = sample_paths(pm, 2, 100, 1, seed=3)
    b = sample_paths(pm, 2, 100, 1, seed=3)
    c = sample_paths(pm, 2, 100, 1, seed=4)
    assert np.array_equal(a.prepends, b.prepends)
    assert not np.array_equal(a.prepends, c.prepends)


def test_single_path_helper(full2):
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    path = sample_path(pm, n_steps=3, base_depth=2, seed=21)
    assert len(path.base) == 2
    assert len(path.prepends) == 3


def test_empirical_frequencies_match_marginals(full2):
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    for n in (1, 2):
        rep = empirical_check(pm, n, 20000, 2, seed=14)
        assert rep.passed, (rep.max_dev, rep.sigma_bound)


def test_empirical_check_needs_samples(full2):
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    with pytest.raises(ValueError):
        empirical_check(pm, 1, 50, 1, seed=0)


def test_zero_mass_conditioning_raises(full2):
    """A corrupted level can walk the chain onto a massless cylinder."""
    v = CylinderFunction.constant(full2, 1.0)
    rho = quiet_invariant(full2)
    mu0 = DensityMeasure(
        CylinderFunction.from_table(full2, 1, {(1,): 2.0, (2,): 0.0}), rho
    )
    override = {1: RawMeasure(full2, 2, rho.masses_at(2))}
    pm = build_path_measure(
        full2, v, mu0, tol=float("inf"), marginal_overrides=override
    )
    with pytest.raises(ZeroMassConditioning):
        sample_paths(pm, n_steps=6, n_samples=64, base_depth=1, seed=2)


def test_martingale_tower_property():
    """Projecting any level down one step must reproduce the level below."""
    rng = np.random.default_rng(51)
    systems = [s for s in stock_systems() if s[0] in ("full_markov", "golden_markov")]
    for name, shift, v in systems:
        pm = build_path_measure(shift, v, solved_base(shift, v), tol=1e-11)
        for _ in range(10):
            xi = random_function(shift, rng, int(rng.integers(1, 3)))
            mc = martingale_coordinates(pm, xi, 4)
            for n in range(4):
                stepped = project_once(pm, mc.coordinates[n + 1], n)
                gap = np.abs(stepped.values - mc.coordinates[n].values).max()
                assert gap <= 1e-13, name


def test_martingale_norms_monotone():
    rng = np.random.default_rng(52)
    for name, shift, v in stock_systems():
        pm = build_path_measure(shift, v, solved_base(shift, v), tol=1e-11)
        for _ in range(5):
            xi = random_function(shift, rng, int(rng.integers(1, 3)))
            norms = martingale_coordinates(pm, xi, 4).norms()
            assert (np.diff(norms) >= -1e-12).all(), (name, norms)


def test_martingale_top_level_is_observable(full2):
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    xi = CylinderFunction.from_table(full2, 1, {(1,): 3.0, (2,): -2.0})
    mc = martingale_coordinates(pm, xi, 3)
    top = mc.coordinates[3]
    assert np.allclose(top.values, xi.promote(top.depth).values, atol=1e-15)


def test_martingale_level_zero_is_expectation(full2):
    """E_0 integrates to the same number as xi against the top marginal."""
    v = weight_markov_full(full2)
    pm = make_pm(full2, v)
    xi = CylinderFunction.from_table(full2, 2, {(1, 1): 1.0, (1, 2): -1.0, (2, 1): 2.0, (2, 2): 0.5})
    mc = martingale_coordinates(pm, xi, 3)
    lhs = pm.marginal(0).integrate(mc.coordinates[0])
    d = max(xi.depth, 3 + 1)
    rhs = float(xi.promote(d).values @ pm.marginal(3).masses_at(d))
    assert lhs == pytest.approx(rhs, abs=1e-13)


def test_isometry_residual_small(full2):
    v = weight_full_half(full2)
    pm = make_pm(full2, v)
    filt = CylinderFunction(
        full2, 1, np.array([np.sqrt(1.5) * np.exp(0.7j), np.sqrt(0.5) * np.exp(-0.2j)])
    )
    assert check_isometry(pm, filt, 2) <= 1e-13
    assert check_isometry(pm, filt, 3) <= 1e-13


def test_isometry_rejects_mismatched_filter(full2):
    v = weight_full_half(full2)
    pm = make_pm(full2, v)
    wrong = CylinderFunction(full2, 1, np.array([1.0 + 0.0j, 1.0 + 0.0j]))
    with pytest.raises(FilterMismatch):
        check_isometry(pm, wrong, 2)


def test_isometry_detects_broken_base(full2):
    """With a non fixed base the filter identity must fail loudly."""
    rho = quiet_invariant(full2)
    v = weight_full_half(full2)
    skew = DensityMeasure(
        CylinderFunction.from_table(full2, 1, {(1,): 1.6, (2,): 0.4}), rho
    )
    pm = build_path_measure(full2, v, skew, tol=float("inf"))
    filt = CylinderFunction(full2, 1, np.sqrt(v.values).astype(complex))
    assert check_isometry(pm, filt, 1) > 1e-3
