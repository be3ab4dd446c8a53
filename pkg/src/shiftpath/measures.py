"""Measures on the symbol space and the weighted pushforward transformer.

Two representations are used.  A RawMeasure is a finite table of
cylinder masses at one depth; it can be coarsened but not refined.  A
DensityMeasure is a nonnegative cylinder function times a Markov
product-rule measure; it resolves every depth exactly, which is what
makes the transformer, the marginal computations and the samplers
exact.

The transformer with weight v pushes a measure through the inverse of
the shift after reweighting: the transformed mass of [w] is the sum,
over admissible leading symbols a, of the integral of v over [a w]
against the input measure.  For a density f against a strongly
invariant reference measure this collapses to preimage-averaging the
density: transforming (f drho) gives (averaged v*f) drho.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateH, DepthTooShallow, MassCollapse, NoConvergence
from .invariant import MarkovMeasure, strongly_invariant_measure
from .subshift import CylinderFunction, weight_product
from .transfer import apply_transfer, iterate_fixed_function, left_fixed_functional

MASS_FLOOR = 1e-12


class RawMeasure:
    """A measure known only through its masses on the cylinders of one depth."""

    def __init__(self, shift, depth, masses):
        masses = np.asarray(masses, dtype=np.float64)
        if masses.shape != (shift.word_count(depth),):
            raise ValueError(
                f"expected {shift.word_count(depth)} masses for depth {depth}"
            )
        if masses.min() < -1e-15:
            raise ValueError("masses must be nonnegative")
        masses = np.clip(masses, 0.0, None)
        masses.setflags(write=False)
        self.shift = shift
        self.depth = depth
        self.masses = masses

    def __repr__(self):
        return f"RawMeasure(depth={self.depth}, total={self.total_mass():.6g})"

    def total_mass(self):
        return float(self.masses.sum())

    def masses_at(self, depth):
        if depth == self.depth:
            return self.masses
        if depth > self.depth:
            raise DepthTooShallow(
                f"measure stored at depth {self.depth} cannot resolve depth {depth}"
            )
        idx = self.shift.prefix_indices(self.depth, depth)
        out = np.zeros(self.shift.word_count(depth))
        np.add.at(out, idx, self.masses)
        return out

    def mass(self, word):
        word = tuple(word)
        self.shift.require_admissible(word)
        if len(word) > self.depth:
            raise DepthTooShallow(
                f"mass of [{''.join(map(str, word))}] needs depth {len(word)}, "
                f"have {self.depth}"
            )
        i = self.shift.word_index(len(word))[word]
        return float(self.masses_at(len(word))[i])

    def integrate(self, f):
        if f.depth > self.depth:
            raise DepthTooShallow(
                f"cannot integrate a depth-{f.depth} function at depth {self.depth}"
            )
        vals = f.promote(self.depth).values
        out = vals @ self.masses
        return complex(out) if np.iscomplexobj(vals) else float(out)


class DensityMeasure:
    """A nonnegative cylinder density against a Markov product-rule measure."""

    def __init__(self, density, rho):
        density.require_nonnegative("density")
        if density.shift is not rho.shift:
            raise ValueError("density and reference measure live on different subshifts")
        self.shift = rho.shift
        self.density = density
        self.rho = rho

    def __repr__(self):
        return (
            f"DensityMeasure(density_depth={self.density.depth}, "
            f"total={self.total_mass():.6g})"
        )

    @property
    def depth(self):
        return self.density.depth

    def total_mass(self):
        return float(self.rho.integrate(self.density))

    def masses_at(self, depth):
        f = self.density
        if depth >= f.depth:
            return f.promote(depth).values * self.rho.masses_at(depth)
        fine = f.values * self.rho.masses_at(f.depth)
        idx = self.shift.prefix_indices(f.depth, depth)
        out = np.zeros(self.shift.word_count(depth))
        np.add.at(out, idx, fine)
        return out

    def mass(self, word):
        word = tuple(word)
        self.shift.require_admissible(word)
        f = self.density
        if len(word) >= f.depth:
            return float(f.value(word) * self.rho.mass(word))
        i = self.shift.word_index(len(word))[word]
        return float(self.masses_at(len(word))[i])

    def integrate(self, g):
        e = max(g.depth, self.density.depth)
        return self.rho.integrate(g.promote(e) * self.density.promote(e))

    def to_raw(self, depth):
        return RawMeasure(self.shift, depth, self.masses_at(depth))


def _pushforward_masses(shift, v, mu, out_depth):
    """Masses of the transformed measure at depth `out_depth`, computed exactly.

    Enumerates words u one level deeper than the evaluation depth
    e = max(out_depth + 1, depth(v)); each contributes v(u) mu([u]) to
    the output word obtained by dropping its first symbol and truncating.
    """
    e = max(out_depth + 1, v.depth)
    ve = v.promote(e).values
    masses = mu.masses_at(e)  # DepthTooShallow for raw measures that are too coarse
    suf = shift.suffix_indices(e)
    target = suf if e - 1 == out_depth else shift.prefix_indices(e - 1, out_depth)[suf]
    out = np.zeros(shift.word_count(out_depth))
    np.add.at(out, target, ve * masses)
    return out


def transform_measure(shift, v, mu, out_depth=None):
    """Apply the weighted pushforward transformer to a measure.

    Density route: when mu is a DensityMeasure over a strongly invariant
    reference measure, returns the preimage-averaged density against the
    same reference, exact at every depth.  Raw route: a RawMeasure at
    out_depth (default: one less than the stored depth), which requires
    mu to resolve depth max(out_depth + 1, depth(v)).
    """
    v.require_nonnegative()
    if isinstance(mu, DensityMeasure) and out_depth is None:
        if mu.rho.strongly_invariant:
            return DensityMeasure(apply_transfer(shift, v, mu.density), mu.rho)
        raise ValueError(
            "density route needs a strongly invariant reference measure; "
            "pass out_depth to force the raw computation"
        )
    if out_depth is None:
        if not isinstance(mu, RawMeasure):
            raise ValueError("out_depth is required for this measure type")
        if mu.depth < max(v.depth, 2):
            raise DepthTooShallow(
                f"raw transform needs depth >= {max(v.depth, 2)}, have {mu.depth}"
            )
        out_depth = mu.depth - 1
    if out_depth < 1:
        raise ValueError("out_depth must be >= 1")
    return RawMeasure(shift, out_depth, _pushforward_masses(shift, v, mu, out_depth))


def check_fixed_point(shift, v, mu0, depth):
    """Worst defect of mu0 being fixed by the transformer, at one depth.

    Tests the pullback form of the fixed-point property: for every
    depth-d indicator f, the integral of f equals the integral of
    (f o shift) * v.  Returns the max absolute difference.
    """
    v.require_nonnegative()
    lhs = mu0.masses_at(depth)
    rhs = _pushforward_masses(shift, v, mu0, depth)
    return float(np.abs(lhs - rhs).max())


def masses_along_orbit(shift, v, mu0, n_max):
    """Total masses of the transformed iterates, n = 1 .. n_max.

    Entry n is the integral of the n-step running weight product against
    mu0, which equals the total mass of the n-fold transformed measure.
    For a genuine fixed point the sequence is constant at mu0's mass.
    """
    out = []
    w = None
    for n in range(1, n_max + 1):
        w = v if n == 1 else v * w.compose_with_shift()
        out.append(mu0.integrate(w))
    return np.asarray(out)


def fixed_density_measure(shift, v, rho=None, tol=1e-13, max_iter=10000):
    """The canonical fixed measure h drho built from the monotone iteration.

    Runs the sub-normalized iteration to its limit h, then normalizes:
    against the dual fixed vector when one exists (unit pairing), else
    to total mass 1.  Raises DegenerateH when the limit vanishes.
    """
    if rho is None:
        rho = strongly_invariant_measure(shift)
    res = iterate_fixed_function(shift, v, tol=tol, max_iter=max_iter)
    if res.status == "degenerate":
        raise DegenerateH(
            f"monotone limit is identically zero (sup {res.h.sup_norm():.2e})"
        )
    h = res.h
    nu = left_fixed_functional(shift, v)
    if nu is not None and h.depth >= nu.depth:
        pairing = nu.integrate(h)
        if pairing > 1e-12:
            h = h * (1.0 / pairing)
            return DensityMeasure(h, rho)
    total = rho.integrate(h)
    if total <= 0:
        raise DegenerateH("fixed function integrates to zero mass")
    return DensityMeasure(h * (1.0 / total), rho)


@dataclass(frozen=True)
class AveragingResult:
    measure: DensityMeasure
    residual: float
    n_used: int
    masses: np.ndarray  # unnormalized iterate masses, the viability sequence
    via: str  # "iterate" or "cesaro"
    iterate_residual: float
    cesaro_residual: float


def averaging_fixed_point(shift, v, seed, tol=1e-12, max_iter=10000):
    """Search for a probability fixed point by renormalized iteration.

    Repeatedly transforms the seed density, renormalizing to unit mass
    after each step, and tracks the Cesaro average of the normalized
    iterates alongside.  Whether the renormalized iterates themselves
    always settle is not established, so both are monitored and the
    first to pass the residual test is returned.  The product of the
    per-step masses reconstructs the mass of the unnormalized iterate;
    when it falls below 1e-12 the hypothesis of a two-sided mass bound
    has failed and MassCollapse is raised.
    """
    v.require_nonnegative()
    if not isinstance(seed, DensityMeasure):
        raise ValueError("seed must be a DensityMeasure")
    total = seed.total_mass()
    if total <= 0:
        raise ValueError("seed must have positive mass")
    rho = seed.rho
    avg_depth = max(v.depth - 1, seed.density.depth, 1)
    res_depth = max(v.depth - 1, 1)
    f = seed.density * (1.0 / total)
    cumulative = total
    masses = []
    cesaro_sum = np.zeros(shift.word_count(avg_depth))
    for n in range(1, max_iter + 1):
        g = apply_transfer(shift, v, f)
        step_mass = rho.integrate(g)
        cumulative *= step_mass
        masses.append(cumulative)
        if cumulative < MASS_FLOOR:
            mu = DensityMeasure(f, rho)
            raise MassCollapse(
                n, masses, check_fixed_point(shift, v, mu, res_depth)
            )
        f = g * (1.0 / step_mass)
        cesaro_sum = cesaro_sum + f.promote(avg_depth).values
        mu_it = DensityMeasure(f, rho)
        res_it = check_fixed_point(shift, v, mu_it, res_depth)
        ces = CylinderFunction(shift, avg_depth, cesaro_sum / n)
        mu_ces = DensityMeasure(ces, rho)
        res_ces = check_fixed_point(shift, v, mu_ces, res_depth)
        if res_it <= tol:
            return AveragingResult(
                mu_it, res_it, n, np.asarray(masses), "iterate", res_it, res_ces
            )
        if res_ces <= tol:
            ces_total = mu_ces.total_mass()
            mu_ces = DensityMeasure(ces * (1.0 / ces_total), rho)
            return AveragingResult(
                mu_ces, res_ces, n, np.asarray(masses), "cesaro", res_it, res_ces
            )
    raise NoConvergence(max_iter)
