"""Extremality certificates and constructive decompositions of fixed points.

A fixed point mu0 of the v-weighted transformer is extremal among fixed
points exactly when the only bounded functions f with

    (conditional average of v * (f at the prepended word) given w) = f(w)

mu0-almost surely are the constants.  At a fixed cylinder depth this is
a finite homogeneous linear system; its solution space always contains
the constants, and extra dimensions produce genuine decompositions
mu0 = lam * mu1 + (1 - lam) * mu2 into distinct fixed points.  The
converse is depth-limited: a one-dimensional solution space at depth d
rules out depth-d witnesses only, so the certificate is reported
per depth rather than as an absolute verdict.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotFixedPoint
from .measures import DensityMeasure, RawMeasure, check_fixed_point
from .subshift import CylinderFunction

NULL_SPACE_RTOL = 1e-10
ESSENTIAL_FLOOR = 1e-12


def conditional_expectation(shift, mu0, v, g):
    """Average of v * g over the prepended extensions, given the current word.

    On a word w the value is

        sum_a v(aw) g(aw) mu0([aw])  /  sum_a mu0([aw]),

    with the sums over admissible prepend symbols a, evaluated at a
    depth fine enough to resolve v, g and the base density.  Words whose
    one-step extension carries no mu0 mass get the value 0.  The result
    never exceeds the sup of v * g in absolute value.
    """
    d0 = mu0.density.depth if isinstance(mu0, DensityMeasure) else mu0.depth
    dout = max(max(v.depth, g.depth) - 1, d0 - 1, 1)
    e = dout + 1
    vg = (v * g).promote(e).values
    fine = mu0.masses_at(e)
    suf = shift.suffix_indices(e)
    num = np.zeros(shift.word_count(dout), dtype=vg.dtype)
    den = np.zeros(shift.word_count(dout))
    np.add.at(num, suf, vg * fine)
    np.add.at(den, suf, fine)
    vals = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return CylinderFunction(shift, dout, vals)


@dataclass(frozen=True)
class ErgodicityReport:
    depth: int
    solution_dim: int
    basis: np.ndarray  # (word_count(depth), solution_dim), orthonormal columns
    extremal_certificate: bool
    singular_values: np.ndarray
    base_residual: float


def relative_ergodicity_dimension(shift, mu0, v, depth, tol=1e-10):
    """Dimension of the depth-d invariant-function space of a fixed point.

    Solves, for unknown values f on the depth-d words, the homogeneous
    system

        sum_a v(aw) mu0([aw]) * (f((aw) truncated) - f(w truncated)) = 0

    with one equation per word w fine enough to resolve v and the base
    density.  The constants always solve it, so solution_dim >= 1; the
    certificate field is True when nothing else does.  Raises
    NotFixedPoint first if mu0 fails the fixed-point identity at the
    conditioning depth.
    """
    v.require_nonnegative()
    d0 = mu0.density.depth if isinstance(mu0, DensityMeasure) else mu0.depth
    dw = max(v.depth - 1, depth, d0 - 1, 1)
    residual = check_fixed_point(shift, v, mu0, dw)
    if residual > tol:
        raise NotFixedPoint(residual, tol)

    e = dw + 1
    coef = v.promote(e).values * mu0.masses_at(e)
    rows = shift.suffix_indices(e)
    plus_cols = shift.prefix_indices(e, depth)
    minus_cols = shift.prefix_indices(dw, depth)[rows]

    n_unknowns = shift.word_count(depth)
    system = np.zeros((shift.word_count(dw), n_unknowns))
    np.add.at(system, (rows, plus_cols), coef)
    np.add.at(system, (rows, minus_cols), -coef)

    _, sing, vt = np.linalg.svd(system)
    smax = sing[0] if len(sing) else 0.0
    rank = int((sing > NULL_SPACE_RTOL * smax).sum()) if smax > 0 else 0
    dim = n_unknowns - rank
    basis = vt[rank:].T
    return ErgodicityReport(
        depth=depth,
        solution_dim=dim,
        basis=basis,
        extremal_certificate=(dim == 1),
        singular_values=sing,
        base_residual=residual,
    )


@dataclass(frozen=True)
class Decomposition:
    lam: float
    f1: CylinderFunction
    f2: CylinderFunction
    mu1: object
    mu2: object
    report: ErgodicityReport


def _component(shift, mu0, f):
    if isinstance(mu0, DensityMeasure):
        return DensityMeasure(f * mu0.density, mu0.rho)
    masses = f.promote(mu0.depth).values * mu0.masses
    return RawMeasure(shift, mu0.depth, masses)


def decompose(shift, mu0, v, depth, tol=1e-10):
    """Split a non-extremal fixed point into two distinct fixed components.

    Picks, from the invariant-function space at the given depth, the
    direction with the largest deviation from its mu0-mean on the
    support of mu0; directions invisible to mu0 cannot separate
    anything, so if none is essential the function returns None, as it
    does when the space is one-dimensional.  The chosen direction b is
    turned into a density f1 = (b - min b) / integral, the complement
    f2 = (1 - lam f1) / (1 - lam) with lam = 1 / (2 sup f1), and the
    components mu_i = f_i d(mu0) satisfy

        mu0 = lam mu1 + (1 - lam) mu2

    exactly, with both components again fixed under the transformer.
    """
    report = relative_ergodicity_dimension(shift, mu0, v, depth, tol=tol)
    if report.solution_dim <= 1:
        return None

    masses = mu0.masses_at(depth)
    total = masses.sum()
    support = masses > ESSENTIAL_FLOOR * max(total, 1.0)
    best = None
    best_score = 0.0
    for j in range(report.basis.shape[1]):
        b = report.basis[:, j]
        centered = b - (b @ masses) / total
        score = np.abs(centered[support]).max() if support.any() else 0.0
        if score > best_score:
            best_score = score
            best = centered
    if best is None or best_score <= ESSENTIAL_FLOOR:
        return None

    first = int(np.argmax(support))
    if best[first] < 0:
        best = -best

    g = best - best.min()
    g_mean = (g @ masses) / total
    f1_vals = g / g_mean
    f1 = CylinderFunction(shift, depth, f1_vals)
    lam = 1.0 / (2.0 * f1_vals.max())
    f2 = (CylinderFunction.constant(shift, 1.0, depth) - lam * f1) * (
        1.0 / (1.0 - lam)
    )
    mu1 = _component(shift, mu0, f1)
    mu2 = _component(shift, mu0, f2)
    return Decomposition(lam=lam, f1=f1, f2=f2, mu1=mu1, mu2=mu2, report=report)
