"""The weighted transfer operator and its fixed objects.

Applying the operator with weight v averages v-weighted values over the
inverse branches of the shift:

    (averaged v*f)(x) = (1/#branches(x1)) * sum over symbols a with
                        matrix[a, x1] == 1 of v(a x) f(a x).

On cylinder tables this is exact: if v has depth m and f depth d, the
result depends on the first max(m - 1, d - 1, 1) coordinates.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateH,
    DepthTooShallow,
    MonotonicityViolation,
    NoConvergence,
    NotSubNormalized,
)
from .subshift import CylinderFunction, weight_product

DEGENERATE_SUP = 1e-9


def apply_transfer(shift, v, f):
    """Apply the v-weighted transfer operator to a cylinder function.

    Parameters
    ----------
    shift : Subshift
    v : CylinderFunction
        Nonnegative weight.
    f : CylinderFunction

    Returns
    -------
    CylinderFunction at depth max(depth(v) - 1, depth(f) - 1, 1).
    """
    v.require_nonnegative()
    out_depth = max(v.depth - 1, f.depth - 1, 1)
    e = out_depth + 1
    ve = v.promote(e).values
    fe = f.promote(e).values
    contrib = ve * fe
    suf = shift.suffix_indices(e)
    out = np.zeros(shift.word_count(out_depth), dtype=contrib.dtype)
    np.add.at(out, suf, contrib)
    first = shift.symbols_array(out_depth)[:, 0]
    out /= shift.column_sums[first - 1]
    return CylinderFunction(shift, out_depth, out)


@dataclass(frozen=True)
class TransferMatrix:
    """Matrix of the transfer operator on depth-d tables.

    matrix[i, j] is the value of the transferred j-th indicator on the
    i-th depth-d word, so matrix @ f.values computes the operator.
    """

    shift: object
    v: CylinderFunction
    depth: int
    matrix: np.ndarray


def transfer_matrix(shift, v, depth):
    """Assemble the operator as a dense matrix acting on depth-`depth` tables.

    Requires depth >= max(depth(v) - 1, 1) so that depth-d tables map
    into depth-d tables.
    """
    if depth < max(v.depth - 1, 1):
        raise DepthTooShallow(
            f"depth {depth} cannot carry the operator of a depth-{v.depth} weight"
        )
    v.require_nonnegative()
    n = shift.word_count(depth)
    e = depth + 1
    ve = v.promote(e).values
    suf = shift.suffix_indices(e)
    pre = shift.prefix_indices(e, depth)
    first = shift.symbols_array(depth)[:, 0]
    inv_c = 1.0 / shift.column_sums[first - 1]
    mat = np.zeros((n, n))
    # word u at depth e contributes v(u)/c to entry (index of u[1:], index of u[:depth])
    np.add.at(mat, (suf, pre), ve)
    mat *= inv_c[:, None]
    return TransferMatrix(shift, v, depth, mat)


@dataclass(frozen=True)
class FixedFunctionResult:
    h: CylinderFunction
    n_used: int
    status: str  # "converged" or "degenerate"
    residual: float


def iterate_fixed_function(shift, v, tol=1e-13, max_iter=10000):
    """Monotone iteration of the transfer operator started at the constant 1.

    Requires the averaged weight (the operator applied to the constant
    1) to stay below 1 + tol everywhere; under that sub-normalization
    the iterates decrease pointwise and their limit h is itself fixed by
    the operator.  Iteration stops when consecutive iterates agree
    within tol.  The status is "degenerate" when the limit is
    identically zero (sup below 1e-9), which happens exactly when the
    averaged weight loses mass.

    Raises
    ------
    NotSubNormalized
        If the averaged weight exceeds 1 + tol somewhere.
    MonotonicityViolation
        If an iterate increases somewhere by more than 1e-12.
    NoConvergence
        If max_iter steps do not reach the tolerance.
    """
    one = CylinderFunction.constant(shift, 1.0, depth=1)
    first = apply_transfer(shift, v, one)
    sup1 = first.max()
    if sup1 > 1.0 + tol:
        raise NotSubNormalized(f"sup of transferred constant is {sup1:.6g} > 1")
    depth = max(v.depth - 1, 1)
    h = one.promote(depth)
    for n in range(1, max_iter + 1):
        nxt = apply_transfer(shift, v, h)
        rise = float((nxt.values - h.values).max())
        if rise > 1e-12:
            raise MonotonicityViolation(
                f"iterate increased by {rise:.3e} at step {n}"
            )
        delta = float(np.abs(nxt.values - h.values).max())
        h = nxt
        if delta <= tol:
            residual = float(
                np.abs(apply_transfer(shift, v, h).values - h.values).max()
            )
            status = "degenerate" if h.sup_norm() < DEGENERATE_SUP else "converged"
            return FixedFunctionResult(h, n, status, residual)
    raise NoConvergence(max_iter)


def left_fixed_functional(shift, v, depth=None):
    """Dual fixed vector of the transfer operator, as cylinder masses.

    Looks for an eigenvalue of the depth-d operator matrix within 1e-10
    of 1 and returns the corresponding left eigenvector, sign-fixed,
    clipped of rounding dust and normalized to total mass 1.  Returns
    None when no such eigenvalue exists (e.g. strictly mass-losing
    weights) or when no nonnegative representative can be found.
    """
    if depth is None:
        depth = max(v.depth - 1, 1)
    tm = transfer_matrix(shift, v, depth)
    vals, vecs = np.linalg.eig(tm.matrix.T)
    candidates = np.flatnonzero(np.abs(vals - 1.0) <= 1e-10)
    if len(candidates) == 0:
        return None
    from .measures import RawMeasure

    for i in candidates:
        vec = np.real(vecs[:, i])
        if vec.sum() < 0:
            vec = -vec
        floor = -1e-9 * max(np.abs(vec).max(), 1.0)
        if vec.min() >= floor:
            vec = np.clip(vec, 0.0, None)
            if vec.sum() > 0:
                return RawMeasure(shift, depth, vec / vec.sum())
    # mixed-sign eigenvectors: try the positive part of each candidate
    for i in candidates:
        vec = np.clip(np.real(vecs[:, i]), 0.0, None)
        if vec.sum() > 0:
            vec = vec / vec.sum()
            if np.abs(vec @ tm.matrix - vec).max() <= 1e-9:
                return RawMeasure(shift, depth, vec)
    return None


def check_weight_pushforward(shift, v, f, rho, n):
    """Defect of the n-step pushforward identity against a reference measure.

    Compares the integral of (running weight product) * f with the
    integral of the n-fold transferred f, both against rho.  For a
    strongly invariant rho the two agree exactly.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    lhs = rho.integrate(weight_product(v, n) * f)
    g = f
    for _ in range(n):
        g = apply_transfer(shift, v, g)
    rhs = rho.integrate(g)
    return abs(lhs - rhs)


def product_weight(v, w):
    """Pointwise product of two nonnegative weights at their common depth."""
    v.require_nonnegative()
    w.require_nonnegative()
    return v * w
