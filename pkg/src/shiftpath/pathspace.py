"""Weighted measures on the space of inverse-branch trajectories.

A fixed point mu0 of the weighted transformer, together with its weight
v, determines a consistent family of level measures

    mu_n = (running product of v over n steps) d(mu0),

one per coordinate of the space of backward trajectories of the shift
(sequences x0, x1, ... with shift(x_{n+1}) = x_n).  The family is never
materialized as a single object; every computation below works through
the exact finite-depth marginals.  Consistency of the family and the
reweighting relation between consecutive levels are checkable
identities, and the trajectory process can be sampled exactly because
the one-step conditional masses are ratios of stored cylinder masses.
"""

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import (
    DepthTooShallow,
    FilterMismatch,
    NotFixedPoint,
    ZeroMassConditioning,
)
from .measures import DensityMeasure, RawMeasure, _pushforward_masses, check_fixed_point
from .subshift import CylinderFunction, weight_product


def _drop_indices(shift, depth, steps):
    """Map each depth-`depth` word to the index of the word minus its first `steps` symbols."""
    idx = np.arange(shift.word_count(depth), dtype=np.int64)
    for d in range(depth, depth - steps, -1):
        idx = shift.suffix_indices(d)[idx]
    return idx


class PathMeasure:
    """A validated fixed point plus its weight, exposing exact level marginals."""

    def __init__(self, shift, v, mu0, tol, base_residual, overrides=None):
        self.shift = shift
        self.v = v
        self.mu0 = mu0
        self.tol = tol
        self.base_residual = base_residual
        self.overrides = dict(overrides or {})
        self._marginals = {}
        self._kernels = {}

    def __repr__(self):
        return f"PathMeasure(v_depth={self.v.depth}, residual={self.base_residual:.2e})"

    @property
    def density_depth(self):
        if isinstance(self.mu0, DensityMeasure):
            return self.mu0.density.depth
        return 1

    def marginal(self, n):
        """The level-n measure: mu0 reweighted by the n-step product of v."""
        if n < 0:
            raise ValueError("level must be >= 0")
        if n in self.overrides:
            return self.overrides[n]
        if n == 0:
            return self.mu0
        if n not in self._marginals:
            w = weight_product(self.v, n)
            if isinstance(self.mu0, DensityMeasure):
                self._marginals[n] = DensityMeasure(w * self.mu0.density, self.mu0.rho)
            else:
                if self.mu0.depth < w.depth:
                    raise DepthTooShallow(
                        f"raw base of depth {self.mu0.depth} cannot resolve the "
                        f"level-{n} weight of depth {w.depth}"
                    )
                masses = w.promote(self.mu0.depth).values * self.mu0.masses
                self._marginals[n] = RawMeasure(self.shift, self.mu0.depth, masses)
        return self._marginals[n]

    def _kernel(self, working_depth):
        if working_depth not in self._kernels:
            self._kernels[working_depth] = _WalkKernel(self, working_depth)
        return self._kernels[working_depth]


def build_path_measure(shift, v, mu0, tol=1e-10, marginal_overrides=None):
    """Validate that mu0 is fixed under the v-weighted transformer and wrap it.

    The defect is checked on the cylinders fine enough to resolve both
    the density (or the stored raw table) and the transferred density;
    at that depth a zero defect characterizes the fixed-point property
    exactly.  Raises NotFixedPoint when the residual exceeds tol.

    `marginal_overrides` replaces selected level measures, which breaks
    the consistency identities on purpose; it exists so the checking and
    sampling code paths can be exercised against corrupted data.
    """
    v.require_nonnegative()
    if mu0.total_mass() <= 0:
        raise ValueError("base measure must have positive mass")
    if isinstance(mu0, DensityMeasure):
        d_check = max(mu0.density.depth, v.depth - 1, 1)
    else:
        if mu0.depth < max(v.depth, 2):
            raise DepthTooShallow(
                f"raw base measure needs depth >= {max(v.depth, 2)}"
            )
        d_check = mu0.depth - 1
    residual = check_fixed_point(shift, v, mu0, d_check)
    if residual > tol:
        raise NotFixedPoint(residual, tol)
    return PathMeasure(shift, v, mu0, tol, residual, marginal_overrides)


def check_consistency(pm, n, depth):
    """Defect of mu_{n+1} pushed through the shift against mu_n.

    Sums the level-(n+1) masses over the admissible leading symbol and
    compares with the level-n masses, cylinder by cylinder at the given
    depth.  Returns the max absolute difference.
    """
    shift = pm.shift
    fine = pm.marginal(n + 1).masses_at(depth + 1)
    lhs = np.zeros(shift.word_count(depth))
    np.add.at(lhs, shift.suffix_indices(depth + 1), fine)
    rhs = pm.marginal(n).masses_at(depth)
    return float(np.abs(lhs - rhs).max())


def check_quasi_invariance(pm, depth, n_max):
    """Worst defect of the level-reweighting description of the family.

    Two families of identities are tested on the depth-d cylinders: the
    base fixed-point identity (integral of f against mu0 equals the
    integral of (f o shift) * v), and for each n < n_max the relation
    mu_{n+1} = (v o shift^n) mu_n.  Passing both certifies that the
    trajectory-space measure is quasi-invariant with coordinate-zero
    derivative v.
    """
    shift = pm.shift
    worst = check_fixed_point(shift, pm.v, pm.marginal(0), depth)
    vn = pm.v
    for n in range(n_max):
        if n > 0:
            vn = vn.compose_with_shift()
        mu_n = pm.marginal(n)
        e = max(depth, vn.depth)
        weighted = vn.promote(e).values * mu_n.masses_at(e)
        rhs = np.zeros(shift.word_count(depth))
        np.add.at(rhs, shift.prefix_indices(e, depth), weighted)
        lhs = pm.marginal(n + 1).masses_at(depth)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


class _WalkKernel:
    """Finite-state sampler for the trajectory process at a fixed record depth.

    The record of a trajectory is the depth-D truncation of its current
    coordinate.  Prepending symbol a to a record u happens with the
    conditional mass ratio mu_{k+1}([a u]) / mu_k([u]).  Once D resolves
    both the weight and the base density those ratios telescope: the
    running-product factors beyond the first cancel between numerator
    and denominator, so the ratio equals mu_1([a u]) / mu_0([u]) at
    every step and the record sequence is a time-homogeneous Markov
    chain on the depth-D words.  No truncation bias remains.
    """

    def __init__(self, pm, working_depth):
        shift = pm.shift
        d = working_depth
        mu0 = pm.marginal(0)
        mu1 = pm.marginal(1)
        den = mu0.masses_at(d)
        total = den.sum()
        if total <= 0:
            raise ZeroMassConditioning("base measure has no mass at the record depth")
        self.shift = shift
        self.depth = d
        self.p0 = den / total
        cum0 = np.cumsum(self.p0)
        cum0[-1] = 1.0
        self.cum0 = cum0

        e = d + 1
        n_states = shift.word_count(d)
        from_state = shift.suffix_indices(e)
        branch_symbol = shift.symbols_array(e)[:, 0]
        to_state = shift.prefix_indices(e, d)
        weights = mu1.masses_at(e)

        order = np.argsort(from_state, kind="stable")
        fs = from_state[order]
        counts = np.bincount(fs, minlength=n_states)
        kmax = int(counts.max())
        offsets = np.concatenate([[0], np.cumsum(counts)])
        col = np.arange(len(fs)) - offsets[fs]

        prob = np.zeros((n_states, kmax))
        nxt = np.zeros((n_states, kmax), dtype=np.int64)
        syms = np.zeros((n_states, kmax), dtype=np.int64)
        prob[fs, col] = weights[order]
        nxt[fs, col] = to_state[order]
        syms[fs, col] = branch_symbol[order]

        rowsum = prob.sum(axis=1)
        self.invalid = (den <= 0) | (rowsum <= 0)
        safe_den = np.where(self.invalid, 1.0, rowsum)
        prob /= safe_den[:, None]
        cdf = np.cumsum(prob, axis=1)
        # clamp the last real branch so rounding in the row sums cannot
        # push a uniform draw past every branch
        last = np.clip(counts - 1, 0, None)
        cdf[np.arange(n_states), last] = np.inf
        pad = np.arange(kmax)[None, :] > last[:, None]
        cdf[pad] = np.inf
        self.cdf = cdf
        self.nxt = nxt
        self.syms = syms

    def draw_base(self, r):
        return np.minimum(
            np.searchsorted(self.cum0, r, side="right"), len(self.p0) - 1
        )

    def step(self, states, r):
        if self.invalid[states].any():
            bad = int(states[self.invalid[states]][0])
            word = self.shift.words(self.depth)[bad]
            raise ZeroMassConditioning(
                f"trajectory reached the zero-mass cylinder "
                f"[{''.join(map(str, word))}]"
            )
        choice = np.argmax(r[:, None] < self.cdf[states], axis=1)
        return self.nxt[states, choice], self.syms[states, choice]


@dataclass(frozen=True)
class PathSample:
    base: tuple  # depth-D truncation of the starting coordinate
    prepends: tuple  # symbols prepended at steps 1, 2, ...


@dataclass(frozen=True)
class SampleBatch:
    shift: object
    base_depth: int
    n_steps: int
    base_words: np.ndarray  # (n_samples, base_depth)
    prepends: np.ndarray  # (n_samples, n_steps)

    def __len__(self):
        return self.base_words.shape[0]

    def paths(self):
        return [
            PathSample(tuple(int(s) for s in b), tuple(int(a) for a in p))
            for b, p in zip(self.base_words, self.prepends)
        ]

    def theta_words(self, n, depth):
        """Depth-d truncations of coordinate n, as an (n_samples, d) array."""
        if n > self.n_steps:
            raise ValueError(f"batch only records {self.n_steps} steps")
        if n + self.base_depth < depth:
            raise ValueError("records are too short for the requested depth")
        if n == 0:
            return self.base_words[:, :depth]
        cols = np.hstack([self.prepends[:, n - 1 :: -1], self.base_words])
        return cols[:, :depth]


def sample_paths(pm, n_steps, n_samples, base_depth, seed, workers=1):
    """Draw trajectories of the path process, exactly and reproducibly.

    The base record is drawn from mu0 at the working depth (the larger
    of base_depth, the weight depth and the base density depth, so the
    conditional ratios are exact), then each step prepends a symbol with
    its conditional mass ratio.  All randomness comes from one
    generator seeded with `seed` and is precomputed as a block, so the
    returned batch depends only on (arguments, seed) and not on the
    worker count.
    """
    if n_steps < 0 or n_samples < 1 or base_depth < 1:
        raise ValueError("need n_steps >= 0, n_samples >= 1, base_depth >= 1")
    working = max(base_depth, pm.v.depth, pm.density_depth)
    kernel = pm._kernel(working)
    rng = np.random.default_rng(seed)
    uniforms = rng.random((n_samples, n_steps + 1))

    def run(rows):
        states = kernel.draw_base(uniforms[rows, 0])
        base_states = states.copy()
        prep = np.zeros((len(rows), n_steps), dtype=np.int64)
        for j in range(n_steps):
            states, syms = kernel.step(states, uniforms[rows, j + 1])
            prep[:, j] = syms
        return base_states, prep

    chunks = [c for c in np.array_split(np.arange(n_samples), max(workers, 1)) if len(c)]
    if len(chunks) == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(run, chunks))
    base_states = np.concatenate([r[0] for r in results])
    prepends = np.vstack([r[1] for r in results])
    sym = pm.shift.symbols_array(working)
    base_words = sym[base_states][:, :base_depth]
    return SampleBatch(pm.shift, base_depth, n_steps, base_words, prepends)


def sample_path(pm, n_steps, base_depth, seed):
    """A single trajectory record; see sample_paths."""
    return sample_paths(pm, n_steps, 1, base_depth, seed).paths()[0]


@dataclass(frozen=True)
class EmpiricalReport:
    n: int
    n_samples: int
    depth: int
    max_dev: float
    sigma_bound: float
    passed: bool
    worst_word: tuple


def empirical_check(pm, n, n_samples, depth, seed, workers=1):
    """Monte Carlo validation of the level-n marginal at one cylinder depth.

    Draws n_samples trajectories and compares the empirical frequencies
    of the coordinate-n truncations with the exact marginal, word by
    word, against a three-standard-deviation binomial band.
    """
    if n_samples < 100:
        raise ValueError("need at least 100 samples")
    shift = pm.shift
    batch = sample_paths(pm, n, n_samples, max(depth, 1), seed, workers=workers)
    arr = batch.theta_words(n, depth)

    k = shift.k
    weights = (k + 1) ** np.arange(depth - 1, -1, -1, dtype=np.int64)
    codes = arr @ weights
    table = shift.symbols_array(depth) @ weights  # ascending with lexicographic order
    pos = np.searchsorted(table, codes)
    counts = np.bincount(pos, minlength=len(table))

    exact = pm.marginal(n).masses_at(depth)
    p = exact / exact.sum()
    emp = counts / n_samples
    dev = np.abs(emp - p)
    sigma3 = 3.0 * np.sqrt(p * (1.0 - p) / n_samples)
    worst = int(np.argmax(dev - sigma3))
    return EmpiricalReport(
        n=n,
        n_samples=n_samples,
        depth=depth,
        max_dev=float(dev.max()),
        sigma_bound=float(sigma3[worst]),
        passed=bool((dev <= sigma3).all()),
        worst_word=shift.words(depth)[worst],
    )


@dataclass(frozen=True)
class MartingaleCoordinates:
    pm: object
    level: int
    depth: int
    coordinates: list  # CylinderFunction per level 0 .. level

    def norms(self):
        """L2 norm of each coordinate against its own level measure."""
        out = []
        for n, g in enumerate(self.coordinates):
            masses = self.pm.marginal(n).masses_at(self.depth)
            out.append(float(np.sqrt(g.abs_squared().values @ masses)))
        return np.asarray(out)


def martingale_coordinates(pm, xi, level):
    """Conditional expectations of a top-level observable at every level.

    Coordinate n is the conditional expectation of xi evaluated at the
    level-`level` coordinate, given the level-n record; on a depth-d
    word w it is the mass-weighted average of xi over all admissible
    prepend strings of length level - n.  Zero-mass records get the
    value 0.  All coordinates are produced at one working depth, fine
    enough to make the conditional averages exact.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    shift = pm.shift
    dw = max(xi.depth, pm.v.depth, pm.density_depth, 1)
    coords = [None] * (level + 1)
    coords[level] = xi.promote(dw)
    mu_top = pm.marginal(level)
    for n in range(level - 1, -1, -1):
        steps = level - n
        long = steps + dw
        xi_long = xi.promote(long).values
        top = mu_top.masses_at(long)
        drop = _drop_indices(shift, long, steps)
        num = np.zeros(shift.word_count(dw), dtype=xi_long.dtype)
        np.add.at(num, drop, xi_long * top)
        den = pm.marginal(n).masses_at(dw)
        vals = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
        coords[n] = CylinderFunction(shift, dw, vals)
    return MartingaleCoordinates(pm, level, dw, coords)


def project_once(pm, g, n):
    """One-step conditional averaging from level n+1 down to level n.

    Used to state the tower property: projecting the level-(n+1)
    coordinate one step must reproduce the level-n coordinate exactly.
    """
    shift = pm.shift
    d = g.depth
    e = d + 1
    g_up = g.promote(e).values  # value at the prefix of each (a, w...) word
    fine = pm.marginal(n + 1).masses_at(e)
    num = np.zeros(shift.word_count(d), dtype=g_up.dtype)
    np.add.at(num, shift.suffix_indices(e), g_up * fine)
    den = pm.marginal(n).masses_at(d)
    vals = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return CylinderFunction(shift, d, vals)


def check_isometry(pm, filt, depth, tol=1e-12):
    """Defect of the filter-weighted composition operator being isometric.

    Requires |filt|^2 to reproduce the weight pointwise (FilterMismatch
    otherwise), then verifies, for every depth-d cylinder indicator,
    that the squared norm of the composed-and-filtered function equals
    the squared norm of the original.  Both sides reduce to cylinder
    sums against mu0; the max absolute difference is returned.
    """
    m2 = filt.abs_squared()
    e = max(m2.depth, pm.v.depth)
    gap = float(np.abs(m2.promote(e).values - pm.v.promote(e).values).max())
    if gap > tol:
        raise FilterMismatch(
            f"squared filter modulus differs from the weight by {gap:.3e}"
        )
    mu0 = pm.marginal(0)
    lhs = _pushforward_masses(pm.shift, m2, mu0, depth)
    rhs = mu0.masses_at(depth)
    return float(np.abs(lhs - rhs).max())
