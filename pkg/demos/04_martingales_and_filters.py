"""
Martingale coordinates and isometric filters
============================================

Conditioning a top-level observable down through the levels produces a
martingale: projecting any coordinate one level lower reproduces the
coordinate below it, and L2 norms grow with the level.  Separately, a
complex filter whose squared modulus matches the weight makes the
filtered composition operator an isometry on cylinder functions.
"""

import numpy as np

from shiftpath import (
    CylinderFunction,
    build_path_measure,
    check_isometry,
    fixed_density_measure,
    martingale_coordinates,
    project_once,
)
from shiftpath.subshift import build_subshift

shift = build_subshift([[1, 1], [1, 1]])
v = CylinderFunction.from_table(shift, 1, {(1,): 1.5, (2,): 0.5})
mu0 = fixed_density_measure(shift, v)
pm = build_path_measure(shift, v, mu0)

rng = np.random.default_rng(12)
xi = CylinderFunction(shift, 2, rng.uniform(-2.0, 2.0, 4))

mc = martingale_coordinates(pm, xi, level=4)
print("L2 norms by level:", np.round(mc.norms(), 6))

gaps = []
for n in range(4):
    stepped = project_once(pm, mc.coordinates[n + 1], n)
    gaps.append(np.abs(stepped.values - mc.coordinates[n].values).max())
print("tower property gaps:", [f"{g:.1e}" for g in gaps])

# The level-0 coordinate integrates to the same number as xi against the
# top marginal: conditioning never moves the mean.
top = pm.marginal(4)
print("mean at top:   ", top.integrate(xi))
print("mean at bottom:", pm.marginal(0).integrate(mc.coordinates[0]))

# A filter with |m|^2 = V, phases free.
phases = np.exp(1j * np.array([0.7, -0.2]))
m = CylinderFunction(shift, 1, np.sqrt(np.array([1.5, 0.5])) * phases)
print("\nisometry residual:", f"{check_isometry(pm, m, depth=2):.2e}")

# Wrong modulus is rejected before any norm comparison runs.
try:
    check_isometry(pm, CylinderFunction.constant(shift, 1.0 + 0.0j), depth=2)
except Exception as exc:
    print("mismatched filter:", type(exc).__name__, "-", exc)
