"""
Subshifts and their preimage-averaging invariant measures
=========================================================

A subshift of finite type is the set of one-sided symbol sequences whose
consecutive pairs are allowed by a 0/1 transition matrix.  The shift map
drops the first symbol.  This script builds two small examples and finds
the measure that preimage averaging leaves fixed.
"""

import numpy as np

from shiftpath import (
    build_subshift,
    strongly_invariant_measure,
    verify_strong_invariance,
)

# The full 2-shift allows every transition; the golden-mean shift forbids
# the word "22".
full = build_subshift([[1, 1], [1, 1]])
golden = build_subshift([[1, 1], [1, 0]])

print("full shift words of length 3:", [
    "".join(map(str, w)) for w in full.words(3)
])
print("golden words of length 3:   ", [
    "".join(map(str, w)) for w in golden.words(3)
])
print("golden branch counts per target symbol:", golden.column_sums)

# Averaging a function over the preimages of a point defines an operator
# on functions; the invariant measure below is the one reproduced by the
# dual averaging on cylinder masses.
rho = strongly_invariant_measure(golden)
print("\ngolden symbol masses:", rho.q, " (exactly 2/3, 1/3)")

for word in [(2, 1, 1), (1, 2, 1)]:
    name = "".join(map(str, word))
    print(f"mass of cylinder [{name}] = {rho.mass(word):.6f}")

# The defining identity can be checked to machine precision at any depth.
for depth in (1, 3, 5):
    defect = verify_strong_invariance(rho, depth)
    print(f"invariance defect through depth {depth}: {defect:.2e}")

# Random transition matrices work the same way, as long as every column
# has at least one allowed transition.
rng = np.random.default_rng(3)
matrix = (rng.random((3, 3)) < 0.7).astype(int)
shift = build_subshift(matrix)
print("\nirreducible:", shift.irreducible)
rho3 = strongly_invariant_measure(shift)
print("random 3-symbol matrix:\n", matrix)
print("its invariant symbol masses:", np.round(rho3.q, 6))
print("defect through depth 4:", f"{verify_strong_invariance(rho3, 4):.2e}")
