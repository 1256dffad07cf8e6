"""
A tour of the two-parameter bifurcation plane
=============================================

For the quadratic map X -> Y, Y -> m1 - m2 X - Y^2, the fixed-point
bifurcation set in the (m1, m2) plane consists of three curves:

* L+      : m1 = -(1 + m2)^2 / 4   (saddle-node: the fixed points are born)
* L-      : m1 = 3 (1 + m2)^2 / 4  (period doubling: a multiplier hits -1)
* Lomega  : m2 = 1, -1 < m1 < 3    (torus line: unit-modulus complex pair)

This demo walks the distinguished points where these curves meet and
checks each statement numerically with the package's own primitives.
"""

import numpy as np

from bifkit.henon import (
    HenonParams,
    SaddleNodeBoundaryError,
    bifurcation_loci,
    diagram_data,
    elliptic_multiplier,
    fixed_points,
    psi_from_m1,
)

# ---------------------------------------------------------------------
# 1. the curves, sampled
# ---------------------------------------------------------------------

data = diagram_data((-1.5, 1.5), 241)
print("curve samples:"
      f" L+ {len(data.lplus)}, L- {len(data.lminus)}, torus line {len(data.lomega)}")
print(f"distinguished points: {[name for name, _, _ in data.markers]}")

# ---------------------------------------------------------------------
# 2. corners where the curves meet the torus line
# ---------------------------------------------------------------------

for name, m1, m2 in data.markers:
    flags = bifurcation_loci(HenonParams(m1, m2))
    active = [f for f in ("on_lplus", "on_lminus", "on_lomega") if getattr(flags, f)]
    print(f"  {name:4s} at ({m1:+.2f}, {m2:+.2f}) lies on {active}")

# ---------------------------------------------------------------------
# 3. multipliers along the torus line
# ---------------------------------------------------------------------

print("\nalong m2 = 1 the fixed-point multipliers are exp(+-i psi):")
for m1 in (-0.75, 0.0, 1.0, 2.0):
    psi = psi_from_m1(m1)
    nu = elliptic_multiplier(m1).nu
    mults = fixed_points(HenonParams(m1, 1.0))["plus"].multipliers
    print(
        f"  m1 = {m1:+5.2f}: psi = {psi:.6f}, nu = {nu:+.6f}, "
        f"|computed - nu| = {min(abs(m - nu) for m in mults):.2e}"
    )

# ---------------------------------------------------------------------
# 4. the saddle-node boundary is a genuine boundary
# ---------------------------------------------------------------------

try:
    fixed_points(HenonParams(-1.0, 1.0))
except SaddleNodeBoundaryError as exc:
    print(f"\nat the corner (-1, 1) the solver refuses: {exc}")
x = np.roots([1.0, 2.0, 1.0 - 1e-8])  # X^2 + (1+m2) X - m1 just inside
print(
    "just inside, the two fixed points split symmetrically: "
    f"X = {sorted(float(v) for v in x.real)}"
)
