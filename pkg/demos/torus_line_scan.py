"""
Radial coefficients along the torus line
========================================

The quadratic map X -> Y, Y -> m1 - m2 X - Y^2 has a fixed point whose
multipliers sit on the unit circle exactly when m2 = 1 and -1 < m1 < 3.
Along that line the rotation angle psi parameterizes the family, and the
cubic radial coefficient of the normalized return dynamics has the closed
form

    cos(psi) / (4 (cos(psi) - 1)^2 (1 + 2 cos(psi))^2).

This demo scans the line and compares three ways of computing the
coefficient from the same adapted jet:

* ``lc_direct``   -- a closed formula in the quadratic jet coefficients;
* ``lc_oracle``   -- full normalization by composition, reading off the
                     surviving resonant cubic term;
* ``lc_partial_incorrect`` -- the one-sided composition that forgets to
                     conjugate back, kept as a documented pitfall.

The punchline is that the three do NOT agree, and the disagreement is
structural, not a bug: the adapted family is area-preserving on this line,
so the genuinely invariant coefficient (the oracle's) is identically zero,
while the closed formula tracks the published curve.
"""

import math

from bifkit.henon import lc_closed_form, lomega_scan, m1_from_psi

# ---------------------------------------------------------------------
# 1. scan the line
# ---------------------------------------------------------------------

scan = lomega_scan(100)
print(f"scanned {len(scan.rows)} angles in (0, pi); skipped resonances: {scan.gaps}")

# ---------------------------------------------------------------------
# 2. a few representative angles
# ---------------------------------------------------------------------

print("\n  psi        m1       closed_form   lc_direct     lc_oracle    lc_partial")
targets = (math.pi / 6, math.pi / 3, math.pi / 2 + 0.05, 2.5)
for t in targets:
    row = min(scan.rows, key=lambda r: abs(r.psi - t))
    print(
        f"  {row.psi:8.5f} {row.m1:+8.4f}  {row.lc_closed:+12.6f}  "
        f"{row.lc_direct:+12.6f}  {row.lc_oracle:+11.2e}  {row.lc_incorrect:+11.2e}"
    )

# ---------------------------------------------------------------------
# 3. the identity and the discrepancy, quantified over the whole grid
# ---------------------------------------------------------------------

worst_identity = max(abs(r.lc_direct - r.lc_closed) for r in scan.rows)
largest_oracle = max(abs(r.lc_oracle) for r in scan.rows)
largest_direct = max(abs(r.lc_direct) for r in scan.rows)
print(f"\nmax |lc_direct - closed_form| over the grid : {worst_identity:.3e}")
print(f"max |lc_oracle|  over the grid              : {largest_oracle:.3e}")
print(f"max |lc_direct|  over the grid              : {largest_direct:.3e}")
print(
    "\nThe direct formula reproduces the closed-form curve (the residual above\n"
    "is pure floating-point conditioning near the curve's poles), while the\n"
    "composition oracle vanishes everywhere: the adapted jets on this line\n"
    "have Jacobian determinant one, and a fully normalized area-preserving\n"
    "map cannot have a nonzero radial cubic term.  Any claim that the two\n"
    "computations agree is therefore wrong wherever the curve is nonzero."
)

# ---------------------------------------------------------------------
# 4. behavior near the 1:3 resonance pole
# ---------------------------------------------------------------------

pole = 2 * math.pi / 3
print(f"\n|closed_form| approaching the pole at 2 pi/3 (m1 = {m1_from_psi(pole):.4g}):")
for d in (1e-2, 5e-3, 3e-3, 2e-3, 1.5e-3):
    print(f"  distance {d:7.1e}: {abs(lc_closed_form(pole - d)):12.1f}")
print("the divisor (1 + 2 cos psi)^2 is a square, so the curve dives to")
print("-infinity on BOTH sides of the pole rather than changing sign there.")
