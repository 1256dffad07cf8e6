"""Tests for the quadratic-family (Hénon) fixed-point bifurcation analysis.

Frozen arithmetic (fixed points, multipliers, loci, the elliptic angle
parameterization) is asserted against hand solutions of the quadratic
formulas.  The Lyapunov-coefficient columns of the unit-multiplier scan are
asserted against what each computation actually produces: the closed-form
curve for `lc_direct` (an exact identity in real arithmetic, checked with a
magnitude-aware gate near the curve's poles) and zero for the composition
oracle (the family is area-preserving on that line).
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from bifkit.henon import (
    DIAGRAM_MARKERS,
    HenonParams,
    PoleError,
    SaddleNodeBoundaryError,
    apply,
    as_polynomial,
    bifurcation_loci,
    diagram_data,
    elliptic_multiplier,
    fixed_points,
    henon_adapted_jet,
    inverse,
    lc_closed_form,
    lomega_scan,
    m1_from_psi,
    orbit,
    psi_from_m1,
)
from bifkit.jets import UnitMultiplier, complex_adapt, conjugate, extract_real_jet, jet_from_terms
from bifkit.normalform import lc_direct, lc_oracle

PI = math.pi
SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# map evaluation
# ---------------------------------------------------------------------------


def test_apply_fixes_origin_at_0_1():
    assert np.allclose(apply(HenonParams(0.0, 1.0), (0.0, 0.0)), (0.0, 0.0))


def test_apply_fixes_hand_solved_point():
    x = SQRT2 - 1.0  # root of X^2 + 2X - 1 = 0
    out = apply(HenonParams(1.0, 1.0), (x, x))
    assert np.max(np.abs(out - np.array([x, x]))) < 1e-12


def test_apply_direct_substitution():
    p = HenonParams(0.7, -0.3)
    out = apply(p, (1.0, 2.0))
    assert np.allclose(out, (2.0, p.m1 - p.m2 - 4.0))


def test_inverse_round_trip_random():
    rng = np.random.default_rng(17)
    p = HenonParams(1.0, 1.02)
    worst = 0.0
    for _ in range(1000):
        pt = rng.uniform(-2.0, 2.0, 2)
        worst = max(worst, float(np.max(np.abs(apply(p, inverse(p, pt)) - pt))))
        worst = max(worst, float(np.max(np.abs(inverse(p, apply(p, pt)) - pt))))
    assert worst <= 1e-10


def test_inverse_requires_nonzero_m2():
    with pytest.raises(ValueError):
        inverse(HenonParams(1.0, 0.0), (0.0, 0.0))


def test_orbit_shape_and_consistency():
    p = HenonParams(0.2, 0.9)
    o = orbit(p, (0.1, 0.1), 5)
    assert o.shape == (6, 2)
    assert np.allclose(o[1], apply(p, o[0]))


def test_as_polynomial_matches_apply():
    rng = np.random.default_rng(3)
    p = HenonParams(0.8, 1.1)
    poly = as_polynomial(p)
    for _ in range(25):
        pt = rng.uniform(-2, 2, 2)
        assert np.max(np.abs(poly(pt) - apply(p, pt))) < 1e-14


# ---------------------------------------------------------------------------
# fixed points and multipliers
# ---------------------------------------------------------------------------


def test_fixed_points_at_0_1():
    info = fixed_points(HenonParams(0.0, 1.0))
    assert np.allclose(info["plus"].location, (0.0, 0.0))
    assert np.allclose(info["minus"].location, (-2.0, -2.0))
    mults = sorted(info["plus"].multipliers, key=lambda z: z.imag)
    assert abs(mults[0] + 1j) < 1e-12 and abs(mults[1] - 1j) < 1e-12
    assert info["plus"].kind == "elliptic"


def test_fixed_points_hand_solved_at_1_1():
    info = fixed_points(HenonParams(1.0, 1.0))
    xp = info["plus"].location[0]
    assert abs(xp - (SQRT2 - 1.0)) < 1e-12
    tr = sum(info["plus"].multipliers).real
    assert abs(tr / 2.0 - (1.0 - SQRT2)) < 1e-12  # cos psi = 1 - sqrt(2) = -X+


def test_fixed_points_residual_and_product_invariants():
    rng = np.random.default_rng(8)
    count = 0
    while count < 200:
        m1 = rng.uniform(-1.0, 4.0)
        m2 = rng.uniform(-1.5, 1.5)
        if (1.0 + m2) ** 2 + 4.0 * m1 <= 1e-6:
            continue
        count += 1
        info = fixed_points(HenonParams(m1, m2))
        for fp in info.values():
            x = fp.location[0]
            assert abs(x * x + (1.0 + m2) * x - m1) <= 1e-12 * max(1.0, abs(m1))
            prod = fp.multipliers[0] * fp.multipliers[1]
            assert abs(prod - m2) <= 1e-10


def test_fixed_points_saddle_node_boundary():
    with pytest.raises(SaddleNodeBoundaryError):
        fixed_points(HenonParams(-1.0, 1.0))


# ---------------------------------------------------------------------------
# elliptic angle parameterization
# ---------------------------------------------------------------------------


def test_psi_at_special_points():
    assert abs(psi_from_m1(0.0) - PI / 2) <= 1e-12
    assert abs(psi_from_m1(1.25) - 2 * PI / 3) <= 1e-12
    assert abs(psi_from_m1(-0.75) - PI / 3) <= 1e-12


def test_psi_m1_mutual_inverses_and_monotone():
    grid = np.linspace(-0.99, 2.99, 101)
    prev = 0.0
    for m1 in grid:
        psi = psi_from_m1(float(m1))
        assert abs(m1_from_psi(psi) - m1) <= 1e-12
        assert psi > prev
        prev = psi


def test_psi_domain_errors():
    for bad in (-1.0, 3.0, -2.0, 5.0):
        with pytest.raises(ValueError):
            psi_from_m1(bad)


def test_elliptic_multiplier_matches_fixed_point():
    m1 = 1.0
    mult = elliptic_multiplier(m1)
    assert isinstance(mult, UnitMultiplier)
    info = fixed_points(HenonParams(m1, 1.0))
    lead = max(info["plus"].multipliers, key=lambda z: z.imag)
    assert abs(mult.nu - lead) < 1e-12


# ---------------------------------------------------------------------------
# loci and corners
# ---------------------------------------------------------------------------


def test_loci_corner_flags():
    assert bifurcation_loci(HenonParams(-1.0, 1.0)).at_bpp
    assert bifurcation_loci(HenonParams(3.0, 1.0)).at_bmm
    assert bifurcation_loci(HenonParams(0.0, -1.0)).at_bpm
    assert bifurcation_loci(HenonParams(0.0, 1.0)).at_c1
    assert bifurcation_loci(HenonParams(1.25, 1.0)).at_c2


def test_loci_line_membership():
    rep = bifurcation_loci(HenonParams(1.0, 1.0))
    assert rep.on_lomega and not rep.on_lplus and not rep.on_lminus
    m2 = 0.6
    assert bifurcation_loci(HenonParams(-((1 + m2) ** 2) / 4.0, m2)).on_lplus
    assert bifurcation_loci(HenonParams(3.0 * (1 + m2) ** 2 / 4.0, m2)).on_lminus
    off = bifurcation_loci(HenonParams(0.5, 0.5))
    assert not (off.on_lplus or off.on_lminus or off.on_lomega)


def test_multipliers_at_corner_bpp():
    # boundary point (-1, 1): double multiplier 1 read from the limit locus.
    # X splits like sqrt(m1 + 1) and the multiplier like its square root
    # again, so at offset 1e-13 the splitting is ~(1e-13)^(1/4) ~ 8e-4.
    m1 = -1.0 + 1e-13
    info = fixed_points(HenonParams(m1, 1.0))
    for lam in info["plus"].multipliers:
        assert abs(lam - 1.0) <= 2e-3
    # the exact statement at the corner: char poly lambda^2 + 2X lambda + M2
    # with X = -1, M2 = 1 has the double root 1
    assert np.allclose(np.roots([1.0, 2.0 * (-1.0), 1.0]), [1.0, 1.0])


# ---------------------------------------------------------------------------
# adapted jets on the unit-multiplier line
# ---------------------------------------------------------------------------


def test_adapted_jet_reference_coefficients():
    psi = PI / 3
    nu = complex(math.cos(psi), math.sin(psi))
    s = math.sin(psi)
    jet = henon_adapted_jet(psi)
    assert abs(jet.coeff(1, 1) - 1j / math.sqrt(3.0)) < 1e-15
    assert abs(jet.coeff(2, 0) - 1j * nu**2 / (4 * s)) < 1e-15
    assert abs(jet.coeff(0, 2) - 1j * np.conj(nu) ** 2 / (4 * s)) < 1e-15
    for psi_k in (0.3, 1.0, 2.0, 2.8):
        assert henon_adapted_jet(psi_k).coeff(2, 1) == 0.0


def test_adapted_jet_two_construction_paths_agree():
    """extract + complex-adapt vs the closed-form jet: identical germs up to
    the deterministic eigenbasis scale, recovered from the (1,1) ratio."""
    for m1 in (-0.75, 0.5, 2.0):
        psi = psi_from_m1(m1)
        p = HenonParams(m1, 1.0)
        fp = fixed_points(p)["plus"]
        adapted = complex_adapt(extract_real_jet(as_polynomial(p), fp.location))
        ref = henon_adapted_jet(psi)
        scale = np.conj(adapted.coeff(1, 1) / ref.coeff(1, 1))
        rebased = conjugate(adapted, jet_from_terms(3, {(1, 0): complex(scale)}))
        assert np.max(np.abs(rebased.coeffs - ref.coeffs)) <= 1e-9
        # and the basis-free readout agrees without any rebasing
        mult = UnitMultiplier(psi)
        assert abs(lc_oracle(adapted, mult).lc - lc_oracle(ref, mult).lc) <= 1e-9
        # rebasing by B divides the coefficient by |B|^2, so the two raw
        # readouts differ by exactly that factor
        ratio = lc_direct(adapted, mult).lc / lc_direct(ref, mult).lc
        assert abs(ratio - abs(scale) ** 2) <= 1e-9 * max(1.0, abs(scale) ** 2)


# ---------------------------------------------------------------------------
# closed-form curve
# ---------------------------------------------------------------------------


def test_closed_form_hand_values():
    assert abs(lc_closed_form(PI / 3) - 0.125) < 1e-15
    c = -math.sqrt(3.0) / 2.0
    want = c / (4.0 * (-1.0 + c) ** 2 * (1.0 + 2.0 * c) ** 2)
    assert abs(lc_closed_form(5 * PI / 6) - want) < 1e-15
    assert abs(want + 0.116025403784) < 1e-12


def test_closed_form_pole_behavior():
    assert abs(lc_closed_form(2 * PI / 3 - 2e-3)) > 1e3
    assert abs(lc_closed_form(2 * PI / 3 + 2e-3)) > 1e3
    with pytest.raises(PoleError):
        lc_closed_form(2 * PI / 3 + 1e-9)


def test_closed_form_sign_matches_cos():
    for psi in np.linspace(0.05, PI - 0.05, 200):
        if abs(psi - 2 * PI / 3) < 1e-2:
            continue
        val = lc_closed_form(float(psi))
        if abs(math.cos(psi)) > 1e-12:
            assert math.copysign(1.0, val) == math.copysign(1.0, math.cos(psi))


# ---------------------------------------------------------------------------
# the unit-multiplier scan
# ---------------------------------------------------------------------------


def test_scan_row_count_and_gap_annotation():
    sc = lomega_scan(100)
    assert len(sc.rows) == 100
    assert sc.gaps == ()
    sc_odd = lomega_scan(101)
    assert len(sc_odd.rows) == 100  # the node at pi/2 is skipped...
    assert any(abs(g - PI / 2) < 1e-3 for g in sc_odd.gaps)  # ...and annotated


def test_scan_identity_direct_equals_closed_form():
    """|lc_direct - curve| at each node, gated in proportion to |curve|:
    the identity is exact in real arithmetic, and the double-precision
    residual scales with the curve magnitude near its poles."""
    sc = lomega_scan(100)
    for row in sc.rows:
        gate = 1e-10 + 1e-11 * abs(row.lc_closed)
        assert abs(row.lc_direct - row.lc_closed) <= gate, row.psi
        # away from the poles the agreement is plain absolute
        if abs(row.lc_closed) <= 1e2:
            assert abs(row.lc_direct - row.lc_closed) <= 1e-10, row.psi


def test_scan_sign_pattern():
    for row in lomega_scan(100).rows:
        if row.psi < PI / 2:
            assert row.lc_closed > 0.0
            assert -1.0 < row.m1 < 0.0
        else:
            assert row.lc_closed < 0.0
            assert 0.0 < row.m1 < 3.0


def test_scan_oracle_and_partial_columns_vanish():
    """What the composition oracle and the half-composition actually produce
    on this family: zero, up to roundoff that scales with the near-resonant
    change-of-variable coefficients (hence with the closed-form magnitude)."""
    for row in lomega_scan(100).rows:
        gate = 1e-10 + 1e-15 * abs(row.lc_closed)
        assert abs(row.lc_oracle) <= gate, row.psi
        assert abs(row.lc_incorrect) <= gate, row.psi


def test_scan_m1_matches_parameterization():
    for row in lomega_scan(64).rows:
        assert abs(row.m1 - m1_from_psi(row.psi)) <= 1e-12


# ---------------------------------------------------------------------------
# diagram data
# ---------------------------------------------------------------------------


def test_diagram_curves_meet_corners():
    dd = diagram_data((-1.5, 1.5), 301)
    # L+ at m2 = 1 passes through m1 = -1; L- through 3; L+ at m2 = -1 through 0
    lp = {round(m2, 6): m1 for m1, m2 in dd.lplus}
    lm = {round(m2, 6): m1 for m1, m2 in dd.lminus}
    assert abs(lp[1.0] + 1.0) < 1e-12
    assert abs(lm[1.0] - 3.0) < 1e-12
    assert abs(lp[-1.0]) < 1e-12


def test_diagram_marker_set():
    dd = diagram_data((-1.5, 1.5), 16)
    markers = {name: (a, b) for name, a, b in dd.markers}
    assert markers["B++"] == (-1.0, 1.0)
    assert markers["B--"] == (3.0, 1.0)
    assert markers["B+-"] == (0.0, -1.0)
    assert markers["C1"] == (0.0, 1.0)
    assert markers["C2"] == (1.25, 1.0)
    assert dd.markers == DIAGRAM_MARKERS


def test_diagram_lomega_span():
    dd = diagram_data((-1.5, 1.5), 64)
    m1s = dd.lomega[:, 0]
    m2s = dd.lomega[:, 1]
    assert np.all(m2s == 1.0)
    assert m1s.min() >= -1.0 and m1s.max() <= 3.0
