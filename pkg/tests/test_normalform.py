"""Tests for the normal-form reduction and the Lyapunov-coefficient trio.

The composition oracle `lc_oracle` is the ground truth here: it is validated
three independent ways (the textbook closed formula for invariant-circle
normal forms of maps, the measured radial dynamics of the normalized jet,
and exactness on single-resonant-term jets).  The closed formula `lc_direct`
and the deliberately wrong `lc_partial_incorrect` are then characterized
against it — including the places where `lc_direct` disagrees with the
oracle on the quadratic-family jets, which is recorded as-is.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from bifkit.jets import UnitMultiplier, compose, jet_from_terms
from bifkit.henon import henon_adapted_jet, lc_closed_form
from bifkit.normalform import (
    LyapunovValue,
    NormalizationResult,
    ResonanceError,
    lc_direct,
    lc_oracle,
    lc_partial_incorrect,
    normalize_cubic,
    normalize_quadratic,
    quadratic_change,
    radial_check,
)

PI = math.pi


def _nu(psi: float) -> complex:
    return cmath.exp(1j * psi)


def _random_adapted_jet(rng: np.random.Generator, psi: float):
    terms = {(1, 0): _nu(psi)}
    for pq in ((2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)):
        terms[pq] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return jet_from_terms(3, terms)


def _random_regular_psi(rng: np.random.Generator, margin: float = 0.05) -> float:
    while True:
        psi = rng.uniform(0.1, PI - 0.1)
        if min(abs(psi - PI / 2), abs(psi - 2 * PI / 3)) >= margin:
            return psi


def _textbook_lc(jet, nu: complex) -> float:
    """Independent closed formula for the cubic radial coefficient of a map.

    Stated for the half-factorial normalization z -> nu z + g20/2 z^2 +
    g11 z zbar + g02/2 zbar^2 + ... + g21/2 z^2 zbar; our jets store raw
    coefficients, hence the factors of two.
    """
    g20 = 2 * jet.coeff(2, 0)
    g11 = jet.coeff(1, 1)
    g02 = 2 * jet.coeff(0, 2)
    g21 = 2 * jet.coeff(2, 1)
    t21 = (np.conj(nu) * g21) / 2
    cross = ((1 - 2 * nu) * np.conj(nu) ** 2) / (2 * (1 - nu)) * g20 * g11
    return float(t21.real - cross.real - abs(g11) ** 2 / 2 - abs(g02) ** 2 / 4)


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


def test_lyapunov_value_consistency():
    mult = UnitMultiplier(1.0)
    jet = jet_from_terms(3, {(1, 0): mult.nu, (2, 1): 0.3 - 0.4j})
    for fn in (lc_direct, lc_oracle, lc_partial_incorrect):
        v = fn(jet, mult)
        assert isinstance(v, LyapunovValue)
        assert abs(v.lc - (np.conj(mult.nu) * v.alpha).real) <= 1e-14


def test_lyapunov_value_rejects_unknown_method():
    with pytest.raises(ValueError):
        LyapunovValue(alpha=0j, lc=0.0, method="guesswork")


def test_normalization_result_rejects_unknown_stage():
    jet = jet_from_terms(3, {(1, 0): 1j})
    with pytest.raises(ValueError):
        NormalizationResult(normalized=jet, change=jet, stage="linear")


# ---------------------------------------------------------------------------
# quadratic_change / normalize_quadratic / normalize_cubic
# ---------------------------------------------------------------------------


def test_quadratic_change_identity_for_cubic_jet():
    mult = UnitMultiplier(1.1)
    jet = jet_from_terms(3, {(1, 0): mult.nu, (2, 1): 1.0, (3, 0): -0.5j})
    tr = quadratic_change(jet, mult)
    assert abs(tr.coeff(1, 0) - 1.0) < 1e-15
    assert tr.max_order_norm(2) == 0.0
    assert tr.max_order_norm(3) == 0.0


def test_quadratic_change_resonance_error():
    jet = henon_adapted_jet(2 * PI / 3)
    with pytest.raises(ResonanceError):
        quadratic_change(jet, UnitMultiplier(2 * PI / 3))


def test_quadratic_change_divisor_coefficient():
    # the (2,0) entry of the change is c20 / (nu - nu^2)
    psi = PI / 3
    nu = _nu(psi)
    s = math.sin(psi)
    jet = henon_adapted_jet(psi)
    tr = quadratic_change(jet, UnitMultiplier(psi))
    want = (1j * nu**2 / (4 * s)) / (nu - nu**2)
    assert abs(tr.coeff(2, 0) - want) < 1e-14


def test_normalize_quadratic_removes_quadratic_terms():
    rng = np.random.default_rng(31)
    for _ in range(100):
        psi = _random_regular_psi(rng)
        jet = _random_adapted_jet(rng, psi)
        res = normalize_quadratic(jet, UnitMultiplier(psi))
        assert res.stage == "quadratic"
        assert res.normalized.max_order_norm(2) <= 1e-12
        # the linear part survives untouched
        assert abs(res.normalized.coeff(1, 0) - _nu(psi)) <= 1e-12
        assert abs(res.normalized.coeff(0, 1)) <= 1e-12


def test_normalize_quadratic_cubic_jet_untouched():
    mult = UnitMultiplier(0.9)
    jet = jet_from_terms(3, {(1, 0): mult.nu, (2, 1): 0.7 + 0.1j})
    res = normalize_quadratic(jet, mult)
    assert np.max(np.abs(res.normalized.coeffs - jet.coeffs)) < 1e-15
    assert np.max(np.abs(res.change.coeffs - jet_from_terms(3, {(1, 0): 1.0}).coeffs)) < 1e-15


def test_normalize_quadratic_quadratic_family_jet():
    """The normalized (2,1) coefficient measured by actual composition.

    For the quadratic-family adapted jets the full conjugation produces a
    resonant cubic coefficient with Re(nubar w21) = 0: the family is
    area-preserving on the unit-multiplier line, so its true radial cubic
    coefficient vanishes identically.
    """
    psi = PI / 3
    res = normalize_quadratic(henon_adapted_jet(psi), UnitMultiplier(psi))
    w21 = res.normalized.coeff(2, 1)
    assert abs((np.conj(_nu(psi)) * w21).real) <= 1e-12


def test_normalize_cubic_keeps_only_resonant_term():
    rng = np.random.default_rng(77)
    psi = _random_regular_psi(rng)
    mult = UnitMultiplier(psi)
    jet = _random_adapted_jet(rng, psi)
    res = normalize_cubic(normalize_quadratic(jet, mult), mult)
    assert res.stage == "cubic"
    for p, q in ((3, 0), (1, 2), (0, 3)):
        assert abs(res.normalized.coeff(p, q)) <= 1e-12
    assert res.normalized.max_order_norm(2) <= 1e-12
    # surviving coefficient is the oracle's alpha
    assert abs(res.normalized.coeff(2, 1) - lc_oracle(jet, mult).alpha) <= 1e-12


def test_normalize_cubic_resonant_only_jet_unchanged():
    mult = UnitMultiplier(1.3)
    jet = jet_from_terms(3, {(1, 0): mult.nu, (2, 1): -0.25 + 0.5j})
    res = normalize_cubic(normalize_quadratic(jet, mult), mult)
    assert np.max(np.abs(res.normalized.coeffs - jet.coeffs)) < 1e-14


def test_normalize_cubic_removes_nonresonant_cubic():
    mult = UnitMultiplier(1.3)
    jet = jet_from_terms(3, {(1, 0): mult.nu, (3, 0): 1.0})
    res = normalize_cubic(normalize_quadratic(jet, mult), mult)
    assert abs(res.normalized.coeff(3, 0)) <= 1e-12
    assert abs(res.normalized.coeff(2, 1)) <= 1e-12


# ---------------------------------------------------------------------------
# lc_direct
# ---------------------------------------------------------------------------


def test_lc_direct_pure_resonant_jet():
    mult = UnitMultiplier(1.0)
    a = 0.3 - 0.4j
    jet = jet_from_terms(3, {(1, 0): mult.nu, (2, 1): a})
    v = lc_direct(jet, mult)
    assert abs(v.alpha - a) < 1e-15
    assert abs(v.lc - (np.conj(mult.nu) * a).real) < 1e-15
    assert v.method == "direct_formula"


def test_lc_direct_quadratic_family_values():
    v3 = lc_direct(henon_adapted_jet(PI / 3), UnitMultiplier(PI / 3))
    assert abs(v3.lc - 0.125) < 1e-12
    v56 = lc_direct(henon_adapted_jet(5 * PI / 6), UnitMultiplier(5 * PI / 6))
    assert abs(v56.lc - lc_closed_form(5 * PI / 6)) < 1e-12
    assert abs(v56.lc + 0.11602540378443) < 1e-12


def test_lc_direct_resonance_errors():
    jet = henon_adapted_jet(1.0)
    for psi in (PI / 2, 2 * PI / 3):
        with pytest.raises(ResonanceError):
            lc_direct(henon_adapted_jet(psi), UnitMultiplier(psi))
    with pytest.raises(ResonanceError):
        lc_direct(jet, UnitMultiplier(PI / 2 + 1e-8))


# ---------------------------------------------------------------------------
# lc_oracle: the ground-truth composition readout
# ---------------------------------------------------------------------------


def test_lc_oracle_pure_resonant_jet_matches_direct():
    mult = UnitMultiplier(0.8)
    jet = jet_from_terms(3, {(1, 0): mult.nu, (2, 1): 0.6 + 0.2j})
    assert abs(lc_oracle(jet, mult).lc - lc_direct(jet, mult).lc) < 1e-14


def test_lc_oracle_matches_textbook_formula():
    """500 random adapted jets: the oracle equals the independent closed
    formula for the radial cubic coefficient to machine precision."""
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(500):
        psi = _random_regular_psi(rng)
        jet = _random_adapted_jet(rng, psi)
        got = lc_oracle(jet, UnitMultiplier(psi)).lc
        worst = max(worst, abs(got - _textbook_lc(jet, _nu(psi))))
    assert worst <= 1e-12


def test_lc_oracle_quadratic_family_vanishes():
    """The quadratic family is exactly area-preserving at unit multiplier
    modulus, so the true radial coefficient is 0 at every regular angle."""
    for psi in (PI / 3, 0.5, 1.0, 2.2, 5 * PI / 6):
        got = lc_oracle(henon_adapted_jet(psi), UnitMultiplier(psi)).lc
        assert abs(got) <= 1e-12, psi


def test_oracle_vs_direct_discrepancy_on_quadratic_family():
    """lc_direct and lc_oracle differ by exactly the closed-form curve on
    the quadratic-family jets; the difference is far beyond 1e-9."""
    for psi in (PI / 3, 1.0, 2.2):
        jet = henon_adapted_jet(psi)
        mult = UnitMultiplier(psi)
        diff = lc_direct(jet, mult).lc - lc_oracle(jet, mult).lc
        assert abs(diff - lc_closed_form(psi)) <= 1e-10
        assert abs(diff) > 1e-9


# ---------------------------------------------------------------------------
# lc_partial_incorrect
# ---------------------------------------------------------------------------


def test_partial_equals_direct_without_quadratic_terms():
    mult = UnitMultiplier(1.9)
    jet = jet_from_terms(3, {(1, 0): mult.nu, (2, 1): 0.5, (3, 0): 1j})
    assert abs(lc_partial_incorrect(jet, mult).lc - lc_direct(jet, mult).lc) < 1e-14


def test_partial_differs_from_direct_on_quadratic_family():
    psi = PI / 3
    jet = henon_adapted_jet(psi)
    mult = UnitMultiplier(psi)
    partial = lc_partial_incorrect(jet, mult).lc
    assert abs(partial - lc_direct(jet, mult).lc) > 1e-6
    assert abs(partial) <= 1e-12  # the half-composition reads 0 here


def test_partial_identical_to_oracle_in_resonant_slot():
    """The (2,1) coefficient of tr o F equals that of tr o F o tr^{-1}
    exactly: the omitted tr^{-1} only redistributes nonresonant terms.
    Measured as an identity over random adapted jets."""
    rng = np.random.default_rng(55)
    worst = 0.0
    for _ in range(200):
        psi = _random_regular_psi(rng)
        jet = _random_adapted_jet(rng, psi)
        mult = UnitMultiplier(psi)
        worst = max(
            worst, abs(lc_partial_incorrect(jet, mult).lc - lc_oracle(jet, mult).lc)
        )
    assert worst <= 1e-11


# ---------------------------------------------------------------------------
# radial_check
# ---------------------------------------------------------------------------


def test_radial_check_rotation_is_zero():
    mult = UnitMultiplier(1.2)
    jet = jet_from_terms(3, {(1, 0): mult.nu})
    res = normalize_cubic(normalize_quadratic(jet, mult), mult)
    fit = radial_check(res, mult, [0.01, 0.005])
    assert abs(fit) < 1e-9


def test_radial_check_single_resonant_term():
    psi = 1.2
    mult = UnitMultiplier(psi)
    jet = jet_from_terms(3, {(1, 0): mult.nu, (2, 1): -1.0})
    res = normalize_cubic(normalize_quadratic(jet, mult), mult)
    fit = radial_check(res, mult, [0.01, 0.005])
    want = -math.cos(psi)
    assert abs(fit - want) <= 0.01 * abs(want)


def test_radial_check_agrees_with_oracle_on_random_jets():
    rng = np.random.default_rng(2718)
    for _ in range(25):
        psi = _random_regular_psi(rng)
        mult = UnitMultiplier(psi)
        jet = _random_adapted_jet(rng, psi)
        res = normalize_cubic(normalize_quadratic(jet, mult), mult)
        radii = [0.01, 0.005]
        fit = radial_check(res, mult, radii)
        lc = lc_oracle(jet, mult).lc
        assert abs(fit - lc) <= 5 * abs(lc) * max(radii) + 1e-6


def test_radial_check_quadratic_family_measures_zero():
    """Radial dynamics of the normalized quadratic-family jet: the measured
    cubic coefficient is 0 (not the closed-formula value 0.125).

    The surviving resonant coefficient alpha is purely imaginary here, so
    the fit residue is the quartic term |alpha|^2 r / 2 — it shrinks
    linearly with the probe radius while 0.125 would not.
    """
    psi = PI / 3
    mult = UnitMultiplier(psi)
    jet = henon_adapted_jet(psi)
    res = normalize_cubic(normalize_quadratic(jet, mult), mult)
    alpha = lc_oracle(jet, mult).alpha
    radii = [0.005, 0.0025]
    fit = radial_check(res, mult, radii)
    assert abs(fit) <= abs(alpha) ** 2 * max(radii)
    assert abs(fit - 0.125) > 0.1


def test_radial_check_rejects_bad_radii():
    mult = UnitMultiplier(1.2)
    jet = jet_from_terms(3, {(1, 0): mult.nu})
    res = normalize_cubic(normalize_quadratic(jet, mult), mult)
    with pytest.raises(ValueError):
        radial_check(res, mult, [])
    with pytest.raises(ValueError):
        radial_check(res, mult, [0.5])


# ---------------------------------------------------------------------------
# scale covariance
# ---------------------------------------------------------------------------


def test_scale_covariance_of_both_computations():
    """Rescaling the complex coordinate z -> A z multiplies both lc_direct
    and lc_oracle by |A|^{-2}; in particular the sign never changes."""
    rng = np.random.default_rng(99)
    from bifkit.jets import conjugate

    for _ in range(50):
        psi = _random_regular_psi(rng)
        mult = UnitMultiplier(psi)
        jet = _random_adapted_jet(rng, psi)
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(a) < 0.2:
            continue
        scaled = conjugate(jet, jet_from_terms(3, {(1, 0): a}))
        assert scaled.is_adapted(1e-9)
        for fn in (lc_direct, lc_oracle):
            base = fn(jet, mult).lc
            got = fn(scaled, mult).lc
            assert abs(got - base / abs(a) ** 2) <= 1e-9 * max(1.0, abs(base))
            if abs(base) > 1e-12:
                assert math.copysign(1.0, got) == math.copysign(1.0, base)
