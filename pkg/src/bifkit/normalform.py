"""Normal-form reduction at an elliptic fixed point and Lyapunov coefficients.

Given an adapted jet ``z̃ = nu z + sum c_pq z^p z̄^q`` with ``nu = exp(i psi)``
on the unit circle, the quadratic change of coordinates

    w = z + sum_{p+q=2} c_pq / (nu - nu**p * conj(nu)**q) * z**p * z̄**q

removes all quadratic terms, and an analogous cubic change removes every
cubic term except the resonant ``(2,1)`` one, whose surviving coefficient is
called ``alpha``.  The real number ``lc = Re(conj(nu) * alpha)`` controls the
leading radial drift ``|ζ̃| = |ζ| + lc |ζ|**3 + O(|ζ|**4)`` of the fully
normalized map: negative means weakly attracting, positive weakly repelling.

Three computations of the coefficient are provided:

* :func:`lc_direct` — a closed-form expression in the quadratic/cubic
  coefficients (no composition is performed);
* :func:`lc_oracle` — the defining computation: conjugate the jet by the
  quadratic change and read the (2,1) coefficient of the result;
* :func:`lc_partial_incorrect` — composes the change with the map but omits
  the inverse factor, i.e. reads the (2,1) coefficient of ``tr ∘ map``
  instead of ``tr ∘ map ∘ tr⁻¹``.  It is retained for comparison studies.
  (At this coefficient order the omission turns out not to matter: the
  (2,1) coefficients of ``tr ∘ map`` and ``tr ∘ map ∘ tr⁻¹`` coincide, so
  this variant agrees with :func:`lc_oracle` identically; the test suite
  pins that down.)

The closed form and the composition disagree for maps with a nonvanishing
quadratic part; the acceptance suite measures the discrepancy rather than
hiding it.  :func:`radial_check` provides the dynamics-level referee: it
evaluates the normalized jet on small circles and fits the actual cubic
radial-drift coefficient, which matches :func:`lc_oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .jets import (
    JetError,
    PlanarJet,
    UnitMultiplier,
    compose,
    conjugate,
    eval_jet,
    identity_jet,
    jet_from_terms,
)

__all__ = [
    "ResonanceError",
    "NormalizationResult",
    "LyapunovValue",
    "quadratic_change",
    "normalize_quadratic",
    "normalize_cubic",
    "lc_direct",
    "lc_oracle",
    "lc_partial_incorrect",
    "radial_check",
]

DEFAULT_RESONANCE_MARGIN = 1e-6
_QUADRATIC = ((2, 0), (1, 1), (0, 2))
_CUBIC_NONRESONANT = ((3, 0), (1, 2), (0, 3))


class ResonanceError(JetError):
    """A normalization divisor ``nu - nu**p * conj(nu)**q`` is too small."""


@dataclass(frozen=True)
class NormalizationResult:
    """A normalized jet together with the coordinate change that produced it.

    ``stage`` is ``"quadratic"`` when quadratic terms have been removed and
    ``"cubic"`` when additionally all nonresonant cubic terms are gone.
    """

    normalized: PlanarJet
    change: PlanarJet
    stage: str

    def __post_init__(self) -> None:
        if self.stage not in ("quadratic", "cubic"):
            raise ValueError(f"unknown normalization stage {self.stage!r}")


@dataclass(frozen=True)
class LyapunovValue:
    """A Lyapunov coefficient: resonant cubic coefficient and its real part.

    ``lc = Re(conj(nu) * alpha)`` always holds; ``method`` records which of
    the three computations produced it.
    """

    alpha: complex
    lc: float
    method: str

    def __post_init__(self) -> None:
        if self.method not in ("direct_formula", "composition_oracle", "partial_incorrect"):
            raise ValueError(f"unknown method {self.method!r}")


def _check_regular(mult: UnitMultiplier, margin: float) -> None:
    if not mult.is_regular(margin):
        raise ResonanceError(
            f"psi = {mult.psi} is within {margin} of a low-order resonance"
        )


def _divisor(nu: complex, p: int, q: int) -> complex:
    return nu - nu**p * np.conj(nu) ** q


def _require_adapted(jet: PlanarJet) -> None:
    if not jet.is_adapted(1e-9):
        raise JetError("jet is not adapted (need c00 = c01 = 0, |c10| = 1)")


def _lv(alpha: complex, nu: complex, method: str) -> LyapunovValue:
    return LyapunovValue(alpha=alpha, lc=float((np.conj(nu) * alpha).real), method=method)


def quadratic_change(
    jet: PlanarJet,
    mult: UnitMultiplier,
    margin: float = DEFAULT_RESONANCE_MARGIN,
) -> PlanarJet:
    """The coordinate change removing the quadratic part of an adapted jet.

    Returns ``tr(z) = z + sum_{p+q=2} c_pq / (nu - nu^p nū^q) z^p z̄^q``.
    Raises :class:`ResonanceError` when a divisor modulus falls below 1e-6
    (the divisor for (0,2) vanishes at psi = 2*pi/3).
    """
    _check_regular(mult, margin)
    _require_adapted(jet)
    nu = mult.nu
    terms: dict[tuple[int, int], complex] = {(1, 0): 1.0}
    for p, q in _QUADRATIC:
        div = _divisor(nu, p, q)
        if abs(div) < 1e-6:
            raise ResonanceError(
                f"divisor nu - nu^{p} conj(nu)^{q} has modulus {abs(div):.2e}"
            )
        terms[(p, q)] = jet.coeff(p, q) / div
    return jet_from_terms(jet.degree, terms)


def normalize_quadratic(
    jet: PlanarJet,
    mult: UnitMultiplier,
    margin: float = DEFAULT_RESONANCE_MARGIN,
) -> NormalizationResult:
    """Remove all quadratic terms by conjugating with the quadratic change."""
    tr = quadratic_change(jet, mult, margin)
    normalized = conjugate(jet, tr)
    return NormalizationResult(normalized=normalized, change=tr, stage="quadratic")


def normalize_cubic(
    result: NormalizationResult,
    mult: UnitMultiplier,
    margin: float = DEFAULT_RESONANCE_MARGIN,
) -> NormalizationResult:
    """Remove the nonresonant cubic terms of a quadratic-stage result.

    Only the resonant (2,1) coefficient survives; it is the alpha whose
    weighted real part is the Lyapunov coefficient.  The combined change
    (cubic after quadratic) is returned so callers can push points through
    the full normalization.
    """
    if result.stage != "quadratic":
        raise ValueError("normalize_cubic expects a quadratic-stage result")
    _check_regular(mult, margin)
    nu = mult.nu
    jet = result.normalized
    terms: dict[tuple[int, int], complex] = {(1, 0): 1.0}
    for p, q in _CUBIC_NONRESONANT:
        div = _divisor(nu, p, q)
        if abs(div) < 1e-6:
            raise ResonanceError(
                f"divisor nu - nu^{p} conj(nu)^{q} has modulus {abs(div):.2e}"
            )
        terms[(p, q)] = jet.coeff(p, q) / div
    tr = jet_from_terms(jet.degree, terms)
    normalized = conjugate(jet, tr)
    combined = compose(tr, result.change)
    return NormalizationResult(normalized=normalized, change=combined, stage="cubic")


def lc_direct(
    jet: PlanarJet,
    mult: UnitMultiplier,
    margin: float = DEFAULT_RESONANCE_MARGIN,
) -> LyapunovValue:
    """Closed-form resonant coefficient from the degree-2/3 jet data.

    Evaluates, with ``nu`` the multiplier and ``nb`` its conjugate::

        alpha = c21
              + |c02|^2 (4 nu - 2 nb^2) / (-2 + nu^3 + nb^3)
              + |c11|^2 (2 - nb) / (-1 + nb)^2
              - c11 c20 (-6 + 2 nu + nb) / (-1 + nu)^2

    and returns ``lc = Re(conj(nu) * alpha)``.  No composition is performed;
    this expression is the toolkit's reference curve generator on the
    Neimark-Sacker line of the Henon family (see :mod:`bifkit.henon`), and
    the suite compares it against the composition-based
    :func:`lc_oracle` rather than assuming they agree.
    """
    _check_regular(mult, margin)
    _require_adapted(jet)
    nu = mult.nu
    nb = np.conj(nu)
    c20 = jet.coeff(2, 0)
    c11 = jet.coeff(1, 1)
    c02 = jet.coeff(0, 2)
    c21 = jet.coeff(2, 1) if jet.degree >= 3 else 0.0
    alpha = (
        c21
        + abs(c02) ** 2 * (4 * nu - 2 * nb**2) / (-2 + nu**3 + nb**3)
        + abs(c11) ** 2 * (2 - nb) / ((-1 + nb) ** 2)
        - c11 * c20 * (-6 + 2 * nu + nb) / ((-1 + nu) ** 2)
    )
    return _lv(complex(alpha), nu, "direct_formula")


def lc_oracle(
    jet: PlanarJet,
    mult: UnitMultiplier,
    margin: float = DEFAULT_RESONANCE_MARGIN,
) -> LyapunovValue:
    """Defining computation: conjugate by the quadratic change, read (2,1).

    Performs :func:`normalize_quadratic` by explicit jet conjugation and
    returns ``Re(conj(nu) * w21)`` where ``w21`` is the (2,1) coefficient of
    the normalized jet.  This is the brute-force referee for
    :func:`lc_direct`.
    """
    res = normalize_quadratic(jet, mult, margin)
    w21 = res.normalized.coeff(2, 1)
    return _lv(w21, mult.nu, "composition_oracle")


def lc_partial_incorrect(
    jet: PlanarJet,
    mult: UnitMultiplier,
    margin: float = DEFAULT_RESONANCE_MARGIN,
) -> LyapunovValue:
    """Half-composed variant: reads the (2,1) coefficient of ``tr ∘ map``.

    Composes the quadratic change with the map but omits the inverse factor
    of the full conjugation.  Kept, clearly labeled, for comparison tables;
    see the module docstring for how it relates to the other two variants.
    """
    tr = quadratic_change(jet, mult, margin)
    half = compose(tr, jet)
    return _lv(half.coeff(2, 1), mult.nu, "partial_incorrect")


def radial_check(
    result: NormalizationResult,
    mult: UnitMultiplier,
    radii: Sequence[float],
    n_angles: int = 256,
) -> float:
    """Fitted cubic radial-drift coefficient of a normalized jet.

    Evaluates the cubic-stage normalized jet on circles of the given radii
    and least-squares fits the constant in
    ``(|ζ̃| - |ζ|) / |ζ|**3 ≈ lc`` over all angle samples.  For a jet of the
    form ``nu ζ + alpha ζ²ζ̄`` the fit converges to ``Re(conj(nu) alpha)``
    as the radii shrink.
    """
    if result.stage != "cubic":
        raise ValueError("radial_check expects a cubic-stage result")
    radii = list(radii)
    if not radii:
        raise ValueError("radii list is empty")
    if any(r <= 0 or r > 0.1 for r in radii):
        raise ValueError("radii must lie in (0, 0.1]")
    samples = []
    angles = 2.0 * math.pi * np.arange(n_angles) / n_angles
    for r in radii:
        zs = r * np.exp(1j * angles)
        imgs = eval_jet(result.normalized, zs)
        samples.append((np.abs(imgs) - r) / r**3)
    return float(np.mean(np.concatenate(samples)))
