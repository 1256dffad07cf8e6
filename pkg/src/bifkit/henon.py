"""Fixed-point bifurcation analysis of the standard quadratic planar map.

The family under study is ``(X, Y) ↦ (Y, m1 − m2 X − Y²)`` with parameters
``(m1, m2)``.  Its Jacobian determinant is identically ``m2``, so the map is
orientation/area behaved uniformly in phase space: area-contracting for
``|m2| < 1``, area-preserving on ``|m2| = 1``, area-expanding for
``|m2| > 1``.  Fixed points sit on the diagonal at the roots of
``X² + (1+m2) X − m1``; the fixed point with the larger abscissa has a
unit-circle complex pair exactly on the line ``m2 = 1`` for ``m1`` in
``(−1, 3)``, with rotation angle ``psi = arccos(1 − sqrt(1+m1))``.

Module contents: exact map/inverse evaluation, fixed points and their
multipliers, the ``psi ↔ m1`` diffeomorphism on the oscillatory line, the
three bifurcation curves (saddle-node, period-doubling, torus line) and
their meeting points, the exact adapted jet at the elliptic fixed point, the
closed-form Lyapunov-coefficient curve, and scan/diagram table generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .jets import JetError, PlanarJet, UnitMultiplier, jet_from_terms, RealPolynomialMap
from .normalform import (
    LyapunovValue,
    lc_direct,
    lc_oracle,
    lc_partial_incorrect,
)

__all__ = [
    "HenonParams",
    "FixedPointInfo",
    "SaddleNodeBoundaryError",
    "PoleError",
    "apply",
    "inverse",
    "orbit",
    "as_polynomial",
    "fixed_points",
    "psi_from_m1",
    "m1_from_psi",
    "elliptic_multiplier",
    "LociReport",
    "bifurcation_loci",
    "henon_adapted_jet",
    "lc_closed_form",
    "ScanRow",
    "ScanResult",
    "lomega_scan",
    "DiagramData",
    "diagram_data",
]


class SaddleNodeBoundaryError(ValueError):
    """Fixed points requested at or beyond the saddle-node boundary."""


class PoleError(ValueError):
    """Closed-form Lyapunov curve evaluated too close to its pole."""


@dataclass(frozen=True)
class HenonParams:
    """Parameter pair (m1, m2) of the quadratic planar map."""

    m1: float
    m2: float


def apply(p: HenonParams, pt: Sequence[float]) -> np.ndarray:
    """One forward step: (X, Y) ↦ (Y, m1 − m2 X − Y²)."""
    x, y = float(pt[0]), float(pt[1])
    return np.array([y, p.m1 - p.m2 * x - y * y])


def inverse(p: HenonParams, pt: Sequence[float]) -> np.ndarray:
    """Exact inverse step; requires m2 ≠ 0.

    Solving the forward formulas for the preimage gives
    ``Y = X̄`` and ``X = (m1 − Ȳ − X̄²)/m2``.
    """
    if p.m2 == 0.0:
        raise ValueError("inverse undefined at m2 = 0")
    xb, yb = float(pt[0]), float(pt[1])
    return np.array([(p.m1 - yb - xb * xb) / p.m2, xb])


def orbit(p: HenonParams, pt: Sequence[float], n: int) -> np.ndarray:
    """Forward orbit of length n+1 including the seed."""
    out = np.empty((n + 1, 2))
    out[0] = np.asarray(pt, dtype=float)
    for k in range(n):
        out[k + 1] = apply(p, out[k])
    return out


def as_polynomial(p: HenonParams) -> RealPolynomialMap:
    """The map as an exact degree-2 polynomial (for exact jet extraction)."""
    tables = np.zeros((2, 3, 3))
    tables[0, 0, 1] = 1.0
    tables[1, 0, 0] = p.m1
    tables[1, 1, 0] = -p.m2
    tables[1, 0, 2] = -1.0
    return RealPolynomialMap(tables)


@dataclass(frozen=True)
class FixedPointInfo:
    """A fixed point on the diagonal with its multiplier pair."""

    location: np.ndarray = field(repr=False)
    multipliers: tuple[complex, complex]
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("saddle", "node", "focus", "elliptic", "degenerate"):
            raise ValueError(f"unknown fixed-point kind {self.kind!r}")


def _classify(lam: tuple[complex, complex], tol: float = 1e-10) -> str:
    l1, l2 = lam
    if abs(l1.imag) > tol or abs(l2.imag) > tol:
        mod = abs(l1)
        return "elliptic" if abs(mod - 1.0) <= tol else "focus"
    a1, a2 = abs(l1.real), abs(l2.real)
    if abs(a1 - 1.0) <= tol or abs(a2 - 1.0) <= tol:
        return "degenerate"
    if (a1 < 1.0) != (a2 < 1.0):
        return "saddle"
    return "node"


def fixed_points(p: HenonParams) -> dict[str, FixedPointInfo]:
    """Both fixed points, keyed "plus"/"minus" by abscissa.

    The locations are ``X± = (−(1+m2) ± sqrt((1+m2)² + 4 m1))/2`` and the
    multipliers are the roots of ``λ² + 2Xλ + m2``.  A nonpositive
    discriminant means the parameters sit at or beyond the saddle-node
    curve, where the two fixed points collide.
    """
    disc = (1.0 + p.m2) ** 2 + 4.0 * p.m1
    if disc <= 0.0:
        raise SaddleNodeBoundaryError(
            f"(1+m2)^2 + 4 m1 = {disc:.6g} <= 0: at/beyond the saddle-node curve"
        )
    root = math.sqrt(disc)
    out = {}
    for key, x in (("plus", (-(1.0 + p.m2) + root) / 2.0), ("minus", (-(1.0 + p.m2) - root) / 2.0)):
        mdisc = complex(x * x - p.m2)
        sq = np.sqrt(mdisc)
        lam = (complex(-x) + sq, complex(-x) - sq)
        out[key] = FixedPointInfo(
            location=np.array([x, x]),
            multipliers=lam,
            kind=_classify(lam),
        )
    return out


def psi_from_m1(m1: float) -> float:
    """Rotation angle of the elliptic fixed point on the line m2 = 1.

    Defined for −1 < m1 < 3 as ``arccos(1 − sqrt(1 + m1))``; it is the
    inverse of :func:`m1_from_psi` and increases monotonically from 0 to pi.
    """
    if not -1.0 < m1 < 3.0:
        raise ValueError(f"m1 = {m1} outside the oscillatory window (-1, 3)")
    return math.acos(1.0 - math.sqrt(1.0 + m1))


def m1_from_psi(psi: float) -> float:
    """Inverse of :func:`psi_from_m1`: ``m1 = cos²(psi) − 2 cos(psi)``."""
    if not 0.0 < psi < math.pi:
        raise ValueError(f"psi = {psi} outside (0, pi)")
    c = math.cos(psi)
    return c * c - 2.0 * c


def elliptic_multiplier(m1: float) -> UnitMultiplier:
    """The unit multiplier of the elliptic fixed point at (m1, 1)."""
    return UnitMultiplier(psi_from_m1(m1))


@dataclass(frozen=True)
class LociReport:
    """Membership of a parameter point in the bifurcation set.

    ``on_lplus``: saddle-node curve m1 = −(1+m2)²/4.
    ``on_lminus``: period-doubling curve m1 = 3(1+m2)²/4.
    ``on_lomega``: torus line m2 = 1 with −1 < m1 < 3.
    The five flags mark the distinguished meeting points.
    """

    on_lplus: bool
    on_lminus: bool
    on_lomega: bool
    at_bpp: bool
    at_bmm: bool
    at_bpm: bool
    at_c1: bool
    at_c2: bool


def bifurcation_loci(p: HenonParams, tol: float = 1e-10) -> LociReport:
    def near(a: float, b: float) -> bool:
        return abs(a - b) <= tol

    on_lplus = near(p.m1, -((1.0 + p.m2) ** 2) / 4.0)
    on_lminus = near(p.m1, 3.0 * (1.0 + p.m2) ** 2 / 4.0)
    on_lomega = near(p.m2, 1.0) and -1.0 < p.m1 < 3.0
    return LociReport(
        on_lplus=on_lplus,
        on_lminus=on_lminus,
        on_lomega=on_lomega,
        at_bpp=near(p.m1, -1.0) and near(p.m2, 1.0),
        at_bmm=near(p.m1, 3.0) and near(p.m2, 1.0),
        at_bpm=near(p.m1, 0.0) and near(p.m2, -1.0),
        at_c1=near(p.m1, 0.0) and near(p.m2, 1.0),
        at_c2=near(p.m1, 1.25) and near(p.m2, 1.0),
    )


def henon_adapted_jet(psi: float, degree: int = 3) -> PlanarJet:
    """Exact adapted jet of the map at its elliptic fixed point.

    In the deterministic complex coordinate attached to the rotation by
    ``psi`` the map germ is::

        z̃ = nu z + (i nu²/(4s)) z² + (i/(2s)) z z̄ + (i nū²/(4s)) z̄²

    with ``s = sin(psi)``; every cubic coefficient vanishes, in particular
    the resonant (2,1) one.
    """
    if not 0.0 < psi < math.pi:
        raise JetError(f"psi = {psi} outside (0, pi)")
    s = math.sin(psi)
    if s == 0.0:
        raise JetError("sin(psi) = 0")
    nu = complex(math.cos(psi), math.sin(psi))
    return jet_from_terms(
        degree,
        {
            (1, 0): nu,
            (2, 0): 1j * nu**2 / (4.0 * s),
            (1, 1): 1j / (2.0 * s),
            (0, 2): 1j * np.conj(nu) ** 2 / (4.0 * s),
        },
    )


def lc_closed_form(psi: float) -> float:
    """Closed-form Lyapunov curve ``cos ψ / (4(−1+cos ψ)²(1+2cos ψ)²)``.

    It has a simple zero at psi = pi/2 and a double pole at psi = 2*pi/3;
    evaluation within 1e-8 of the pole denominator is refused.
    """
    if not 0.0 < psi < math.pi:
        raise ValueError(f"psi = {psi} outside (0, pi)")
    c = math.cos(psi)
    pole = 1.0 + 2.0 * c
    if abs(pole) < 1e-8:
        raise PoleError(f"|1 + 2 cos psi| = {abs(pole):.2e} too close to the pole")
    return c / (4.0 * (-1.0 + c) ** 2 * pole**2)


@dataclass(frozen=True)
class ScanRow:
    psi: float
    m1: float
    lc_closed: float
    lc_direct: float
    lc_oracle: float
    lc_incorrect: float


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[ScanRow, ...]
    gaps: tuple[float, ...]


RESONANCE_SKIP_MARGIN = 1e-3


def lomega_scan(n: int) -> ScanResult:
    """Scan the torus line: psi grid with all Lyapunov-coefficient variants.

    Uses the midpoint grid ``psi_k = (k + 1/2) pi / n`` and skips nodes
    within 1e-3 rad of the resonances pi/2 and 2*pi/3 (skipped angles are
    reported as gaps).  Each row carries psi, the matching m1, the
    closed-form curve value, and the three jet-based computations applied
    to the exact adapted jet.
    """
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    rows = []
    gaps = []
    for k in range(n):
        psi = (k + 0.5) * math.pi / n
        if any(abs(psi - a) < RESONANCE_SKIP_MARGIN for a in (math.pi / 2, 2 * math.pi / 3)):
            gaps.append(psi)
            continue
        jet = henon_adapted_jet(psi)
        mult = UnitMultiplier(psi)
        rows.append(
            ScanRow(
                psi=psi,
                m1=m1_from_psi(psi),
                lc_closed=lc_closed_form(psi),
                lc_direct=lc_direct(jet, mult).lc,
                lc_oracle=lc_oracle(jet, mult).lc,
                lc_incorrect=lc_partial_incorrect(jet, mult).lc,
            )
        )
    return ScanResult(rows=tuple(rows), gaps=tuple(gaps))


#: The five distinguished meeting points of the bifurcation curves.
DIAGRAM_MARKERS: tuple[tuple[str, float, float], ...] = (
    ("B++", -1.0, 1.0),
    ("B--", 3.0, 1.0),
    ("B+-", 0.0, -1.0),
    ("C1", 0.0, 1.0),
    ("C2", 1.25, 1.0),
)


@dataclass(frozen=True)
class DiagramData:
    """Polyline/marker data for the two-parameter bifurcation diagram.

    Curves are arrays of (m1, m2) samples: the saddle-node parabola
    ``m1 = −(1+m2)²/4``, the period-doubling parabola ``m1 = 3(1+m2)²/4``
    and the torus segment ``m2 = 1, −1 ≤ m1 ≤ 3``.  Markers are the
    distinguished points falling inside the sampled m2 band.
    """

    lplus: np.ndarray = field(repr=False)
    lminus: np.ndarray = field(repr=False)
    lomega: np.ndarray = field(repr=False)
    markers: tuple[tuple[str, float, float], ...]


def diagram_data(
    m2_range: tuple[float, float] = (-1.5, 1.5),
    resolution: int = 200,
) -> DiagramData:
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    lo, hi = float(m2_range[0]), float(m2_range[1])
    if not lo < hi:
        raise ValueError(f"invalid m2 range ({lo}, {hi})")
    m2s = np.linspace(lo, hi, resolution)
    lplus = np.column_stack([-((1.0 + m2s) ** 2) / 4.0, m2s])
    lminus = np.column_stack([3.0 * (1.0 + m2s) ** 2 / 4.0, m2s])
    m1s = np.linspace(-1.0, 3.0, resolution)
    lomega = np.column_stack([m1s, np.ones_like(m1s)])
    markers = tuple(
        (label, m1, m2) for (label, m1, m2) in DIAGRAM_MARKERS if lo <= m2 <= hi
    )
    return DiagramData(lplus=lplus, lminus=lminus, lomega=lomega, markers=markers)
