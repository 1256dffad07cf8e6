"""Truncated Taylor-jet algebra for planar map germs.

A planar map germ near an elliptic fixed point is represented in one complex
coordinate ``z`` together with its conjugate ``z̄``::

    f(z, z̄) = sum_{0 <= p+q <= degree} c_pq * z**p * conj(z)**q

The class :class:`PlanarJet` stores the coefficient table ``c_pq``; the module
functions implement truncated multiplication, composition, compositional
inversion, and conjugation ``tr ∘ f ∘ tr⁻¹`` — the substrate for every
normal-form computation in :mod:`bifkit.normalform`.

Real-variable germs (two real components in two real variables) are held in
:class:`RealPlanarJet`, produced either exactly from polynomial maps or by
finite differences (:func:`extract_real_jet`), and converted to an adapted
complex jet with :func:`complex_adapt` when the linearization has a complex
pair of multipliers on the unit circle.

All jets are immutable values: every operation returns a fresh jet and never
mutates its inputs, so everything here is safe to call concurrently.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "JetError",
    "DegreeMismatchError",
    "NonzeroConstantTermError",
    "SingularLinearPartError",
    "EllipticityError",
    "UnitMultiplier",
    "PlanarJet",
    "RealPlanarJet",
    "RealPolynomialMap",
    "jet_from_terms",
    "identity_jet",
    "zero_jet",
    "jet_mul",
    "conj_jet",
    "compose",
    "invert",
    "conjugate",
    "eval_jet",
    "jet_to_json",
    "jet_from_json",
    "extract_real_jet",
    "complex_adapt",
]

#: Angles at which the quadratic/cubic normal-form divisors degenerate.
RESONANT_ANGLES = (math.pi / 2.0, 2.0 * math.pi / 3.0)


class JetError(ValueError):
    """Base error for jet-algebra precondition violations."""


class DegreeMismatchError(JetError):
    """Two jets entering a binary operation have different degrees."""


class NonzeroConstantTermError(JetError):
    """Inner jet of a composition must vanish at the origin."""


class SingularLinearPartError(JetError):
    """The real-linear part z ↦ a z + b z̄ is not invertible (|a| = |b|)."""


class EllipticityError(JetError):
    """A linearization expected to have a unit-circle complex pair does not."""


# ---------------------------------------------------------------------------
# multipliers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitMultiplier:
    """A unit-modulus multiplier ``nu = exp(i psi)`` with ``psi`` in (0, pi).

    ``psi`` is the rotation angle of the linear part at the fixed point;
    ``nu`` is constructed from it so that ``|nu| = 1`` holds exactly.
    The multiplier is *regular* when ``psi`` is bounded away from the
    low-order resonances pi/2 (fourth root) and 2*pi/3 (third root), where
    the quadratic/cubic normalization divisors degenerate.
    """

    psi: float

    def __post_init__(self) -> None:
        if not 0.0 < self.psi < math.pi:
            raise JetError(f"psi must lie in (0, pi), got {self.psi}")

    @property
    def nu(self) -> complex:
        return complex(math.cos(self.psi), math.sin(self.psi))

    def is_regular(self, margin: float = 1e-6) -> bool:
        return all(abs(self.psi - a) >= margin for a in RESONANT_ANGLES)


# ---------------------------------------------------------------------------
# complex jets
# ---------------------------------------------------------------------------


def _empty(degree: int) -> np.ndarray:
    return np.zeros((degree + 1, degree + 1), dtype=complex)


@dataclass(frozen=True)
class PlanarJet:
    """Immutable triangular table of complex coefficients ``c[p, q]``.

    ``c[p, q]`` multiplies ``z**p * conj(z)**q``; entries with
    ``p + q > degree`` are identically zero.  An *adapted* jet additionally
    has ``c[0,0] = 0``, ``c[0,1] = 0`` and ``|c[1,0]| = 1``: the germ of a
    map fixing the origin whose linear part is the rotation by ``c[1,0]``.
    """

    degree: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.degree not in (1, 2, 3, 4):
            raise JetError(f"unsupported jet degree {self.degree}")
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.degree + 1, self.degree + 1):
            raise JetError(
                f"coefficient table shape {c.shape} does not match degree {self.degree}"
            )
        for p in range(self.degree + 1):
            for q in range(self.degree + 1):
                if p + q > self.degree and c[p, q] != 0:
                    raise JetError("coefficient outside the triangular table is nonzero")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    # -- accessors ----------------------------------------------------------

    def coeff(self, p: int, q: int) -> complex:
        return complex(self.coeffs[p, q])

    @property
    def linear(self) -> tuple[complex, complex]:
        """The pair (c10, c01) describing the real-linear part z ↦ c10 z + c01 z̄."""
        return self.coeff(1, 0), self.coeff(0, 1)

    def is_adapted(self, tol: float = 1e-12) -> bool:
        c10, c01 = self.linear
        return (
            abs(self.coeff(0, 0)) <= tol
            and abs(c01) <= tol
            and abs(abs(c10) - 1.0) <= tol
        )

    def max_order_norm(self, order: int) -> float:
        """Largest coefficient modulus among terms of total degree ``order``."""
        return max(
            (abs(self.coeffs[p, order - p]) for p in range(order + 1)),
            default=0.0,
        )


def jet_from_terms(degree: int, terms: Mapping[tuple[int, int], complex]) -> PlanarJet:
    """Build a jet from a sparse ``{(p, q): coefficient}`` mapping."""
    c = _empty(degree)
    for (p, q), v in terms.items():
        if p < 0 or q < 0 or p + q > degree:
            raise JetError(f"term ({p},{q}) outside degree-{degree} table")
        c[p, q] = v
    return PlanarJet(degree, c)


def identity_jet(degree: int = 3) -> PlanarJet:
    return jet_from_terms(degree, {(1, 0): 1.0})


def zero_jet(degree: int = 3) -> PlanarJet:
    return PlanarJet(degree, _empty(degree))


def _mul_tables(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    out = np.zeros_like(a)
    for p1 in range(degree + 1):
        for q1 in range(degree + 1 - p1):
            v = a[p1, q1]
            if v == 0:
                continue
            for p2 in range(degree + 1 - p1 - q1 + 1):
                for q2 in range(degree + 1 - p1 - q1 - p2 + 1):
                    if p1 + q1 + p2 + q2 > degree or b[p2, q2] == 0:
                        continue
                    out[p1 + p2, q1 + q2] += v * b[p2, q2]
    return out


def jet_mul(f: PlanarJet, g: PlanarJet) -> PlanarJet:
    """Truncated product of two jets of equal degree."""
    if f.degree != g.degree:
        raise DegreeMismatchError(f"degrees {f.degree} != {g.degree}")
    return PlanarJet(f.degree, _mul_tables(f.coeffs, g.coeffs, f.degree))


def conj_jet(f: PlanarJet) -> PlanarJet:
    """Jet of ``conj(f(z, z̄))`` as a function of (z, z̄).

    Conjugating a series swaps the roles of z and z̄, so the coefficient of
    ``z**p z̄**q`` in the result is ``conj(c[q, p])``.
    """
    return PlanarJet(f.degree, np.conj(f.coeffs.T))


def compose(outer: PlanarJet, inner: PlanarJet) -> PlanarJet:
    """Jet of ``outer ∘ inner`` truncated at the common degree.

    ``inner`` is the jet of the new argument in terms of the old one, so the
    substitution replaces z by ``inner`` and z̄ by ``conj(inner)``.
    """
    if outer.degree != inner.degree:
        raise DegreeMismatchError(f"degrees {outer.degree} != {inner.degree}")
    if inner.coeff(0, 0) != 0:
        raise NonzeroConstantTermError("inner jet must have zero constant term")
    deg = outer.degree
    gc = np.conj(inner.coeffs.T)
    one = _empty(deg)
    one[0, 0] = 1.0
    zpow: list[np.ndarray] = [one]
    zbpow: list[np.ndarray] = [one]
    for k in range(1, deg + 1):
        zpow.append(_mul_tables(zpow[k - 1], inner.coeffs, deg))
        zbpow.append(_mul_tables(zbpow[k - 1], gc, deg))
    out = _empty(deg)
    for p in range(deg + 1):
        for q in range(deg + 1 - p):
            v = outer.coeffs[p, q]
            if v == 0:
                continue
            out += v * _mul_tables(zpow[p], zbpow[q], deg)
    return PlanarJet(deg, out)


def invert(f: PlanarJet) -> PlanarJet:
    """Compositional inverse g with ``compose(f, g) = identity`` up to degree.

    The real-linear part z ↦ a z + b z̄ is inverted in closed form
    (w ↦ (ā w − b w̄) / (|a|² − |b|²)); the nonlinear tail is then resolved
    by the contraction iteration g ← L⁻¹(id − N∘g), which terminates exactly
    after ``degree`` passes on a truncated jet.
    """
    a, b = f.linear
    det = abs(a) ** 2 - abs(b) ** 2
    if abs(det) < 1e-14:
        raise SingularLinearPartError(
            f"linear part (c10={a}, c01={b}) has |a|^2 - |b|^2 = {det}"
        )
    if f.coeff(0, 0) != 0:
        raise NonzeroConstantTermError("cannot invert a jet with constant term")
    deg = f.degree

    def linv(t: np.ndarray) -> np.ndarray:
        return (np.conj(a) * t - b * np.conj(t.T)) / det

    nonlin = np.array(f.coeffs)
    nonlin[1, 0] = 0.0
    nonlin[0, 1] = 0.0
    nonlin_jet = PlanarJet(deg, nonlin)
    ident = identity_jet(deg)
    g = PlanarJet(deg, linv(ident.coeffs))
    for _ in range(deg):
        ng = compose(nonlin_jet, g)
        g = PlanarJet(deg, linv(ident.coeffs - ng.coeffs))
    return g


def conjugate(map_jet: PlanarJet, tr: PlanarJet) -> PlanarJet:
    """Jet of the coordinate-changed map ``tr ∘ map ∘ tr⁻¹``.

    If w = tr(z) is the new coordinate, the returned jet sends w to the
    image of the mapped point in the new coordinate.
    """
    return compose(tr, compose(map_jet, invert(tr)))


def eval_jet(f: PlanarJet, z: complex | np.ndarray) -> complex | np.ndarray:
    """Evaluate the jet as a polynomial at complex point(s) z."""
    zz = np.asarray(z, dtype=complex)
    zb = np.conj(zz)
    out = np.zeros_like(zz)
    for p in range(f.degree + 1):
        for q in range(f.degree + 1 - p):
            c = f.coeffs[p, q]
            if c != 0:
                out = out + c * zz**p * zb**q
    if np.isscalar(z) or np.asarray(z).shape == ():
        return complex(out)
    return out


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------


def jet_to_json(f: PlanarJet) -> str:
    """Serialize as ``{"degree": d, "coeffs": {"p,q": [re, im], ...}}``.

    Every in-range coefficient is written (including zeros) with full
    shortest-repr floats, so parsing the string back reproduces the jet
    bit-exactly.
    """
    entries = {}
    for p in range(f.degree + 1):
        for q in range(f.degree + 1 - p):
            v = f.coeffs[p, q]
            entries[f"{p},{q}"] = [v.real, v.imag]
    return json.dumps({"degree": f.degree, "coeffs": entries}, sort_keys=True)


def jet_from_json(text: str) -> PlanarJet:
    data = json.loads(text)
    degree = int(data["degree"])
    c = _empty(degree)
    for key, (re, im) in data["coeffs"].items():
        p_str, q_str = key.split(",")
        c[int(p_str), int(q_str)] = complex(float(re), float(im))
    return PlanarJet(degree, c)


# ---------------------------------------------------------------------------
# real jets and polynomial planar maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealPlanarJet:
    """Degree-``degree`` Taylor tables of a real planar map at a fixed point.

    ``tables[c][k, l]`` multiplies ``x**k * y**l`` in component ``c``; the
    expansion is of the displacement map, so the fixed point sits at the
    origin and the constant terms vanish (within 1e-10).
    """

    degree: int
    tables: np.ndarray = field(repr=False)  # shape (2, degree+1, degree+1)

    def __post_init__(self) -> None:
        t = np.asarray(self.tables, dtype=float)
        if t.shape != (2, self.degree + 1, self.degree + 1):
            raise JetError(f"real jet table shape {t.shape} invalid")
        if max(abs(t[0, 0, 0]), abs(t[1, 0, 0])) > 1e-10:
            raise JetError("real jet must be centered: constant terms exceed 1e-10")
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "tables", t)

    @property
    def jacobian(self) -> np.ndarray:
        return np.array(
            [
                [self.tables[0, 1, 0], self.tables[0, 0, 1]],
                [self.tables[1, 1, 0], self.tables[1, 0, 1]],
            ]
        )


class RealPolynomialMap:
    """A planar map whose components are exact bivariate polynomials.

    Carries its own coefficient tables so that jet extraction can bypass
    finite differences: :meth:`taylor` re-expands the polynomial about any
    center exactly (binomial shift), which is what
    :func:`extract_real_jet` uses when available.
    """

    def __init__(self, tables: np.ndarray):
        t = np.asarray(tables, dtype=float)
        if t.ndim != 3 or t.shape[0] != 2 or t.shape[1] != t.shape[2]:
            raise JetError(f"polynomial table shape {t.shape} invalid")
        self.tables = t
        self.poly_degree = t.shape[1] - 1

    def __call__(self, pt: Sequence[float]) -> np.ndarray:
        x, y = float(pt[0]), float(pt[1])
        xp = np.array([x**k for k in range(self.poly_degree + 1)])
        yp = np.array([y**l for l in range(self.poly_degree + 1)])
        return np.array([xp @ self.tables[0] @ yp, xp @ self.tables[1] @ yp])

    def jacobian(self, pt: Sequence[float]) -> np.ndarray:
        x, y = float(pt[0]), float(pt[1])
        jac = np.zeros((2, 2))
        for c in range(2):
            t = self.tables[c]
            for k in range(self.poly_degree + 1):
                for l in range(self.poly_degree + 1 - k):
                    if t[k, l] == 0:
                        continue
                    if k >= 1:
                        jac[c, 0] += k * t[k, l] * x ** (k - 1) * y**l
                    if l >= 1:
                        jac[c, 1] += l * t[k, l] * x**k * y ** (l - 1)
        return jac

    def taylor(self, center: Sequence[float], degree: int) -> np.ndarray:
        """Exact displacement-map Taylor tables about ``center``.

        Returns shape (2, degree+1, degree+1); the (0,0) entries are the
        residuals ``F(center) − center`` and vanish at a fixed point.
        """
        cx, cy = float(center[0]), float(center[1])
        n = self.poly_degree
        out = np.zeros((2, degree + 1, degree + 1))
        for c in range(2):
            for k in range(n + 1):
                for l in range(n + 1 - k):
                    a = self.tables[c][k, l]
                    if a == 0:
                        continue
                    for r in range(min(k, degree) + 1):
                        for s in range(min(l, degree - r) + 1):
                            out[c, r, s] += (
                                a
                                * math.comb(k, r)
                                * math.comb(l, s)
                                * cx ** (k - r)
                                * cy ** (l - s)
                            )
        out[0, 0, 0] -= cx
        out[1, 0, 0] -= cy
        return out


_STENCILS: dict[int, tuple[tuple[int, float], ...]] = {
    0: ((0, 1.0),),
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
}


def _fd_table(
    map_fn: Callable[[Sequence[float]], Sequence[float]],
    center: np.ndarray,
    degree: int,
    hx: float,
    hy: float,
) -> np.ndarray:
    """Mixed central-difference Taylor tables at one step size (O(h²))."""
    out = np.zeros((2, degree + 1, degree + 1))
    for k in range(degree + 1):
        for l in range(degree + 1 - k):
            acc = np.zeros(2)
            for ox, wx in _STENCILS[k]:
                for oy, wy in _STENCILS[l]:
                    pt = center + np.array([ox * hx, oy * hy])
                    acc = acc + wx * wy * np.asarray(map_fn(pt), dtype=float)
            deriv = acc / (hx**k * hy**l)
            out[:, k, l] = deriv / (math.factorial(k) * math.factorial(l))
    return out


def extract_real_jet(
    map_fn: Callable[[Sequence[float]], Sequence[float]],
    fixed_point: Sequence[float],
    degree: int = 3,
    base_step: float = 1e-4,
) -> RealPlanarJet:
    """Taylor tables of the displacement map at a fixed point.

    Maps exposing a ``taylor(center, degree)`` method (exact polynomial
    maps) use that path directly.  Otherwise the coefficients come from
    mixed central finite differences with a two-level Richardson
    extrapolation; the base step is scaled by the coordinate magnitudes.
    """
    center = np.asarray(fixed_point, dtype=float)
    residual = np.asarray(map_fn(center), dtype=float) - center
    if np.max(np.abs(residual)) > 1e-9:
        raise JetError(
            f"fixed-point residual {np.max(np.abs(residual)):.3e} exceeds 1e-9"
        )
    taylor = getattr(map_fn, "taylor", None)
    if callable(taylor):
        tables = np.asarray(taylor(center, degree), dtype=float)
        tables = tables.copy()
        tables[:, 0, 0] = 0.0
        return RealPlanarJet(degree, tables)

    hx = base_step * max(1.0, abs(center[0]))
    hy = base_step * max(1.0, abs(center[1]))
    if hx == 0.0 or hy == 0.0:
        raise JetError("finite-difference step underflow")
    coarse = _fd_table(map_fn, center, degree, hx, hy)
    fine = _fd_table(map_fn, center, degree, hx / 2.0, hy / 2.0)
    tables = (4.0 * fine - coarse) / 3.0
    for c in range(2):
        tables[c, 0, 0] -= center[c]
    tables[:, 0, 0] = np.where(np.abs(tables[:, 0, 0]) <= 1e-9, 0.0, tables[:, 0, 0])
    return RealPlanarJet(degree, tables)


def complex_adapt(rj: RealPlanarJet, circle_tol: float = 1e-8) -> PlanarJet:
    """Adapted complex jet of a real germ with a unit-circle complex pair.

    The Jacobian must have eigenvalues ``exp(±i psi)`` with psi in (0, pi)
    (complex pair, unit modulus within ``circle_tol``).  The complex
    coordinate is ``z`` with ``point = z v + conj(z v)`` where ``v`` is the
    unit eigenvector of the eigenvalue with positive imaginary part, rotated
    so its first nonzero component is real positive (a deterministic basis
    convention; the Lyapunov-coefficient sign does not depend on it).  The
    result has c01 = 0 and c10 = nu on the unit circle.
    """
    jac = rj.jacobian
    eigvals, eigvecs = np.linalg.eig(jac)
    if np.max(np.abs(eigvals.imag)) < 1e-12:
        raise EllipticityError(f"eigenvalues {eigvals} are not a complex pair")
    idx = int(np.argmax(eigvals.imag))
    nu = complex(eigvals[idx])
    if abs(abs(nu) - 1.0) > circle_tol:
        raise EllipticityError(f"multiplier modulus |{nu}| = {abs(nu)} is off the unit circle")
    v = eigvecs[:, idx].astype(complex)
    v = v / np.linalg.norm(v)
    for comp in v:
        if abs(comp) > 1e-12:
            v = v * (comp.conjugate() / abs(comp))
            break
    basis = np.column_stack([v, np.conj(v)])
    w = np.linalg.inv(basis)[0]  # z = w @ point, with w @ v = 1, w @ conj(v) = 0

    deg = rj.degree
    x_jet = jet_from_terms(deg, {(1, 0): complex(v[0]), (0, 1): complex(np.conj(v[0]))})
    y_jet = jet_from_terms(deg, {(1, 0): complex(v[1]), (0, 1): complex(np.conj(v[1]))})
    one = _empty(deg)
    one[0, 0] = 1.0
    xpow: list[np.ndarray] = [one]
    ypow: list[np.ndarray] = [one]
    for k in range(1, deg + 1):
        xpow.append(_mul_tables(xpow[k - 1], x_jet.coeffs, deg))
        ypow.append(_mul_tables(ypow[k - 1], y_jet.coeffs, deg))
    comp_tables = [_empty(deg), _empty(deg)]
    for c in range(2):
        for k in range(deg + 1):
            for l in range(deg + 1 - k):
                a = rj.tables[c, k, l]
                if a == 0:
                    continue
                comp_tables[c] += a * _mul_tables(xpow[k], ypow[l], deg)
    table = w[0] * comp_tables[0] + w[1] * comp_tables[1]
    table[0, 0] = 0.0
    if abs(table[0, 1]) > 1e-9:
        raise EllipticityError(
            f"adapted jet has residual conjugate-linear term {table[0, 1]}"
        )
    table[0, 1] = 0.0
    return PlanarJet(deg, table)
