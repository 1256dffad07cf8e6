"""Constructive heteroclinic-cycle model with quadratic-map return dynamics.

The model has two saddle fixed points.  Near each saddle the map is exactly
linear: ``(x, y, u) -> (lambda x, gamma y, A u)`` with ``|lambda| < 1 <
|gamma|`` and a strongly contracting block ``A``.  Two global transition
maps connect the saddles: ``global_12`` is exactly affine (a transverse
connection) and ``global_21`` is affine except for one retained quadratic
term in its second component (a quadratic tangency unfolded by the
splitting parameter ``mu1``).  Because every piece is polynomial, the first
return map

    T_ij = (transition 2->1) o (local 2)^j o (transition 1->2) o (local 1)^i

is an exact polynomial of degree 2, and all of its Taylor data is available
without finite differences.

A closed-form parameter dictionary maps ``(mu1, gamma2_scale)`` to the
coefficients ``(m1, m2)`` of a quadratic family ``(x, y) -> (y, m1 - m2 x -
y^2)`` that the return map approaches, after an explicit affine coordinate
change, as ``i, j`` grow along the index window where the contraction and
expansion rates balance.  The module verifies that convergence through
coordinate-invariant quantities only: fixed-point multipliers, their
product (the Jacobian determinant), the sign of the cubic radial
coefficient at tuned elliptic points, and circle-detector verdicts.

Numerical conditioning note: the raw return map acts on coordinates of
size ``gamma1**-i`` with quadratic coefficients of size ``gamma1**(2i) *
gamma2**(2j)``; fixed-point work therefore happens in the rescaled frame
(``_chart_scales``), where every coefficient is O(1).  Reported quantities
are frame-independent.  The parameter dictionary requires cancellation to
relative accuracy ``1/(gamma1**(2i) gamma2**(2j))``, so double-precision
runs refuse products beyond 1e15; the extended mode redoes the dictionary
and the fixed-point solve in 50-digit arithmetic and lifts the cap to 1e28.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Sequence

import mpmath
import numpy as np

from .circles import CircleReport, DetectOptions, detect
from .henon import HenonParams, fixed_points, psi_from_m1
from .jets import RealPolynomialMap, UnitMultiplier, complex_adapt, extract_real_jet
from .normalform import DEFAULT_RESONANCE_MARGIN, lc_direct

__all__ = [
    "CycleModelError",
    "ItineraryError",
    "PrecisionError",
    "TargetBoxError",
    "OrientationError",
    "InadmissibleError",
    "NewtonError",
    "CouplingError",
    "CycleModelConfig",
    "default_config",
    "config_from_toml",
    "ValidationItem",
    "ValidationReport",
    "validate",
    "ReturnSpec",
    "ShilnikovPoint",
    "shilnikov_point",
    "local_map",
    "iterate_local",
    "global_12",
    "global_21",
    "first_return",
    "return_map_polynomial",
    "rescale_params",
    "params_for_target",
    "AdmissibilityReport",
    "admissible",
    "orientation_sign",
    "log_rate_ratio",
    "index_offset",
    "in_index_window",
    "auto_sequence",
    "FixedPointResult",
    "find_fixed_point",
    "reduced_lc_sign",
    "ReturnCircleResult",
    "return_circle",
    "StudyRow",
    "convergence_study",
]

PRECISION_CAP = 1e15
EXTENDED_PRECISION_CAP = 1e28
_EXTENDED_DPS = 50


class CycleModelError(ValueError):
    """Base error for the cycle model."""


class ItineraryError(CycleModelError):
    """An orbit segment left its domain box during a first-return pass.

    ``leg`` is 0 for the local segment at saddle 1 (iterate 0 is the input
    point), 1 for the image under the 1->2 transition, 2 for the local
    segment at saddle 2.
    """

    def __init__(self, leg: int, iterate: int, point: Sequence[float]):
        self.leg = leg
        self.iterate = iterate
        self.point = tuple(float(c) for c in point)
        super().__init__(
            f"itinerary violation at leg {leg}, iterate {iterate}: point {self.point}"
        )


class PrecisionError(CycleModelError):
    """The requested indices exceed the floating-point cancellation budget."""


class TargetBoxError(CycleModelError):
    """Requested target parameters fall outside the dictionary's box."""


class OrientationError(CycleModelError):
    """The orientation sign for the requested indices is -1, not +1."""


class InadmissibleError(CycleModelError):
    """The splitting parameter violates the admissibility inequality."""


class NewtonError(CycleModelError):
    """Fixed-point Newton iteration failed to converge."""


class CouplingError(CycleModelError):
    """Operation requires a configuration with decoupled strong-stable block."""


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class CycleModelConfig:
    """Immutable coefficients of the two-saddle model.

    ``lambda*/gamma*`` are the leading multipliers of the two saddles,
    ``A1/A2`` the strong-stable blocks (row tuples), ``a12..f12`` the affine
    coefficients of the 1->2 transition, ``a21..g21`` those of the 2->1
    transition (``g21`` multiplies the retained quadratic term), the
    ``*in/*out`` constants locate the transition base points in the local
    charts, ``mu1`` is the splitting parameter (the tangency unfolds at
    ``mu1 = 0``), ``delta_dom`` is the half-width of the itinerary boxes
    around the saddles, ``kappa0`` the minimum admissible index, and ``k1``
    the admissibility-gate constant.
    """

    lambda1: float = 0.4
    gamma1: float = 2.0
    lambda2: float = 0.5
    gamma2: float = 2.6
    ss_dim: int = 1
    A1: tuple[tuple[float, ...], ...] | None = None
    A2: tuple[tuple[float, ...], ...] | None = None
    a12: float = -1.0
    b12: float = 0.0
    c12: float = 0.02
    d12: float = 1.0
    e12: float = 0.0
    f12: float = 0.0
    a21: float = 0.0
    b21: float = 1.0
    c21: float = 1.0
    e21: float = 0.0
    f21: float = 0.0
    g21: float = -1.0
    x1in: float = 0.0
    y1out: float = 1.0
    x2in: float = 1.0
    y2out: float = 0.0
    u1in: tuple[float, ...] | None = None
    u2in: tuple[float, ...] | None = None
    mu1: float = 0.0
    delta_dom: float = 2.0
    kappa0: int = 3
    k1: float = 1.0

    def __post_init__(self) -> None:
        if self.ss_dim < 1:
            raise CycleModelError("ss_dim must be >= 1")
        for name in ("A1", "A2"):
            block = getattr(self, name)
            if block is None:
                block = tuple(
                    tuple(0.1 if r == c else 0.0 for c in range(self.ss_dim))
                    for r in range(self.ss_dim)
                )
            else:
                block = tuple(tuple(float(v) for v in row) for row in block)
                if len(block) != self.ss_dim or any(
                    len(row) != self.ss_dim for row in block
                ):
                    raise CycleModelError(f"{name} must be {self.ss_dim}x{self.ss_dim}")
            object.__setattr__(self, name, block)
        for name in ("u1in", "u2in"):
            vec = getattr(self, name)
            vec = (
                tuple(0.0 for _ in range(self.ss_dim))
                if vec is None
                else tuple(float(v) for v in vec)
            )
            if len(vec) != self.ss_dim:
                raise CycleModelError(f"{name} must have length ss_dim = {self.ss_dim}")
            object.__setattr__(self, name, vec)

    @property
    def sigma1(self) -> float:
        return abs(self.lambda1 * self.gamma1)

    @property
    def sigma2(self) -> float:
        return abs(self.lambda2 * self.gamma2)

    @property
    def j12(self) -> float:
        return self.a12 * self.d12 - self.b12 * self.c12

    @property
    def dim(self) -> int:
        return 2 + self.ss_dim

    def is_decoupled(self) -> bool:
        return self.e12 == self.f12 == self.e21 == self.f21 == 0.0


def default_config() -> CycleModelConfig:
    """Verification baseline: transverse connection tuned for fast decay.

    The 1->2 transition uses ``a12 = -1, b12 = 0`` so that the coordinate
    the tangency map squares is fed only through ``c12``; the resulting
    deviation of the rescaled return map from its quadratic limit is then
    proportional to ``c12 * lambda1**i * gamma2**j``, which decays along the
    balanced index window.  (With ``b12 != 0`` the deviation carries a
    ``gamma1**i * lambda2**j`` factor, which does not decay when ``gamma1 *
    lambda2 >= 1`` as here, so convergence would stall.)  ``c12 = 0.02``
    keeps the connection twisted (nonzero 2x2 off-diagonal) while small.
    """
    return CycleModelConfig()


def config_from_toml(path: str) -> CycleModelConfig:
    """Load a configuration from a TOML file (flat keys = field names)."""
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:  # pragma: no cover - version-dependent import
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    if "cycle" in data and isinstance(data["cycle"], dict):
        data = data["cycle"]
    known = {f.name for f in fields(CycleModelConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise CycleModelError(f"unknown config keys: {', '.join(unknown)}")
    kwargs: dict = {}
    for key, value in data.items():
        if key in ("A1", "A2"):
            kwargs[key] = tuple(tuple(float(v) for v in row) for row in value)
        elif key in ("u1in", "u2in"):
            kwargs[key] = tuple(float(v) for v in value)
        elif key in ("ss_dim", "kappa0"):
            kwargs[key] = int(value)
        else:
            kwargs[key] = float(value)
    return CycleModelConfig(**kwargs)


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationItem:
    name: str
    passed: bool
    value: object
    detail: str

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail} (value: {self.value})"


@dataclass(frozen=True)
class ValidationReport:
    items: tuple[ValidationItem, ...]

    @property
    def ok(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def failures(self) -> tuple[str, ...]:
        return tuple(item.name for item in self.items if not item.passed)

    def __str__(self) -> str:
        return "\n".join(str(item) for item in self.items)


def validate(cfg: CycleModelConfig) -> ValidationReport:
    """Check every structural condition; failures are reported, not raised."""
    items: list[ValidationItem] = []

    def add(name: str, passed: bool, value: object, detail: str) -> None:
        items.append(ValidationItem(name, bool(passed), value, detail))

    for which, lam, gam in (
        ("saddle1_multipliers", cfg.lambda1, cfg.gamma1),
        ("saddle2_multipliers", cfg.lambda2, cfg.gamma2),
    ):
        add(
            which,
            0.0 < abs(lam) < 1.0 < abs(gam),
            (lam, gam),
            "0 < |lambda| < 1 < |gamma|",
        )
    add(
        "dissipative_expanding",
        cfg.sigma1 < 1.0 < cfg.sigma2,
        (cfg.sigma1, cfg.sigma2),
        "sigma1 = |lambda1*gamma1| < 1 < sigma2 = |lambda2*gamma2|",
    )
    lam_min = min(abs(cfg.lambda1), abs(cfg.lambda2))
    radius = max(
        float(np.max(np.abs(np.linalg.eigvals(np.array(block)))))
        for block in (cfg.A1, cfg.A2)
    )
    add(
        "strong_stable_radius",
        radius < lam_min,
        (radius, lam_min),
        "spectral radius of A-blocks below min(|lambda1|, |lambda2|)",
    )
    add(
        "P1_quadratic_coefficient",
        cfg.g21 != 0.0,
        cfg.g21,
        "tangency map keeps a genuine quadratic term (g21 != 0)",
    )
    add(
        "P2_transition_jacobian",
        cfg.j12 != 0.0,
        cfg.j12,
        "1->2 transition is a local diffeomorphism (a12*d12 - b12*c12 != 0)",
    )
    add(
        "P3_twist_coefficients",
        cfg.b21 * cfg.c21 != 0.0,
        cfg.b21 * cfg.c21,
        "2->1 transition couples both directions (b21*c21 != 0)",
    )
    add(
        "transversality",
        cfg.d12 != 0.0,
        cfg.d12,
        "expanding direction passes through the tangency (d12 != 0)",
    )
    parities = {
        (pi, pj): orientation_sign(cfg, cfg.kappa0 + 1 + pi, cfg.kappa0 + 1 + pj)
        for pi in (0, 1)
        for pj in (0, 1)
    }
    add(
        "P4_orientation_realizable",
        any(s == 1 for s in parities.values()),
        parities,
        "some index parity gives orientation sign +1",
    )
    return ValidationReport(tuple(items))


# --------------------------------------------------------------------------
# elementary maps (pure scalar arithmetic so extended-precision values flow)


def _mat_vec(block: tuple[tuple[float, ...], ...], u: Sequence) -> list:
    return [sum(row[c] * u[c] for c in range(len(u))) for row in block]


def _local(cfg: CycleModelConfig, which: int, pt: Sequence, gamma2_eff=None) -> list:
    if which == 1:
        lam, gam, block = cfg.lambda1, cfg.gamma1, cfg.A1
    elif which == 2:
        lam = cfg.lambda2
        gam = cfg.gamma2 if gamma2_eff is None else gamma2_eff
        block = cfg.A2
    else:
        raise CycleModelError(f"saddle index must be 1 or 2, got {which}")
    return [lam * pt[0], gam * pt[1]] + _mat_vec(block, pt[2:])


def _t12(cfg: CycleModelConfig, pt: Sequence) -> list:
    x, y = pt[0], pt[1]
    dy = y - cfg.y1out
    drive = cfg.e12 * x + cfg.f12 * dy
    return [
        cfg.x2in + cfg.a12 * x + cfg.b12 * dy,
        cfg.c12 * x + cfg.d12 * dy,
    ] + [cfg.u2in[r] + drive for r in range(cfg.ss_dim)]


def _t21(cfg: CycleModelConfig, pt: Sequence, mu1=None) -> list:
    x, y = pt[0], pt[1]
    w = y - cfg.y2out
    mu = cfg.mu1 if mu1 is None else mu1
    drive = cfg.e21 * x + cfg.f21 * w
    return [
        cfg.x1in + cfg.a21 * x + cfg.b21 * w,
        mu + cfg.c21 * x + cfg.g21 * w * w,
    ] + [cfg.u1in[r] + drive for r in range(cfg.ss_dim)]


def _check_dim(cfg: CycleModelConfig, pt: Sequence) -> list:
    pt = list(pt)
    if len(pt) != cfg.dim:
        raise CycleModelError(f"point must have {cfg.dim} coordinates, got {len(pt)}")
    return pt


def local_map(cfg: CycleModelConfig, which: int, pt: Sequence[float]) -> np.ndarray:
    """One step of the exactly linear local map at saddle ``which``."""
    return np.array([float(v) for v in _local(cfg, which, _check_dim(cfg, pt))])


def iterate_local(
    cfg: CycleModelConfig, which: int, pt: Sequence[float], k: int
) -> np.ndarray:
    """``k``-fold local iterate, evaluated through exact power laws.

    Returns ``(lambda**k x, gamma**k y, A**k u)``; because the local maps
    are exactly linear this equals ``k`` single steps to machine precision,
    which the test suite checks for k up to 30.
    """
    if k < 0:
        raise CycleModelError("iterate count must be nonnegative")
    pt = _check_dim(cfg, pt)
    lam, gam, block = (
        (cfg.lambda1, cfg.gamma1, cfg.A1)
        if which == 1
        else (cfg.lambda2, cfg.gamma2, cfg.A2)
    )
    if which not in (1, 2):
        raise CycleModelError(f"saddle index must be 1 or 2, got {which}")
    ak = np.linalg.matrix_power(np.array(block), k)
    u = ak @ np.array([float(v) for v in pt[2:]])
    return np.concatenate([[lam**k * pt[0], gam**k * pt[1]], u])


def global_12(cfg: CycleModelConfig, pt: Sequence[float]) -> np.ndarray:
    """Exact affine transition from saddle-1 coordinates to saddle-2 ones."""
    return np.array([float(v) for v in _t12(cfg, _check_dim(cfg, pt))])


def global_21(cfg: CycleModelConfig, pt: Sequence[float]) -> np.ndarray:
    """Transition from saddle 2 back to saddle 1; affine except the
    retained quadratic term ``g21 (y - y2out)**2`` in the second component."""
    return np.array([float(v) for v in _t21(cfg, _check_dim(cfg, pt))])


# --------------------------------------------------------------------------
# return maps


@dataclass(frozen=True)
class ReturnSpec:
    """Indices and tuned parameters for one first-return map.

    ``mu1`` overrides the config splitting parameter and ``gamma2_scale``
    multiplies ``gamma2`` for the dynamics of this return map; together
    they are the two-parameter tuning that the dictionary solves for.
    """

    i: int
    j: int
    mu1: float = 0.0
    gamma2_scale: float = 1.0

    def __post_init__(self) -> None:
        if int(self.i) != self.i or int(self.j) != self.j:
            raise CycleModelError("indices i, j must be integers")
        if self.i < 1 or self.j < 1:
            raise CycleModelError("indices i, j must be positive")


@dataclass(frozen=True)
class ShilnikovPoint:
    """Offsets from the transition base points in saddle-1 coordinates:
    ``xi1 = x - x1in``, ``eta1 = gamma1**i * y - y1out`` (the y-offset after
    the i local steps), ``upsilon1 = u - u1in``."""

    xi1: float
    eta1: float
    upsilon1: tuple[float, ...]


def shilnikov_point(cfg: CycleModelConfig, i: int, pt: Sequence[float]) -> ShilnikovPoint:
    pt = _check_dim(cfg, pt)
    return ShilnikovPoint(
        xi1=float(pt[0] - cfg.x1in),
        eta1=float(cfg.gamma1**i * pt[1] - cfg.y1out),
        upsilon1=tuple(float(pt[2 + r] - cfg.u1in[r]) for r in range(cfg.ss_dim)),
    )


def _check_indices(cfg: CycleModelConfig, spec: ReturnSpec) -> None:
    if spec.i <= cfg.kappa0 or spec.j <= cfg.kappa0:
        raise CycleModelError(
            f"indices ({spec.i}, {spec.j}) must exceed kappa0 = {cfg.kappa0}"
        )


def _in_box(cfg: CycleModelConfig, pt: Sequence) -> bool:
    return all(abs(c) <= cfg.delta_dom for c in pt)


def first_return(
    cfg: CycleModelConfig, spec: ReturnSpec, pt: Sequence[float]
) -> np.ndarray:
    """One pass around the cycle: i local-1 steps, 1->2, j local-2 steps, 2->1.

    Every intermediate point must stay inside the box of half-width
    ``delta_dom`` around the saddle whose chart it lives in; violations
    raise :class:`ItineraryError` naming the leg and iterate.  The local-2
    steps use ``gamma2 * spec.gamma2_scale`` and the final transition uses
    ``spec.mu1``.
    """
    _check_indices(cfg, spec)
    p = _check_dim(cfg, pt)
    if not _in_box(cfg, p):
        raise ItineraryError(0, 0, p)
    for k in range(1, spec.i + 1):
        p = _local(cfg, 1, p)
        if not _in_box(cfg, p):
            raise ItineraryError(0, k, p)
    p = _t12(cfg, p)
    if not _in_box(cfg, p):
        raise ItineraryError(1, 0, p)
    gamma2_eff = cfg.gamma2 * spec.gamma2_scale
    for k in range(1, spec.j + 1):
        p = _local(cfg, 2, p, gamma2_eff=gamma2_eff)
        if not _in_box(cfg, p):
            raise ItineraryError(2, k, p)
    p = _t21(cfg, p, mu1=spec.mu1)
    return np.array([float(v) for v in p])


def _chart_scales(cfg: CycleModelConfig, spec: ReturnSpec):
    """Affine frame in which the planar return map has O(1) coefficients.

    chart: (X, Y) -> (x1in + sx X, gamma1**-i (y1out + sy Y)) with
    sx = -(b21/(g21 d12)) gamma1**-i gamma2eff**-j and
    sy = -(1/(g21 d12**2)) gamma1**-i gamma2eff**-2j.
    """
    g2 = cfg.gamma2 * spec.gamma2_scale
    g1inv_i = (1.0 / cfg.gamma1) ** spec.i
    g2inv_j = (1.0 / g2) ** spec.j
    sx = -(cfg.b21 / (cfg.g21 * cfg.d12)) * g1inv_i * g2inv_j
    sy = -(1.0 / (cfg.g21 * cfg.d12**2)) * g1inv_i * g2inv_j * g2inv_j
    return sx, sy, g1inv_i, g2


def _planar_tables(cfg: CycleModelConfig, spec: ReturnSpec, frame: str):
    """Exact degree-2 coefficient tables of the planar return map.

    ``frame = "raw"`` gives the map in saddle-1 coordinates restricted to
    ``u = u-slaved``; ``frame = "chart"`` conjugates by the affine chart of
    :func:`_chart_scales`.  Tables are nested lists so extended-precision
    scalars pass through unchanged.
    """
    _check_indices(cfg, spec)
    g2 = cfg.gamma2 * spec.gamma2_scale
    L1 = cfg.lambda1**spec.i
    L2 = cfg.lambda2**spec.j
    G2 = g2**spec.j
    g1inv_i = (1.0 / cfg.gamma1) ** spec.i
    if frame == "chart":
        sx, sy, _, _ = _chart_scales(cfg, spec)
        # incoming offsets: x = x1in + sx X, gamma1**i y = y1out + sy Y
        dx_coeff, dy_coeff = sx, sy
        cx0, cy0 = cfg.x1in, cfg.y1out
    elif frame == "raw":
        # x and y are the raw saddle-1 inputs themselves
        dx_coeff, dy_coeff = 1.0, cfg.gamma1**spec.i
        cx0, cy0 = 0.0, 0.0
    else:
        raise CycleModelError(f"unknown frame {frame!r}")

    # after i local-1 steps and the 1->2 transition (xi = lambda1**i x):
    #   x2 = x2in + a12 xi + b12 (eta - y1out), y2 = c12 xi + d12 (eta - y1out)
    # with xi = L1*(cx0 + dx_coeff X), eta - y1out = (cy0 - y1out) + dy_coeff Y
    e0 = cy0 - cfg.y1out  # 0 in the chart frame, -y1out in the raw frame
    x2_0 = cfg.x2in + cfg.a12 * L1 * cx0 + cfg.b12 * e0
    x2_x = cfg.a12 * L1 * dx_coeff
    x2_y = cfg.b12 * dy_coeff
    y2_0 = cfg.c12 * L1 * cx0 + cfg.d12 * e0
    y2_x = cfg.c12 * L1 * dx_coeff
    y2_y = cfg.d12 * dy_coeff
    # after j local-2 steps and into the squared bracket of the 2->1 leg
    w0 = G2 * y2_0 - cfg.y2out
    w1 = G2 * y2_x
    w2 = G2 * y2_y

    xout_0 = cfg.x1in + cfg.a21 * L2 * x2_0 + cfg.b21 * w0
    xout_x = cfg.a21 * L2 * x2_x + cfg.b21 * w1
    xout_y = cfg.a21 * L2 * x2_y + cfg.b21 * w2
    # the constant of the second component loses ~gamma1^-2i gamma2^-2j of
    # its leading digits to cancellation; exact summation keeps the loss to
    # the inputs' own rounding
    pieces = [spec.mu1, cfg.c21 * L2 * x2_0, cfg.g21 * w0 * w0]
    if frame == "chart":
        pieces.append(-cfg.y1out * g1inv_i)
    exact_floats = all(isinstance(piece, float) for piece in pieces)
    yout_const = math.fsum(pieces) if exact_floats else sum(pieces)
    yout_x = cfg.c21 * L2 * x2_x + 2 * cfg.g21 * w0 * w1
    yout_y = cfg.c21 * L2 * x2_y + 2 * cfg.g21 * w0 * w2
    yout_xx = cfg.g21 * w1 * w1
    yout_xy = 2 * cfg.g21 * w1 * w2
    yout_yy = cfg.g21 * w2 * w2

    if frame == "chart":
        sx, sy, _, _ = _chart_scales(cfg, spec)
        fx = 1.0 / sx
        fy = 1.0 / (g1inv_i * sy)
        xout_0 = (xout_0 - cfg.x1in) * fx
        xout_x, xout_y = xout_x * fx, xout_y * fx
        yout_const = yout_const * fy
        yout_x, yout_y = yout_x * fy, yout_y * fy
        yout_xx, yout_xy, yout_yy = yout_xx * fy, yout_xy * fy, yout_yy * fy

    tx = [[xout_0, xout_y, 0.0], [xout_x, 0.0, 0.0], [0.0, 0.0, 0.0]]
    ty = [
        [yout_const, yout_y, yout_yy],
        [yout_x, yout_xy, 0.0],
        [yout_xx, 0.0, 0.0],
    ]
    return [tx, ty]


def return_map_polynomial(
    cfg: CycleModelConfig, spec: ReturnSpec, frame: str = "raw"
) -> RealPolynomialMap:
    """The planar return map as an exact degree-2 polynomial map.

    The planar block of the return dynamics is autonomous (the transition
    templates do not feed ``u`` back into ``(x, y)``), so this restriction
    is exact for every configuration, and its Taylor jets are available
    through the polynomial's exact re-expansion.  ``frame="chart"`` returns
    the O(1)-conditioned rescaled version used for fixed-point work.

    When ``spec`` carries 50-digit values (from the extended dictionary
    solve), the constant terms — which cancel across ~|gamma1^i gamma2^2j|
    of intermediate magnitude — are assembled at 50 digits before the final
    rounding, so the returned double-precision tables are accurate to 1 ulp
    per entry rather than to the cancellation level.
    """
    if isinstance(spec.mu1, float) and isinstance(spec.gamma2_scale, float):
        tables = _planar_tables(cfg, spec, frame)
    else:
        with mpmath.workdps(_EXTENDED_DPS):
            tables = _planar_tables(cfg, spec, frame)
    return RealPolynomialMap(
        np.array([[[float(v) for v in row] for row in comp] for comp in tables])
    )


# --------------------------------------------------------------------------
# parameter dictionary


def orientation_sign(cfg: CycleModelConfig, i: int, j: int) -> int:
    """Sign of the quadratic-family coefficient m2 produced at indices (i,j)."""
    value = (
        -cfg.b21
        * cfg.c21
        * cfg.j12
        * math.copysign(1.0, cfg.lambda1 * cfg.gamma1) ** i
        * math.copysign(1.0, cfg.lambda2 * cfg.gamma2) ** j
    )
    return 1 if value > 0 else -1


def log_rate_ratio(cfg: CycleModelConfig) -> float:
    """log sigma2 / log sigma1 (negative: one rate contracts, one expands)."""
    return math.log(cfg.sigma2) / math.log(cfg.sigma1)


def index_offset(cfg: CycleModelConfig, i: int, j: int) -> float:
    """Balance defect i + log_rate_ratio * j of an index pair."""
    return i + log_rate_ratio(cfg) * j


def in_index_window(cfg: CycleModelConfig, i: int, j: int) -> bool:
    """Whether (i, j) balances contraction against expansion (|offset| <= 1)."""
    return abs(index_offset(cfg, i, j)) <= 1.0


def _precision_product(cfg: CycleModelConfig, spec: ReturnSpec, gamma2_eff) -> float:
    return float(abs(cfg.gamma1 ** (2 * spec.i) * gamma2_eff ** (2 * spec.j)))


def _check_precision(product: float, extended: bool) -> None:
    cap = EXTENDED_PRECISION_CAP if extended else PRECISION_CAP
    if product > cap:
        raise PrecisionError(
            f"|gamma1^(2i) gamma2^(2j)| = {product:.3e} exceeds the "
            f"{'extended ' if extended else ''}cancellation cap {cap:.0e}"
        )


def rescale_params(
    cfg: CycleModelConfig, spec: ReturnSpec, extended: bool = False
) -> HenonParams:
    """Quadratic-family coefficients realized by the return map at ``spec``.

    Closed forms (with gamma2' = gamma2 * gamma2_scale):
      m2 = -b21 c21 J12 (lambda1 gamma1)**i (lambda2 gamma2')**j
      m1 = -d12**2 g21 (mu1 + c21 x2in lambda2**j - y1out gamma1**-i)
           * gamma1**(2i) gamma2'**(2j)

    ``m1`` extracts an exponentially small bracket, hence the cancellation
    cap; ``extended`` evaluates in 50-digit arithmetic and lifts the cap.
    """
    _check_indices(cfg, spec)
    extended = extended or not isinstance(spec.mu1, float)
    if extended:
        with mpmath.workdps(_EXTENDED_DPS):
            g2 = mpmath.mpf(cfg.gamma2) * spec.gamma2_scale
            _check_precision(_precision_product(cfg, spec, g2), extended)
            m2 = (
                -cfg.b21
                * cfg.c21
                * mpmath.mpf(cfg.j12)
                * (cfg.lambda1 * cfg.gamma1) ** spec.i
                * (cfg.lambda2 * g2) ** spec.j
            )
            bracket = (
                mpmath.mpf(spec.mu1)
                + cfg.c21 * cfg.x2in * mpmath.mpf(cfg.lambda2) ** spec.j
                - cfg.y1out * mpmath.mpf(cfg.gamma1) ** (-spec.i)
            )
            m1 = (
                -(cfg.d12**2)
                * cfg.g21
                * bracket
                * mpmath.mpf(cfg.gamma1) ** (2 * spec.i)
                * g2 ** (2 * spec.j)
            )
            return HenonParams(float(m1), float(m2))
    g2 = cfg.gamma2 * spec.gamma2_scale
    _check_precision(_precision_product(cfg, spec, g2), extended)
    m2 = (
        -cfg.b21
        * cfg.c21
        * cfg.j12
        * (cfg.lambda1 * cfg.gamma1) ** spec.i
        * (cfg.lambda2 * g2) ** spec.j
    )
    bracket = math.fsum(
        [
            spec.mu1,
            cfg.c21 * cfg.x2in * cfg.lambda2**spec.j,
            -cfg.y1out * cfg.gamma1 ** (-spec.i),
        ]
    )
    m1 = -(cfg.d12**2) * cfg.g21 * bracket * cfg.gamma1 ** (2 * spec.i) * g2 ** (
        2 * spec.j
    )
    return HenonParams(float(m1), float(m2))


def params_for_target(
    cfg: CycleModelConfig,
    i: int,
    j: int,
    target: HenonParams,
    extended: bool = False,
) -> ReturnSpec:
    """Invert the dictionary: tune (mu1, gamma2_scale) to hit ``target``.

    Requires orientation sign +1 at (i, j) and the target inside the box
    (-2, 4) x (1/2, 3/2).  ``gamma2_scale = (m2 / m2_unscaled)**(1/j)``
    realizes the second parameter direction by moving the expansion rate;
    ``mu1`` then solves the affine m1 relation.  Round-trip accuracy
    through :func:`rescale_params` is set by the representation error of
    the stored ``mu1`` times the gain ``gamma1**(2i) gamma2'**(2j)``:
    when the correction terms ``c21 x2in lambda2**j`` and
    ``y1out gamma1**-i`` cancel (exactly so at i = j under the default
    rates, where lambda2 = 1/gamma1 in binary) the round trip sits at
    machine precision, while unbalanced indices degrade by the ulp of
    the leftover correction difference, up to ~1e-5 at the double cap.
    ``extended`` stores a 50-digit ``mu1`` and removes the limit.
    """
    spec0 = ReturnSpec(i, j)
    _check_indices(cfg, spec0)
    sign = orientation_sign(cfg, i, j)
    if sign != 1:
        raise OrientationError(f"orientation sign at ({i}, {j}) is -1, need +1")
    if not -2.0 < target.m1 < 4.0:
        raise TargetBoxError(f"target m1 = {target.m1} outside (-2, 4)")
    if not 0.5 < target.m2 < 1.5:
        raise TargetBoxError(f"target m2 = {target.m2} outside (1/2, 3/2)")
    if extended:
        with mpmath.workdps(_EXTENDED_DPS):
            m2_unscaled = (
                -cfg.b21
                * cfg.c21
                * mpmath.mpf(cfg.j12)
                * (cfg.lambda1 * cfg.gamma1) ** i
                * (cfg.lambda2 * cfg.gamma2) ** j
            )
            scale = (mpmath.mpf(target.m2) / m2_unscaled) ** (mpmath.mpf(1) / j)
            g2 = cfg.gamma2 * scale
            _check_precision(
                float(abs(mpmath.mpf(cfg.gamma1) ** (2 * i) * g2 ** (2 * j))),
                extended,
            )
            mu1 = (
                mpmath.mpf(target.m1)
                / (
                    -(cfg.d12**2)
                    * cfg.g21
                    * mpmath.mpf(cfg.gamma1) ** (2 * i)
                    * g2 ** (2 * j)
                )
                - cfg.c21 * cfg.x2in * mpmath.mpf(cfg.lambda2) ** j
                + cfg.y1out * mpmath.mpf(cfg.gamma1) ** (-i)
            )
            return ReturnSpec(i, j, mu1=mu1, gamma2_scale=scale)
    m2_unscaled = (
        -cfg.b21
        * cfg.c21
        * cfg.j12
        * (cfg.lambda1 * cfg.gamma1) ** i
        * (cfg.lambda2 * cfg.gamma2) ** j
    )
    scale = (target.m2 / m2_unscaled) ** (1.0 / j)
    g2 = cfg.gamma2 * scale
    _check_precision(abs(cfg.gamma1 ** (2 * i) * g2 ** (2 * j)), extended)
    # the solved bracket is exponentially smaller than the two correction
    # terms it sits between; exact summation keeps mu1's representation
    # error at its own ulp instead of ulp(correction) — sequential adds
    # would cost ulp(correction) * gamma1^(2i) g2^(2j) on the round trip
    mu1 = math.fsum(
        [
            target.m1
            / (-(cfg.d12**2) * cfg.g21 * cfg.gamma1 ** (2 * i) * g2 ** (2 * j)),
            -cfg.c21 * cfg.x2in * cfg.lambda2**j,
            cfg.y1out * cfg.gamma1 ** (-i),
        ]
    )
    return ReturnSpec(i, j, mu1=mu1, gamma2_scale=scale)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    ratio: float
    lhs: float
    rhs: float


def admissible(cfg: CycleModelConfig, spec: ReturnSpec) -> AdmissibilityReport:
    """Gate |mu1 + c21 x2in lambda2**j - y1out gamma1**-i| < k1 (|lambda1**i
    lambda2**j| + |gamma1|**-i); the ratio LHS/RHS quantifies the margin."""
    _check_indices(cfg, spec)
    lhs = abs(
        spec.mu1
        + cfg.c21 * cfg.x2in * cfg.lambda2**spec.j
        - cfg.y1out * cfg.gamma1 ** (-spec.i)
    )
    rhs = cfg.k1 * (
        abs(cfg.lambda1**spec.i * cfg.lambda2**spec.j)
        + abs(cfg.gamma1) ** (-spec.i)
    )
    ratio = float(lhs / rhs)
    return AdmissibilityReport(ratio < 1.0, ratio, float(lhs), float(rhs))


def auto_sequence(
    cfg: CycleModelConfig,
    target: HenonParams,
    j_min: int = 5,
    max_pairs: int = 32,
    extended: bool = False,
) -> list[ReturnSpec]:
    """Balanced index pairs with tuned parameters, up to the precision cap.

    Enumerates i upward, pairs it with j = round(i / |log_rate_ratio|),
    keeps pairs inside the index window with j >= j_min, and tunes each to
    ``target``; enumeration stops at the first pair whose dictionary solve
    exceeds the cancellation cap.
    """
    ratio = abs(log_rate_ratio(cfg))
    specs: list[ReturnSpec] = []
    for i in range(cfg.kappa0 + 1, 193):
        if len(specs) >= max_pairs:
            break
        j = round(i / ratio)
        if j < j_min or j <= cfg.kappa0 or not in_index_window(cfg, i, j):
            continue
        try:
            specs.append(params_for_target(cfg, i, j, target, extended=extended))
        except PrecisionError:
            break
    return specs


# --------------------------------------------------------------------------
# fixed points, reduced dynamics, circles


def _eval_tables(tables, X, Y):
    out = []
    for comp in tables:
        acc = 0.0
        for k in range(3):
            for l in range(3 - k):
                c = comp[k][l]
                if c != 0.0:
                    acc = acc + c * X**k * Y**l
        out.append(acc)
    return out


def _jac_tables(tables, X, Y):
    jac = []
    for comp in tables:
        dX = comp[1][0] + 2 * comp[2][0] * X + comp[1][1] * Y
        dY = comp[0][1] + 2 * comp[0][2] * Y + comp[1][1] * X
        jac.append([dX, dY])
    return jac


def _newton(tables, seed, tol, max_steps=100):
    X, Y = seed
    for step in range(1, max_steps + 1):
        FX, FY = _eval_tables(tables, X, Y)
        rx, ry = FX - X, FY - Y
        if max(abs(rx), abs(ry)) < tol:
            return X, Y, float(max(abs(rx), abs(ry))), step
        (a, b), (c, d) = _jac_tables(tables, X, Y)
        a, d = a - 1.0, d - 1.0
        det = a * d - b * c
        if det == 0.0 or not math.isfinite(float(abs(det))):
            raise NewtonError(f"singular Newton system at step {step}")
        X = X - (d * rx - b * ry) / det
        Y = Y - (-c * rx + a * ry) / det
        if not (math.isfinite(float(abs(X))) and math.isfinite(float(abs(Y)))):
            raise NewtonError(f"Newton iterate diverged at step {step}")
        if max(abs(float(X)), abs(float(Y))) > 1e6:
            raise NewtonError(f"Newton iterate left the search region at step {step}")
    raise NewtonError(f"no convergence in {max_steps} Newton steps")


def _eig2(jac) -> tuple[complex, complex]:
    (a, b), (c, d) = jac
    tr = float(a + d)
    det = float(a * d - b * c)
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        root = math.sqrt(disc)
        return complex((tr + root) / 2.0), complex((tr - root) / 2.0)
    root = math.sqrt(-disc)
    return complex(tr / 2.0, root / 2.0), complex(tr / 2.0, -root / 2.0)


def _sort_pair(pair: Sequence[complex]) -> list[complex]:
    return sorted(pair, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


@dataclass(frozen=True)
class FixedPointResult:
    """Fixed point of a first-return map with its multiplier spectrum.

    ``chart_point`` lives in the rescaled frame (directly comparable with
    the quadratic family's diagonal fixed points), ``point`` in raw
    saddle-1 coordinates including the slaved strong-stable block.
    ``multipliers`` carries the two leading multipliers followed by the
    ``ss_dim`` exact zeros of the strong-stable directions (the transition
    templates forget the incoming ``u``, so those directions die in one
    return).  ``henon_multipliers`` are the reference values at ``params``.
    """

    chart_point: tuple[float, float]
    point: tuple[float, ...]
    multipliers: tuple[complex, ...]
    henon_multipliers: tuple[complex, complex]
    params: HenonParams
    residual: float
    newton_steps: int

    @property
    def leading(self) -> tuple[complex, complex]:
        return self.multipliers[0], self.multipliers[1]

    @property
    def multiplier_error(self) -> float:
        mine = _sort_pair(self.leading)
        ref = _sort_pair(self.henon_multipliers)
        return max(abs(a - b) for a, b in zip(mine, ref))

    @property
    def determinant_error(self) -> float:
        return abs(self.leading[0] * self.leading[1] - self.params.m2)


def find_fixed_point(
    cfg: CycleModelConfig,
    spec: ReturnSpec,
    which: str = "plus",
    tol: float = 1e-12,
) -> FixedPointResult:
    """Locate the return-map fixed point tracking the quadratic family's P±.

    Newton runs on the exact chart-frame polynomial, seeded at the
    diagonal fixed point of the family at ``rescale_params(cfg, spec)``;
    on failure a coarse grid over the chart box reseeds it once.  The
    result is validated by one full :func:`first_return` pass (raising
    :class:`ItineraryError` if the located orbit leaves its boxes).
    """
    if which not in ("plus", "minus"):
        raise CycleModelError(f"which must be 'plus' or 'minus', got {which!r}")
    gate = admissible(cfg, spec)
    if not gate.admissible:
        raise InadmissibleError(
            f"splitting parameter inadmissible: ratio {gate.ratio:.3g} >= 1"
        )
    extended = not isinstance(spec.mu1, float)
    params = rescale_params(cfg, spec, extended=extended)
    ref = fixed_points(params)[which]
    seed = (ref.location[0], ref.location[1])

    def solve():
        tables = _planar_tables(cfg, spec, "chart")
        try:
            X, Y, residual, steps = _newton(tables, seed, tol)
        except NewtonError:
            grid = np.linspace(-2.0, 4.0, 13)
            best, best_r = seed, math.inf
            for gx in grid:
                for gy in grid:
                    FX, FY = _eval_tables(tables, gx, gy)
                    r = max(abs(float(FX - gx)), abs(float(FY - gy)))
                    if r < best_r:
                        best, best_r = (gx, gy), r
            X, Y, residual, steps = _newton(tables, best, tol)
        return X, Y, residual, steps, _eig2(_jac_tables(tables, X, Y))

    if extended:
        tol = min(tol, 1e-24)
        with mpmath.workdps(_EXTENDED_DPS):
            X, Y, residual, steps, leading = solve()
    else:
        X, Y, residual, steps, leading = solve()

    sx, sy, g1inv_i, _ = _chart_scales(cfg, spec)
    raw_x = float(cfg.x1in + sx * X)
    raw_y = float(g1inv_i * (cfg.y1out + sy * Y))
    probe = [raw_x, raw_y] + [0.0] * cfg.ss_dim
    image = first_return(cfg, spec, probe)  # validates the itinerary
    point = (raw_x, raw_y, *(float(v) for v in image[2:]))
    multipliers = tuple(leading) + (0j,) * cfg.ss_dim
    return FixedPointResult(
        chart_point=(float(X), float(Y)),
        point=point,
        multipliers=multipliers,
        henon_multipliers=ref.multipliers,
        params=params,
        residual=residual,
        newton_steps=steps,
    )


def reduced_lc_sign(
    cfg: CycleModelConfig,
    spec: ReturnSpec,
    which: str = "plus",
    margin: float = DEFAULT_RESONANCE_MARGIN,
) -> int:
    """Sign of the cubic radial coefficient at an elliptic return fixed point.

    Requires a decoupled configuration (``{u = 0}`` exactly invariant) and a
    ``spec`` tuned so the leading multipliers lie on the unit circle within
    1e-8 (e.g. via :func:`params_for_target` with the second target
    coefficient equal to 1).  The planar restriction's exact cubic jet is
    taken in the rescaled frame, adapted to complex coordinates, and fed to
    :func:`bifkit.normalform.lc_direct`; the returned sign is invariant
    under the (real-linear) frame choice.
    """
    if not cfg.is_decoupled():
        raise CouplingError("reduced dynamics need e12 = f12 = e21 = f21 = 0")
    fp = find_fixed_point(cfg, spec, which=which)
    lam = fp.leading[0]
    if abs(lam.imag) == 0.0 or abs(abs(lam) - 1.0) > 1e-8:
        raise CycleModelError(
            f"leading multipliers {fp.leading} are not a unit-circle pair"
        )
    psi = abs(math.atan2(lam.imag, lam.real))
    mult = UnitMultiplier(psi)
    poly = return_map_polynomial(cfg, spec, frame="chart")
    jet = complex_adapt(extract_real_jet(poly, fp.chart_point, degree=3))
    value = lc_direct(jet, mult, margin=margin).lc
    if value == 0.0:
        raise CycleModelError("cubic radial coefficient vanished; sign undefined")
    return 1 if value > 0.0 else -1


@dataclass(frozen=True)
class ReturnCircleResult:
    """Circle-detector verdict on a return map plus its period accounting.

    ``tau = i + j + 2`` counts iterates of the underlying map per return
    (each local step and each transition is one iterate in the model)."""

    report: CircleReport
    tau: int
    params: HenonParams
    spec: ReturnSpec


def return_circle(
    cfg: CycleModelConfig,
    spec: ReturnSpec,
    which: str = "plus",
    opts: DetectOptions | None = None,
    margin: float = 0.05,
) -> ReturnCircleResult:
    """Probe a tuned return map for an invariant circle around P±.

    Preconditions: admissible spec, orientation sign +1, realized
    parameters with m1 in (0, 3) away from the strong-resonance value 5/4
    by ``margin``, and m2 = 1 + delta with delta in (0, 0.05].  The
    detector runs on the exact chart-frame polynomial seeded just off the
    fixed point; the verdict is reported as observed.
    """
    if orientation_sign(cfg, spec.i, spec.j) != 1:
        raise OrientationError("orientation sign must be +1 for circle probes")
    gate = admissible(cfg, spec)
    if not gate.admissible:
        raise InadmissibleError(
            f"splitting parameter inadmissible: ratio {gate.ratio:.3g} >= 1"
        )
    params = rescale_params(cfg, spec)
    delta = params.m2 - 1.0
    if not 0.0 < delta <= 0.05:
        raise TargetBoxError(f"m2 = 1 + delta needs delta in (0, 0.05], got {delta:.4g}")
    if not 0.0 < params.m1 < 3.0 or abs(params.m1 - 1.25) < margin:
        raise TargetBoxError(
            f"m1 = {params.m1:.4g} outside (0, 3) or within {margin} of 5/4"
        )
    fp = find_fixed_point(cfg, spec, which=which)
    poly = return_map_polynomial(cfg, spec, frame="chart")
    seed = np.array(fp.chart_point) + np.array([1e-3, 0.0])
    report = detect(poly, seed, opts)
    return ReturnCircleResult(
        report=report, tau=spec.i + spec.j + 2, params=params, spec=spec
    )


@dataclass(frozen=True)
class StudyRow:
    i: int
    j: int
    m1: float
    m2: float
    mult_err: float
    det_err: float
    lc_sign: int
    circle_verdict: str
    tau: int


def convergence_study(
    cfg: CycleModelConfig,
    target: HenonParams,
    j_min: int = 5,
    which: str = "plus",
    opts: DetectOptions | None = None,
    extended: bool = False,
) -> list[StudyRow]:
    """Coordinate-invariant convergence diagnostics along the auto sequence.

    For each balanced index pair tuned to ``target``: the leading
    multipliers against the quadratic family's reference pair, their
    product against m2, the radial-coefficient sign at the unit-circle
    tuning of the same m1, and the circle-detector verdict at the target
    itself (recorded verbatim, whatever it is).
    """
    rows: list[StudyRow] = []
    for spec in auto_sequence(cfg, target, j_min=j_min, extended=extended):
        fp = find_fixed_point(cfg, spec, which=which)
        ns_spec = params_for_target(
            cfg, spec.i, spec.j, HenonParams(target.m1, 1.0), extended=extended
        )
        sign = reduced_lc_sign(cfg, ns_spec, which=which)
        delta = target.m2 - 1.0
        if 0.0 < delta <= 0.05:
            verdict = return_circle(cfg, spec, which=which, opts=opts).report.verdict
        else:
            verdict = "not_applicable"
        rows.append(
            StudyRow(
                i=spec.i,
                j=spec.j,
                m1=fp.params.m1,
                m2=fp.params.m2,
                mult_err=fp.multiplier_error,
                det_err=fp.determinant_error,
                lc_sign=sign,
                circle_verdict=verdict,
                tau=spec.i + spec.j + 2,
            )
        )
    return rows
